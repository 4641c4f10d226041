#include "besovkit/interp.hpp"

#include <algorithm>
#include <cmath>

#include "besovkit/cover.hpp"
#include "besovkit/median.hpp"

namespace besovkit {

Function sharp_maximal(const Function& f, const MetricMeasureSpace& space, double t, double p) {
    if (!(t > 0.0)) throw ConfigError("sharp_maximal: t must be positive");
    const std::size_t n = space.size();
    Function out(n, 0.0);
    std::vector<std::pair<double, PointId>> near(n);
    for (PointId x = 0; x < n; ++x) {
        for (PointId y = 0; y < n; ++y) near[y] = {space.distance(x, y), y};
        std::sort(near.begin(), near.end());
        double acc = 0.0, mass = 0.0, best = 0.0;
        std::size_t i = 0;
        while (i < n) {
            const double d = near[i].first;
            while (i < n && near[i].first == d) {
                const PointId y = near[i++].second;
                acc += space.weight(y) * std::pow(std::abs(f[y] - f[x]), p);
                mass += space.weight(y);
            }
            // B(x,r) is this prefix for r in (d, next]; only radii r >= t count.
            const double next = i < n ? near[i].first : kInf;
            if (next >= t) best = std::max(best, std::pow(acc / mass, 1.0 / p) / std::max(t, d));
        }
        out[x] = best;
    }
    return out;
}

KDecomposition k_decomposition(const Function& f, const MetricMeasureSpace& space, double t, double p) {
    if (!(t > 0.0)) throw ConfigError("k_decomposition: t must be positive");
    const std::size_t n = space.size();
    KDecomposition out;
    out.radius = t / 6.0;

    // Maximal t/6-separated net; the open balls B(x_i, t/6) cover the space.
    for (PointId x = 0; x < n; ++x) {
        bool free = true;
        for (PointId c : out.centers)
            if (space.distance(x, c) < out.radius) {
                free = false;
                break;
            }
        if (free) out.centers.push_back(x);
    }
    const std::vector<double> radii(out.centers.size(), out.radius);
    const auto pou = tent_partition(space, out.centers, radii, std::vector<char>(n, 1));

    std::vector<double> level(out.centers.size());
    for (std::size_t i = 0; i < out.centers.size(); ++i)
        level[i] = median_over(f, space, space.ball(out.centers[i], out.radius));

    std::vector<std::size_t> count(n, 0);
    for (PointId c : out.centers) space.for_each_in_ball(c, 2.0 * out.radius, [&](PointId y, double) { ++count[y]; });
    out.overlap = *std::max_element(count.begin(), count.end());

    out.h.assign(n, 0.0);
    out.g.assign(n, 0.0);
    for (PointId x = 0; x < n; ++x) {
        // sum phi_i = 1, so h = f + sum phi_i (m_i - f); exact zeros when f is locally constant
        double acc = 0.0;
        for (const auto& e : pou.at[x]) acc += e.value * (level[e.ball] - f[x]);
        out.h[x] = f[x] + acc;
        out.g[x] = -acc;
    }
    out.H = sharp_maximal(f, space, t, p);

    for (PointId x = 0; x < n; ++x)
        for (PointId y = x + 1; y < n; ++y) {
            const double diff = std::abs(out.h[x] - out.h[y]);
            if (diff == 0.0) continue;
            const double bound = space.distance(x, y) * (out.H[x] + out.H[y]);
            out.h_validity = std::max(out.h_validity, bound > 0.0 ? diff / bound : kInf);
        }
    return out;
}

double overlap_density(const MetricMeasureSpace& space, double t) {
    std::vector<double> mu(space.size());
    for (PointId x = 0; x < space.size(); ++x) mu[x] = space.ball_measure(x, t);
    double best = 0.0;
    for (PointId y = 0; y < space.size(); ++y) {
        double acc = 0.0;
        space.for_each_in_ball(y, t, [&](PointId x, double) { acc += space.weight(x) / mu[x]; });
        best = std::max(best, acc);
    }
    return best;
}

double lower_constant(const MetricMeasureSpace& space, double t, double p) {
    const double D = overlap_density(space, t);
    if (p >= 1.0) return 1.0 + std::pow(D, 1.0 / p);
    return std::pow(2.0, 1.0 / p - 1.0) * std::pow(1.0 + D, 1.0 / p);
}

KProfile k_profile(const Function& f, const MetricMeasureSpace& space, double p, const std::vector<double>& t_grid) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("k_profile: p must be positive and finite");
    const auto all = SubsetMask::all(space);
    const double diam = space.diameter();
    const double pt = std::min(p, 1.0);
    // Once 2^k t exceeds the diameter every ball is the whole space and E_p is constant.
    const double e_far = ep_modulus(f, space, 2.0 * diam + 1.0, p);

    KProfile prof;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw ConfigError("k_profile: scales must be positive");
        const double ep = ep_modulus(f, space, t, p);
        const auto dec = k_decomposition(f, space, t, p);
        const double gp = lp_norm(dec.g, all, p), Hp = lp_norm(dec.H, all, p);

        double acc = 0.0;
        int k = 0;
        for (; std::ldexp(t, k) <= diam; ++k) acc += std::pow(2.0, -k * pt) * std::pow(ep_modulus(f, space, std::ldexp(t, k), p), pt);
        acc += std::pow(e_far, pt) * std::pow(2.0, -k * pt) / (1.0 - std::pow(2.0, -pt));

        prof.t.push_back(t);
        prof.ep.push_back(ep);
        prof.lower.push_back(ep / lower_constant(space, t, p));
        prof.achieved.push_back(gp + t * Hp);
        // Hp = 0 means H vanishes, so h is certified only when it is constant
        prof.certified.push_back(Hp > 0.0 ? gp + t * std::max(1.0, dec.h_validity) * Hp
                                          : (dec.h_validity > 0.0 ? kInf : gp));
        prof.upper.push_back(std::pow(acc, 1.0 / pt));
        prof.overlap.push_back(dec.overlap);
    }
    return prof;
}

double interpolation_norm(const Function& f, const MetricMeasureSpace& space, double s, double p, double q,
                          const TGrid& grid) {
    const auto prof = k_profile(f, space, p, grid.t);
    return t_integral(prof.achieved, grid, s, q);
}

EmbeddingCheck lorentz_embedding_check(const Function& u, const SubsetMask& S, double s, double p, double q, double Q) {
    if (!(s > 0.0 && s < 1.0) || !(p > 0.0) || !(q > 0.0)) throw ConfigError("embedding: invalid parameters");
    if (!(s * p < Q)) throw ConfigError("supercritical; embedding check not applicable");
    EmbeddingCheck out;
    out.p_star = Q * p / (Q - s * p);
    out.nesting_bound = std::isinf(q) ? 1.0 : std::pow(q / out.p_star, 1.0 / q);

    double lo = kInf, hi = -kInf;
    for (PointId x : S.member_ids()) {
        lo = std::min(lo, u[x]);
        hi = std::max(hi, u[x]);
    }
    auto minimize = [&](double qq, double& c_best) {
        auto cost = [&](double c) {
            Function v(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - c;
            return lorentz_norm(v, S, out.p_star, qq);
        };
        const std::size_t m = out.scan;
        std::vector<double> cand(m), val(m);
        std::size_t arg = 0;
        for (std::size_t i = 0; i < m; ++i) {
            cand[i] = m > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1) : lo;
            val[i] = cost(cand[i]);
            if (val[i] < val[arg]) arg = i;
        }
        double a = cand[arg == 0 ? 0 : arg - 1], b = cand[std::min(arg + 1, m - 1)];
        double best = val[arg];
        c_best = cand[arg];
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(c_best)); ++it) {
            const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
            const double f1 = cost(x1), f2 = cost(x2);
            if (f1 < best) best = f1, c_best = x1;
            if (f2 < best) best = f2, c_best = x2;
            if (f1 < f2)
                b = x2;
            else
                a = x1;
        }
        return best;
    };
    double c_weak = 0.0;
    out.lhs = minimize(q, out.c_best);
    out.lhs_weak = minimize(kInf, c_weak);
    {
        Function v(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - out.c_best;
        out.lhs_weak = std::min(out.lhs_weak, lorentz_norm(v, S, out.p_star, kInf));
    }

    const auto canon = canonical_gradient(u, S, s);
    out.rhs = sequence_norm(canon, S, p, q, SequenceKind::LqLp);
    out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : (out.lhs > 0.0 ? kInf : 0.0);
    return out;
}

}  // namespace besovkit
