#include "besovkit/extend.hpp"

#include <algorithm>
#include <cmath>

#include "besovkit/median.hpp"

namespace besovkit {

ExtensionParams ExtensionParams::resolved(const SmoothnessParams& sp) const {
    sp.validate();
    ExtensionParams out = *this;
    const double s = sp.s;
    const double pq = std::min(sp.p, sp.q);
    if (!out.delta) out.delta = (1.0 - s) / 2.0;
    if (!out.eps_prime) out.eps_prime = s / 2.0;
    if (!out.t_inner) out.t_inner = pq / 2.0;
    if (!(*out.delta > 0.0 && *out.delta < 1.0 - s)) throw ConfigError("delta must lie in (0, 1-s)");
    if (!(*out.eps_prime > 0.0 && *out.eps_prime < s)) throw ConfigError("eps_prime must lie in (0, s)");
    if (!(*out.t_inner > 0.0 && *out.t_inner < pq)) throw ConfigError("t_inner must lie in (0, min(p,q))");
    if (!(out.v_radius > 0.0)) throw ConfigError("v_radius must be positive");
    if (!(out.small_threshold > 0.0)) throw ConfigError("small-ball threshold must be positive");
    // Balls outside J keep their doubled copies out of V only when 8 * threshold >= v_radius.
    if (8.0 * out.small_threshold < out.v_radius) throw ConfigError("small-ball threshold must be at least v_radius/8");
    return out;
}

Function local_extend(const Function& u, const SubsetMask& S, const WhitneyCover& cover, const PartitionOfUnity& pou,
                      ExtensionMethod method) {
    const auto& X = S.parent();
    std::vector<double> level(cover.size(), 0.0);
    std::vector<char> in_j(cover.size(), 0);
    for (std::size_t i : cover.small) {
        in_j[i] = 1;
        std::vector<PointId> ids;
        for (PointId y : X.ball(cover.reflected[i], cover.radii[i]))
            if (S.contains(y)) ids.push_back(y);
        if (ids.empty()) throw Error("local_extend: reflected ball misses S");
        if (method == ExtensionMethod::Median) {
            level[i] = median_over(u, X, ids);
        } else {
            double mass = 0.0, acc = 0.0;
            for (PointId y : ids) {
                mass += X.weight(y);
                acc += X.weight(y) * u[y];
            }
            level[i] = acc / mass;
        }
    }
    Function out(X.size(), 0.0);
    for (PointId x = 0; x < X.size(); ++x) {
        if (S.contains(x)) {
            out[x] = u[x];
            continue;
        }
        // Where every bump is small the weights sum to 1; anchoring at one level keeps
        // locally constant data exactly constant.
        bool all_small = !pou.at[x].empty();
        for (const auto& e : pou.at[x]) all_small = all_small && in_j[e.ball];
        const double anchor = all_small ? level[pou.at[x].front().ball] : 0.0;
        double acc = 0.0;
        for (const auto& e : pou.at[x])
            if (in_j[e.ball]) acc += e.value * (level[e.ball] - anchor);
        out[x] = anchor + acc;
    }
    return out;
}

GradientSequence extension_gradient(const GradientSequence& gs, const SubsetMask& V, double s, double delta,
                                    double eps_prime, double t_inner) {
    const auto& X = V.parent();
    GradientSequence out(V.count() >= 2 ? dyadic_range(V) : DyadicRange{0, -1}, s, X.size());
    if (gs.range.count() == 0 || out.range.count() == 0) return out;

    std::vector<Function> powered(gs.g.size(), Function(X.size(), 0.0));
    for (std::size_t j = 0; j < gs.g.size(); ++j)
        for (PointId x = 0; x < X.size(); ++x) powered[j][x] = std::pow(gs.g[j][x], t_inner);
    auto G = maximal_function(powered, X);
    for (auto& Gj : G)
        for (double& v : Gj) v = std::pow(v, 1.0 / t_inner);

    for (int k = out.range.kmin; k <= out.range.kmax; ++k) {
        auto& gk = out.at(k);
        for (int j = gs.range.kmin; j <= gs.range.kmax; ++j) {
            const auto& Gj = G[static_cast<std::size_t>(j - gs.range.kmin)];
            double coef = 0.0;
            if (j < k) coef += std::pow(2.0, (j - k) * delta);
            if (j >= k - 6) coef += std::pow(2.0, (k - j) * (s - eps_prime));
            if (coef == 0.0) continue;
            for (PointId x = 0; x < X.size(); ++x)
                if (V.contains(x)) gk[x] += coef * Gj[x];
        }
    }
    return out;
}

int lipschitz_scale(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("lipschitz_scale: L must be positive");
    int k = static_cast<int>(std::ceil(std::log2(L)));
    while (!(L <= std::ldexp(1.0, k))) ++k;
    while (!(std::ldexp(1.0, k - 1) < L)) --k;
    return k;
}

Cutoff cutoff(const SubsetMask& S, double v_radius) {
    if (!(v_radius > 0.0)) throw ConfigError("cutoff: v_radius must be positive");
    Cutoff c;
    const double half = v_radius / 2.0;
    const auto dist = S.distance_to_set();
    c.psi.resize(dist.size());
    for (std::size_t x = 0; x < dist.size(); ++x) c.psi[x] = std::clamp(2.0 - dist[x] / half, 0.0, 1.0);
    c.lipschitz = 1.0 / half;
    c.k_L = lipschitz_scale(c.lipschitz);
    return c;
}

Combined combine_cutoff(const Function& etilde, const GradientSequence& gt, const Cutoff& cut, double s,
                        const MetricMeasureSpace& space) {
    Combined out;
    out.Eu.assign(space.size(), 0.0);
    for (PointId x = 0; x < space.size(); ++x) out.Eu[x] = cut.psi[x] * etilde[x];
    out.gradient = GradientSequence(space.size() >= 2 ? dyadic_range(space) : DyadicRange{0, -1}, s, space.size());
    for (int k = out.gradient.range.kmin; k <= out.gradient.range.kmax; ++k) {
        const double factor = k < cut.k_L ? std::pow(2.0, s * k + 2.0) : std::pow(2.0, k * (s - 1.0)) * cut.lipschitz;
        auto& gk = out.gradient.at(k);
        for (PointId x = 0; x < space.size(); ++x)
            if (cut.psi[x] > 0.0) gk[x] = gt.value(k, x) + factor * std::abs(etilde[x]);
    }
    return out;
}

ExtensionResult extend(const Function& u, const SubsetMask& S, const SmoothnessParams& sp, const ExtensionParams& ep,
                       const GradientSequence* source) {
    const auto& X = S.parent();
    if (u.size() != X.size()) throw ConfigError("extend: function size does not match the space");
    ExtensionResult res;
    res.params = ep.resolved(sp);

    res.cover = whitney_cover(X, S, res.params.small_threshold);
    const auto pou = partition_of_unity(res.cover, X);
    res.Etilde = local_extend(u, S, res.cover, pou, res.params.method);

    const auto dist = S.distance_to_set();
    res.V.assign(X.size(), 0);
    for (PointId x = 0; x < X.size(); ++x) {
        if (dist[x] < res.params.v_radius)
            res.V[x] = 1;
        else
            ++res.outside_v;
    }
    const SubsetMask V(X, res.V);

    res.source_gradient = source ? *source : canonical_gradient(u, S, sp.s);
    res.gradient = extension_gradient(res.source_gradient, V, sp.s, *res.params.delta, *res.params.eps_prime,
                                      *res.params.t_inner);
    res.cut = cutoff(S, res.params.v_radius);
    auto combined = combine_cutoff(res.Etilde, res.gradient, res.cut, sp.s, X);
    res.Eu = std::move(combined.Eu);
    res.final_gradient = std::move(combined.gradient);

    // Restriction identity holds by construction; enforce it bit for bit.
    for (PointId x = 0; x < X.size(); ++x)
        if (S.contains(x) && res.Eu[x] != u[x]) throw Error("extend: restriction identity broken");

    res.validity_tilde = validity_constant(res.Etilde, res.gradient, V, sp.s);
    res.validity_final = validity_constant(res.Eu, res.final_gradient, SubsetMask::all(X), sp.s);
    return res;
}

ExtensionRatios extension_ratios(const ExtensionResult& res, const Function& u, const SubsetMask& S,
                                 const SmoothnessParams& sp) {
    const auto& X = S.parent();
    const SubsetMask V(X, res.V);
    const auto all = SubsetMask::all(X);
    auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? kInf : 0.0); };
    ExtensionRatios r;
    r.tl_gradient = ratio(sequence_norm(res.gradient, V, sp.p, sp.q, SequenceKind::LpLq),
                          sequence_norm(res.source_gradient, S, sp.p, sp.q, SequenceKind::LpLq));
    r.besov_gradient = ratio(sequence_norm(res.gradient, V, sp.p, sp.q, SequenceKind::LqLp),
                             sequence_norm(res.source_gradient, S, sp.p, sp.q, SequenceKind::LqLp));
    r.lp = ratio(lp_norm(res.Etilde, V, sp.p), lp_norm(u, S, sp.p));
    const double nx = lp_norm(res.Eu, all, sp.p) +
                      sequence_norm(canonical_gradient(res.Eu, all, sp.s), all, sp.p, sp.q, SequenceKind::LqLp);
    const double ns = lp_norm(u, S, sp.p) +
                      sequence_norm(canonical_gradient(u, S, sp.s), S, sp.p, sp.q, SequenceKind::LqLp);
    r.besov_norm = ratio(nx, ns);
    return r;
}

}  // namespace besovkit
