#include "besovkit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "besovkit/convex.hpp"
#include "besovkit/median.hpp"

namespace besovkit {

void SmoothnessParams::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("smoothness s must lie in (0,1)");
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("integrability p must be positive and finite");
    if (!(q > 0.0)) throw ConfigError("summability q must be positive");
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("inner exponent r must be positive");
}

// ---------------------------------------------------------------------------
// dyadic scales and gradients

namespace {

DyadicRange range_from_extremes(double diam, double sep) {
    return {annulus_index(diam), annulus_index(sep)};
}

double lq_combine(double acc, double v, double q) {
    return std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q);
}

double lq_finish(double acc, double q) { return std::isinf(q) ? acc : std::pow(acc, 1.0 / q); }

}  // namespace

DyadicRange dyadic_range(const MetricMeasureSpace& space) {
    if (space.size() < 2) throw ConfigError("dyadic_range: need at least two points");
    return range_from_extremes(space.diameter(), space.min_separation());
}

DyadicRange dyadic_range(const SubsetMask& S) {
    const auto ids = S.member_ids();
    if (ids.size() < 2) throw ConfigError("dyadic_range: need at least two points");
    const auto& X = S.parent();
    double diam = 0.0, sep = kInf;
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const double d = X.distance(ids[a], ids[b]);
            diam = std::max(diam, d);
            sep = std::min(sep, d);
        }
    return range_from_extremes(diam, sep);
}

GradientSequence::GradientSequence(DyadicRange r, double smooth, std::size_t points)
    : range(r), s(smooth), g(r.count(), Function(points, 0.0)) {}

GradientSequence canonical_gradient(const Function& u, const SubsetMask& S, double s) {
    const auto& X = S.parent();
    const auto ids = S.member_ids();
    if (ids.size() < 2) return GradientSequence({0, -1}, s, X.size());
    GradientSequence out(dyadic_range(S), s, X.size());
    for (std::size_t a = 0; a < ids.size(); ++a) {
        const PointId x = ids[a];
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const PointId y = ids[b];
            const double d = X.distance(x, y);
            const double quotient = std::abs(u[x] - u[y]) / std::pow(d, s);
            auto& gk = out.at(annulus_index(d));
            gk[x] = std::max(gk[x], quotient);
            gk[y] = std::max(gk[y], quotient);
        }
    }
    return out;
}

ValidityReport validity_constant(const Function& f, const GradientSequence& g, const SubsetMask& region, double s) {
    const auto& X = region.parent();
    const auto ids = region.member_ids();
    ValidityReport out;
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const PointId x = ids[a], y = ids[b];
            const double d = X.distance(x, y);
            const int k = annulus_index(d);
            const double diff = std::abs(f[x] - f[y]);
            const double sum = g.value(k, x) + g.value(k, y);
            ++out.pairs;
            if (diff == 0.0) continue;
            if (!(sum > 0.0)) {
                ++out.violations;
                continue;
            }
            out.constant = std::max(out.constant, diff / (std::pow(d, s) * sum));
        }
    }
    return out;
}

double lp_norm(const Function& u, const SubsetMask& S, double p) {
    const auto& X = S.parent();
    double acc = 0.0;
    for (PointId x = 0; x < S.size(); ++x) {
        if (!S.contains(x)) continue;
        if (std::isinf(p))
            acc = std::max(acc, std::abs(u[x]));
        else
            acc += X.weight(x) * std::pow(std::abs(u[x]), p);
    }
    return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

double sequence_norm(const GradientSequence& g, const SubsetMask& S, double p, double q, SequenceKind kind) {
    const auto& X = S.parent();
    if (kind == SequenceKind::LpLq) {
        double acc = 0.0;
        for (PointId x = 0; x < S.size(); ++x) {
            if (!S.contains(x)) continue;
            double inner = 0.0;
            for (const auto& gk : g.g) inner = lq_combine(inner, gk[x], q);
            acc += X.weight(x) * std::pow(lq_finish(inner, q), p);
        }
        return std::pow(acc, 1.0 / p);
    }
    double acc = 0.0;
    for (const auto& gk : g.g) acc = lq_combine(acc, lp_norm(gk, S, p), q);
    return lq_finish(acc, q);
}

// ---------------------------------------------------------------------------
// convex-program infima

namespace {

struct Edge {
    PointId a, b;
    double c;
};

struct GradientSolution {
    double objective = 0.0;  // sum w G^p
    Function G;              // on the parent space, zero off the edges
};

// min sum w_x G_x^p  s.t.  G_a + G_b >= c_e,  G >= 0.
GradientSolution solve_gradient_program(const MetricMeasureSpace& X, const std::vector<Edge>& edges, double p) {
    GradientSolution out;
    out.G.assign(X.size(), 0.0);
    std::vector<Edge> active;
    for (const auto& e : edges)
        if (e.c > 0.0) active.push_back(e);
    if (active.empty()) return out;

    std::vector<PointId> vars;
    for (const auto& e : active) {
        vars.push_back(e.a);
        vars.push_back(e.b);
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    auto slot = [&](PointId x) {
        return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), x) - vars.begin());
    };

    ConvexProgram prog(vars.size());
    double cmax = 0.0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const double w = X.weight(vars[i]);
        if (p == 1.0) {
            prog.linear[i] = w;
        } else {
            prog.power_coef[i] = w;
            prog.power_exp[i] = p;
        }
        prog.rows.push_back({{{i, 1.0}}, 0.0});
    }
    for (const auto& e : active) {
        prog.rows.push_back({{{slot(e.a), 1.0}, {slot(e.b), 1.0}}, e.c});
        cmax = std::max(cmax, e.c);
    }
    const auto res = solve_barrier(prog, std::vector<double>(vars.size(), cmax));
    if (!res.converged) throw Error("infimum_gradient: barrier method did not converge");
    for (std::size_t i = 0; i < vars.size(); ++i) out.G[vars[i]] = res.z[i];
    out.objective = res.objective;
    return out;
}

}  // namespace

InfimumResult infimum_gradient(const Function& u, const SubsetMask& S, const SmoothnessParams& params, NormKind kind,
                               std::size_t cap) {
    params.validate();
    const double p = params.p, q = params.q;
    const bool convex = p >= 1.0 && (kind == NormKind::HajlaszSp || q == p || std::isinf(q));
    if (!convex) throw ConfigError("oracle limited to convex range");
    if (S.count() > cap) throw ConfigError("infimum_gradient: instance exceeds the oracle size cap");

    const auto& X = S.parent();
    const auto ids = S.member_ids();
    InfimumResult out;
    if (ids.size() < 2) {
        out.gradient = GradientSequence({0, -1}, params.s, X.size());
        return out;
    }
    const DyadicRange range = dyadic_range(S);
    out.gradient = GradientSequence(range, params.s, X.size());

    std::vector<std::vector<Edge>> by_scale(range.count());
    std::vector<Edge> all;
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const double d = X.distance(ids[a], ids[b]);
            const Edge e{ids[a], ids[b], std::abs(u[ids[a]] - u[ids[b]]) / std::pow(d, params.s)};
            by_scale[static_cast<std::size_t>(annulus_index(d) - range.kmin)].push_back(e);
            all.push_back(e);
        }

    const bool single = kind == NormKind::HajlaszSp || (kind == NormKind::TriebelLizorkin && std::isinf(q));
    if (single) {
        auto sol = solve_gradient_program(X, all, p);
        for (auto& gk : out.gradient.g) gk = sol.G;
        out.value = std::pow(sol.objective, 1.0 / p);
        return out;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < by_scale.size(); ++i) {
        auto sol = solve_gradient_program(X, by_scale[i], p);
        out.gradient.g[i] = std::move(sol.G);
        if (std::isinf(q))
            acc = std::max(acc, std::pow(sol.objective, 1.0 / p));
        else
            acc += sol.objective;
    }
    out.value = std::isinf(q) ? acc : std::pow(acc, 1.0 / p);
    return out;
}

// ---------------------------------------------------------------------------
// reports

void NormReport::set(const std::string& name, double v) {
    for (auto& [k, val] : values)
        if (k == name) {
            val = v;
            return;
        }
    values.emplace_back(name, v);
}

double NormReport::get(const std::string& name) const {
    for (const auto& [k, v] : values)
        if (k == name) return v;
    throw Error("NormReport: no value named " + name);
}

bool NormReport::has(const std::string& name) const {
    return std::any_of(values.begin(), values.end(), [&](const auto& kv) { return kv.first == name; });
}

NormReport hajlasz_norms(const Function& u, const SubsetMask& S, const SmoothnessParams& params,
                         const HajlaszOptions& options) {
    params.validate();
    NormReport rep;
    rep.params = params;
    rep.points = S.count();
    if (S.parent().is_grid()) rep.spacing = S.parent().lattice()->spacing;

    const double lp = lp_norm(u, S, params.p);
    const auto canon = canonical_gradient(u, S, params.s);
    rep.range = canon.range;
    const double m_up = sequence_norm(canon, S, params.p, params.q, SequenceKind::LpLq);
    const double n_up = sequence_norm(canon, S, params.p, params.q, SequenceKind::LqLp);
    rep.set("Lp", lp);
    rep.set("M_upper", m_up);
    rep.set("N_upper", n_up);
    rep.set("M_inhom_upper", lp + m_up);
    rep.set("N_inhom_upper", lp + n_up);

    if (options.padded) {
        // g'_k = g_k for k > 0 and 2^{(k+1)s}|u| for k <= 0
        GradientSequence padded = canon;
        for (int k = padded.range.kmin; k <= std::min(0, padded.range.kmax); ++k) {
            const double f = std::pow(2.0, (k + 1) * params.s);
            auto& gk = padded.at(k);
            for (PointId x = 0; x < gk.size(); ++x) gk[x] = S.contains(x) ? f * std::abs(u[x]) : 0.0;
        }
        GradientSequence positive = canon;
        for (int k = positive.range.kmin; k <= std::min(0, positive.range.kmax); ++k)
            std::fill(positive.at(k).begin(), positive.at(k).end(), 0.0);
        rep.set("M_padded", sequence_norm(padded, S, params.p, params.q, SequenceKind::LpLq));
        rep.set("N_padded", sequence_norm(padded, S, params.p, params.q, SequenceKind::LqLp));
        rep.set("M_positive", sequence_norm(positive, S, params.p, params.q, SequenceKind::LpLq));
        rep.set("N_positive", sequence_norm(positive, S, params.p, params.q, SequenceKind::LqLp));
    }
    if (options.exact) {
        const std::pair<const char*, NormKind> kinds[] = {{"M_exact", NormKind::TriebelLizorkin},
                                                          {"N_exact", NormKind::Besov}};
        for (const auto& [name, kind] : kinds) {
            try {
                rep.set(name, infimum_gradient(u, S, params, kind, options.cap).value);
            } catch (const ConfigError&) {
                // outside the oracle's range; the canonical upper bound stands alone
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// moduli of smoothness

double ep_modulus(const Function& u, const MetricMeasureSpace& space, double t, double p) {
    if (!(t > 0.0)) throw ConfigError("ep_modulus: t must be positive");
    double acc = 0.0;
    for (PointId x = 0; x < space.size(); ++x) {
        double inner = 0.0, mass = 0.0;
        space.for_each_in_ball(x, t, [&](PointId y, double) {
            inner += space.weight(y) * std::pow(std::abs(u[x] - u[y]), p);
            mass += space.weight(y);
        });
        acc += space.weight(x) * inner / mass;
    }
    return std::pow(acc, 1.0 / p);
}

TGrid dyadic_t_grid(double t_min, double t_max) {
    if (!(t_min > 0.0) || !(t_max >= t_min)) throw ConfigError("dyadic_t_grid: need 0 < t_min <= t_max");
    TGrid grid;
    double t = t_max;
    while (true) {
        grid.t.push_back(t);
        if (t < t_min) break;
        t *= 0.5;
    }
    const double ln2 = std::log(2.0);
    grid.weight.assign(grid.t.size(), ln2);
    if (grid.t.size() > 1) {
        grid.weight.front() = ln2 / 2.0;
        grid.weight.back() = ln2 / 2.0;
    }
    return grid;
}

double t_integral(const std::vector<double>& modulus, const TGrid& grid, double s, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
        const double v = std::pow(grid.t[i], -s) * modulus[i];
        if (std::isinf(q))
            acc = std::max(acc, v);
        else
            acc += grid.weight[i] * std::pow(v, q);
    }
    return lq_finish(acc, q);
}

namespace {

// min over c of sum w |v - c|^p, capped by the anchored value `at_anchor`.
double inf_deviation(const std::vector<double>& v, const std::vector<double>& w, double p, double at_anchor) {
    if (v.empty()) return 0.0;
    auto cost = [&](double c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * std::pow(std::abs(v[i] - c), p);
        return acc;
    };
    double best;
    if (p == 2.0) {
        double sw = 0.0, sv = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            sw += w[i];
            sv += w[i] * v[i];
        }
        best = cost(sv / sw);
    } else if (p == 1.0) {
        best = cost(median(v, w));
    } else if (p < 1.0) {
        // concave between data values: the minimum sits at one of them
        best = kInf;
        std::vector<double> cand = v;
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (double c : cand) best = std::min(best, cost(c));
    } else {
        auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        double lo = *lo_it, hi = *hi_it;
        const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
        double fa = cost(a), fb = cost(b);
        for (int it = 0; it < 200 && hi - lo > 1e-10 * scale; ++it) {
            if (fa < fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - phi * (hi - lo);
                fa = cost(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + phi * (hi - lo);
                fb = cost(b);
            }
        }
        best = std::min({fa, fb, cost(0.5 * (lo + hi))});
    }
    return std::min(best, at_anchor);
}

// Members of S around each center, ordered by distance, with per-node prefix lengths.
// On grid spaces the ball denominator is the lattice count N_t h^n of the full lattice.
class Neighborhoods {
public:
    Neighborhoods(const SubsetMask& S, const TGrid& grid) : S_(S), X_(S.parent()) {
        tmax_ = *std::max_element(grid.t.begin(), grid.t.end());
        order_.resize(grid.t.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return grid.t[a] < grid.t[b]; });
        t_ = grid.t;
        if (X_.is_grid()) build_lattice();
    }

    struct Ball {
        std::vector<double> values;
        std::vector<double> weights;
        std::vector<std::size_t> prefix;  // members with d < t, per grid node
        std::vector<double> denom;        // ball measure per grid node
    };

    Ball gather(const Function& u, PointId x) const {
        Ball b;
        b.prefix.assign(t_.size(), 0);
        b.denom.assign(t_.size(), 0.0);
        if (X_.is_grid()) {
            const auto& lat = *X_.lattice();
            const std::size_t n = X_.dim();
            std::vector<std::int64_t> idx(n);
            std::size_t node = 0;
            for (std::size_t o = 0; o < offsets_.size(); ++o) {
                while (node < order_.size() && !(len_[o] < t_[order_[node]])) {
                    b.prefix[order_[node]] = b.values.size();
                    b.denom[order_[node]] = static_cast<double>(o) * cell_;
                    ++node;
                }
                if (node == order_.size()) break;
                for (std::size_t d = 0; d < n; ++d) idx[d] = lat.index[x * n + d] + offsets_[o][d];
                const auto y = lookup(idx);
                if (y && S_.contains(*y)) {
                    b.values.push_back(u[*y]);
                    b.weights.push_back(X_.weight(*y));
                }
            }
            for (; node < order_.size(); ++node) {
                b.prefix[order_[node]] = b.values.size();
                b.denom[order_[node]] = static_cast<double>(offsets_.size()) * cell_;
            }
            return b;
        }
        std::vector<std::pair<double, PointId>> near;
        X_.for_each_in_ball(x, tmax_ * (1.0 + 1e-12) + 1e-300, [&](PointId y, double d) { near.emplace_back(d, y); });
        std::sort(near.begin(), near.end());
        std::size_t node = 0;
        double mass = 0.0;
        for (std::size_t i = 0; i <= near.size(); ++i) {
            const double d = i < near.size() ? near[i].first : kInf;
            while (node < order_.size() && !(d < t_[order_[node]])) {
                b.prefix[order_[node]] = b.values.size();
                b.denom[order_[node]] = mass;
                ++node;
            }
            if (i == near.size()) break;
            const PointId y = near[i].second;
            mass += X_.weight(y);
            if (S_.contains(y)) {
                b.values.push_back(u[y]);
                b.weights.push_back(X_.weight(y));
            }
        }
        return b;
    }

    // Sum of w |v - u(x)|^p over the first `len` members.
    static double anchored(const Ball& b, std::size_t len, double ux, double p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) acc += b.weights[i] * std::pow(std::abs(b.values[i] - ux), p);
        return acc;
    }

    static double hat(const Ball& b, std::size_t len, double p, double at_anchor) {
        std::vector<double> v(b.values.begin(), b.values.begin() + static_cast<std::ptrdiff_t>(len));
        std::vector<double> w(b.weights.begin(), b.weights.begin() + static_cast<std::ptrdiff_t>(len));
        return inf_deviation(v, w, p, at_anchor);
    }

    // Translation differences for omega: D_v = sum_{x, x+v in S} h^n |u(x+v)-u(x)|^p.
    std::vector<double> omega(const Function& u, double p) const {
        const auto& lat = *X_.lattice();
        const std::size_t n = X_.dim();
        std::vector<double> best(t_.size(), 0.0);
        std::vector<std::int64_t> idx(n);
        const auto members = S_.member_ids();
        for (std::size_t o = 0; o < closed_.size(); ++o) {
            const auto& v = closed_[o];
            // D_{-v} = D_v, so only offsets whose first nonzero coordinate is positive
            std::size_t lead = 0;
            while (lead < n && v[lead] == 0) ++lead;
            if (lead == n || v[lead] < 0) continue;
            double acc = 0.0;
            for (PointId x : members) {
                for (std::size_t d = 0; d < n; ++d) idx[d] = lat.index[x * n + d] + v[d];
                const auto y = lookup(idx);
                if (y && S_.contains(*y)) acc += X_.weight(x) * std::pow(std::abs(u[*y] - u[x]), p);
            }
            const double val = std::pow(acc, 1.0 / p);
            for (std::size_t i = 0; i < t_.size(); ++i)
                if (closed_len_[o] <= t_[i]) best[i] = std::max(best[i], val);
        }
        return best;
    }

private:
    void build_lattice() {
        const auto& lat = *X_.lattice();
        const std::size_t n = X_.dim();
        const double h = lat.spacing;
        cell_ = std::pow(h, static_cast<double>(n));
        const auto R = static_cast<std::int64_t>(std::floor(tmax_ / h)) + 1;
        std::vector<std::int64_t> v(n, -R);
        std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> all;
        while (true) {
            std::int64_t sq = 0;
            for (auto c : v) sq += c * c;
            all.emplace_back(sq, v);
            std::size_t d = 0;
            while (d < n && ++v[d] > R) {
                v[d] = -R;
                ++d;
            }
            if (d == n) break;
        }
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [sq, vec] : all) {
            const double len = h * std::sqrt(static_cast<double>(sq));
            if (len < tmax_) {
                offsets_.push_back(vec);
                len_.push_back(len);
            }
            if (len <= tmax_) {
                closed_.push_back(vec);
                closed_len_.push_back(len);
            }
        }
        stride_.assign(n, 1);
        for (std::size_t d = 1; d < n; ++d) stride_[d] = stride_[d - 1] * lat.extent[d - 1];
        std::size_t total = 1;
        for (auto e : lat.extent) total *= static_cast<std::size_t>(e);
        dense_.assign(total, -1);
        for (PointId i = 0; i < X_.size(); ++i) {
            std::int64_t key = 0;
            for (std::size_t d = 0; d < n; ++d) key += lat.index[i * n + d] * stride_[d];
            dense_[static_cast<std::size_t>(key)] = static_cast<std::int64_t>(i);
        }
    }

    std::optional<PointId> lookup(const std::vector<std::int64_t>& idx) const {
        const auto& lat = *X_.lattice();
        std::int64_t key = 0;
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (idx[d] < 0 || idx[d] >= lat.extent[d]) return std::nullopt;
            key += idx[d] * stride_[d];
        }
        const auto id = dense_[static_cast<std::size_t>(key)];
        if (id < 0) return std::nullopt;
        return static_cast<PointId>(id);
    }

    const SubsetMask& S_;
    const MetricMeasureSpace& X_;
    double tmax_ = 0.0;
    std::vector<double> t_;
    std::vector<std::size_t> order_;  // grid nodes by increasing t
    double cell_ = 1.0;
    std::vector<std::vector<std::int64_t>> offsets_;  // |v| h < tmax, by length
    std::vector<double> len_;
    std::vector<std::vector<std::int64_t>> closed_;  // |v| h <= tmax
    std::vector<double> closed_len_;
    std::vector<std::int64_t> stride_;
    std::vector<std::int64_t> dense_;
};

}  // namespace

ModulusProfile modulus_profile(const Function& u, const SubsetMask& S, double p, const TGrid& grid) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("modulus_profile: p must be positive and finite");
    const auto& X = S.parent();
    Neighborhoods nb(S, grid);
    const std::size_t nt = grid.t.size();
    std::vector<double> ep(nt, 0.0), hat(nt, 0.0);
    for (PointId x : S.member_ids()) {
        const auto ball = nb.gather(u, x);
        for (std::size_t i = 0; i < nt; ++i) {
            const double e = Neighborhoods::anchored(ball, ball.prefix[i], u[x], p);
            const double h = Neighborhoods::hat(ball, ball.prefix[i], p, e);
            ep[i] += X.weight(x) * e / ball.denom[i];
            hat[i] += X.weight(x) * h / ball.denom[i];
        }
    }
    ModulusProfile out;
    for (std::size_t i = 0; i < nt; ++i) {
        out.ep.push_back(std::pow(ep[i], 1.0 / p));
        out.ep_hat.push_back(std::pow(hat[i], 1.0 / p));
    }
    if (X.is_grid()) out.omega = nb.omega(u, p);
    return out;
}

double besov_modulus_norm(const Function& u, const SubsetMask& S, const SmoothnessParams& params, BesovVariant variant,
                          const TGrid& grid) {
    params.validate();
    if (variant == BesovVariant::B && !S.parent().is_grid())
        throw ConfigError("besov_modulus_norm: variant B needs a Euclidean grid");
    const auto prof = modulus_profile(u, S, params.p, grid);
    const auto& m = variant == BesovVariant::B ? prof.omega : variant == BesovVariant::calB ? prof.ep : prof.ep_hat;
    return lp_norm(u, S, params.p) + t_integral(m, grid, params.s, params.q);
}

Function tl_inner(const Function& u, const SubsetMask& S, const SmoothnessParams& params, TLVariant variant,
                  const TGrid& grid, double tau) {
    params.validate();
    if (!(params.r < std::min(params.p, params.q))) throw ConfigError("r out of range: need 0 < r < min(p, q)");
    if (variant == TLVariant::C && !(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
    const auto& X = S.parent();

    // distance to the complement of the domain, for the truncated variant
    std::vector<double> delta(X.size(), kInf);
    if (variant == TLVariant::C) {
        const auto outside = S.complement_ids();
        for (PointId x : S.member_ids()) {
            double d = kInf;
            for (PointId y : outside) d = std::min(d, X.distance(x, y));
            if (X.is_grid()) d = std::min(d, X.lattice()->bbox.distance_to_boundary(X.coords(x)) + X.lattice()->spacing);
            delta[x] = d;
        }
    }

    Neighborhoods nb(S, grid);
    Function g(X.size(), 0.0);
    const double s = params.s, q = params.q, r = params.r;
    for (PointId x : S.member_ids()) {
        const auto ball = nb.gather(u, x);
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.t.size(); ++i) {
            if (variant == TLVariant::C && !(grid.t[i] <= tau * delta[x])) continue;
            double inner = Neighborhoods::anchored(ball, ball.prefix[i], u[x], r);
            if (variant != TLVariant::calF) inner = Neighborhoods::hat(ball, ball.prefix[i], r, inner);
            const double v = std::pow(grid.t[i], -s) * std::pow(inner / ball.denom[i], 1.0 / r);
            acc = std::isinf(q) ? std::max(acc, v) : acc + grid.weight[i] * std::pow(v, q);
        }
        g[x] = lq_finish(acc, q);
    }
    return g;
}

double tl_function_norm(const Function& u, const SubsetMask& S, const SmoothnessParams& params, TLVariant variant,
                        const TGrid& grid, double tau) {
    const auto g = tl_inner(u, S, params, variant, grid, tau);
    return lp_norm(u, S, params.p) + lp_norm(g, S, params.p);
}

// ---------------------------------------------------------------------------

double lorentz_norm(const Function& u, const SubsetMask& S, double p, double q) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("lorentz_norm: p must be positive and finite");
    if (!(q > 0.0)) throw ConfigError("lorentz_norm: q must be positive");
    const auto& X = S.parent();
    std::vector<std::pair<double, double>> vals;  // (|u|, weight)
    for (PointId x : S.member_ids())
        if (u[x] != 0.0) vals.emplace_back(std::abs(u[x]), X.weight(x));
    if (vals.empty()) return 0.0;
    std::sort(vals.begin(), vals.end());

    // Step i: t in (a_{i-1}, a_i], mass M_i = mu{|u| >= a_i}.
    double tail = 0.0;
    for (const auto& v : vals) tail += v.second;
    double prev = 0.0, acc = 0.0;
    std::size_t i = 0;
    while (i < vals.size()) {
        const double a = vals[i].first;
        const double mass = tail;
        while (i < vals.size() && vals[i].first == a) tail -= vals[i++].second;
        if (std::isinf(q))
            acc = std::max(acc, a * std::pow(mass, 1.0 / p));
        else
            acc += std::pow(mass, q / p) * (std::pow(a, q) - std::pow(prev, q)) / q;
        prev = a;
    }
    return std::isinf(q) ? acc : std::pow(p, 1.0 / q) * std::pow(acc, 1.0 / q);
}

namespace {

// Running averages over one center's points, visited in order of distance.
struct MaxAccumulator {
    const std::vector<Function>& gs;
    const MetricMeasureSpace& space;
    std::vector<double> sums;
    double mass = 0.0;

    void reset() {
        sums.assign(gs.size(), 0.0);
        mass = 0.0;
    }
    void add(PointId y) {
        const double w = space.weight(y);
        mass += w;
        for (std::size_t j = 0; j < gs.size(); ++j) sums[j] += w * std::abs(gs[j][y]);
    }
    void close(std::vector<Function>& out, PointId x) const {
        for (std::size_t j = 0; j < gs.size(); ++j) out[j][x] = std::max(out[j][x], sums[j] / mass);
    }
};

// Grid version: lattice offsets sorted once by integer squared length, so ties are exact.
void maximal_on_grid(const MetricMeasureSpace& space, MaxAccumulator& acc, std::vector<Function>& out) {
    const auto& lat = *space.lattice();
    const std::size_t dim = lat.extent.size();
    std::vector<std::int64_t> stride(dim, 1);
    std::int64_t cells = 1;
    for (std::size_t d = 0; d < dim; ++d) {
        stride[d] = cells;
        cells *= lat.extent[d];
    }
    std::vector<std::int64_t> dense(static_cast<std::size_t>(cells), -1);
    for (PointId i = 0; i < space.size(); ++i) {
        std::int64_t c = 0;
        for (std::size_t d = 0; d < dim; ++d) c += lat.index[i * dim + d] * stride[d];
        dense[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(i);
    }

    std::vector<std::int64_t> lo(dim), hi(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        lo[d] = std::numeric_limits<std::int64_t>::max();
        hi[d] = std::numeric_limits<std::int64_t>::min();
    }
    for (PointId i = 0; i < space.size(); ++i)
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], lat.index[i * dim + d]);
            hi[d] = std::max(hi[d], lat.index[i * dim + d]);
        }
    struct Offset {
        std::int64_t len2;
        std::vector<std::int64_t> v;
    };
    std::vector<Offset> offsets;
    std::vector<std::int64_t> v(dim);
    for (std::size_t d = 0; d < dim; ++d) v[d] = -(hi[d] - lo[d]);
    while (true) {
        std::int64_t len2 = 0;
        for (auto c : v) len2 += c * c;
        offsets.push_back({len2, v});
        std::size_t d = 0;
        for (; d < dim; ++d) {
            if (++v[d] <= hi[d] - lo[d]) break;
            v[d] = -(hi[d] - lo[d]);
        }
        if (d == dim) break;
    }
    std::stable_sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) { return a.len2 < b.len2; });

    for (PointId x = 0; x < space.size(); ++x) {
        acc.reset();
        const std::int64_t* ix = &lat.index[x * dim];
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            std::int64_t c = 0;
            bool inside = true;
            for (std::size_t d = 0; d < dim && inside; ++d) {
                const std::int64_t j = ix[d] + offsets[k].v[d];
                inside = j >= 0 && j < lat.extent[d];
                c += j * stride[d];
            }
            if (inside && dense[static_cast<std::size_t>(c)] >= 0) acc.add(static_cast<PointId>(dense[static_cast<std::size_t>(c)]));
            const bool last = k + 1 == offsets.size() || offsets[k + 1].len2 != offsets[k].len2;
            if (last && acc.mass > 0.0) acc.close(out, x);
        }
    }
}

}  // namespace

std::vector<Function> maximal_function(const std::vector<Function>& gs, const MetricMeasureSpace& space) {
    const std::size_t n = space.size();
    std::vector<Function> out(gs.size(), Function(n, 0.0));
    MaxAccumulator acc{gs, space, {}, 0.0};
    if (space.is_grid()) {
        maximal_on_grid(space, acc, out);
        return out;
    }
    std::vector<std::pair<double, PointId>> near(n);
    for (PointId x = 0; x < n; ++x) {
        for (PointId y = 0; y < n; ++y) near[y] = {space.distance(x, y), y};
        std::sort(near.begin(), near.end());
        acc.reset();
        for (std::size_t i = 0; i < n; ++i) {
            acc.add(near[i].second);
            if (i + 1 == n || near[i + 1].first != near[i].first) acc.close(out, x);
        }
    }
    return out;
}

Function maximal_function(const Function& g, const MetricMeasureSpace& space) {
    return maximal_function(std::vector<Function>{g}, space)[0];
}

}  // namespace besovkit
