#include <map>

#include "doctest.h"
#include "besovkit/norms.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace besovkit;
using testkit::Rng;

namespace {

Function random_on(Rng& rng, std::size_t n) { return testkit::random_values(rng, n); }

// Pair constraints of the single-gradient program, optionally restricted to one annulus.
std::vector<oracle::PairConstraint> pair_rows(const Function& u, const SubsetMask& S, double s,
                                              std::vector<PointId>& ids, std::optional<int> k = std::nullopt) {
    const auto& X = S.parent();
    ids = S.member_ids();
    std::vector<oracle::PairConstraint> rows;
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const double d = X.distance(ids[a], ids[b]);
            if (k && oracle::annulus(d) != *k) continue;
            const double c = std::abs(u[ids[a]] - u[ids[b]]) / std::pow(d, s);
            if (c > 0.0) rows.push_back({a, b, c});
        }
    return rows;
}

std::vector<double> member_weights(const SubsetMask& S, const std::vector<PointId>& ids) {
    std::vector<double> w;
    for (PointId x : ids) w.push_back(S.parent().weight(x));
    return w;
}

// E_p, hat E_p and omega on a planar grid straight from the definitions.
struct BruteModuli {
    double ep, ep_hat, omega;
};

BruteModuli brute_moduli(const Function& u, const SubsetMask& S, double p, double t) {
    const auto& X = S.parent();
    const double h = X.lattice()->spacing;
    const double cell = h * h;
    const double denom = oracle::lattice_count(h, t) * cell;
    const auto ids = S.member_ids();
    double ep = 0.0, hat = 0.0;
    std::map<std::pair<long, long>, double> diff;
    for (PointId x : ids) {
        std::vector<double> vals;
        double anchored = 0.0;
        for (PointId y : ids) {
            const double d = X.distance(x, y);
            const auto cx = X.coords(x), cy = X.coords(y);
            const std::pair<long, long> v{std::lround((cy[0] - cx[0]) / h), std::lround((cy[1] - cx[1]) / h)};
            if (h * std::sqrt(double(v.first * v.first + v.second * v.second)) <= t)
                diff[v] += cell * std::pow(std::abs(u[y] - u[x]), p);
            if (!(d < t)) continue;
            vals.push_back(u[y]);
            anchored += cell * std::pow(std::abs(u[y] - u[x]), p);
        }
        double best = anchored;
        for (double c : vals) {  // p <= 1: the optimum sits at a data value
            double acc = 0.0;
            for (double v : vals) acc += cell * std::pow(std::abs(v - c), p);
            best = std::min(best, acc);
        }
        if (p == 2.0) {
            double mean = 0.0;
            for (double v : vals) mean += v / static_cast<double>(vals.size());
            double acc = 0.0;
            for (double v : vals) acc += cell * (v - mean) * (v - mean);
            best = std::min(anchored, acc);
        }
        ep += cell * anchored / denom;
        hat += cell * best / denom;
    }
    double om = 0.0;
    for (const auto& [v, acc] : diff)
        if (v.first > 0 || (v.first == 0 && v.second > 0)) om = std::max(om, std::pow(acc, 1.0 / p));
    return {std::pow(ep, 1.0 / p), std::pow(hat, 1.0 / p), om};
}

}  // namespace

TEST_SUITE("norms") {

TEST_CASE("canonical gradient matches the pairwise definition and is valid") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const auto X = testkit::random_cloud(rng, 20 + rng.below(20), 2, true, trial % 2 == 0);
        const SubsetMask S(X, testkit::random_mask(rng, X.size(), 0.6));
        const auto u = random_on(rng, X.size());
        const double s = rng.uniform(0.05, 0.95);
        const auto g = canonical_gradient(u, S, s);
        for (PointId x = 0; x < X.size(); ++x) {
            std::map<int, double> want;
            if (S.contains(x))
                for (PointId y = 0; y < X.size(); ++y) {
                    if (y == x || !S.contains(y)) continue;
                    const double d = X.distance(x, y);
                    auto& w = want[oracle::annulus(d)];
                    w = std::max(w, std::abs(u[x] - u[y]) / std::pow(d, s));
                }
            for (int k = g.range.kmin; k <= g.range.kmax; ++k) CHECK(g.value(k, x) == (want.count(k) ? want[k] : 0.0));
        }
        const auto v = validity_constant(u, g, S, s);
        CHECK(v.violations == 0);
        CHECK(v.constant <= 0.5 + 1e-15);
    }
}

TEST_CASE("convex infimum agrees with Hildreth for p = 2") {
    Rng rng(43);
    for (int trial = 0; trial < 12; ++trial) {
        const auto X = testkit::random_cloud(rng, 10, 2, true);
        const SubsetMask S(X, testkit::random_mask(rng, X.size(), 0.7, 3));
        const auto u = random_on(rng, X.size());
        SmoothnessParams sp{rng.uniform(0.2, 0.8), 2.0, 2.0, 0.5};
        std::vector<PointId> ids;

        const auto rows = pair_rows(u, S, sp.s, ids);
        const double want = std::sqrt(oracle::hildreth_p2(member_weights(S, ids), rows));
        CHECK(infimum_gradient(u, S, sp, NormKind::HajlaszSp).value == doctest::Approx(want).epsilon(1e-6));

        const auto range = dyadic_range(S);
        double acc = 0.0;
        for (int k = range.kmin; k <= range.kmax; ++k)
            acc += oracle::hildreth_p2(member_weights(S, ids), pair_rows(u, S, sp.s, ids, k));
        const auto tl = infimum_gradient(u, S, sp, NormKind::TriebelLizorkin);
        CHECK(tl.value == doctest::Approx(std::sqrt(acc)).epsilon(1e-6));
        CHECK(infimum_gradient(u, S, sp, NormKind::Besov).value == doctest::Approx(std::sqrt(acc)).epsilon(1e-6));
        // the optimizer is itself a fractional gradient
        CHECK(validity_constant(u, tl.gradient, S, sp.s).violations == 0);
        CHECK(validity_constant(u, tl.gradient, S, sp.s).constant <= 1.0 + 1e-6);
    }
}

TEST_CASE("convex infimum agrees with vertex enumeration for p = 1") {
    Rng rng(47);
    for (int trial = 0; trial < 12; ++trial) {
        const auto X = testkit::random_cloud(rng, 5, 2, true);
        const SubsetMask S = SubsetMask::all(X);
        const auto u = random_on(rng, X.size());
        SmoothnessParams sp{rng.uniform(0.2, 0.8), 1.0, 1.0, 0.5};
        std::vector<PointId> ids;
        const auto rows = pair_rows(u, S, sp.s, ids);
        const double want = oracle::vertex_lp_p1(member_weights(S, ids), rows);
        CHECK(infimum_gradient(u, S, sp, NormKind::HajlaszSp).value == doctest::Approx(want).epsilon(1e-7));
    }
}

TEST_CASE("infimum never exceeds the canonical norm") {
    Rng rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const auto X = testkit::random_cloud(rng, 14, 2, false, true);
        const SubsetMask S = SubsetMask::all(X);
        const auto u = random_on(rng, X.size());
        for (double p : {1.0, 2.0}) {
            SmoothnessParams sp{0.5, p, p, 0.5};
            const auto canon = canonical_gradient(u, S, sp.s);
            const double upper = sequence_norm(canon, S, p, p, SequenceKind::LpLq);
            const double inf = infimum_gradient(u, S, sp, NormKind::TriebelLizorkin).value;
            CHECK(inf <= upper * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("oracle preconditions") {
    const auto X = testkit::square_grid(0.125, 0.0, 1.0);
    const Function u(X.size(), 1.0);
    const auto S = SubsetMask::all(X);
    CHECK_THROWS_AS(infimum_gradient(u, S, {0.5, 2.0, 2.0, 0.5}, NormKind::Besov), ConfigError);  // 81 > 64 points
    CHECK_THROWS_AS(infimum_gradient(u, S, {0.5, 0.5, 0.5, 0.25}, NormKind::Besov, 200), ConfigError);
    CHECK_THROWS_AS(infimum_gradient(u, S, {0.5, 2.0, 3.0, 0.5}, NormKind::Besov, 200), ConfigError);
}

TEST_CASE("metric E_p against a direct double loop") {
    Rng rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        const auto X = testkit::random_cloud(rng, 30, 2, true);
        const auto u = random_on(rng, X.size());
        const double t = rng.uniform(0.05, 0.8), p = rng.uniform(0.3, 3.0);
        double acc = 0.0;
        for (PointId x = 0; x < X.size(); ++x) {
            double inner = 0.0, mass = 0.0;
            for (PointId y : oracle::ball(X, x, t)) {
                inner += X.weight(y) * std::pow(std::abs(u[x] - u[y]), p);
                mass += X.weight(y);
            }
            acc += X.weight(x) * inner / mass;
        }
        CHECK(ep_modulus(u, X, t, p) == doctest::Approx(std::pow(acc, 1.0 / p)).epsilon(1e-12));
    }
}

TEST_CASE("grid moduli against brute force, with the chain hat E <= E <= omega") {
    Rng rng(61);
    const auto X = testkit::square_grid(0.125, -0.25, 1.25);
    const TGrid grid = dyadic_t_grid(0.2, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const SubsetMask S(X, trial % 2 ? testkit::random_mask(rng, X.size(), 0.7)
                                        : testkit::mask_of(X, make_box({0, 0}, {1, 1})));
        const auto u = random_on(rng, X.size());
        for (double p : {0.5, 1.0, 2.0}) {
            const auto prof = modulus_profile(u, S, p, grid);
            for (std::size_t i = 0; i < grid.t.size(); ++i) {
                const auto want = brute_moduli(u, S, p, grid.t[i]);
                CHECK(prof.ep[i] == doctest::Approx(want.ep).epsilon(1e-12));
                CHECK(prof.omega[i] == doctest::Approx(want.omega).epsilon(1e-12));
                CHECK(prof.ep_hat[i] == doctest::Approx(want.ep_hat).epsilon(1e-9));
                CHECK(prof.ep_hat[i] <= prof.ep[i]);
                CHECK(prof.ep[i] <= prof.omega[i] * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("Besov and Triebel-Lizorkin variants are ordered") {
    Rng rng(67);
    const auto X = testkit::square_grid(0.125, -0.5, 1.5);
    const SubsetMask S(X, testkit::mask_of(X, make_box({0, 0}, {1, 1})));
    const TGrid grid = dyadic_t_grid(0.25, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_on(rng, X.size());
        SmoothnessParams sp{rng.uniform(0.1, 0.9), rng.uniform(0.6, 3.0), rng.coin(0.2) ? kInf : rng.uniform(0.6, 3.0), 0.0};
        sp.r = 0.5 * std::min(sp.p, sp.q);
        const double b = besov_modulus_norm(u, S, sp, BesovVariant::B, grid);
        const double cb = besov_modulus_norm(u, S, sp, BesovVariant::calB, grid);
        const double hb = besov_modulus_norm(u, S, sp, BesovVariant::hatB, grid);
        CHECK(hb <= cb);
        CHECK(cb <= b * (1.0 + 1e-12));
        const auto f = tl_inner(u, S, sp, TLVariant::calF, grid);
        const auto hf = tl_inner(u, S, sp, TLVariant::hatF, grid);
        const auto c = tl_inner(u, S, sp, TLVariant::C, grid, 0.5);
        for (PointId x = 0; x < X.size(); ++x) {
            CHECK(hf[x] <= f[x]);
            CHECK(c[x] <= hf[x]);
        }
    }
    const Function u(X.size(), 0.0);
    CHECK_THROWS_AS(tl_inner(u, S, {0.5, 2.0, 1.0, 1.0}, TLVariant::calF, grid), ConfigError);
    const auto cloud = testkit::random_cloud(rng, 20, 2, false);
    CHECK_THROWS_AS(besov_modulus_norm(Function(20, 0.0), SubsetMask::all(cloud), {}, BesovVariant::B, grid), ConfigError);
}

TEST_CASE("constant functions have zero seminorms") {
    const auto X = testkit::square_grid(0.125, -0.5, 1.5);
    const SubsetMask S(X, testkit::mask_of(X, make_box({0, 0}, {1, 1})));
    const Function u(X.size(), 3.25);
    const TGrid grid = dyadic_t_grid(0.25, 1.0);
    const auto prof = modulus_profile(u, S, 2.0, grid);
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
        CHECK(prof.omega[i] == 0.0);
        CHECK(prof.ep[i] == 0.0);
        CHECK(prof.ep_hat[i] == 0.0);
    }
    const auto rep = hajlasz_norms(u, S, {}, {false, false, 64});
    CHECK(rep.get("M_upper") == 0.0);
    CHECK(rep.get("N_upper") == 0.0);
    CHECK(rep.get("M_inhom_upper") == rep.get("Lp"));
}

TEST_CASE("dyadic t-grid") {
    const auto g = dyadic_t_grid(0.1, 1.0);
    REQUIRE(g.t.size() == 5);  // 1, 1/2, 1/4, 1/8, 1/16
    CHECK(g.t.back() == 0.0625);
    CHECK(g.weight.front() == doctest::Approx(std::log(2.0) / 2));
    CHECK(g.weight[2] == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(dyadic_t_grid(0.0), ConfigError);
}

TEST_CASE("Lorentz closed form against the rearrangement integral") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const auto X = testkit::random_cloud(rng, 12, 1, true);
        const auto u = random_on(rng, X.size());
        const auto S = SubsetMask::all(X);
        const double p = rng.uniform(0.4, 4.0);
        const double q = rng.coin(0.2) ? kInf : rng.uniform(0.4, 4.0);
        std::vector<double> w(X.weights().begin(), X.weights().end());
        CHECK(lorentz_norm(u, S, p, q) == doctest::Approx(oracle::lorentz(u, w, p, q)).epsilon(1e-10));
        CHECK(lorentz_norm(u, S, p, p) == doctest::Approx(lp_norm(u, S, p)).epsilon(1e-12));
    }
}

TEST_CASE("maximal function against the definition") {
    Rng rng(73);
    for (int trial = 0; trial < 8; ++trial) {
        const auto X = testkit::random_cloud(rng, 25, 2, true, trial % 2 == 0);
        const auto g = random_on(rng, X.size());
        const auto m = maximal_function(g, X);
        const auto want = oracle::maximal(g, X);
        for (PointId x = 0; x < X.size(); ++x) CHECK(m[x] == doctest::Approx(want[x]).epsilon(1e-12));
    }
    const auto G = testkit::square_grid(0.25, 0.0, 1.5);
    const auto g = random_on(rng, G.size());
    const auto m = maximal_function(g, G);
    const auto want = oracle::maximal(g, G);
    for (PointId x = 0; x < G.size(); ++x) CHECK(m[x] == doctest::Approx(want[x]).epsilon(1e-12));
}

}
