#include "doctest.h"
#include "besovkit/functions.hpp"
#include "besovkit/interp.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace besovkit;
using testkit::Rng;

TEST_SUITE("interp") {

TEST_CASE("K decomposition reconstructs f") {
    Rng rng(91);
    const auto X = testkit::square_grid(0.125, 0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto f = random_rough(X, rng.next());
        const double t = rng.uniform(0.15, 1.0);
        const auto dec = k_decomposition(f, X, t, 2.0);
        for (PointId x = 0; x < X.size(); ++x) CHECK(testkit::close_rel(dec.g[x] + dec.h[x], f[x], 1e-14));
        // centers form a t/6-separated net
        for (std::size_t i = 0; i < dec.centers.size(); ++i)
            for (std::size_t j = i + 1; j < dec.centers.size(); ++j)
                CHECK(X.distance(dec.centers[i], dec.centers[j]) >= dec.radius);
        CHECK(dec.overlap >= 1);
        CHECK(std::isfinite(dec.h_validity));
    }
}

TEST_CASE("sharp maximal function against the definition") {
    Rng rng(93);
    const auto X = testkit::random_cloud(rng, 25, 2, true);
    const auto f = testkit::random_values(rng, X.size());
    const double t = 0.2, p = 1.5;
    const auto got = sharp_maximal(f, X, t, p);
    for (PointId x = 0; x < X.size(); ++x) {
        double want = 0.0;
        std::vector<double> radii;
        for (PointId y = 0; y < X.size(); ++y) radii.push_back(X.distance(x, y));
        radii.push_back(t);
        std::sort(radii.begin(), radii.end());
        // every open ball of radius >= t is B(x, r) with r = t or r just above a distance >= t
        for (double r : radii) {
            if (r < t) continue;
            const double rr = r == t ? t : std::nextafter(r, 1e300);
            double acc = 0.0, mass = 0.0;
            for (PointId y : oracle::ball(X, x, rr)) {
                acc += X.weight(y) * std::pow(std::abs(f[y] - f[x]), p);
                mass += X.weight(y);
            }
            // the sup over radii giving this ball is attained at its smallest radius
            want = std::max(want, std::pow(acc / mass, 1.0 / p) / std::max(t, r));
        }
        CHECK(got[x] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("lower constant bounds E_p by every split") {
    // E_p(f,t) <= C (||g||_p + t ||rho||_p) whenever f = g + h and rho is a 1-gradient of h
    Rng rng(95);
    for (int trial = 0; trial < 40; ++trial) {
        const auto X = testkit::random_cloud(rng, 20, 2, true, trial % 2 == 0);
        const auto all = SubsetMask::all(X);
        const auto f = testkit::random_values(rng, X.size());
        const double t = rng.uniform(0.05, 1.0);
        const double p = rng.coin() ? rng.uniform(0.3, 1.0) : rng.uniform(1.0, 3.0);
        Function h(X.size()), g(X.size()), rho(X.size(), 0.0);
        const double mix = rng.unit();
        for (PointId x = 0; x < X.size(); ++x) {
            h[x] = mix * f[x] + (1.0 - mix) * rng.uniform(-1, 1);
            g[x] = f[x] - h[x];
        }
        for (PointId x = 0; x < X.size(); ++x)
            for (PointId y = 0; y < X.size(); ++y)
                if (y != x) rho[x] = std::max(rho[x], std::abs(h[x] - h[y]) / X.distance(x, y));
        const double lhs = ep_modulus(f, X, t, p);
        const double rhs = lower_constant(X, t, p) * (lp_norm(g, all, p) + t * lp_norm(rho, all, p));
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("K profile brackets") {
    const auto X = testkit::square_grid(0.125, 0.0, 1.0);
    Rng rng(97);
    const auto f = random_smooth(X, rng.next());
    const std::vector<double> ts{0.125, 0.25, 0.5, 1.0};
    const auto k = k_profile(f, X, 2.0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(k.lower[i] <= k.certified[i]);
        CHECK(k.achieved[i] <= k.certified[i]);
        CHECK(std::isfinite(k.upper[i]));
        CHECK(k.upper[i] >= k.ep[i]);
    }
    const auto z = k_profile(Function(X.size(), 4.0), X, 2.0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(z.achieved[i] == 0.0);
        CHECK(z.upper[i] == 0.0);
        CHECK(z.certified[i] == 0.0);
    }
}

TEST_CASE("Lorentz embedding check") {
    const auto X = testkit::square_grid(0.125, 0.0, 1.0);
    const auto S = SubsetMask::all(X);
    Rng rng(99);
    for (int trial = 0; trial < 4; ++trial) {
        const auto u = random_smooth(X, rng.next());
        const auto e = lorentz_embedding_check(u, S, 0.5, 1.0, 1.0, 2.0);
        CHECK(e.p_star == doctest::Approx(4.0 / 3.0));
        CHECK(e.lhs > 0.0);
        CHECK(std::isfinite(e.ratio));
        CHECK(e.lhs_weak <= e.nesting_bound * e.lhs * (1.0 + 1e-12));
        // no nearby constant does better
        Function shifted(u.size());
        for (double c : {0.0, e.c_best + 0.1, e.c_best - 0.1}) {
            for (std::size_t i = 0; i < u.size(); ++i) shifted[i] = u[i] - c;
            CHECK(e.lhs <= lorentz_norm(shifted, S, e.p_star, 1.0) * (1.0 + 1e-9));
        }
    }
    const auto e = lorentz_embedding_check(Function(X.size(), 1.0), S, 0.5, 1.0, 1.0, 2.0);
    CHECK(e.lhs == 0.0);
    CHECK_THROWS_AS(lorentz_embedding_check(Function(X.size(), 1.0), S, 0.5, 4.0, 1.0, 2.0), ConfigError);
}

}
