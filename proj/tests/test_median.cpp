#include "doctest.h"
#include "besovkit/median.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace besovkit;
using testkit::Rng;

TEST_SUITE("median") {

TEST_CASE("median matches the definition on tied and untied samples") {
    Rng rng(21);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const auto v = testkit::random_values(rng, n);
        std::vector<double> w(n);
        for (auto& x : w) x = rng.coin() ? 1.0 : rng.uniform(0.1, 3.0);
        const double m = median(v, w);
        CHECK(m == oracle::median(v, w));
        CHECK(std::find(v.begin(), v.end(), m) != v.end());
    }
}

TEST_CASE("small cases") {
    const std::vector<double> one{1, 1};
    CHECK(median(std::vector<double>{3, 1}, one) == 3.0);  // the largest admissible value
    CHECK(median(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}) == 2.0);
    CHECK(median(std::vector<double>{1, 2, 3}, std::vector<double>{5, 1, 1}) == 1.0);
}

TEST_CASE("median defect estimate") {
    Rng rng(8);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        const auto v = testkit::random_values(rng, n, 3.0);
        std::vector<double> w(n);
        for (auto& x : w) x = rng.uniform(0.1, 2.0);
        const double c = rng.uniform(-4.0, 4.0);
        const double eta = rng.coin(0.2) ? 1.0 : rng.uniform(0.01, 1.0);
        const auto d = median_defect(v, w, c, eta);
        CHECK(d.lhs <= d.rhs * (1.0 + 1e-12));
    }
    const std::vector<double> v{1.0}, w{1.0};
    CHECK_THROWS_AS(median_defect(v, w, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(median_defect(v, w, 0.0, 1.5), ConfigError);
}

TEST_CASE("median on balls and masked balls") {
    const auto X = testkit::square_grid(0.25, 0.0, 1.0);
    Function u(X.size());
    for (PointId i = 0; i < X.size(); ++i) u[i] = X.coords(i)[0];
    const std::int64_t c[] = {2, 2};
    const PointId x = *X.lattice_point(c);
    CHECK(median_on_ball(u, X, x, 0.3) == 0.5);
    const SubsetMask left(X, testkit::mask_of(X, make_box({0, 0}, {0.25, 1})));
    CHECK_THROWS_AS(median_on_ball(u, X, x, 0.2, &left), GeometryError);
    CHECK(median_on_ball(u, X, x, 0.3, &left) == 0.25);
}

}
