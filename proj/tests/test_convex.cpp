#include "doctest.h"
#include "besovkit/convex.hpp"

using namespace besovkit;

TEST_SUITE("convex") {

TEST_CASE("quadratic with one active bound") {
    // min z^2 s.t. z >= 1
    ConvexProgram prog(1);
    prog.power_coef[0] = 1.0;
    prog.power_exp[0] = 2.0;
    prog.rows.push_back({{{0, 1.0}}, 1.0});
    const auto res = solve_barrier(prog, {2.0});
    CHECK(res.converged);
    CHECK(res.z[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("linear program with a degenerate face") {
    // min z0 + 2 z1 s.t. z0 + z1 >= 1, z0 >= 0, z1 >= 0
    ConvexProgram prog(2);
    prog.linear = {1.0, 2.0};
    prog.rows.push_back({{{0, 1.0}, {1, 1.0}}, 1.0});
    prog.rows.push_back({{{0, 1.0}}, 0.0});
    prog.rows.push_back({{{1, 1.0}}, 0.0});
    const auto res = solve_barrier(prog, {1.0, 1.0});
    CHECK(res.converged);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.gap_bound <= 1e-9);
}

TEST_CASE("p-power objective matches the closed form") {
    // min z0^3 + z1^3 s.t. z0 + z1 >= 2: symmetric optimum z = 1
    ConvexProgram prog(2);
    prog.power_coef = {1.0, 1.0};
    prog.power_exp = {3.0, 3.0};
    prog.rows.push_back({{{0, 1.0}, {1, 1.0}}, 2.0});
    prog.rows.push_back({{{0, 1.0}}, 0.0});
    prog.rows.push_back({{{1, 1.0}}, 0.0});
    const auto res = solve_barrier(prog, {3.0, 3.0});
    CHECK(res.objective == doctest::Approx(2.0).epsilon(1e-9));
}

}
