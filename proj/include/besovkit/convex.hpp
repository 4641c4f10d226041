#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace besovkit {

/// sum_j coef_j * z_{index_j} >= rhs
struct LinearConstraint {
    std::vector<std::pair<std::size_t, double>> terms;
    double rhs = 0.0;
};

/// Minimize sum_i (linear_i z_i + power_coef_i z_i^power_exp_i) subject to linear constraints.
/// Power terms need exponent >= 1 and a constraint keeping their variable positive.
struct ConvexProgram {
    std::size_t n = 0;
    std::vector<double> linear;
    std::vector<double> power_coef;
    std::vector<double> power_exp;
    std::vector<LinearConstraint> rows;

    explicit ConvexProgram(std::size_t vars = 0);
    double objective(const std::vector<double>& z) const;
};

struct BarrierResult {
    std::vector<double> z;
    double objective = 0.0;
    double gap_bound = 0.0;  // m / tau at termination
    int newton_steps = 0;
    bool converged = false;
};

/// Log-barrier interior point method with damped Newton steps. `start` must be strictly feasible.
BarrierResult solve_barrier(const ConvexProgram& program, std::vector<double> start, double rel_tol = 1e-11);

}  // namespace besovkit
