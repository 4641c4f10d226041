#include "besovkit/convex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "besovkit/error.hpp"

namespace besovkit {

ConvexProgram::ConvexProgram(std::size_t vars)
    : n(vars), linear(vars, 0.0), power_coef(vars, 0.0), power_exp(vars, 1.0) {}

double ConvexProgram::objective(const std::vector<double>& z) const {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f += linear[i] * z[i];
        if (power_coef[i] != 0.0) f += power_coef[i] * std::pow(z[i], power_exp[i]);
    }
    return f;
}

namespace {

struct Dense {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

Dense densify(const ConvexProgram& prog) {
    Dense d;
    d.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(prog.rows.size()), static_cast<Eigen::Index>(prog.n));
    d.b.resize(static_cast<Eigen::Index>(prog.rows.size()));
    for (std::size_t r = 0; r < prog.rows.size(); ++r) {
        for (const auto& [j, c] : prog.rows[r].terms) d.A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) += c;
        d.b(static_cast<Eigen::Index>(r)) = prog.rows[r].rhs;
    }
    return d;
}

// Barrier value tau*F(z) - sum log(slack); +inf when infeasible.
double barrier_value(const ConvexProgram& prog, const Dense& d, const Eigen::VectorXd& z, double tau) {
    const Eigen::VectorXd slack = d.A * z - d.b;
    if ((slack.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    std::vector<double> zv(z.data(), z.data() + z.size());
    return tau * prog.objective(zv) - slack.array().log().sum();
}

}  // namespace

BarrierResult solve_barrier(const ConvexProgram& prog, std::vector<double> start, double rel_tol) {
    const auto n = static_cast<Eigen::Index>(prog.n);
    const Dense d = densify(prog);
    const double m = static_cast<double>(prog.rows.size());

    Eigen::VectorXd z = Eigen::Map<Eigen::VectorXd>(start.data(), n);
    if (!((d.A * z - d.b).array() > 0.0).all()) throw Error("solve_barrier: start is not strictly feasible");

    BarrierResult out;
    if (prog.rows.empty()) {
        out.z = start;
        out.objective = prog.objective(start);
        out.converged = true;
        return out;
    }

    const double f0 = std::max(std::abs(prog.objective(start)), 1e-300);
    double tau = m / f0;
    const double abs_floor = 1e-15 * f0;

    for (int outer = 0; outer < 200; ++outer) {
        for (int it = 0; it < 100; ++it) {
            const Eigen::VectorXd slack = d.A * z - d.b;
            const Eigen::VectorXd inv = slack.cwiseInverse();
            Eigen::VectorXd grad = -(d.A.transpose() * inv);
            Eigen::MatrixXd hess = d.A.transpose() * inv.cwiseAbs2().asDiagonal() * d.A;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                grad(i) += tau * prog.linear[ui];
                if (prog.power_coef[ui] != 0.0) {
                    const double e = prog.power_exp[ui];
                    grad(i) += tau * prog.power_coef[ui] * e * std::pow(z(i), e - 1.0);
                    if (e != 1.0) hess(i, i) += tau * prog.power_coef[ui] * e * (e - 1.0) * std::pow(z(i), e - 2.0);
                }
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            Eigen::VectorXd step = -ldlt.solve(grad);
            if (!step.allFinite()) {
                hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
                step = -Eigen::LDLT<Eigen::MatrixXd>(hess).solve(grad);
            }
            const double decrement = -grad.dot(step);
            ++out.newton_steps;
            if (!(decrement > 1e-14)) break;

            // Largest step keeping every slack positive, then Armijo backtracking.
            const Eigen::VectorXd ds = d.A * step;
            double alpha = 1.0;
            for (Eigen::Index r = 0; r < ds.size(); ++r)
                if (ds(r) < 0.0) alpha = std::min(alpha, -0.99 * slack(r) / ds(r));
            const double phi0 = barrier_value(prog, d, z, tau);
            while (alpha > 1e-16 && !(barrier_value(prog, d, z + alpha * step, tau) <= phi0 - 0.25 * alpha * decrement))
                alpha *= 0.5;
            if (alpha <= 1e-16) break;
            z += alpha * step;
            if (decrement < 1e-10) break;
        }
        std::vector<double> zv(z.data(), z.data() + n);
        const double f = prog.objective(zv);
        out.gap_bound = m / tau;
        if (out.gap_bound <= rel_tol * std::abs(f) + abs_floor) {
            out.converged = true;
            break;
        }
        tau *= 20.0;
    }
    out.z.assign(z.data(), z.data() + n);
    out.objective = prog.objective(out.z);
    return out;
}

}  // namespace besovkit
