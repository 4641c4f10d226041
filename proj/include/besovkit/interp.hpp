#pragma once

#include <vector>

#include "besovkit/norms.hpp"
#include "besovkit/space.hpp"

namespace besovkit {

/// f = g + h with h = sum_i m_f(B_i) phi_i over a t/6-net, and H = f#_t, a 1-gradient of h up to a constant.
struct KDecomposition {
    Function g;
    Function h;
    Function H;
    std::vector<PointId> centers;
    double radius = 0.0;        // t/6
    std::size_t overlap = 0;    // max number of balls 2B_i containing a point
    double h_validity = 0.0;    // smallest C with |h(x)-h(y)| <= C d(x,y) (H(x)+H(y))
};

KDecomposition k_decomposition(const Function& f, const MetricMeasureSpace& space, double t, double p);

/// f#_t(x) = sup_{r >= t} r^{-1} (mean over B(x,r) of |f - f(x)|^p)^{1/p}, exact over the finite radius set.
Function sharp_maximal(const Function& f, const MetricMeasureSpace& space, double t, double p);

/// max over y of sum_{x in B(y,t)} mu(x) / mu(B(x,t)).
double overlap_density(const MetricMeasureSpace& space, double t);

/// Constant C with E_p(f,t) <= C (||g||_p + t ||rho||_p) for every split f = g + h and 1-gradient rho of h.
double lower_constant(const MetricMeasureSpace& space, double t, double p);

struct KProfile {
    std::vector<double> t;
    std::vector<double> ep;        // E_p(f,t), the lower proxy
    std::vector<double> lower;     // E_p(f,t) / lower_constant
    std::vector<double> achieved;  // ||g||_p + t ||H||_p
    std::vector<double> upper;     // (sum_k 2^{-k p~} E_p(f, 2^k t)^{p~})^{1/p~}
    std::vector<double> certified; // ||g||_p + t max(1, h_validity) ||H||_p, a true upper bound on K
    std::vector<std::size_t> overlap;
};

KProfile k_profile(const Function& f, const MetricMeasureSpace& space, double p, const std::vector<double>& t_grid);

/// (sum_t (t^{-s} K(t))^q w_t)^{1/q} with the achieved values as K.
double interpolation_norm(const Function& f, const MetricMeasureSpace& space, double s, double p, double q,
                          const TGrid& grid);

struct EmbeddingCheck {
    double lhs = 0.0;        // inf_c ||u - c||_{L^{p*, q}}
    double rhs = 0.0;        // canonical-gradient homogeneous Besov norm
    double ratio = 0.0;
    double p_star = 0.0;
    double c_best = 0.0;
    double lhs_weak = 0.0;   // inf_c ||u - c||_{L^{p*, inf}}
    double nesting_bound = 0.0;  // (q/p*)^{1/q}: weak <= bound * strong for every function
    std::size_t scan = 512;
};

EmbeddingCheck lorentz_embedding_check(const Function& u, const SubsetMask& S, double s, double p, double q, double Q);

}  // namespace besovkit
