#pragma once

#include <optional>

#include "besovkit/cover.hpp"
#include "besovkit/norms.hpp"
#include "besovkit/space.hpp"

namespace besovkit {

enum class ExtensionMethod { Median, Average };

/// Unset optional fields take the midpoints of their admissible intervals.
struct ExtensionParams {
    std::optional<double> delta;      // in (0, 1-s)
    std::optional<double> eps_prime;  // in (0, s)
    std::optional<double> t_inner;    // in (0, min(p,q))
    ExtensionMethod method = ExtensionMethod::Median;
    double v_radius = 8.0;            // V = {dist(x,S) < v_radius}
    double small_threshold = 1.0;     // J = {r_i < small_threshold}

    /// Fills defaults from (s, p, q) and checks every range.
    ExtensionParams resolved(const SmoothnessParams& sp) const;
};

/// Local extension: u on S, sum over J of phi_i times the median (or mean) of u on B(x_i*, r_i) cap S elsewhere.
Function local_extend(const Function& u, const SubsetMask& S, const WhitneyCover& cover, const PartitionOfUnity& pou,
                      ExtensionMethod method);

/// Extension gradient on V: sum_j of 2^{(j-k) delta} G_j for j < k plus 2^{(k-j)(s-eps')} G_j for j >= k-6, with G_j = (M g_j^t)^{1/t} over the whole space and g_j = 0 off S.
GradientSequence extension_gradient(const GradientSequence& gs, const SubsetMask& V, double s, double delta,
                                    double eps_prime, double t_inner);

struct Cutoff {
    Function psi;
    double lipschitz = 0.0;
    int k_L = 0;  // 2^{k_L - 1} < L <= 2^{k_L}
};

/// psi = clamp(2 - dist(x,S) / (v_radius/2), 0, 1).
Cutoff cutoff(const SubsetMask& S, double v_radius = 8.0);

/// Integer k with 2^{k-1} < L <= 2^k.
int lipschitz_scale(double L);

struct Combined {
    Function Eu;
    GradientSequence gradient;
};

/// Eu = psi * Etilde with the two-branch Leibniz gradient on {psi > 0}.
Combined combine_cutoff(const Function& etilde, const GradientSequence& gt, const Cutoff& cut, double s,
                        const MetricMeasureSpace& space);

struct ExtensionResult {
    Function Eu;
    Function Etilde;
    std::vector<char> V;
    Cutoff cut;
    WhitneyCover cover;
    GradientSequence source_gradient;  // (g_k) on S
    GradientSequence gradient;         // (tilde g_k) on V
    GradientSequence final_gradient;   // (g'_k) on X
    ValidityReport validity_tilde;     // (Etilde, tilde g) over V
    ValidityReport validity_final;     // (Eu, g') over X
    std::size_t outside_v = 0;         // points of X with dist(x,S) >= v_radius
    ExtensionParams params;
};

/// Full pipeline; the source gradient defaults to the canonical one.
ExtensionResult extend(const Function& u, const SubsetMask& S, const SmoothnessParams& sp, const ExtensionParams& ep,
                       const GradientSequence* source = nullptr);

/// Norm ratios used by the boundedness studies (canonical-gradient upper bounds throughout).
struct ExtensionRatios {
    double tl_gradient = 0.0;     // ||tilde g||_{L^p(V, l^q)} / ||g||_{L^p(S, l^q)}
    double besov_gradient = 0.0;  // ||tilde g||_{l^q(L^p(V))} / ||g||_{l^q(L^p(S))}
    double lp = 0.0;              // ||Etilde||_{L^p(V)} / ||u||_{L^p(S)}
    double besov_norm = 0.0;      // ||Eu||_{N(X)} / ||u||_{N(S)}, canonical upper bounds
};

ExtensionRatios extension_ratios(const ExtensionResult& res, const Function& u, const SubsetMask& S,
                                 const SmoothnessParams& sp);

}  // namespace besovkit
