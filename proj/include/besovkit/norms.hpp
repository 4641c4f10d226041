#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "besovkit/space.hpp"

namespace besovkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smoothness s in (0,1), integrability p, summability q (kInf allowed), inner exponent r.
struct SmoothnessParams {
    double s = 0.5;
    double p = 2.0;
    double q = 2.0;
    double r = 0.5;

    void validate() const;
};

struct DyadicRange {
    int kmin = 0;
    int kmax = -1;
    std::size_t count() const { return kmax >= kmin ? static_cast<std::size_t>(kmax - kmin + 1) : 0; }
};

/// Scales k whose annulus 2^{-k-1} <= d < 2^{-k} can hold a pair of points.
DyadicRange dyadic_range(const MetricMeasureSpace& space);
DyadicRange dyadic_range(const SubsetMask& S);

/// Per-scale nonnegative functions g_k on the parent space, k in [kmin, kmax].
struct GradientSequence {
    DyadicRange range;
    double s = 0.0;
    std::vector<Function> g;

    GradientSequence() = default;
    GradientSequence(DyadicRange range, double s, std::size_t points);

    bool has(int k) const { return k >= range.kmin && k <= range.kmax; }
    Function& at(int k) { return g[static_cast<std::size_t>(k - range.kmin)]; }
    const Function& at(int k) const { return g[static_cast<std::size_t>(k - range.kmin)]; }
    double value(int k, PointId x) const { return has(k) ? at(k)[x] : 0.0; }
};

/// g_k(x) = max |u(x)-u(y)| d^{-s} over y in S within the k-th annulus of x.
GradientSequence canonical_gradient(const Function& u, const SubsetMask& S, double s);

struct ValidityReport {
    double constant = 0.0;        // smallest C with |f(x)-f(y)| <= C d^s (g_k(x)+g_k(y))
    std::size_t violations = 0;   // pairs with a difference but zero gradient sum
    std::size_t pairs = 0;
};

/// Scans every in-annulus pair of the region.
ValidityReport validity_constant(const Function& f, const GradientSequence& g, const SubsetMask& region, double s);

enum class SequenceKind { LpLq, LqLp };

double lp_norm(const Function& u, const SubsetMask& S, double p);
double sequence_norm(const GradientSequence& g, const SubsetMask& S, double p, double q, SequenceKind kind);

enum class NormKind { TriebelLizorkin, Besov, HajlaszSp };

struct InfimumResult {
    double value = 0.0;
    GradientSequence gradient;
};

/// Exact infimum of the gradient norm as a convex program (p >= 1, q in {p, inf}, or the single-gradient case).
InfimumResult infimum_gradient(const Function& u, const SubsetMask& S, const SmoothnessParams& params, NormKind kind,
                               std::size_t cap = 64);

/// Named values with the parameter tuple and discretization metadata.
struct NormReport {
    std::vector<std::pair<std::string, double>> values;
    SmoothnessParams params;
    std::size_t points = 0;
    double spacing = 0.0;
    DyadicRange range;

    void set(const std::string& name, double v);
    double get(const std::string& name) const;
    bool has(const std::string& name) const;
};

struct HajlaszOptions {
    bool exact = true;   // attempt the convex-program infima within the cap
    bool padded = false; // also report the positive-index reduction
    std::size_t cap = 64;
};

NormReport hajlasz_norms(const Function& u, const SubsetMask& S, const SmoothnessParams& params,
                         const HajlaszOptions& options = {});

/// Averaged modulus over the whole space, inner averages over B(x,t) in the space's own measure.
double ep_modulus(const Function& u, const MetricMeasureSpace& space, double t, double p);

/// Dyadic t-nodes in (0, t_max] with log-trapezoid weights approximating dt/t.
struct TGrid {
    std::vector<double> t;
    std::vector<double> weight;
};

/// Nodes 2^{-j} from t_max down to the first node below t_min.
TGrid dyadic_t_grid(double t_min, double t_max = 1.0);

/// omega, E_p and hat E_p of u on S at every node (omega only on grid spaces).
struct ModulusProfile {
    std::vector<double> omega;
    std::vector<double> ep;
    std::vector<double> ep_hat;
};

ModulusProfile modulus_profile(const Function& u, const SubsetMask& S, double p, const TGrid& grid);

/// (sum_t (t^{-s} m(t))^q w_t)^{1/q}, sup for q = inf.
double t_integral(const std::vector<double>& modulus, const TGrid& grid, double s, double q);

enum class BesovVariant { B, calB, hatB };

double besov_modulus_norm(const Function& u, const SubsetMask& S, const SmoothnessParams& params, BesovVariant variant,
                          const TGrid& grid);

enum class TLVariant { calF, hatF, C };

/// Per-point inner function g (or hat g, or the truncated C variant).
Function tl_inner(const Function& u, const SubsetMask& S, const SmoothnessParams& params, TLVariant variant,
                  const TGrid& grid, double tau = 0.5);

double tl_function_norm(const Function& u, const SubsetMask& S, const SmoothnessParams& params, TLVariant variant,
                        const TGrid& grid, double tau = 0.5);

/// Lorentz quasi-norm of u restricted to S (closed form on step distributions).
double lorentz_norm(const Function& u, const SubsetMask& S, double p, double q);

/// Hardy-Littlewood maximal function of each input, sup over every distinct ball at each center.
std::vector<Function> maximal_function(const std::vector<Function>& gs, const MetricMeasureSpace& space);
Function maximal_function(const Function& g, const MetricMeasureSpace& space);

}  // namespace besovkit
