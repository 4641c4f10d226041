#pragma once

#include <vector>

#include "besovkit/space.hpp"

namespace besovkit {

struct DensityReport {
    bool passed = true;
    double worst_ratio = 1.0;       // min over tested (x, r) of mu(S cap B) / mu(B)
    PointId witness = 0;
    double witness_radius = 0.0;
    double c_m = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t pairs_tested = 0;   // (center, radius) pairs whose ball stays inside the box
    std::size_t pairs_skipped = 0;
};

/// Scans every center of S against every sampled radius; balls leaving the grid's bounding box are skipped.
DensityReport check_measure_density(const SubsetMask& S, double c_m, const std::vector<double>& radii);

/// Log-uniform radii in (r_min, r_max], `per_decade` samples per factor of ten.
std::vector<double> log_radii(double r_min, double r_max, int per_decade = 16);

/// Per-center worst ratio, used to follow the tip of a cusp across refinements.
double density_ratio_at(const SubsetMask& S, PointId x, const std::vector<double>& radii);

Region make_box(std::vector<double> lo, std::vector<double> hi);
Region make_ball(std::vector<double> center, double radius);
/// {x : x[axis] <= level}
Region make_half_space(std::size_t axis, double level);
/// Unit square with a centered open hole of relative side fractions[l] cut from every live square at level l.
Region make_carpet(int levels, std::vector<double> fractions);
/// Unit disc minus the slit [0,1) x {0}.
Region make_slit_disc();
/// {(x,y) : 0 < x < 1, |y| < x^beta}
Region make_cusp(double beta);

/// Area of the carpet from the level recursion 1 - sum_l a_l^2 (8/9)^{l-1}.
double carpet_area(int levels, const std::vector<double>& fractions);

}  // namespace besovkit
