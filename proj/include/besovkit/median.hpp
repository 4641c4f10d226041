#pragma once

#include <span>
#include <utility>
#include <vector>

#include "besovkit/space.hpp"

namespace besovkit {

/// Largest a with weight{u < a} <= total/2. Always an attained value.
double median(std::span<const double> values, std::span<const double> weights);

/// Median of u over the points `ids` of `space`, weighted by the point measure.
double median_over(const Function& u, const MetricMeasureSpace& space, std::span<const PointId> ids);

/// Median of u on B(x, r), optionally intersected with a mask.
double median_on_ball(const Function& u, const MetricMeasureSpace& space, PointId x, double r,
                      const SubsetMask* mask = nullptr);

struct MedianDefect {
    double lhs = 0.0;  // |m_u - c|
    double rhs = 0.0;  // (2 * mean |u - c|^eta)^(1/eta)
};

/// Both sides of the median comparison estimate on a weighted sample.
MedianDefect median_defect(std::span<const double> values, std::span<const double> weights, double c,
                           double eta);

}  // namespace besovkit
