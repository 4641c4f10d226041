#include "besovkit/median.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace besovkit {

double median(std::span<const double> values, std::span<const double> weights) {
    if (values.empty()) throw ConfigError("median: empty sample");
    if (values.size() != weights.size()) throw ConfigError("median: values and weights differ in length");

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b] || (values[a] == values[b] && a < b);
    });
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw ConfigError("median: weights must be positive");
        total += w;
    }

    // The valid thresholds are (-inf, a*]; a* is the largest distinct value whose
    // strictly-smaller mass stays within half the total.
    double below = 0.0;
    double answer = values[order.front()];
    std::size_t i = 0;
    while (i < order.size()) {
        const double v = values[order[i]];
        if (2.0 * below > total) break;
        answer = v;
        while (i < order.size() && values[order[i]] == v) below += weights[order[i++]];
    }
    return answer;
}

double median_over(const Function& u, const MetricMeasureSpace& space, std::span<const PointId> ids) {
    if (ids.empty()) throw GeometryError("empty ball-mask intersection");
    std::vector<double> v, w;
    v.reserve(ids.size());
    w.reserve(ids.size());
    for (PointId i : ids) {
        v.push_back(u[i]);
        w.push_back(space.weight(i));
    }
    return median(v, w);
}

double median_on_ball(const Function& u, const MetricMeasureSpace& space, PointId x, double r,
                      const SubsetMask* mask) {
    std::vector<PointId> ids;
    for (PointId y : space.ball(x, r))
        if (!mask || mask->contains(y)) ids.push_back(y);
    return median_over(u, space, ids);
}

MedianDefect median_defect(std::span<const double> values, std::span<const double> weights, double c,
                           double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("median_defect: eta must lie in (0, 1]");
    MedianDefect out;
    out.lhs = std::abs(median(values, weights) - c);
    double total = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        total += weights[i];
        acc += weights[i] * std::pow(std::abs(values[i] - c), eta);
    }
    out.rhs = std::pow(2.0 * acc / total, 1.0 / eta);
    return out;
}

}  // namespace besovkit
