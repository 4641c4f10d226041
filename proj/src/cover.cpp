#include "besovkit/cover.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace besovkit {

WhitneyCover whitney_cover(const MetricMeasureSpace& space, const SubsetMask& S, double small_threshold) {
    if (S.count() == 0) throw GeometryError("whitney_cover: S is empty");
    if (S.count() == S.size()) throw GeometryError("whitney_cover: complement of S is empty");
    if (!(small_threshold > 0.0)) throw ConfigError("whitney_cover: small-ball threshold must be positive");

    const auto dist = S.distance_to_set();
    const auto nearest = S.nearest_member();
    auto candidates = S.complement_ids();
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](PointId a, PointId b) { return dist[a] > dist[b]; });

    WhitneyCover cover;
    cover.small_threshold = small_threshold;
    cover.covered.assign(space.size(), 0);
    for (PointId x : candidates) cover.covered[x] = 1;

    // Greedy packing: keep x when B(x, r/5) misses every accepted fifth-ball.
    for (PointId x : candidates) {
        const double r = dist[x] / 10.0;
        bool free = true;
        for (std::size_t j = 0; j < cover.centers.size() && free; ++j) {
            if (space.distance(x, cover.centers[j]) < (r + cover.radii[j]) / 5.0) free = false;
        }
        if (!free) continue;
        cover.centers.push_back(x);
        cover.radii.push_back(r);
        cover.reflected.push_back(nearest[x]);
    }
    for (std::size_t i = 0; i < cover.size(); ++i)
        if (cover.radii[i] < small_threshold) cover.small.push_back(i);

    std::vector<std::size_t> count(space.size(), 0);
    for (std::size_t i = 0; i < cover.size(); ++i)
        space.for_each_in_ball(cover.centers[i], 5.0 * cover.radii[i], [&](PointId y, double) { ++count[y]; });
    cover.overlap_bound = *std::max_element(count.begin(), count.end());
    return cover;
}

PartitionOfUnity tent_partition(const MetricMeasureSpace& space, const std::vector<PointId>& centers,
                                const std::vector<double>& radii, const std::vector<char>& domain) {
    PartitionOfUnity pou;
    pou.at.assign(space.size(), {});
    std::vector<std::size_t> count(space.size(), 0);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double r = radii[i];
        space.for_each_in_ball(centers[i], 2.0 * r, [&](PointId y, double d) {
            if (!domain[y]) return;
            const double psi = std::clamp(2.0 - d / r, 0.0, 1.0);
            if (psi > 0.0) pou.at[y].push_back({i, psi});
        });
        space.for_each_in_ball(centers[i], 5.0 * r, [&](PointId y, double) { ++count[y]; });
    }
    for (PointId y = 0; y < space.size(); ++y) {
        if (!domain[y]) continue;
        auto& row = pou.at[y];
        double sum = 0.0;
        for (const auto& e : row) sum += e.value;
        if (!(sum > 0.0)) throw GeometryError("cover gap");
        for (auto& e : row) e.value /= sum;
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.ball < b.ball; });
    }
    const std::size_t m = count.empty() ? 0 : *std::max_element(count.begin(), count.end());
    pou.lipschitz_factor = 1.0 + 6.0 * static_cast<double>(m);
    return pou;
}

PartitionOfUnity partition_of_unity(const WhitneyCover& cover, const MetricMeasureSpace& space) {
    return tent_partition(space, cover.centers, cover.radii, cover.covered);
}

namespace {

void fail(CoverCheck& out, const std::string& what) {
    ++out.failures;
    if (out.messages.size() < 20) out.messages.push_back(what);
}

}  // namespace

CoverCheck check_cover(const WhitneyCover& cover, const MetricMeasureSpace& space, const SubsetMask& S) {
    CoverCheck out;
    const auto dist = S.distance_to_set();
    std::vector<std::size_t> in_ball(space.size(), 0), in_five(space.size(), 0);

    for (std::size_t i = 0; i < cover.size(); ++i) {
        const PointId xi = cover.centers[i];
        const double ri = cover.radii[i];
        if (ri != dist[xi] / 10.0) fail(out, "radius is not dist/10");
        if (!(space.distance(xi, cover.reflected[i]) < 15.0 * ri) || !S.contains(cover.reflected[i]))
            fail(out, "reflected center not in S within 15 r");
        space.for_each_in_ball(xi, ri, [&](PointId y, double) { ++in_ball[y]; });
        space.for_each_in_ball(xi, 5.0 * ri, [&](PointId y, double) {
            ++in_five[y];
            if (S.contains(y)) fail(out, "5B_i meets S");
            // 5 r_i = dist(x_i)/2 in exact arithmetic; the product 5.0 * r_i may round past it
            const double slack = 1e-12 * ri;
            if (!(5.0 * ri - slack < dist[y] && dist[y] < 15.0 * ri + slack)) fail(out, "distance band violated on 5B_i");
        });
        for (std::size_t j = i + 1; j < cover.size(); ++j) {
            if (space.distance(xi, cover.centers[j]) < (ri + cover.radii[j]) / 5.0)
                fail(out, "fifth-balls overlap");
        }
    }
    for (PointId y = 0; y < space.size(); ++y) {
        if (cover.covered[y] != (S.contains(y) ? 0 : 1)) fail(out, "covered mask differs from complement");
        if (cover.covered[y] && in_ball[y] == 0) fail(out, "complement point not covered");
        if (in_five[y] > cover.overlap_bound) fail(out, "overlap exceeds M");
    }
    // Neighbor comparability, tested through shared points of 5B_i and 5B_j.
    std::vector<std::vector<std::size_t>> owners(space.size());
    for (std::size_t i = 0; i < cover.size(); ++i)
        space.for_each_in_ball(cover.centers[i], 5.0 * cover.radii[i],
                               [&](PointId y, double) { owners[y].push_back(i); });
    for (const auto& list : owners)
        for (std::size_t a : list)
            for (std::size_t b : list)
                if (!(cover.radii[a] / 3.0 <= cover.radii[b] && cover.radii[b] <= 3.0 * cover.radii[a]))
                    fail(out, "neighbor radii not comparable");
    return out;
}

CoverCheck check_partition(const PartitionOfUnity& pou, const WhitneyCover& cover, const MetricMeasureSpace& space) {
    CoverCheck out;
    const double inv_m = 1.0 / static_cast<double>(std::max<std::size_t>(cover.overlap_bound, 1));
    for (PointId y = 0; y < space.size(); ++y) {
        double sum = 0.0;
        for (const auto& e : pou.at[y]) {
            sum += e.value;
            if (e.value < 0.0 || e.value > 1.0) fail(out, "bump outside [0,1]");
            if (!(space.distance(y, cover.centers[e.ball]) < 2.0 * cover.radii[e.ball])) fail(out, "support leaves 2B_i");
        }
        if (cover.covered[y]) {
            if (std::abs(sum - 1.0) > 1e-12) fail(out, "partition does not sum to one");
        } else if (!pou.at[y].empty()) {
            fail(out, "bump positive outside the open set");
        }
    }
    for (std::size_t i = 0; i < cover.size(); ++i) {
        space.for_each_in_ball(cover.centers[i], cover.radii[i], [&](PointId y, double) {
            double v = 0.0;
            for (const auto& e : pou.at[y])
                if (e.ball == i) v = e.value;
            if (v < inv_m) {
                std::ostringstream msg;
                msg << "phi_" << i << " below 1/M on B_i";
                fail(out, msg.str());
            }
        });
    }
    return out;
}

}  // namespace besovkit
