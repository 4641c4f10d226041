#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "besovkit/space.hpp"

namespace besovkit {

/// Whitney balls B_i = B(x_i, r_i) covering the complement of S, r_i = dist(x_i, S)/10.
struct WhitneyCover {
    std::vector<PointId> centers;
    std::vector<double> radii;
    std::vector<PointId> reflected;   // nearest member of S to each center
    std::vector<std::size_t> small;   // indices with r_i < small_threshold
    double small_threshold = 1.0;
    std::size_t overlap_bound = 0;    // max number of balls 5B_i containing a point
    std::vector<char> covered;        // complement of S in the parent space

    std::size_t size() const { return centers.size(); }
};

/// Sparse tent partition of unity: for each point, the bumps that are positive there.
struct PartitionOfUnity {
    struct Entry {
        std::size_t ball;
        double value;
    };
    std::vector<std::vector<Entry>> at;  // indexed by PointId
    double lipschitz_factor = 0.0;       // K in |phi_i(x) - phi_i(y)| <= K d(x,y) / r_i
};

WhitneyCover whitney_cover(const MetricMeasureSpace& space, const SubsetMask& S, double small_threshold = 1.0);

/// psi_i = clamp(2 - d(x, x_i)/r_i, 0, 1), normalized over the covered set.
PartitionOfUnity partition_of_unity(const WhitneyCover& cover, const MetricMeasureSpace& space);

/// Tent partition for arbitrary centers and radii over a point set; throws "cover gap"
/// when a listed point has no positive bump.
PartitionOfUnity tent_partition(const MetricMeasureSpace& space, const std::vector<PointId>& centers,
                                const std::vector<double>& radii, const std::vector<char>& domain);

/// Outcome of checking the cover lemma and partition properties on one instance.
struct CoverCheck {
    std::size_t failures = 0;
    std::vector<std::string> messages;
    bool ok() const { return failures == 0; }
};

CoverCheck check_cover(const WhitneyCover& cover, const MetricMeasureSpace& space, const SubsetMask& S);
CoverCheck check_partition(const PartitionOfUnity& pou, const WhitneyCover& cover, const MetricMeasureSpace& space);

}  // namespace besovkit
