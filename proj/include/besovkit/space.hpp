#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "besovkit/error.hpp"

namespace besovkit {

using PointId = std::size_t;

/// A per-point real function on a space (indexed by PointId).
using Function = std::vector<double>;

/// Axis-aligned box, one [lo, hi] interval per dimension.
struct BoundingBox {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    /// Distance from a point inside the box to the nearest face.
    double distance_to_boundary(std::span<const double> x) const;
};

/// Lattice structure of a uniform grid; present only for grid spaces.
struct GridLattice {
    double spacing = 0.0;
    BoundingBox bbox;
    std::vector<std::int64_t> extent;  // lattice points per axis in the bbox
    // lattice coordinates of each point, dim entries per point
    std::vector<std::int64_t> index;
};

/// Finite metric measure space: points, strictly positive weights, and a metric.
///
/// The metric is either Euclidean on stored coordinates or an explicit dense
/// distance table. Coordinate spaces carry a bucket index built once at
/// construction; all queries are const and safe to run concurrently.
class MetricMeasureSpace {
public:
    /// Euclidean point cloud. `coords` holds dim values per point.
    static MetricMeasureSpace from_coordinates(std::size_t dim, std::vector<double> coords,
                                               std::vector<double> weights);
    /// Abstract space given by a symmetric distance table (row-major n x n).
    static MetricMeasureSpace from_distance_table(std::vector<double> table,
                                                  std::vector<double> weights);

    std::size_t size() const { return weights_.size(); }
    std::size_t dim() const { return dim_; }
    bool has_coordinates() const { return dim_ > 0; }
    bool is_grid() const { return lattice_.has_value(); }
    const std::optional<GridLattice>& lattice() const { return lattice_; }

    double weight(PointId i) const { return weights_[i]; }
    std::span<const double> weights() const { return weights_; }
    double total_measure() const { return total_measure_; }
    std::span<const double> coords(PointId i) const;

    double distance(PointId a, PointId b) const;

    /// Open ball {y : d(x,y) < r}, sorted by id.
    std::vector<PointId> ball(PointId x, double r) const;
    /// Visits every y with d(x,y) < r together with d(x,y). Order unspecified.
    void for_each_in_ball(PointId x, double r,
                          const std::function<void(PointId, double)>& fn) const;
    double ball_measure(PointId x, double r) const;

    double diameter() const;
    /// Smallest positive pairwise distance.
    double min_separation() const;

    /// Point id at the given lattice coordinates, if it belongs to the grid space.
    std::optional<PointId> lattice_point(std::span<const std::int64_t> idx) const;

    /// Attach lattice information (used by build_grid).
    void set_lattice(GridLattice lattice);

private:
    MetricMeasureSpace() = default;
    void build_index();
    void validate() const;

    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::vector<double> table_;
    std::vector<double> weights_;
    double total_measure_ = 0.0;

    // bucket index
    double cell_ = 0.0;
    std::vector<double> cell_origin_;
    std::vector<std::int64_t> cell_extent_;
    std::vector<std::vector<PointId>> buckets_;

    std::optional<GridLattice> lattice_;
    std::unordered_map<std::uint64_t, PointId> lattice_lookup_;

    // pairwise extremes, computed on first use
    struct Extremes {
        std::once_flag once;
        double diameter = 0.0;
        double min_sep = 0.0;
    };
    std::shared_ptr<Extremes> extremes_ = std::make_shared<Extremes>();
    const Extremes& extremes() const;
};

/// Measurable subset S of a parent space.
class SubsetMask {
public:
    SubsetMask(const MetricMeasureSpace& parent, std::vector<char> members);
    static SubsetMask all(const MetricMeasureSpace& parent);

    const MetricMeasureSpace& parent() const { return *parent_; }
    bool contains(PointId i) const { return members_[i] != 0; }
    std::size_t count() const { return count_; }
    std::size_t size() const { return members_.size(); }
    double measure() const { return measure_; }
    std::vector<PointId> member_ids() const;
    std::vector<PointId> complement_ids() const;
    const std::vector<char>& members() const { return members_; }

    /// dist(x, S) for every point of the parent space (0 on members).
    std::vector<double> distance_to_set() const;
    /// Nearest member of S for every parent point; ties go to the lowest id.
    std::vector<PointId> nearest_member() const;

    /// The induced space (S, d, mu|S) plus the map from induced ids to parent ids.
    std::pair<MetricMeasureSpace, std::vector<PointId>> induced_space() const;

private:
    const MetricMeasureSpace* parent_;
    std::vector<char> members_;
    std::size_t count_ = 0;
    double measure_ = 0.0;
};

/// Region predicate over R^n with a display name.
struct Region {
    std::string name;
    std::function<bool(std::span<const double>)> contains;
};

/// Uniform grid of spacing h over `bbox`, restricted to `region`; weights h^n.
MetricMeasureSpace build_grid(const Region& region, double h, const BoundingBox& bbox);

/// Structural constants estimated on the discretization.
struct SpaceConstants {
    double doubling_estimate = 1.0;
    double q_estimate = 0.0;
    double regularity_constant = 1.0;  // c_Q for the fitted q_estimate
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t centers_used = 0;
};

/// Doubling ratio maximum and a least-squares dimension fit of log mu(B) against log r.
SpaceConstants estimate_constants(const MetricMeasureSpace& space, std::span<const double> radii);

/// Index of the dyadic annulus 2^{-k-1} <= d < 2^{-k} containing d > 0.
int annulus_index(double d);

}  // namespace besovkit
