#include "besovkit/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace besovkit {

double BoundingBox::distance_to_boundary(std::span<const double> x) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < dim(); ++d) {
        best = std::min({best, x[d] - lo[d], hi[d] - x[d]});
    }
    return best;
}

int annulus_index(double d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw Error("annulus_index: distance must be positive and finite");
    }
    int k = static_cast<int>(std::floor(-std::log2(d)));
    // log2 rounding can be off by one near powers of two
    while (!(d < std::ldexp(1.0, -k))) --k;
    while (!(std::ldexp(1.0, -k - 1) <= d)) ++k;
    return k;
}

MetricMeasureSpace MetricMeasureSpace::from_coordinates(std::size_t dim, std::vector<double> coords,
                                                        std::vector<double> weights) {
    if (dim == 0) throw ConfigError("space: dimension must be positive");
    if (coords.size() != dim * weights.size()) {
        throw ConfigError("space: coordinate count does not match weights");
    }
    MetricMeasureSpace s;
    s.dim_ = dim;
    s.coords_ = std::move(coords);
    s.weights_ = std::move(weights);
    s.validate();
    s.build_index();
    return s;
}

MetricMeasureSpace MetricMeasureSpace::from_distance_table(std::vector<double> table,
                                                           std::vector<double> weights) {
    const std::size_t n = weights.size();
    if (table.size() != n * n) throw ConfigError("space: distance table must be n x n");
    MetricMeasureSpace s;
    s.table_ = std::move(table);
    s.weights_ = std::move(weights);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.table_[i * n + i] != 0.0) throw ConfigError("space: metric diagonal must be zero");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = s.table_[i * n + j];
            if (a != s.table_[j * n + i]) throw ConfigError("space: metric must be symmetric");
            if (!(a > 0.0)) throw ConfigError("space: distinct points need positive distance");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (s.table_[i * n + k] > s.table_[i * n + j] + s.table_[j * n + k] + 1e-12) {
                    throw ConfigError("space: triangle inequality violated");
                }
    s.validate();
    s.total_measure_ = std::accumulate(s.weights_.begin(), s.weights_.end(), 0.0);
    return s;
}

void MetricMeasureSpace::validate() const {
    if (weights_.empty()) throw ConfigError("empty domain");
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("space: weights must be positive");
    }
}

void MetricMeasureSpace::build_index() {
    const std::size_t n = size();
    total_measure_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);

    std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim_; ++d) {
            lo[d] = std::min(lo[d], coords_[i * dim_ + d]);
            hi[d] = std::max(hi[d], coords_[i * dim_ + d]);
        }
    }
    double span = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) span = std::max(span, hi[d] - lo[d]);
    // roughly one point per bucket
    cell_ = span > 0.0 ? span / std::pow(static_cast<double>(n), 1.0 / dim_) : 1.0;
    if (!(cell_ > 0.0)) cell_ = 1.0;
    cell_origin_ = lo;
    cell_extent_.assign(dim_, 1);
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim_; ++d) {
        cell_extent_[d] = static_cast<std::int64_t>(std::floor((hi[d] - lo[d]) / cell_)) + 1;
        total *= static_cast<std::size_t>(cell_extent_[d]);
    }
    buckets_.assign(total, {});
    for (PointId i = 0; i < n; ++i) {
        std::size_t key = 0;
        for (std::size_t d = dim_; d-- > 0;) {
            auto c = static_cast<std::int64_t>(std::floor((coords_[i * dim_ + d] - lo[d]) / cell_));
            c = std::clamp<std::int64_t>(c, 0, cell_extent_[d] - 1);
            key = key * static_cast<std::size_t>(cell_extent_[d]) + static_cast<std::size_t>(c);
        }
        buckets_[key].push_back(i);
    }
}

std::span<const double> MetricMeasureSpace::coords(PointId i) const {
    return {coords_.data() + i * dim_, dim_};
}

double MetricMeasureSpace::distance(PointId a, PointId b) const {
    if (dim_ == 0) return table_[a * size() + b];
    double acc = 0.0;
    const double* pa = coords_.data() + a * dim_;
    const double* pb = coords_.data() + b * dim_;
    for (std::size_t d = 0; d < dim_; ++d) {
        const double t = pa[d] - pb[d];
        acc += t * t;
    }
    return std::sqrt(acc);
}

void MetricMeasureSpace::for_each_in_ball(PointId x, double r,
                                          const std::function<void(PointId, double)>& fn) const {
    if (dim_ == 0) {
        for (PointId y = 0; y < size(); ++y) {
            const double d = distance(x, y);
            if (d < r) fn(y, d);
        }
        return;
    }
    std::vector<std::int64_t> cmin(dim_), cmax(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
        const double c = coords_[x * dim_ + d];
        cmin[d] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((c - r - cell_origin_[d]) / cell_)));
        cmax[d] = std::min<std::int64_t>(cell_extent_[d] - 1,
                                         static_cast<std::int64_t>(std::floor((c + r - cell_origin_[d]) / cell_)));
        if (cmin[d] > cmax[d]) return;
    }
    std::vector<std::int64_t> cur = cmin;
    while (true) {
        std::size_t key = 0;
        for (std::size_t d = dim_; d-- > 0;) {
            key = key * static_cast<std::size_t>(cell_extent_[d]) + static_cast<std::size_t>(cur[d]);
        }
        for (PointId y : buckets_[key]) {
            const double d = distance(x, y);
            if (d < r) fn(y, d);
        }
        std::size_t d = 0;
        while (d < dim_ && ++cur[d] > cmax[d]) {
            cur[d] = cmin[d];
            ++d;
        }
        if (d == dim_) break;
    }
}

std::vector<PointId> MetricMeasureSpace::ball(PointId x, double r) const {
    std::vector<PointId> out;
    for_each_in_ball(x, r, [&](PointId y, double) { out.push_back(y); });
    std::sort(out.begin(), out.end());
    return out;
}

double MetricMeasureSpace::ball_measure(PointId x, double r) const {
    double m = 0.0;
    for_each_in_ball(x, r, [&](PointId y, double) { m += weights_[y]; });
    return m;
}

const MetricMeasureSpace::Extremes& MetricMeasureSpace::extremes() const {
    std::call_once(extremes_->once, [this] {
        double diam = 0.0;
        double sep = std::numeric_limits<double>::infinity();
        for (PointId i = 0; i < size(); ++i)
            for (PointId j = i + 1; j < size(); ++j) {
                const double d = distance(i, j);
                diam = std::max(diam, d);
                sep = std::min(sep, d);
            }
        extremes_->diameter = diam;
        extremes_->min_sep = sep;
    });
    return *extremes_;
}

double MetricMeasureSpace::diameter() const { return extremes().diameter; }

double MetricMeasureSpace::min_separation() const { return extremes().min_sep; }

void MetricMeasureSpace::set_lattice(GridLattice lattice) {
    lattice_lookup_.clear();
    const std::size_t n = size();
    for (PointId i = 0; i < n; ++i) {
        std::uint64_t key = 0;
        for (std::size_t d = dim_; d-- > 0;) {
            key = key * static_cast<std::uint64_t>(lattice.extent[d]) +
                  static_cast<std::uint64_t>(lattice.index[i * dim_ + d]);
        }
        lattice_lookup_.emplace(key, i);
    }
    lattice_ = std::move(lattice);
}

std::optional<PointId> MetricMeasureSpace::lattice_point(std::span<const std::int64_t> idx) const {
    if (!lattice_) return std::nullopt;
    std::uint64_t key = 0;
    for (std::size_t d = dim_; d-- > 0;) {
        if (idx[d] < 0 || idx[d] >= lattice_->extent[d]) return std::nullopt;
        key = key * static_cast<std::uint64_t>(lattice_->extent[d]) + static_cast<std::uint64_t>(idx[d]);
    }
    auto it = lattice_lookup_.find(key);
    if (it == lattice_lookup_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------

SubsetMask::SubsetMask(const MetricMeasureSpace& parent, std::vector<char> members)
    : parent_(&parent), members_(std::move(members)) {
    if (members_.size() != parent.size()) throw ConfigError("mask: size does not match space");
    for (PointId i = 0; i < members_.size(); ++i) {
        if (members_[i]) {
            ++count_;
            measure_ += parent.weight(i);
        }
    }
}

SubsetMask SubsetMask::all(const MetricMeasureSpace& parent) {
    return SubsetMask(parent, std::vector<char>(parent.size(), 1));
}

std::vector<PointId> SubsetMask::member_ids() const {
    std::vector<PointId> out;
    out.reserve(count_);
    for (PointId i = 0; i < members_.size(); ++i)
        if (members_[i]) out.push_back(i);
    return out;
}

std::vector<PointId> SubsetMask::complement_ids() const {
    std::vector<PointId> out;
    for (PointId i = 0; i < members_.size(); ++i)
        if (!members_[i]) out.push_back(i);
    return out;
}

std::vector<double> SubsetMask::distance_to_set() const {
    const auto ids = member_ids();
    std::vector<double> dist(size(), 0.0);
    for (PointId x = 0; x < size(); ++x) {
        if (members_[x]) continue;
        double best = std::numeric_limits<double>::infinity();
        for (PointId y : ids) best = std::min(best, parent_->distance(x, y));
        dist[x] = best;
    }
    return dist;
}

std::vector<PointId> SubsetMask::nearest_member() const {
    const auto ids = member_ids();
    if (ids.empty()) throw GeometryError("mask: empty set has no nearest member");
    std::vector<PointId> out(size());
    for (PointId x = 0; x < size(); ++x) {
        if (members_[x]) {
            out[x] = x;
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        PointId arg = ids.front();
        for (PointId y : ids) {  // ids ascending, strict < keeps the lowest id on ties
            const double d = parent_->distance(x, y);
            if (d < best) {
                best = d;
                arg = y;
            }
        }
        out[x] = arg;
    }
    return out;
}

std::pair<MetricMeasureSpace, std::vector<PointId>> SubsetMask::induced_space() const {
    const auto ids = member_ids();
    if (ids.empty()) throw ConfigError("empty domain");
    std::vector<double> w;
    w.reserve(ids.size());
    for (PointId i : ids) w.push_back(parent_->weight(i));
    if (parent_->has_coordinates()) {
        const std::size_t dim = parent_->dim();
        std::vector<double> c;
        c.reserve(ids.size() * dim);
        for (PointId i : ids) {
            auto p = parent_->coords(i);
            c.insert(c.end(), p.begin(), p.end());
        }
        auto space = MetricMeasureSpace::from_coordinates(dim, std::move(c), std::move(w));
        if (parent_->is_grid()) {
            GridLattice lat = *parent_->lattice();
            std::vector<std::int64_t> idx;
            idx.reserve(ids.size() * dim);
            for (PointId i : ids)
                for (std::size_t d = 0; d < dim; ++d) idx.push_back(lat.index[i * dim + d]);
            lat.index = std::move(idx);
            space.set_lattice(std::move(lat));
        }
        return {std::move(space), ids};
    }
    std::vector<double> table(ids.size() * ids.size());
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = 0; b < ids.size(); ++b) table[a * ids.size() + b] = parent_->distance(ids[a], ids[b]);
    return {MetricMeasureSpace::from_distance_table(std::move(table), std::move(w)), ids};
}

// ---------------------------------------------------------------------------

MetricMeasureSpace build_grid(const Region& region, double h, const BoundingBox& bbox) {
    if (!(h > 0.0)) throw ConfigError("build_grid: spacing must be positive");
    const std::size_t dim = bbox.dim();
    if (dim == 0 || bbox.hi.size() != dim) throw ConfigError("build_grid: malformed bounding box");
    GridLattice lat;
    lat.spacing = h;
    lat.bbox = bbox;
    lat.extent.resize(dim);
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim; ++d) {
        if (!(bbox.hi[d] >= bbox.lo[d])) throw ConfigError("build_grid: empty bounding box");
        lat.extent[d] = static_cast<std::int64_t>(std::floor((bbox.hi[d] - bbox.lo[d]) / h + 1e-9)) + 1;
        total *= static_cast<std::size_t>(lat.extent[d]);
    }
    std::vector<double> coords;
    std::vector<double> point(dim);
    std::vector<std::int64_t> idx(dim, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t d = 0; d < dim; ++d) {
            idx[d] = static_cast<std::int64_t>(rem % static_cast<std::size_t>(lat.extent[d]));
            rem /= static_cast<std::size_t>(lat.extent[d]);
            point[d] = bbox.lo[d] + static_cast<double>(idx[d]) * h;
        }
        if (region.contains(point)) {
            coords.insert(coords.end(), point.begin(), point.end());
            lat.index.insert(lat.index.end(), idx.begin(), idx.end());
        }
    }
    if (coords.empty()) throw ConfigError("empty domain");
    const std::size_t n = coords.size() / dim;
    auto space = MetricMeasureSpace::from_coordinates(dim, std::move(coords),
                                                      std::vector<double>(n, std::pow(h, static_cast<double>(dim))));
    space.set_lattice(std::move(lat));
    return space;
}

SpaceConstants estimate_constants(const MetricMeasureSpace& space, std::span<const double> radii) {
    if (radii.empty()) throw ConfigError("estimate_constants: no radii");
    const auto [rmin_it, rmax_it] = std::minmax_element(radii.begin(), radii.end());
    if (!(*rmax_it > *rmin_it)) throw ConfigError("estimate_constants: degenerate fit (all radii equal)");
    const double rmax = *rmax_it;

    // Centers whose doubled balls stay inside the bounding box, when a box exists.
    std::vector<PointId> centers;
    if (space.is_grid()) {
        const auto& box = space.lattice()->bbox;
        for (PointId x = 0; x < space.size(); ++x)
            if (box.distance_to_boundary(space.coords(x)) >= 2.0 * rmax) centers.push_back(x);
    }
    if (centers.empty()) {
        centers.resize(space.size());
        std::iota(centers.begin(), centers.end(), PointId{0});
    }

    SpaceConstants out;
    out.r_min = *rmin_it;
    out.r_max = rmax;
    out.centers_used = centers.size();

    std::vector<double> logr, logm;
    for (double r : radii) {
        double mean_log = 0.0;
        for (PointId x : centers) {
            const double m1 = space.ball_measure(x, r);
            const double m2 = space.ball_measure(x, 2.0 * r);
            out.doubling_estimate = std::max(out.doubling_estimate, m2 / m1);
            mean_log += std::log(m1);
        }
        logr.push_back(std::log(r));
        logm.push_back(mean_log / static_cast<double>(centers.size()));
    }
    const double n = static_cast<double>(logr.size());
    const double mx = std::accumulate(logr.begin(), logr.end(), 0.0) / n;
    const double my = std::accumulate(logm.begin(), logm.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < logr.size(); ++i) {
        sxx += (logr[i] - mx) * (logr[i] - mx);
        sxy += (logr[i] - mx) * (logm[i] - my);
    }
    out.q_estimate = sxy / sxx;

    double cq = 1.0;
    for (double r : radii) {
        const double rq = std::pow(r, out.q_estimate);
        for (PointId x : centers) {
            const double m = space.ball_measure(x, r);
            cq = std::max({cq, m / rq, rq / m});
        }
    }
    out.regularity_constant = cq;
    return out;
}

}  // namespace besovkit
