#pragma once

// Hand-rolled generators shared by the unit, property and acceptance tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "besovkit/geometry.hpp"
#include "besovkit/space.hpp"

namespace testkit {

using namespace besovkit;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    bool coin(double p = 0.5) { return unit() < p; }

private:
    std::uint64_t state_;
};

/// Points in [0,1]^dim, optionally on a coarse lattice so that distance ties occur.
inline MetricMeasureSpace random_cloud(Rng& rng, std::size_t n, std::size_t dim, bool random_weights,
                                       bool lattice = false) {
    std::vector<double> coords;
    std::vector<std::vector<double>> seen;
    // lattice side large enough that n distinct points exist with room to spare
    std::size_t side = 6;
    while (std::pow(static_cast<double>(side), static_cast<double>(dim)) < 2.0 * static_cast<double>(n)) ++side;
    while (seen.size() < n) {
        std::vector<double> p(dim);
        for (auto& c : p) c = lattice ? static_cast<double>(rng.below(side)) / static_cast<double>(side) : rng.unit();
        bool dup = false;
        for (const auto& q : seen) dup = dup || q == p;
        if (dup) continue;
        seen.push_back(p);
        coords.insert(coords.end(), p.begin(), p.end());
    }
    std::vector<double> w(n, 1.0);
    if (random_weights)
        for (auto& x : w) x = rng.uniform(0.2, 2.0);
    return MetricMeasureSpace::from_coordinates(dim, std::move(coords), std::move(w));
}

/// Random mask with at least `min_count` members.
inline std::vector<char> random_mask(Rng& rng, std::size_t n, double density, std::size_t min_count = 2) {
    std::vector<char> m(n, 0);
    std::size_t count = 0;
    for (auto& c : m) {
        c = rng.coin(density) ? 1 : 0;
        count += c;
    }
    while (count < std::min(min_count, n)) {
        const auto i = rng.below(n);
        if (!m[i]) {
            m[i] = 1;
            ++count;
        }
    }
    return m;
}

/// Values with deliberate ties: half the time drawn from a few levels.
inline std::vector<double> random_values(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    const bool tied = rng.coin();
    for (auto& x : v) x = tied ? scale * static_cast<double>(rng.below(4)) : rng.uniform(-scale, scale);
    return v;
}

inline Region everywhere() {
    return Region{"all", [](std::span<const double>) { return true; }};
}

/// Grid of spacing h over [lo, hi]^2.
inline MetricMeasureSpace square_grid(double h, double lo, double hi) {
    return build_grid(everywhere(), h, BoundingBox{{lo, lo}, {hi, hi}});
}

inline std::vector<char> mask_of(const MetricMeasureSpace& X, const Region& r) {
    std::vector<char> m(X.size(), 0);
    for (PointId i = 0; i < X.size(); ++i) m[i] = r.contains(X.coords(i)) ? 1 : 0;
    return m;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testkit
