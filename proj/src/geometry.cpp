#include "besovkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace besovkit {

namespace {

struct Shell {
    std::vector<double> ambient;  // cumulative ambient mass per radius
    std::vector<double> inside;   // cumulative S mass per radius
};

Shell shell_masses(const SubsetMask& S, PointId x, const std::vector<double>& sorted_radii) {
    const auto& X = S.parent();
    std::vector<std::pair<double, PointId>> near;
    X.for_each_in_ball(x, sorted_radii.back(), [&](PointId y, double d) { near.emplace_back(d, y); });
    std::sort(near.begin(), near.end());
    Shell sh;
    double amb = 0.0, in = 0.0;
    std::size_t i = 0;
    for (double r : sorted_radii) {
        while (i < near.size() && near[i].first < r) {
            amb += X.weight(near[i].second);
            if (S.contains(near[i].second)) in += X.weight(near[i].second);
            ++i;
        }
        sh.ambient.push_back(amb);
        sh.inside.push_back(in);
    }
    return sh;
}

}  // namespace

std::vector<double> log_radii(double r_min, double r_max, int per_decade) {
    if (!(r_min > 0.0) || !(r_max > r_min) || per_decade < 1) throw ConfigError("log_radii: need 0 < r_min < r_max");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double r = r_max * std::pow(10.0, -static_cast<double>(i) / per_decade);
        if (!(r > r_min)) break;
        out.push_back(r);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

DensityReport check_measure_density(const SubsetMask& S, double c_m, const std::vector<double>& radii) {
    if (radii.empty()) throw ConfigError("density: no radii");
    const auto& X = S.parent();
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end());
    if (X.is_grid()) {
        const double h = X.lattice()->spacing;
        if (!(rs.front() > 2.0 * h) || rs.back() > 1.0) throw ConfigError("density: radii must lie in (2h, 1]");
    }
    DensityReport rep;
    rep.c_m = c_m;
    rep.r_min = rs.front();
    rep.r_max = rs.back();
    for (PointId x : S.member_ids()) {
        const double room = X.is_grid() ? X.lattice()->bbox.distance_to_boundary(X.coords(x))
                                        : std::numeric_limits<double>::infinity();
        const auto sh = shell_masses(S, x, rs);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (room < rs[i]) {
                ++rep.pairs_skipped;
                continue;
            }
            ++rep.pairs_tested;
            const double ratio = sh.inside[i] / sh.ambient[i];
            if (ratio < rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.witness = x;
                rep.witness_radius = rs[i];
            }
        }
    }
    rep.passed = rep.worst_ratio >= c_m;
    return rep;
}

double density_ratio_at(const SubsetMask& S, PointId x, const std::vector<double>& radii) {
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end());
    const auto sh = shell_masses(S, x, rs);
    double worst = 1.0;
    for (std::size_t i = 0; i < rs.size(); ++i) worst = std::min(worst, sh.inside[i] / sh.ambient[i]);
    return worst;
}

Region make_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw ConfigError("box: malformed corners");
    return {"box", [lo, hi](std::span<const double> x) {
                for (std::size_t d = 0; d < lo.size(); ++d)
                    if (x[d] < lo[d] || x[d] > hi[d]) return false;
                return true;
            }};
}

Region make_ball(std::vector<double> center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("ball: radius must be positive");
    return {"ball", [center, radius](std::span<const double> x) {
                double acc = 0.0;
                for (std::size_t d = 0; d < center.size(); ++d) acc += (x[d] - center[d]) * (x[d] - center[d]);
                return std::sqrt(acc) < radius;
            }};
}

Region make_half_space(std::size_t axis, double level) {
    return {"halfspace", [axis, level](std::span<const double> x) { return x[axis] <= level; }};
}

Region make_carpet(int levels, std::vector<double> fractions) {
    if (levels < 0) throw ConfigError("carpet: levels must be nonnegative");
    if (static_cast<int>(fractions.size()) < levels) throw ConfigError("carpet: one removal fraction per level");
    for (double a : fractions)
        if (!(a >= 0.0 && a < 1.0)) throw ConfigError("carpet: removal fractions must lie in [0, 1)");
    return {"carpet", [levels, fractions](std::span<const double> p) {
                double x = p[0], y = p[1];
                if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) return false;
                double ox = 0.0, oy = 0.0, side = 1.0;
                for (int l = 0; l < levels; ++l) {
                    const double half = fractions[static_cast<std::size_t>(l)] * side / 2.0;
                    const double cx = ox + side / 2.0, cy = oy + side / 2.0;
                    if (std::abs(x - cx) < half && std::abs(y - cy) < half) return false;
                    const double third = side / 3.0;
                    const int i = std::clamp(static_cast<int>(std::floor((x - ox) / third)), 0, 2);
                    const int j = std::clamp(static_cast<int>(std::floor((y - oy) / third)), 0, 2);
                    if (i == 1 && j == 1) return true;  // the central third does not recurse
                    ox += i * third;
                    oy += j * third;
                    side = third;
                }
                return true;
            }};
}

double carpet_area(int levels, const std::vector<double>& fractions) {
    if (static_cast<int>(fractions.size()) < levels) throw ConfigError("carpet: one removal fraction per level");
    double area = 1.0, live = 1.0;  // live = (8/9)^{l-1}
    for (int l = 0; l < levels; ++l) {
        const double a = fractions[static_cast<std::size_t>(l)];
        if (a > 1.0 / 3.0) throw GeometryError("carpet_area: holes wider than a third overlap the next level");
        area -= a * a * live;
        live *= 8.0 / 9.0;
    }
    return area;
}

Region make_slit_disc() {
    return {"slit_disc", [](std::span<const double> p) {
                const double x = p[0], y = p[1];
                if (!(x * x + y * y < 1.0)) return false;
                return !(std::abs(y) < 1e-12 && x >= 0.0 && x < 1.0);
            }};
}

Region make_cusp(double beta) {
    if (!(beta >= 1.0)) throw ConfigError("cusp: exponent must be at least 1");
    return {"cusp", [beta](std::span<const double> p) {
                const double x = p[0], y = p[1];
                return x > 0.0 && x < 1.0 && std::abs(y) < std::pow(x, beta);
            }};
}

}  // namespace besovkit
