#include "besovkit/functions.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace besovkit {

namespace {

// splitmix64 finalizer, so nearby seeds give unrelated streams
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// uniform in [0,1) from the top 53 bits; independent of the standard library's distributions
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Function random_smooth(const MetricMeasureSpace& space, std::uint64_t seed, int modes) {
    if (!space.has_coordinates()) throw ConfigError("random_smooth needs coordinates");
    std::mt19937_64 rng(mix(seed, 1));
    const std::size_t dim = space.dim();
    struct Mode {
        double amp, phase;
        std::vector<double> freq;
    };
    std::vector<Mode> ms;
    for (int m = 0; m < modes; ++m) {
        Mode md;
        md.amp = 2.0 * unit(rng) - 1.0;
        md.phase = 2.0 * std::numbers::pi * unit(rng);
        for (std::size_t d = 0; d < dim; ++d) md.freq.push_back(std::floor(4.0 * unit(rng)) - 1.0);  // integer in [-1, 2]
        ms.push_back(std::move(md));
    }
    Function u(space.size(), 0.0);
    for (PointId x = 0; x < space.size(); ++x) {
        const auto c = space.coords(x);
        double acc = 0.0;
        for (const auto& md : ms) {
            double arg = md.phase;
            for (std::size_t d = 0; d < dim; ++d) arg += std::numbers::pi * md.freq[d] * c[d];
            acc += md.amp * std::sin(arg);
        }
        u[x] = acc;
    }
    return u;
}

Function random_rough(const MetricMeasureSpace& space, std::uint64_t seed) {
    std::mt19937_64 rng(mix(seed, 2));
    Function u(space.size());
    for (double& v : u) v = 2.0 * unit(rng) - 1.0;
    return u;
}

Function evaluate(const FunctionSpec& spec, const MetricMeasureSpace& space, std::uint64_t run_seed) {
    const std::uint64_t seed = mix(run_seed, spec.seed);
    if (spec.kind == "constant") return Function(space.size(), spec.value);
    if (spec.kind == "coordinate") {
        if (!space.has_coordinates() || spec.axis >= space.dim()) throw ConfigError("coordinate: axis out of range");
        Function u(space.size());
        for (PointId x = 0; x < space.size(); ++x) u[x] = space.coords(x)[spec.axis];
        return u;
    }
    if (spec.kind == "random_smooth") return random_smooth(space, seed, spec.modes);
    if (spec.kind == "random_rough") return random_rough(space, seed);
    if (spec.kind == "indicator") {
        if (!spec.region) throw ConfigError("indicator: missing region");
        Function u(space.size(), 0.0);
        for (PointId x = 0; x < space.size(); ++x)
            if (spec.region->contains(space.coords(x))) u[x] = spec.value;
        return u;
    }
    throw ConfigError("unknown function kind: " + spec.kind);
}

}  // namespace besovkit
