#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "besovkit/space.hpp"

namespace besovkit {

/// Named test-function generators.
struct FunctionSpec {
    std::string name;
    std::string kind = "constant";  // constant | coordinate | random_smooth | random_rough | indicator
    double value = 1.0;             // constant level, indicator height
    std::size_t axis = 0;           // coordinate axis
    std::uint64_t seed = 0;         // mixed with the run seed
    int modes = 4;                  // random_smooth terms
    std::optional<Region> region;   // indicator support
};

Function evaluate(const FunctionSpec& spec, const MetricMeasureSpace& space, std::uint64_t run_seed = 0);

/// Sum of `modes` random sinusoids of low frequency in the coordinates.
Function random_smooth(const MetricMeasureSpace& space, std::uint64_t seed, int modes = 4);
/// Independent uniform values in [-1, 1].
Function random_rough(const MetricMeasureSpace& space, std::uint64_t seed);

}  // namespace besovkit
