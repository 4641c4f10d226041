#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "besovkit/extend.hpp"
#include "besovkit/functions.hpp"
#include "besovkit/norms.hpp"
#include "besovkit/space.hpp"

namespace besovkit {

inline constexpr const char* kVersion = "0.1.0";

/// A space X together with the subset S the experiment works on (S = X when no subset is given).
struct Domain {
    std::unique_ptr<MetricMeasureSpace> space;
    std::vector<char> members;
    std::string description;

    SubsetMask subset() const { return SubsetMask(*space, members); }
};

Region parse_region(const nlohmann::json& j);

/// Grid spec {"kind":"grid","spacing","bbox","region","subset"} or cloud spec {"kind":"cloud","points","weights"}.
Domain build_domain(const nlohmann::json& spec, int refine = 0);

struct ExperimentConfig {
    nlohmann::json domain;
    SmoothnessParams params;
    ExtensionParams extension;
    double tau = 0.5;
    std::vector<FunctionSpec> functions;
    std::string output = "out";
    int refine = 0;
    std::uint64_t seed = 0;
    std::size_t corpus = 0;         // extra random_smooth functions for ratio summaries
    double c_m = 0.05;
    int per_decade = 16;
    std::optional<double> density_r_min;
    double density_r_max = 1.0;
    std::vector<double> k_scales;   // empty: 8 scales from 1/8 to 1
    std::optional<double> q_dimension;  // Q for the Lorentz check; estimated when absent
    double t_min = 0.0;             // smallest t-grid node, default 2h
    nlohmann::json raw;
};

/// Reads and validates a config file; a "domain" string is resolved relative to the config.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base = ".");

/// Shortest round-trip text for a double (locale independent).
std::string format_double(double v);

/// CSV with a leading comment line carrying the toolkit version and parameters.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header_comment, std::vector<std::string> columns);
    void row(const std::vector<std::string>& cells);
    /// Writes the file; throws Error when the path is not writable.
    void save() const;

private:
    std::filesystem::path path_;
    std::string text_;
    std::size_t columns_;
};

/// Writes text to a file in binary mode; throws Error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

std::string params_tag(const SmoothnessParams& p);

}  // namespace besovkit
