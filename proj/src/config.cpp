#include "besovkit/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "besovkit/geometry.hpp"

namespace besovkit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double number(const json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
    }
    fail(std::string("field '") + key + "' is not a number");
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

std::vector<double> vec(const json& j, const char* what) {
    if (!j.is_array()) fail(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(std::string(what) + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

BoundingBox parse_bbox(const json& j) {
    BoundingBox box;
    if (j.is_array() && j.size() == 2) {
        box.lo = vec(j[0], "bbox lo");
        box.hi = vec(j[1], "bbox hi");
    } else if (j.is_object()) {
        box.lo = vec(j.at("lo"), "bbox lo");
        box.hi = vec(j.at("hi"), "bbox hi");
    } else {
        fail("bbox must be [[lo...],[hi...]] or {lo, hi}");
    }
    if (box.lo.empty() || box.lo.size() != box.hi.size()) fail("bbox corners differ in dimension");
    for (std::size_t d = 0; d < box.lo.size(); ++d)
        if (!(box.lo[d] < box.hi[d])) fail("bbox has an empty side");
    return box;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail("malformed JSON in " + path.string() + ": " + e.what());
    }
}

FunctionSpec parse_function(const json& j, std::size_t index) {
    FunctionSpec f;
    f.kind = j.value("kind", std::string("constant"));
    f.name = j.value("name", f.kind + "_" + std::to_string(index));
    f.value = number_or(j, "value", 1.0);
    f.axis = j.value("axis", std::size_t{0});
    f.seed = j.value("seed", std::uint64_t{index});
    f.modes = j.value("modes", 4);
    if (j.contains("region")) f.region = parse_region(j.at("region"));
    if (f.kind != "constant" && f.kind != "coordinate" && f.kind != "random_smooth" && f.kind != "random_rough" &&
        f.kind != "indicator")
        fail("unknown function kind '" + f.kind + "'");
    if (f.kind == "indicator" && !f.region) fail("indicator function '" + f.name + "' needs a region");
    if (f.modes < 1) fail("modes must be positive");
    return f;
}

}  // namespace

Region parse_region(const json& j) {
    if (j.is_string()) return parse_region(json{{"type", j}});
    if (!j.is_object()) fail("region must be an object");
    const std::string type = j.value("type", std::string());
    if (type == "all") return Region{"all", [](std::span<const double>) { return true; }};
    if (type == "box") return make_box(vec(j.at("lo"), "box lo"), vec(j.at("hi"), "box hi"));
    if (type == "ball") return make_ball(vec(j.at("center"), "ball center"), number(j, "radius"));
    if (type == "halfspace") return make_half_space(j.value("axis", std::size_t{0}), number(j, "level"));
    if (type == "carpet") return make_carpet(j.value("levels", 2), vec(j.at("fractions"), "carpet fractions"));
    if (type == "slit_disc") return make_slit_disc();
    if (type == "cusp") return make_cusp(number_or(j, "beta", 2.0));
    if (type == "intersection" || type == "union") {
        std::vector<Region> parts;
        for (const auto& r : j.at("regions")) parts.push_back(parse_region(r));
        if (parts.empty()) fail(type + " needs at least one region");
        std::string name = type + "(";
        for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? "," : "") + parts[i].name;
        name += ")";
        const bool all = type == "intersection";
        return Region{name, [parts, all](std::span<const double> x) {
                          for (const auto& p : parts)
                              if (p.contains(x) != all) return !all;
                          return all;
                      }};
    }
    fail("unknown region type '" + type + "'");
}

Domain build_domain(const json& spec, int refine) {
    if (refine < 0 || refine > 6) fail("refine must lie in [0, 6]");
    Domain dom;
    const std::string kind = spec.value("kind", std::string("grid"));
    if (kind == "grid") {
        const double h0 = number(spec, "spacing");
        if (!(h0 > 0)) fail("spacing must be positive");
        const double h = std::ldexp(h0, -refine);
        const BoundingBox box = parse_bbox(spec.at("bbox"));
        const Region region = spec.contains("region") ? parse_region(spec.at("region"))
                                                      : Region{"all", [](std::span<const double>) { return true; }};
        dom.space = std::make_unique<MetricMeasureSpace>(build_grid(region, h, box));
        dom.description = "grid h=" + format_double(h) + " region=" + region.name;
    } else if (kind == "cloud") {
        std::vector<double> weights;
        if (spec.contains("weights")) weights = vec(spec.at("weights"), "weights");
        if (spec.contains("distances")) {
            std::vector<double> table;
            for (const auto& row : spec.at("distances")) {
                const auto r = vec(row, "distance row");
                table.insert(table.end(), r.begin(), r.end());
            }
            const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(table.size()))));
            if (weights.empty()) weights.assign(n, 1.0);
            dom.space = std::make_unique<MetricMeasureSpace>(
                MetricMeasureSpace::from_distance_table(std::move(table), std::move(weights)));
        } else {
            std::vector<double> coords;
            std::size_t dim = 0;
            for (const auto& pt : spec.at("points")) {
                const auto c = vec(pt, "point");
                if (dim == 0) dim = c.size();
                if (c.size() != dim || dim == 0) fail("points differ in dimension");
                coords.insert(coords.end(), c.begin(), c.end());
            }
            if (dim == 0) fail("cloud has no points");
            if (weights.empty()) weights.assign(coords.size() / dim, 1.0);
            dom.space = std::make_unique<MetricMeasureSpace>(
                MetricMeasureSpace::from_coordinates(dim, std::move(coords), std::move(weights)));
        }
        dom.description = "cloud n=" + std::to_string(dom.space->size());
    } else {
        fail("unknown domain kind '" + kind + "'");
    }

    const auto n = dom.space->size();
    dom.members.assign(n, 1);
    if (spec.contains("subset")) {
        if (!dom.space->has_coordinates()) fail("a subset region needs coordinates");
        const Region sub = parse_region(spec.at("subset"));
        for (PointId i = 0; i < n; ++i) dom.members[i] = sub.contains(dom.space->coords(i)) ? 1 : 0;
        dom.description += " subset=" + sub.name;
    } else if (spec.contains("subset_ids")) {
        dom.members.assign(n, 0);
        for (const auto& id : spec.at("subset_ids")) {
            const auto i = id.get<std::size_t>();
            if (i >= n) fail("subset id out of range");
            dom.members[i] = 1;
        }
    }
    std::size_t count = 0;
    for (char c : dom.members) count += c != 0;
    if (count == 0) throw GeometryError("empty subset S");
    return dom;
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) fail("config must be a JSON object");
    ExperimentConfig cfg;
    cfg.raw = j;
    if (!j.contains("domain")) fail("missing field 'domain'");
    const json& d = j.at("domain");
    if (d.is_string()) {
        const auto path = base / d.get<std::string>();
        if (!std::filesystem::exists(path)) fail("domain file not found: " + path.string());
        cfg.domain = read_json(path);
    } else {
        cfg.domain = d;
    }

    const json params = j.value("params", json::object());
    cfg.params.s = number_or(params, "s", 0.5);
    cfg.params.p = number_or(params, "p", 2.0);
    cfg.params.q = number_or(params, "q", 2.0);
    cfg.params.r = number_or(params, "r", std::min(cfg.params.p, cfg.params.q) / 2.0);
    cfg.params.validate();
    if (params.contains("delta")) cfg.extension.delta = number(params, "delta");
    if (params.contains("eps_prime")) cfg.extension.eps_prime = number(params, "eps_prime");
    if (params.contains("t")) cfg.extension.t_inner = number(params, "t");
    cfg.tau = number_or(params, "tau", 0.5);
    if (!(cfg.tau > 0 && cfg.tau < 1)) fail("tau must lie in (0, 1)");
    cfg.t_min = number_or(params, "t_min", 0.0);

    if (j.contains("functions")) {
        std::size_t i = 0;
        for (const auto& f : j.at("functions")) cfg.functions.push_back(parse_function(f, i++));
    }
    if (cfg.functions.empty()) fail("no functions listed");

    cfg.output = j.value("output", std::string("out"));
    cfg.refine = j.value("refine", 0);
    cfg.seed = j.value("seed", std::uint64_t{0});

    const json ext = j.value("extend", json::object());
    const std::string method = ext.value("method", std::string("median"));
    if (method == "median") cfg.extension.method = ExtensionMethod::Median;
    else if (method == "average") cfg.extension.method = ExtensionMethod::Average;
    else fail("extension method must be median or average");
    cfg.extension.v_radius = number_or(ext, "v_radius", 8.0);
    cfg.extension.small_threshold = number_or(ext, "small_threshold", 1.0);
    cfg.corpus = ext.value("corpus", std::size_t{0});
    cfg.extension.resolved(cfg.params);  // range check only

    const json den = j.value("density", json::object());
    cfg.c_m = number_or(den, "c_m", 0.05);
    cfg.per_decade = den.value("per_decade", 16);
    if (den.contains("r_min")) cfg.density_r_min = number(den, "r_min");
    cfg.density_r_max = number_or(den, "r_max", 1.0);
    if (!(cfg.c_m > 0 && cfg.c_m <= 1)) fail("c_m must lie in (0, 1]");
    if (cfg.per_decade < 16) fail("per_decade must be at least 16");

    const json kf = j.value("kfunc", json::object());
    if (kf.contains("scales")) {
        cfg.k_scales = vec(kf.at("scales"), "kfunc scales");
    } else {
        const double lo = number_or(kf, "t_min", 0.125), hi = number_or(kf, "t_max", 1.0);
        const int count = kf.value("count", 8);
        if (!(lo > 0 && hi >= lo) || count < 1) fail("kfunc scale range is invalid");
        for (int i = 0; i < count; ++i)
            cfg.k_scales.push_back(count == 1 ? hi : lo * std::pow(hi / lo, double(i) / (count - 1)));
    }
    for (double t : cfg.k_scales)
        if (!(t > 0)) fail("kfunc scales must be positive");

    const json em = j.value("embed", json::object());
    if (em.contains("Q")) cfg.q_dimension = number(em, "Q");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) fail("config file not found: " + path.string());
    return parse_config(read_json(path), path.parent_path());
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string params_tag(const SmoothnessParams& p) {
    return "s=" + format_double(p.s) + " p=" + format_double(p.p) + " q=" + format_double(p.q) +
           " r=" + format_double(p.r);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header_comment,
                     std::vector<std::string> columns)
    : path_(path), columns_(columns.size()) {
    text_ = std::string("# besovkit ") + kVersion + " " + header_comment + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
    text_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
}

void CsvWriter::save() const { write_file(path_, text_); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
}

}  // namespace besovkit
