#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "besovkit/cli.hpp"
#include "besovkit/config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("besovkit_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json square_config() {
    return json::parse(R"({
      "domain": {"kind": "grid", "spacing": 0.125, "bbox": [[-0.5, -0.5], [1.5, 1.5]],
                 "subset": {"type": "box", "lo": [0, 0], "hi": [1, 1]}},
      "params": {"s": 0.5, "p": 2, "q": 2},
      "functions": [{"name": "one", "kind": "constant", "value": 1},
                    {"name": "smooth", "kind": "random_smooth", "seed": 3}],
      "seed": 5,
      "extend": {"v_radius": 1, "small_threshold": 0.125},
      "kfunc": {"scales": [0.25, 0.5, 1]},
      "embed": {"Q": 2}
    })");
}

int invoke(const std::string& cmd, const fs::path& config, const fs::path& out) {
    std::vector<std::string> args{"besovkit", cmd, "--config", config.string(), "--out", out.string()};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return besovkit::run(static_cast<int>(argv.size()), argv.data());
}

fs::path write(const fs::path& dir, const json& j) {
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, std::string* header = nullptr) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) {
            if (header) *header = line;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("norms: constant rows have zero seminorms and chains hold") {
    const auto dir = scratch("norms");
    REQUIRE(invoke("norms", write(dir, square_config()), dir / "out") == 0);
    std::string header;
    const auto rows = read_csv(dir / "out" / "norms.csv", &header);
    CHECK(header.rfind("# besovkit 0.1.0 s=0.5 p=2 q=2 r=1", 0) == 0);
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == std::vector<std::string>{"function", "variant", "value", "params", "chain_ok"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][4] == "1");
        const auto& v = rows[i][1];
        const bool homogeneous = v.find("_semi") != std::string::npos || v == "M_upper" || v == "N_upper";
        if (rows[i][0] == "one" && homogeneous) CHECK(rows[i][2] == "0");
    }
}

TEST_CASE("missing domain file and bad parameters exit 2") {
    const auto dir = scratch("errors");
    auto cfg = square_config();
    cfg["domain"] = "no_such_domain.json";
    CHECK(invoke("norms", write(dir, cfg), dir / "out") == 2);
    cfg = square_config();
    cfg["params"]["s"] = 1.5;
    CHECK(invoke("norms", write(dir, cfg), dir / "out") == 2);
    CHECK(invoke("norms", dir / "absent.json", dir / "out") == 2);
    cfg = square_config();
    cfg["params"]["p"] = 5;  // sp = 2.5 >= Q = 2
    CHECK(invoke("embed", write(dir, cfg), dir / "out") == 2);
}

TEST_CASE("extend: exit 0 on a covered square, exit 3 when V falls short") {
    const auto dir = scratch("extend");
    REQUIRE(invoke("extend", write(dir, square_config()), dir / "out") == 0);
    const auto rows = read_csv(dir / "out" / "extend.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "one");
    CHECK(rows[1][1] == "1");
    std::ifstream js(dir / "out" / "extend.json");
    const auto dump = json::parse(js);
    CHECK(dump["ok"] == true);
    CHECK(dump["cover"]["centers"].size() == dump["cover"]["radii"].size());

    auto cfg = square_config();
    cfg["extend"]["v_radius"] = 0.25;
    cfg["extend"]["small_threshold"] = 0.125;
    CHECK(invoke("extend", write(dir, cfg), dir / "out2") == 3);
}

TEST_CASE("density, kfunc and embed outputs") {
    const auto dir = scratch("reports");
    auto cfg = square_config();
    cfg["domain"] = json::parse(R"({"kind": "grid", "spacing": 0.0625, "bbox": [[0, 0], [1, 1]]})");
    REQUIRE(invoke("density", write(dir, cfg), dir / "out") == 0);
    std::ifstream js(dir / "out" / "density.json");
    CHECK(json::parse(js)["passed"] == true);

    REQUIRE(invoke("kfunc", write(dir, square_config()), dir / "out") == 0);
    for (const auto& row : read_csv(dir / "out" / "kfunc.csv"))
        if (row[0] == "one")
            for (std::size_t c = 2; c <= 6; ++c) CHECK(row[c] == "0");

    REQUIRE(invoke("embed", write(dir, square_config()), dir / "out") == 0);
    CHECK(read_csv(dir / "out" / "embed.csv").size() == 3);
}

TEST_CASE("domain specs") {
    const auto grid = besovkit::build_domain(json::parse(R"({"kind": "grid", "spacing": 0.5, "bbox": {"lo": [0, 0], "hi": [1, 1]},
        "subset": {"type": "union", "regions": [{"type": "halfspace", "axis": 0, "level": 0},
                                                 {"type": "ball", "center": [1, 1], "radius": 0.1}]}})"), 1);
    CHECK(grid.space->size() == 25);  // refined to h = 1/4
    CHECK(grid.subset().count() == 6);
    const auto cloud = besovkit::build_domain(json::parse(R"({"kind": "cloud",
        "distances": [[0, 1, 2], [1, 0, 1], [2, 1, 0]], "weights": [1, 2, 1], "subset_ids": [0, 2]})"));
    CHECK(cloud.space->size() == 3);
    CHECK(cloud.subset().count() == 2);
    CHECK(cloud.subset().measure() == 2.0);
    CHECK_THROWS_AS(besovkit::build_domain(json::parse(R"({"kind": "mesh"})")), besovkit::ConfigError);
    CHECK_THROWS_AS(besovkit::parse_region(json::parse(R"({"type": "cusp", "beta": 0.5})")), besovkit::ConfigError);
    CHECK_THROWS_AS(besovkit::build_domain(json::parse(R"({"kind": "grid", "spacing": 0.5, "bbox": [[0, 0], [1, 1]],
        "subset": {"type": "ball", "center": [5, 5], "radius": 0.1}})")), besovkit::GeometryError);
    CHECK(besovkit::format_double(0.1) == "0.10000000000000001");
    CHECK(besovkit::format_double(besovkit::kInf) == "inf");
}

}
