#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"
#include "polygas/model.hpp"
#include "polygas/run.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace polygas;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("polygas_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kMinimal = R"(schema = 1
[universe]
kind = "abstract"
[[polymer]]
id = "g"
[activity]
rho = { g = 0.3 }
)";

const char* kEdge = R"(schema = 1
[universe]
kind = "subset"
sites = ["x"]
[[polymer]]
id = "g"
support = ["x"]
[incompatibility]
rule = "intersection"
[activity]
uniform = "ext-gk-edge"
[weights]
scope = "site"
a = 1
)";

} // namespace

TEST_CASE("minimal model")
{
    const auto spec = parse_model_toml(kMinimal);
    CHECK(spec.kind == UniverseKind::Abstract);
    REQUIRE(spec.polymers.size() == 1);
    CHECK(spec.rho.at(0) == Rational(3, 10));
    CHECK(spec.effective_mode() == Mode::Exact);
    const auto m = build_model(spec);
    CHECK(m.abstract_universe->incompatible(0, 0));
}

TEST_CASE("schema errors name the field")
{
    CHECK_THROWS_WITH_AS(parse_model_toml("[universe]\nkind = \"abstract\"\n"), doctest::Contains("schema"), ParseError);
    const std::string outside = R"(schema = 1
[universe]
kind = "subset"
sites = ["a"]
[[polymer]]
id = "bad"
support = ["zz"]
)";
    CHECK_THROWS_WITH_AS(parse_model_toml(outside), doctest::Contains("bad"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model_toml("schema = 1\n[universe]\nkind = \"abstract\"\n[[polymer]]\nid = \"g\"\n"
                                          "[activity]\nrho = { h = 1 }\n"),
                         doctest::Contains("h"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model_toml("schema = 1\nbogus = 3\n"), doctest::Contains("bogus"), ParseError);
    // Syntax errors carry a line number.
    CHECK_THROWS_WITH_AS(parse_model_toml("schema = 1\n[universe\n", "m.toml"), doctest::Contains("m.toml:2"),
                         ParseError);
}

TEST_CASE("generators")
{
    const auto c9 = generate_model({"cycle", 9});
    CHECK(c9.polymers.size() == 9);
    CHECK(c9.pairs.size() == 9);
    const auto p3 = build_model(generate_model({"path", 3}));
    const auto ones = ActivityMap::uniform(3, 1, 1);
    CHECK(partition_function(*p3.abstract_universe, p3.abstract_universe->all(), ones, Mode::Exact).exact() == 5);

    const auto tiny = build_model(generate_model({"subsets-on-interval", 2, 0, 0, 2}));
    CHECK(tiny.subset_universe->polymer_count() == 3);
    const auto grid = generate_model({"grid", 0, 3, 2});
    CHECK(grid.polymers.size() == 6);
    CHECK(grid.pairs.size() == 7);

    CHECK_THROWS_AS(generate_model({"path", 25}), ResourceLimit);
    CHECK_THROWS_AS(generate_model({"subsets-on-interval", 17, 0, 0, 1}), ResourceLimit);
    CHECK_THROWS_AS(generate_model({"hexagon", 4}), InvalidArgument);
}

TEST_CASE("save and load round-trip")
{
    std::vector<ModelSpec> specs{parse_model_toml(kMinimal), parse_model_toml(kEdge), generate_model({"grid", 0, 2, 2}),
                                 generate_model({"subsets-on-interval", 4, 0, 0, 2}),
                                 generate_model({"triangle"})};
    auto spec = parse_model_toml(kMinimal);
    spec.run.commands = {"xi", "theta"};
    spec.run.tracked = {{"g"}};
    spec.run.seed = 99;
    spec.run.mode = Mode::Float;
    spec.z = std::vector<Rational>{Rational(-1, 7)};
    specs.push_back(spec);
    for (const auto& s : specs) {
        CHECK(parse_model_toml(save_model(s)) == s);
    }
}

TEST_CASE("JSON models")
{
    const std::string json = R"({"schema": 1, "universe": {"kind": "abstract"},
        "polymer": [{"id": "a"}, {"id": "b"}],
        "incompatibility": {"pairs": [["a", "b"]]},
        "activity": {"uniform": "1/4"}})";
    const auto spec = parse_model_json(json);
    CHECK(spec.pairs.size() == 1);
    CHECK(spec.rho == std::vector<Rational>{Rational(1, 4), Rational(1, 4)});
    CHECK_THROWS_AS(parse_model_json("{"), ParseError);
}

TEST_CASE("criteria run at the extended edge")
{
    const auto dir = scratch("edge");
    const auto spec = parse_model_toml(kEdge);
    RunOptions opt;
    CHECK(run("criteria", spec, opt, dir) == 0);
    bool ext = false, strict = false;
    for (const auto& row : csv_rows(dir / "report.csv")) {
        if (row[0] == "ExtGK" && row[1] == "x") {
            ext = row[2] == "0" && row[3] == "holds";
        }
        if (row[0] == "GK-strict" && row[1] == "x") {
            strict = row[3] == "fails";
        }
    }
    CHECK(ext);
    CHECK(strict);
    CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("exit codes")
{
    const auto dir = scratch("codes");
    auto spec = generate_model({"cycle", 9});
    spec.has_activity = true;
    spec.rho.assign(9, Rational(1, 5));
    spec.weights = WeightSpec{WeightScope::PerPolymer, WeightForm::Mu, std::vector<Rational>(9, Rational(1))};
    RunOptions opt;
    // Dobrushin fails at 1/5 with mu = 1, so the factorized start is rejected.
    CHECK(run("ks-iterate", spec, opt, dir / "ks") == 2);
    CHECK(run("criteria", spec, opt, dir / "c") == 0);
    CHECK(run("verify-identities", spec, opt, dir / "v") == 0);
    CHECK(run("nonsense", spec, opt, dir / "n") == 1);

    auto bare = generate_model({"path", 3});
    CHECK(run("criteria", bare, opt, dir / "b") == 1);
}

TEST_CASE("radius-opt on the nine-cycle")
{
    const auto dir = scratch("radius");
    RunOptions opt;
    opt.kind = CriterionKind::FP;
    REQUIRE(run("radius-opt", generate_model({"cycle", 9}), opt, dir) == 0);
    const auto rows = csv_rows(dir / "report.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(std::stod(rows[1][1]) - 0.2) < 1e-6);
}

TEST_CASE("verify-identities reports zero residuals")
{
    const auto dir = scratch("verify");
    auto spec = generate_model({"subsets-on-interval", 5, 0, 0, 3});
    spec.has_activity = true;
    spec.rho.assign(spec.polymers.size(), Rational(1, 9));
    REQUIRE(run("verify-identities", spec, {}, dir) == 0);
    const auto rows = csv_rows(dir / "report.csv");
    REQUIRE(rows.size() > 10);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][2] == "0");
        CHECK(rows[i][3] == "true");
    }
}

TEST_CASE("identical model and seed give identical files")
{
    auto spec = generate_model({"subsets-on-interval", 5, 0, 0, 2});
    spec.has_activity = true;
    spec.rho.assign(spec.polymers.size(), Rational(1, 12));
    spec.weights = WeightSpec{WeightScope::PerSite, WeightForm::Xi, std::vector<Rational>(5, Rational(3, 2))};
    spec.run.commands = {"xi", "theta", "criteria", "bounds", "compare", "ks-iterate", "neumann",
                         "verify-identities"};
    spec.run.seed = 1234;
    for (auto mode : {Mode::Exact, Mode::Float}) {
        RunOptions opt;
        opt.mode = mode;
        const auto a = scratch("det_a");
        const auto b = scratch("det_b");
        REQUIRE(run("run", spec, opt, a) == 0);
        REQUIRE(run("run", spec, opt, b) == 0);
        for (const auto& entry : fs::recursive_directory_iterator(a)) {
            if (entry.is_regular_file()) {
                const auto rel = fs::relative(entry.path(), a);
                CHECK(slurp(entry.path()) == slurp(b / rel));
            }
        }
        CHECK(fs::exists(a / "ks-iterate" / "trace.csv"));
        CHECK(fs::exists(a / "xi" / "mayer.csv"));
    }
}

TEST_CASE("report header records the replay data")
{
    const auto dir = scratch("header");
    auto spec = parse_model_toml(kMinimal);
    RunOptions opt;
    opt.seed = 77;
    opt.model_path = "minimal.toml";
    REQUIRE(run("xi", spec, opt, dir) == 0);
    const auto json = slurp(dir / "report.json");
    CHECK(json.find("\"seed\": 77") != std::string::npos);
    CHECK(json.find("\"model\": \"minimal.toml\"") != std::string::npos);
    CHECK(json.find("\"mode\": \"exact\"") != std::string::npos);
}
