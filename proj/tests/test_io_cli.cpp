#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nodalset/commands.hpp"
#include "nodalset/config.hpp"
#include "nodalset/errors.hpp"
#include "nodalset/io.hpp"

using namespace nodalset;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nodalset_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) { return read_text(p); }

std::string first_line(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    return line;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NODALSET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallSolve = R"({
  "parameters": {"s": 0.25, "q": 1.0, "lambda_plus": 1.0, "lambda_minus": 1.0},
  "mesh": {"Nx": 64, "My": 64},
  "boundary": {"kind": "u1"}
})";

}  // namespace

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("double formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("strict configuration schema") {
    CHECK_NOTHROW(parse_config_text("{}"));
    const RunConfig d = parse_config_text("{}");
    CHECK(d.params.s == 0.25);
    CHECK(d.mesh.Nx == 128);
    CHECK(d.angular.T_sweep.size() == 25);
    CHECK(d.angular.T_sweep.front() == doctest::Approx(0.30));

    auto message = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(R"({"mesh": {"bogus": 1}})").find("mesh.bogus") != std::string::npos);
    CHECK(message(R"({"extra": {}})").find("extra") != std::string::npos);
    CHECK(message(R"({"mesh": {"Nx": "many"}})").find("mesh.Nx") != std::string::npos);
    CHECK(message(R"({"parameters": {"s": 1.5}})") != "");
    CHECK(message(R"({"mesh": {"Nx": 33}})") != "");
    CHECK(message(R"({"boundary": {"kind": "spline"}})") != "");
    CHECK(message("{ not json") != "");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config hash") {
    const RunConfig a = parse_config_text(kSmallSolve);
    const RunConfig b = parse_config_text(kSmallSolve);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    // defaults written out explicitly hash the same as omitted ones
    const RunConfig c = parse_config(a.canonical());
    CHECK(c.hash() == a.hash());
    RunConfig d = a;
    d.params.q = 1.2;
    CHECK(d.hash() != a.hash());
    RunConfig e = a;
    e.io.out = "/somewhere/else";
    CHECK(e.hash() == a.hash());
}

TEST_CASE("field file round trip is exact") {
    const auto p = Parameters::make(0.3, 1.4, 1.5, 0.5);
    const auto mesh = std::make_shared<const Mesh>(build_mesh(1.5, 0.75, 16, 12, 2.5, p.weight_exponent()));
    Field f = sample_field(mesh, [](double x, double y) { return std::sin(x) * std::exp(-y) + 1.0 / 3.0; }, p);
    f.report.iterations = 7;
    f.report.converged = true;
    const fs::path dir = scratch("field");
    write_field(dir / "f.txt", f, "0123456789abcdef");
    CHECK(first_line(dir / "f.txt") == "nodalset-field 1");
    const Field g = read_field(dir / "f.txt");
    CHECK(g.values() == f.values());
    CHECK(g.mesh().x == f.mesh().x);
    CHECK(g.mesh().y == f.mesh().y);
    CHECK(g.params().lambda_plus == 1.5);
    CHECK(g.params().q == 1.4);
    CHECK(g.report.iterations == 7);
    CHECK(g.report.converged);
    write_text(dir / "bad.txt", "something else\n");
    CHECK_THROWS(read_field(dir / "bad.txt"));
}

TEST_CASE("CSV and SVG outputs carry the config hash") {
    CsvTable t{{"x", "y"}, {{1.0, 2.0}, {0.5, std::nan("")}}};
    const std::string csv = t.to_string("feedfacecafebeef");
    CHECK(csv.rfind("# config_hash=feedfacecafebeef\n", 0) == 0);
    CHECK(csv.find("x,y\n") != std::string::npos);
    CHECK(csv.find("0.5,nan") != std::string::npos);

    PlotSpec spec{"t", "x", "y", {{"s", {0, 1, 2}, {1, std::nan(""), 3}}}};
    const std::string svg = svg_plot(spec, "feedfacecafebeef");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("config_hash=feedfacecafebeef") != std::string::npos);
    CHECK(svg.find("href=\"http") == std::string::npos);
}

TEST_CASE("solve command") {
    const fs::path dir = scratch("solve");
    RunConfig cfg = parse_config_text(R"({
      "parameters": {"s": 0.25, "q": 1.5, "lambda_plus": 0.0, "lambda_minus": 0.0},
      "mesh": {"Nx": 16, "My": 16},
      "boundary": {"kind": "poly", "terms": [[1, 1.0]]}
    })");
    CommandOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    CHECK(cmd_solve(cfg, opts, log) == kExitOk);
    const json rep = json::parse(slurp(dir / "solve_report.json"));
    CHECK(rep["config_hash"] == cfg.hash());
    CHECK(rep["report"]["converged"] == true);
    CHECK(rep["report"]["iterations"] == 1);
    for (const char* name : {"field.txt", "trace.csv", "trace.svg", "field.svg"}) CHECK(fs::exists(dir / name));
    CHECK(slurp(dir / "field.txt").find(cfg.hash()) != std::string::npos);
    CHECK(first_line(dir / "trace.csv") == "# config_hash=" + cfg.hash());
}

TEST_CASE("curve and classify commands read a field file") {
    const fs::path dir = scratch("pipeline");
    const RunConfig cfg = parse_config_text(kSmallSolve);
    CommandOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    REQUIRE(cmd_solve(cfg, opts, log) == kExitOk);
    opts.field = (dir / "field.txt").string();
    opts.x0 = 0.0;
    CHECK(cmd_curve(cfg, opts, log) == kExitOk);
    CHECK(first_line(dir / "curve.csv") == "# config_hash=" + cfg.hash());
    CHECK(fs::exists(dir / "curve_weiss.svg"));
    CHECK(cmd_classify(cfg, opts, log) == kExitOk);
    const json rep = json::parse(slurp(dir / "nodal_report.json"));
    CHECK(rep["config_hash"] == cfg.hash());
    REQUIRE(rep["points"].size() >= 1);
    CHECK(rep["points"][0]["stratum"] == "Sublinear");
    opts.field = (dir / "missing.txt").string();
    CHECK_THROWS_AS(cmd_curve(cfg, opts, log), ConfigError);
}

TEST_CASE("angular command reports the out-of-regime profile") {
    const fs::path dir = scratch("angular");
    const RunConfig cfg = parse_config_text(R"({
      "parameters": {"s": 0.25, "q": 1.0, "lambda_plus": 1.0, "lambda_minus": 1.0},
      "angular": {"T_sweep": [0.4, 0.8]}
    })");
    CommandOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    CHECK(cmd_angular(cfg, opts, log) == kExitNumerical);
    const json c = json::parse(slurp(dir / "constants.json"));
    CHECK(c.dump().find("out_of_constructive_regime") != std::string::npos);
    CHECK(fs::exists(dir / "profile_antisymmetric.csv"));
    CHECK(fs::exists(dir / "eigen_dirichlet.csv"));

    const RunConfig ok = parse_config_text(R"({
      "parameters": {"s": 0.25, "q": 1.2, "lambda_plus": 1.0, "lambda_minus": 1.0},
      "angular": {"T_sweep": [0.4, 0.8]}
    })");
    CHECK(cmd_angular(ok, opts, log) == kExitOk);
}

TEST_CASE("verify command") {
    const fs::path dir = scratch("verify");
    CommandOptions opts;
    opts.out_dir = dir.string();
    opts.list = true;
    std::ostringstream listing;
    CHECK(cmd_verify(parse_config_text("{}"), opts, listing) == kExitOk);
    const std::string text = listing.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 11);
    CHECK_FALSE(fs::exists(dir / "verify.json"));

    opts.list = false;
    RunConfig cfg = parse_config_text(R"({"verify": {"only": [2]}})");
    std::ostringstream log;
    CHECK(cmd_verify(cfg, opts, log) == kExitOk);
    cfg = parse_config_text(R"({"verify": {"only": [2], "tolerances": {"c2_eigen": 1e-20}}})");
    CHECK(cmd_verify(cfg, opts, log) == kExitNumerical);
    const json v = json::parse(slurp(dir / "verify.json"));
    CHECK(v["results"][0]["pass"] == false);
    CHECK(v["config_hash"] == cfg.hash());
    cfg = parse_config_text(R"({"verify": {"tolerances": {"nonsense": 1}}})");
    CHECK_THROWS_AS(cmd_verify(cfg, opts, log), ConfigError);
}

TEST_CASE("outputs do not depend on the worker count") {
    const RunConfig cfg = parse_config_text(R"({
      "parameters": {"s": 0.25, "q": 1.2, "lambda_plus": 1.0, "lambda_minus": 1.0},
      "angular": {"T_sweep": [0.3, 0.5, 0.7, 0.9, 1.1]}
    })");
    std::string out[2];
    int i = 0;
    for (const char* workers : {"1", "4"}) {
        setenv("NODALSET_WORKERS", workers, 1);
        const fs::path dir = scratch(std::string("workers") + workers);
        CommandOptions opts;
        opts.out_dir = dir.string();
        std::ostringstream log;
        REQUIRE(cmd_angular(cfg, opts, log) == kExitOk);
        out[i++] = slurp(dir / "eigen_mixed.csv") + slurp(dir / "eigen_dirichlet.csv") + slurp(dir / "constants.json");
    }
    unsetenv("NODALSET_WORKERS");
    CHECK(out[0] == out[1]);
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = scratch("cli");
    write_text(dir / "ok.json", R"({"parameters": {"s": 0.25, "q": 1.5, "lambda_plus": 0.0, "lambda_minus": 0.0},
      "mesh": {"Nx": 16, "My": 16}, "boundary": {"kind": "poly"}})");
    write_text(dir / "bad.json", R"({"mesh": {"bogus": 1}})");
    write_text(dir / "u2q1.json", R"({"parameters": {"s": 0.25, "q": 1.0, "lambda_plus": 1.0, "lambda_minus": 1.0},
      "boundary": {"kind": "u2"}})");
    const std::string out = " --out " + (dir / "out").string();
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("solve --config " + (dir / "ok.json").string() + out) == 0);
    CHECK(fs::exists(dir / "out" / "field.txt"));
    CHECK(run_cli("solve --config " + (dir / "bad.json").string() + out) == 2);
    CHECK(run_cli("solve --config " + (dir / "missing.json").string() + out) == 2);
    CHECK(run_cli("solve --config " + (dir / "u2q1.json").string() + out) == 3);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("verify --list") == 0);
    CHECK(run_cli("curve" + out) == 2);
}
