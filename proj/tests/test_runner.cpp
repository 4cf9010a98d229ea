#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "plyap/errors.hpp"
#include "plyap/runner.hpp"

using namespace plyap;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("plyap_test_runner_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("config defaults and canonical form") {
    const auto c = parse_config(R"({"system": "linear", "r": 3})");
    CHECK(c.id == "linear");
    CHECK(c.output_dir == "out/linear");
    CHECK(c.steps == 40);
    CHECK(c.estimator.threshold == 1e-9);
    CHECK(c.estimator.method == EstimateMethod::regression);
    const auto doc = json::parse(c.canonical);
    CHECK(doc["r"] == 3);
    CHECK(doc["window"].is_null());
    CHECK(std::find(c.defaults_applied.begin(), c.defaults_applied.end(), "steps") != c.defaults_applied.end());

    const auto osc = parse_config(R"({"system": "oscillator", "omega": 4})");
    CHECK(osc.omega0 == 2.0);
    CHECK(osc.duration == 25.0);
    CHECK(osc.estimator.threshold == 0.05);

    const auto w = parse_config(R"({"system": "bvs_baker", "window": [3, null]})");
    REQUIRE(w.estimator.window.has_value());
    CHECK(w.estimator.window->first == 3.0);
    CHECK(std::isinf(w.estimator.window->second));
}

TEST_CASE("config hash") {
    const auto a = parse_config(R"({"system": "linear", "r": 3, "output_dir": "x"})");
    const auto b = parse_config(R"({"output_dir": "y", "r": 3, "system": "linear"})");
    const auto c = parse_config(R"({"system": "linear", "r": 3.5})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a).size() == 16);
    // spelled-out defaults hash like omitted ones
    const auto d = parse_config(R"({"system": "linear", "r": 3, "steps": 40, "b": 1.0})");
    CHECK(config_hash(a) == config_hash(d));
}

TEST_CASE("malformed configs name the offending field") {
    CHECK(config_error_field("{") == "<document>");
    CHECK(config_error_field("[1, 2]") == "<document>");
    CHECK(config_error_field(R"({"r": 2})") == "system");
    CHECK(config_error_field(R"({"system": "pendulum"})") == "system");
    CHECK(config_error_field(R"({"system": "linear", "r": "two"})") == "r");
    CHECK(config_error_field(R"({"system": "linear", "r": 0.5})") == "r");
    CHECK(config_error_field(R"({"system": "linear", "omega": 2})") == "omega");
    CHECK(config_error_field(R"({"system": "linear", "steps": 2.5})") == "steps");
    CHECK(config_error_field(R"({"system": "linear", "id": "../escape"})") == "id");
    CHECK(config_error_field(R"({"system": "linear", "threshold": 2})") == "threshold");
    CHECK(config_error_field(R"({"system": "linear", "window": [5, 2]})") == "window");
    CHECK(config_error_field(R"({"system": "linear", "window": [5]})") == "window");
    CHECK(config_error_field(R"({"system": "linear", "method": "median"})") == "method");
    CHECK(config_error_field(R"({"system": "r_adic", "r": 2.5})") == "r");
    CHECK(config_error_field(R"({"system": "bvs_baker", "N": 1801})") == "N");
    CHECK(config_error_field(R"({"system": "bvs_baker", "q0": 1.0})") == "q0");
    CHECK(config_error_field(R"({"system": "barrier", "dt": 0})") == "dt");
    CHECK(config_error_field(R"({"system": "overlap_file"})") == "path");
    CHECK(config_error_field(R"({"system": "overlap_file", "path": "a.csv", "convention": "phase"})") == "convention");
    CHECK(config_error_field(R"({"system": "baker_classical", "grid_m": 20})") == "grid_m");
}

TEST_CASE("linear r = 2 run writes the four files") {
    const auto dir = scratch("linear");
    auto c = parse_config(R"({"system": "linear", "id": "lin2", "r": 2, "steps": 40})");
    c.output_dir = (dir / "lin2").string();
    const auto r = run(c);
    for (const char* f : {"distance.csv", "divergence.csv", "lambda_t.csv", "summary.json"}) {
        REQUIRE(fs::exists(dir / "lin2" / f));
        CHECK(slurp(dir / "lin2" / f).find(r.hash) != std::string::npos);
    }
    const auto summary = json::parse(slurp(dir / "lin2" / "summary.json"));
    CHECK(summary["estimate"]["asymptotic_value"].get<double>() == doctest::Approx(std::log(2.0) / 2).epsilon(0.01));
    CHECK(summary["classification"]["kind"] == "unstable");
    CHECK(summary["config_hash"] == r.hash);
    CHECK(summary["provenance"]["config"]["r"] == 2);
    CHECK(r.distances.size() == 41);
    CHECK(r.divergence.size() == 41);

    const auto csv = slurp(dir / "lin2" / "distance.csv");
    CHECK(csv.rfind("# config_hash=" + r.hash + "\nt,d_p,saturated\n0,0,0\n", 0) == 0);
}

TEST_CASE("reruns are byte-identical") {
    const auto dir = scratch("rerun");
    for (const char* cfg : {R"({"system": "barrier", "omega": 5})", R"({"system": "r_adic", "steps": 12})",
                            R"({"system": "baker_koopman", "grid_m": 7, "phase_k": 3, "steps": 8})"}) {
        const auto c = parse_config(cfg);
        write_outputs(evaluate(c), dir / "a");
        write_outputs(evaluate(c), dir / "b");
        for (const char* f : {"distance.csv", "divergence.csv", "lambda_t.csv"}) {
            CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        }
    }
}

TEST_CASE("oscillator classifies stable") {
    const auto r = evaluate(parse_config(R"({"system": "oscillator", "omega": 2, "omega0": 1})"));
    CHECK(r.analysis.classification.kind == StabilityClass::stable);
}

TEST_CASE("classical baker runs saturate") {
    const auto r = evaluate(parse_config(R"({"system": "baker_classical"})"));
    CHECK(r.distances.saturation_time.has_value());
    CHECK(r.analysis.estimate.has_value());
}

TEST_CASE("ingest from CSV") {
    const auto dir = scratch("ingest");
    std::ostringstream good;
    good << "t,overlap\n";
    for (int k = 0; k <= 400; ++k) good << k << ',' << std::exp(-2.0 * 0.017 * k) << '\n';
    write_text(dir / "decay.csv", good.str());
    auto c = ingest_config(dir / "decay.csv", OverlapConvention::probability, EstimatorSettings{});
    CHECK(c.id == "decay");
    const auto r = evaluate(c);
    CHECK(r.analysis.classification.kind == StabilityClass::unstable);
    CHECK(r.analysis.classification.exponent == doctest::Approx(0.017).epsilon(0.05));

    write_text(dir / "flat.csv", "t,overlap\n0,1\n1,1\n2,1\n3,1\n4,1\n");
    CHECK(evaluate(ingest_config(dir / "flat.csv", OverlapConvention::amplitude, {})).analysis.classification.kind ==
          StabilityClass::stable);

    write_text(dir / "bad.csv", "t,overlap\n0,1\n1,0.9\n2,1.2\n");
    try {
        evaluate(ingest_config(dir / "bad.csv", OverlapConvention::amplitude, {}));
        FAIL("accepted overlap > 1");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate(ingest_config(dir / "missing.csv", OverlapConvention::amplitude, {})), DataError);

    // relative paths in configs resolve against the config directory
    write_text(dir / "run.json", R"({"system": "overlap_file", "path": "decay.csv", "convention": "probability"})");
    CHECK(load_config(dir / "run.json").path == (dir / "decay.csv").lexically_normal().string());
}

TEST_CASE("figure presets") {
    CHECK(figure_preset("fig1a").size() == 4);
    CHECK(figure_preset("fig1b").size() == 4);
    CHECK(figure_preset("fig2a").size() == 1);
    CHECK_THROWS_AS(figure_preset("fig3"), ConfigError);

    const auto dir = scratch("figure");
    const auto one = run_figure("fig1a", dir / "one", 1);
    const auto two = run_figure("fig1a", dir / "two", 4);
    CHECK(slurp(one.svg) == slurp(two.svg));
    CHECK(slurp(one.svg).rfind("<svg", 0) == 0);
    for (const auto& r : one.results) {
        for (const char* f : {"distance.csv", "divergence.csv", "lambda_t.csv"}) {
            CHECK(slurp(dir / "one" / r.config.output_dir / f) == slurp(dir / "two" / r.config.output_dir / f));
        }
    }
}

TEST_CASE("thread cap") {
    ::setenv("PLYAP_THREADS", "3", 1);
    CHECK(thread_cap() == 3);
    ::setenv("PLYAP_THREADS", "zero", 1);
    CHECK(thread_cap() >= 1);
    ::unsetenv("PLYAP_THREADS");
}

TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorKind::config) == 2);
    CHECK(exit_code(ErrorKind::domain) == 2);
    CHECK(exit_code(ErrorKind::data) == 3);
    CHECK(exit_code(ErrorKind::numerical) == 4);
    CHECK(exit_code(ErrorKind::saturation) == 4);
}
