#include "plyap/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "json.hpp"

#include "plyap/ensembles.hpp"
#include "plyap/errors.hpp"
#include "plyap/io.hpp"
#include "plyap/quantum.hpp"
#include "plyap/svg.hpp"

#ifndef PLYAP_VERSION
#define PLYAP_VERSION "0.0.0"
#endif

namespace plyap {

namespace {

using json = nlohmann::json;
using std::numbers::pi;

constexpr double unbounded_threshold = 1e-9;

enum class FieldType { number, integer, string, window };

struct Field {
    std::string name;
    FieldType type;
    json fallback;
};

const std::map<std::string, SystemKind>& system_names() {
    static const std::map<std::string, SystemKind> names = {
        {"linear", SystemKind::linear},
        {"r_adic", SystemKind::r_adic},
        {"baker_classical", SystemKind::baker_classical},
        {"baker_koopman", SystemKind::baker_koopman},
        {"oscillator", SystemKind::oscillator},
        {"barrier", SystemKind::barrier},
        {"bvs_baker", SystemKind::bvs_baker},
        {"overlap_file", SystemKind::overlap_file},
    };
    return names;
}

std::vector<Field> system_fields(SystemKind kind) {
    switch (kind) {
        case SystemKind::linear:
            return {{"r", FieldType::number, 2.0},       {"b", FieldType::number, 1.0},
                    {"mode", FieldType::string, "analytic"}, {"domain", FieldType::number, 4.0},
                    {"cells", FieldType::integer, 64},   {"steps", FieldType::integer, 40},
                    {"threshold", FieldType::number, unbounded_threshold}};
        case SystemKind::r_adic:
            return {{"r", FieldType::integer, 2},
                    {"init_width", FieldType::number, std::ldexp(1.0, -10)},
                    {"cells", FieldType::integer, 1 << 16},
                    {"steps", FieldType::integer, 20},
                    {"threshold", FieldType::number, default_saturation_threshold}};
        case SystemKind::baker_classical:
            return {{"grid_m", FieldType::integer, 10},
                    {"init_width", FieldType::number, std::ldexp(1.0, -6)},
                    {"init_height", FieldType::number, 1.0},
                    {"steps", FieldType::integer, 16},
                    {"threshold", FieldType::number, default_saturation_threshold}};
        case SystemKind::baker_koopman:
            return {{"grid_m", FieldType::integer, 10},
                    {"init_width", FieldType::number, std::ldexp(1.0, -6)},
                    {"init_height", FieldType::number, 1.0},
                    {"phase_k", FieldType::integer, 0},
                    {"steps", FieldType::integer, 16},
                    {"threshold", FieldType::number, default_saturation_threshold}};
        case SystemKind::oscillator:
            return {{"omega", FieldType::number, 2.0},
                    {"omega0", FieldType::number, json()},
                    {"duration", FieldType::number, json()},
                    {"dt", FieldType::number, 0.01},
                    {"threshold", FieldType::number, default_saturation_threshold}};
        case SystemKind::barrier:
            return {{"omega", FieldType::number, 2.0},
                    {"omega0", FieldType::number, 1.0},
                    {"duration", FieldType::number, json()},
                    {"dt", FieldType::number, 0.01},
                    {"threshold", FieldType::number, unbounded_threshold}};
        case SystemKind::bvs_baker:
            return {{"N", FieldType::integer, 1800},     {"q0", FieldType::number, 0.003},
                    {"p0", FieldType::number, 0.003},    {"alpha", FieldType::number, 1e4},
                    {"steps", FieldType::integer, 20},
                    {"threshold", FieldType::number, default_saturation_threshold}};
        case SystemKind::overlap_file:
            return {{"path", FieldType::string, json()},
                    {"convention", FieldType::string, "amplitude"},
                    {"threshold", FieldType::number, default_saturation_threshold}};
    }
    return {};
}

std::vector<Field> common_fields(const std::string& system) {
    return {{"id", FieldType::string, system},
            {"output_dir", FieldType::string, json()},
            {"seed", FieldType::integer, 0},
            {"method", FieldType::string, "regression"},
            {"delta_index", FieldType::integer, 1},
            {"window", FieldType::window, json()}};
}

bool has_type(const json& v, FieldType type) {
    switch (type) {
        case FieldType::number: return v.is_number();
        case FieldType::integer: return v.is_number_integer();
        case FieldType::string: return v.is_string();
        case FieldType::window:
            return v.is_array() && v.size() == 2 && v[0].is_number() && (v[1].is_number() || v[1].is_null());
    }
    return false;
}

const char* type_name(FieldType type) {
    switch (type) {
        case FieldType::number: return "a number";
        case FieldType::integer: return "an integer";
        case FieldType::string: return "a string";
        case FieldType::window: return "an array [t1, t2] (t2 may be null)";
    }
    return "";
}

bool filesystem_safe(const std::string& id) {
    if (id.empty() || id == "." || id == ".." || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               c == '.';
    });
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string compiler_id() {
#if defined(__clang__)
    return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    return std::string("gcc ") + __VERSION__;
#else
    return "unknown";
#endif
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

struct Series {
    std::vector<double> times;
    std::vector<double> log_overlaps;
};

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

Series grid_path(const ExperimentConfig& c, std::vector<std::string>& warnings) {
    Series s;
    if (c.system == SystemKind::r_adic) {
        const Grid1D grid{c.cells, 0.0, 1.0};
        std::string warning;
        const auto reference = square_density(c.init_width, grid, &warning);
        if (!warning.empty()) warnings.push_back(warning);
        const auto ref_state = sqrt_embed(reference);
        auto current = reference;
        for (std::size_t k = 0; k <= c.steps; ++k) {
            s.times.push_back(static_cast<double>(k));
            s.log_overlaps.push_back(std::min(0.0, safe_log(overlap_magnitude(ref_state, sqrt_embed(current)))));
            if (k < c.steps) current = transfer_step(current, RAdicMap{static_cast<int>(c.r)});
        }
        return s;
    }
    const std::size_t side = std::size_t{1} << c.grid_m;
    const Grid2D grid{side, side};
    const auto box = box_density(c.init_width, c.init_height, grid);
    if (c.system == SystemKind::baker_classical) {
        const auto ref_state = sqrt_embed(box);
        auto current = box;
        for (std::size_t k = 0; k <= c.steps; ++k) {
            s.times.push_back(static_cast<double>(k));
            s.log_overlaps.push_back(std::min(0.0, safe_log(overlap_magnitude(ref_state, sqrt_embed(current)))));
            if (k < c.steps) current = transfer_step(current, BakerMap{});
        }
        return s;
    }
    auto amplitudes = sqrt_embed(box).amplitudes();
    for (std::size_t row = 0; row < side; ++row) {
        for (std::size_t col = 0; col < side; ++col) {
            const double x = (static_cast<double>(col) + 0.5) / static_cast<double>(side);
            amplitudes[row * side + col] *= std::polar(1.0, 2.0 * pi * c.phase_k * x);
        }
    }
    const ProjectiveState reference(amplitudes, grid);
    ProjectiveState current = reference;
    for (std::size_t k = 0; k <= c.steps; ++k) {
        s.times.push_back(static_cast<double>(k));
        s.log_overlaps.push_back(std::min(0.0, safe_log(overlap_magnitude(reference, current))));
        if (k < c.steps) current = koopman_step(current, BakerMap{});
    }
    return s;
}

Series quadratic_path(const ExperimentConfig& c) {
    Series s;
    const QuadraticSystem system{c.omega, c.system == SystemKind::oscillator ? 1 : -1};
    const GaussianState state{0.0, 0.0, c.omega0};
    const auto samples = static_cast<std::size_t>(std::floor(c.duration / c.dt + 1e-9));
    for (std::size_t k = 0; k <= samples; ++k) {
        const double t = static_cast<double>(k) * c.dt;
        s.times.push_back(t);
        s.log_overlaps.push_back(std::min(0.0, log_gaussian_autocorrelation(system, state, t)));
    }
    return s;
}

Series bvs_path(const ExperimentConfig& c) {
    Series s;
    const BvsBaker baker(c.n);
    const auto reference = bvs_coherent_state(c.n, c.q0, c.p0, c.alpha);
    ProjectiveState current = reference;
    for (std::size_t k = 0; k <= c.steps; ++k) {
        s.times.push_back(static_cast<double>(k));
        s.log_overlaps.push_back(std::min(0.0, safe_log(overlap_magnitude(reference, current))));
        if (k < c.steps) current = baker.apply(current);
    }
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace

std::string to_string(SystemKind kind) {
    for (const auto& [name, k] : system_names()) {
        if (k == kind) return name;
    }
    return "unknown";
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    require(doc.is_object(), "<document>", "config must be a JSON object");
    require(doc.contains("system"), "system", "missing required field");
    require(doc["system"].is_string(), "system", "must be a string");
    const std::string system_name = doc["system"].get<std::string>();
    const auto found = system_names().find(system_name);
    if (found == system_names().end()) {
        std::string known;
        for (const auto& [name, kind] : system_names()) known += (known.empty() ? "" : ", ") + name;
        throw ConfigError("system", "unknown system '" + system_name + "' (expected one of " + known + ")");
    }

    ExperimentConfig c;
    c.system = found->second;
    auto fields = common_fields(system_name);
    for (auto& f : system_fields(c.system)) fields.push_back(f);

    json effective = json::object();
    effective["system"] = system_name;
    for (const auto& [key, value] : doc.items()) {
        if (key == "system") continue;
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.name == key; });
        require(it != fields.end(), key, "unknown field for system '" + system_name + "'");
        require(has_type(value, it->type), key, std::string("must be ") + type_name(it->type));
        effective[key] = value;
    }
    for (const auto& f : fields) {
        if (effective.contains(f.name)) continue;
        if (f.name == "path") throw ConfigError("path", "missing required field");
        c.defaults_applied.push_back(f.name);
        effective[f.name] = f.fallback;
    }

    // Defaults that depend on other fields.
    if (c.system == SystemKind::oscillator && effective["omega0"].is_null()) {
        effective["omega0"] = effective["omega"].get<double>() / 2.0;
    }
    if ((c.system == SystemKind::oscillator || c.system == SystemKind::barrier) && effective["duration"].is_null()) {
        const double w = effective["omega"].get<double>();
        effective["duration"] = (c.system == SystemKind::oscillator ? 100.0 : 20.0) / w;
    }
    if (effective["output_dir"].is_null()) {
        effective["output_dir"] = "out/" + effective["id"].get<std::string>();
    }

    c.id = effective["id"].get<std::string>();
    require(filesystem_safe(c.id), "id", "must be non-empty and use only letters, digits, '_', '-' or '.'");
    c.output_dir = effective["output_dir"].get<std::string>();
    require(!c.output_dir.empty(), "output_dir", "must not be empty");
    require(effective["seed"].get<long long>() >= 0, "seed", "must be >= 0");
    c.seed = effective["seed"].get<std::uint64_t>();

    const std::string method = effective["method"].get<std::string>();
    require(method == "regression" || method == "pointwise", "method", "must be 'regression' or 'pointwise'");
    c.estimator.method = parse_method(method);
    c.estimator.threshold = effective["threshold"].get<double>();
    require(c.estimator.threshold > 0.0 && c.estimator.threshold < pi / 2, "threshold", "must lie in (0, pi/2)");
    require(effective["delta_index"].get<long long>() >= 1, "delta_index", "must be >= 1");
    c.estimator.delta_index = effective["delta_index"].get<std::size_t>();
    if (const auto& w = effective["window"]; !w.is_null()) {
        const double t1 = w[0].get<double>();
        const double t2 = w[1].is_null() ? std::numeric_limits<double>::infinity() : w[1].get<double>();
        require(t1 <= t2, "window", "must satisfy t1 <= t2");
        c.estimator.window = std::pair{t1, t2};
    }

    auto integer = [&](const char* name, long long lo, long long hi) {
        const auto v = effective[name].get<long long>();
        require(v >= lo && v <= hi, name, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    };
    auto positive = [&](const char* name) {
        const double v = effective[name].get<double>();
        require(v > 0.0 && std::isfinite(v), name, "must be positive");
        return v;
    };

    switch (c.system) {
        case SystemKind::linear:
            c.r = effective["r"].get<double>();
            require(c.r > 1.0 && std::isfinite(c.r), "r", "must be > 1");
            c.b = positive("b");
            c.linear_mode = effective["mode"].get<std::string>();
            require(c.linear_mode == "analytic" || c.linear_mode == "grid", "mode", "must be 'analytic' or 'grid'");
            c.domain = positive("domain");
            require(c.domain >= c.b, "domain", "must be >= b");
            c.cells = static_cast<std::size_t>(integer("cells", 1, 1 << 24));
            c.steps = static_cast<std::size_t>(integer("steps", 1, 100000));
            break;
        case SystemKind::r_adic:
            c.r = static_cast<double>(integer("r", 2, 64));
            c.init_width = positive("init_width");
            require(c.init_width <= 1.0, "init_width", "must lie in (0, 1]");
            c.cells = static_cast<std::size_t>(integer("cells", 2, 1 << 24));
            c.steps = static_cast<std::size_t>(integer("steps", 1, 10000));
            break;
        case SystemKind::baker_classical:
        case SystemKind::baker_koopman:
            c.grid_m = static_cast<int>(integer("grid_m", 1, 12));
            c.init_width = positive("init_width");
            c.init_height = positive("init_height");
            require(c.init_width <= 1.0, "init_width", "must lie in (0, 1]");
            require(c.init_height <= 1.0, "init_height", "must lie in (0, 1]");
            if (c.system == SystemKind::baker_koopman) c.phase_k = static_cast<int>(integer("phase_k", -1000, 1000));
            c.steps = static_cast<std::size_t>(integer("steps", 1, 10000));
            break;
        case SystemKind::oscillator:
        case SystemKind::barrier:
            c.omega = positive("omega");
            c.omega0 = positive("omega0");
            c.duration = positive("duration");
            c.dt = positive("dt");
            require(c.duration / c.dt <= 1e7, "dt", "duration / dt must not exceed 1e7 samples");
            require(c.duration / c.dt >= 2.0, "dt", "duration must span at least two steps");
            break;
        case SystemKind::bvs_baker:
            c.n = static_cast<int>(integer("N", 2, 8192));
            require(c.n % 2 == 0, "N", "must be even");
            c.q0 = effective["q0"].get<double>();
            c.p0 = effective["p0"].get<double>();
            require(c.q0 >= 0.0 && c.q0 < 1.0, "q0", "must lie in [0, 1)");
            require(c.p0 >= 0.0 && c.p0 < 1.0, "p0", "must lie in [0, 1)");
            c.alpha = positive("alpha");
            c.steps = static_cast<std::size_t>(integer("steps", 1, 10000));
            break;
        case SystemKind::overlap_file: {
            const std::string raw = effective["path"].get<std::string>();
            require(!raw.empty(), "path", "must not be empty");
            std::filesystem::path p(raw);
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.path = p.lexically_normal().string();
            const std::string convention = effective["convention"].get<std::string>();
            require(convention == "amplitude" || convention == "probability", "convention",
                    "must be 'amplitude' or 'probability'");
            c.convention = parse_convention(convention);
            break;
        }
    }
    c.canonical = effective.dump();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("<file>", "cannot open config " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), file.parent_path());
}

std::string config_hash(const ExperimentConfig& config) {
    json doc = json::parse(config.canonical);
    doc.erase("output_dir");
    return hex64(fnv1a64(doc.dump()));
}

ExperimentResult evaluate(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.config = config;
    result.hash = config_hash(config);
    const double theta = config.estimator.threshold;

    switch (config.system) {
        case SystemKind::linear:
            if (config.linear_mode == "analytic") {
                result.distances = evolve_linear_analytic(config.b, config.r, static_cast<int>(config.steps), theta);
            } else {
                std::string warning;
                square_density(config.b, Grid1D{config.cells, 0.0, config.domain}, &warning);
                if (!warning.empty()) result.warnings.push_back(warning);
                result.distances = linear_grid_distance_series(config.b, config.r, static_cast<int>(config.steps),
                                                               config.cells, config.domain, theta);
            }
            break;
        case SystemKind::r_adic:
        case SystemKind::baker_classical:
        case SystemKind::baker_koopman: {
            auto s = grid_path(config, result.warnings);
            result.distances = make_distance_series(std::move(s.times), std::move(s.log_overlaps), theta);
            break;
        }
        case SystemKind::oscillator:
        case SystemKind::barrier: {
            auto s = quadratic_path(config);
            result.distances = make_distance_series(std::move(s.times), std::move(s.log_overlaps), theta);
            break;
        }
        case SystemKind::bvs_baker: {
            auto s = bvs_path(config);
            result.distances = make_distance_series(std::move(s.times), std::move(s.log_overlaps), theta);
            break;
        }
        case SystemKind::overlap_file: {
            std::ifstream in(config.path, std::ios::binary);
            if (!in) throw DataError("cannot open overlap file " + config.path);
            const auto raw = read_overlap_csv(in, config.convention);
            result.distances = ingest_overlap_series(raw, theta).first;
            break;
        }
    }
    result.divergence = to_divergence(result.distances);
    result.analysis = analyze(result.divergence, config.estimator);
    if (result.analysis.estimate) {
        result.curve = result.analysis.estimate->finite_time_curve;
    }
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string summary_json(const ExperimentResult& result) {
    const auto& a = result.analysis;
    json estimate;
    if (a.estimate) {
        const auto& e = *a.estimate;
        estimate = {
            {"method", to_string(e.method)},
            {"asymptotic_value", e.asymptotic_value},
            {"fit_window", {e.fit_window.first, e.fit_window.second}},
            {"fit_points", e.fit_points},
            {"residual", e.residual},
            {"saturation_time", nullable(e.saturation_time)},
            {"finite_time_points", e.finite_time_curve.size()},
            {"last_finite_time_value", e.finite_time_curve.empty() ? json() : json(e.finite_time_curve.back().lambda)},
        };
    }
    json classification = {
        {"kind", to_string(a.classification.kind)},
        {"exponent", a.classification.exponent},
        {"saturation_time", nullable(a.classification.saturation_time)},
    };
    json series = {
        {"points", result.distances.size()},
        {"usable_points", result.divergence.usable_prefix()},
        {"saturation_threshold", result.distances.saturation_threshold},
        {"final_distance", result.distances.values.back()},
        {"final_log_overlap", finite_or_null(result.distances.log_overlaps.back())},
    };
    json provenance = {
        {"config", json::parse(result.config.canonical)},
        {"defaults_applied", result.config.defaults_applied},
        {"version", PLYAP_VERSION},
        {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
        {"compiler", compiler_id()},
        {"timestamp", utc_timestamp()},
        {"elapsed_seconds", result.elapsed_seconds},
    };
    json doc = {
        {"schema_version", "1.0"},
        {"id", result.config.id},
        {"system", to_string(result.config.system)},
        {"config_hash", result.hash},
        {"classification", classification},
        {"estimate", estimate},
        {"series", series},
        {"note", a.note},
        {"warnings", result.warnings},
        {"files", {"distance.csv", "divergence.csv", "lambda_t.csv"}},
        {"provenance", provenance},
    };
    return doc.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ostringstream distance, divergence, lambda;
    write_distance_csv(distance, result.distances, result.hash);
    write_divergence_csv(divergence, result.divergence, result.hash);
    write_lambda_csv(lambda, result.curve, result.hash);
    write_file(dir / "distance.csv", distance.str());
    write_file(dir / "divergence.csv", divergence.str());
    write_file(dir / "lambda_t.csv", lambda.str());
    write_file(dir / "summary.json", summary_json(result));
}

ExperimentResult run(const ExperimentConfig& config) {
    auto result = evaluate(config);
    write_outputs(result, config.output_dir);
    return result;
}

ExperimentConfig ingest_config(const std::filesystem::path& csv, OverlapConvention convention,
                               const EstimatorSettings& settings, double threshold_override) {
    std::string id = csv.stem().string();
    for (char& ch : id) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-' && ch != '.') ch = '_';
    }
    if (id.empty() || id == "." || id == "..") id = "ingest";
    json doc = {
        {"system", "overlap_file"},
        {"id", id},
        {"path", std::filesystem::absolute(csv).lexically_normal().string()},
        {"convention", to_string(convention)},
        {"method", to_string(settings.method)},
        {"delta_index", settings.delta_index},
    };
    if (threshold_override > 0.0) doc["threshold"] = threshold_override;
    if (settings.window) {
        doc["window"] = {settings.window->first,
                         std::isfinite(settings.window->second) ? json(settings.window->second) : json()};
    }
    return parse_config(doc.dump());
}

unsigned thread_cap() {
    if (const char* env = std::getenv("PLYAP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> figure_ids() { return {"fig1a", "fig1b", "fig2a"}; }

std::vector<ExperimentConfig> figure_preset(const std::string& id) {
    std::vector<json> docs;
    if (id == "fig1a") {
        for (int r : {2, 3, 5}) {
            docs.push_back({{"system", "linear"}, {"id", "linear_r" + std::to_string(r)}, {"r", r}, {"steps", 40}});
        }
        docs.push_back({{"system", "linear"}, {"id", "linear_r2_grid"}, {"r", 2}, {"mode", "grid"}, {"steps", 10}});
    } else if (id == "fig1b") {
        for (double w : {2.0, 5.0}) {
            docs.push_back({{"system", "barrier"}, {"id", "barrier_w" + std::to_string(static_cast<int>(w))},
                            {"omega", w}, {"omega0", 1.0}});
        }
        for (double w : {2.0, 5.0}) {
            docs.push_back({{"system", "oscillator"}, {"id", "oscillator_w" + std::to_string(static_cast<int>(w))},
                            {"omega", w}, {"duration", 20.0}});
        }
    } else if (id == "fig2a") {
        docs.push_back({{"system", "bvs_baker"},
                        {"id", "bvs_n1800"},
                        {"N", 1800},
                        {"steps", 20},
                        {"method", "pointwise"},
                        {"window", {3.0, nullptr}}});
    } else {
        throw ConfigError("figure", "unknown figure '" + id + "' (expected fig1a, fig1b or fig2a)");
    }
    std::vector<ExperimentConfig> configs;
    for (auto& d : docs) {
        d["output_dir"] = id + "/" + d["id"].get<std::string>();
        configs.push_back(parse_config(d.dump()));
    }
    return configs;
}

FigureOutput run_figure(const std::string& id, const std::filesystem::path& out_dir, unsigned threads) {
    const auto configs = figure_preset(id);
    FigureOutput output;
    output.id = id;
    output.results.resize(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1u, std::min<unsigned>(threads == 0 ? thread_cap() : threads,
                                                             static_cast<unsigned>(configs.size())));
    auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                output.results[i] = evaluate(configs[i]);
                write_outputs(output.results[i], out_dir / configs[i].output_dir);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    LinePlot plot;
    plot.x_label = "t";
    plot.y_label = "finite-time P-Lyapunov exponent";
    std::size_t color = 0;
    for (const auto& r : output.results) {
        PlotCurve curve;
        curve.label = r.config.id;
        curve.color = palette(color++);
        for (const auto& p : r.curve) curve.points.emplace_back(p.t, p.lambda);
        curve.markers = r.config.linear_mode == "grid" && r.config.system == SystemKind::linear;
        plot.curves.push_back(std::move(curve));
    }
    char label[64];
    if (id == "fig1a") {
        plot.title = "Linear map x -> r x: lambda_P^t approaching ln(r)/2";
        for (int r : {2, 3, 5}) {
            std::snprintf(label, sizeof label, "ln(%d)/2 = %.4f", r, std::log(r) / 2);
            plot.references.push_back({std::log(r) / 2, label});
        }
    } else if (id == "fig1b") {
        plot.title = "Parabolic barrier and harmonic oscillator";
        plot.references.push_back({0.0, "oscillator: 0"});
        plot.references.push_back({1.0, "barrier w=2: 1"});
        plot.references.push_back({2.5, "barrier w=5: 2.5"});
        plot.y_range = std::pair{-1.5, 3.5};
    } else {
        plot.title = "BVS quantum baker, N = 1800";
        plot.x_range = std::pair{0.0, 10.0};
        std::snprintf(label, sizeof label, "ln(2)/2 = %.4f", std::log(2.0) / 2);
        plot.references.push_back({std::log(2.0) / 2, label});
        if (const auto tb = output.results.front().distances.saturation_time) {
            std::snprintf(label, sizeof label, "t_b = %g", *tb);
            plot.references.push_back({*tb, label, true});
        }
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    output.svg = out_dir / (id + ".svg");
    write_file(output.svg, render_svg(plot));
    return output;
}

}  // namespace plyap
