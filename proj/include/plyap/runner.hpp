#pragma once

// Declarative experiments: a flat JSON config names one system, its
// parameters, the evolution length and the estimator settings. `run` evaluates
// it and writes distance.csv, divergence.csv, lambda_t.csv and summary.json.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plyap/estimators.hpp"

namespace plyap {

enum class SystemKind { linear, r_adic, baker_classical, baker_koopman, oscillator, barrier, bvs_baker, overlap_file };

std::string to_string(SystemKind kind);

struct ExperimentConfig {
    std::string id;
    SystemKind system = SystemKind::linear;

    // linear / r_adic
    double r = 2.0;
    double b = 1.0;
    std::string linear_mode = "analytic";
    double domain = 4.0;
    std::size_t cells = 0;
    double init_width = 0.0;
    // baker
    double init_height = 1.0;
    int grid_m = 10;
    int phase_k = 0;
    // quadratic systems
    double omega = 2.0;
    double omega0 = 1.0;
    double duration = 0.0;
    double dt = 0.01;
    // BVS baker
    int n = 1800;
    double q0 = 0.003;
    double p0 = 0.003;
    double alpha = 1e4;
    // overlap file
    std::string path;
    OverlapConvention convention = OverlapConvention::amplitude;

    std::size_t steps = 0;
    EstimatorSettings estimator;
    std::string output_dir;
    std::uint64_t seed = 0;

    /// Every effective field, defaults included, as sorted-key JSON.
    std::string canonical;
    /// Names of the fields filled from defaults.
    std::vector<std::string> defaults_applied;
};

/// Parse and validate a flat JSON config. Unknown, missing or mistyped fields
/// raise ConfigError naming the field. Relative `path` values resolve against
/// `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& file);

/// FNV-1a of the canonical config without `output_dir`, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ExperimentResult {
    ExperimentConfig config;
    std::string hash;
    DistanceSeries distances;
    DivergenceSeries divergence;
    std::vector<FiniteTimePoint> curve;
    Analysis analysis;
    std::vector<std::string> warnings;
    double elapsed_seconds = 0.0;
};

ExperimentResult evaluate(const ExperimentConfig& config);
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);
std::string summary_json(const ExperimentResult& result);

/// evaluate + write_outputs into config.output_dir.
ExperimentResult run(const ExperimentConfig& config);

/// Config for `plyap ingest`.
ExperimentConfig ingest_config(const std::filesystem::path& csv, OverlapConvention convention,
                               const EstimatorSettings& settings, double threshold_override = -1.0);

/// Worker cap from PLYAP_THREADS (>= 1), else the hardware concurrency.
unsigned thread_cap();

struct FigureOutput {
    std::string id;
    std::filesystem::path svg;
    std::vector<ExperimentResult> results;
};

std::vector<std::string> figure_ids();
std::vector<ExperimentConfig> figure_preset(const std::string& id);
/// Runs the preset bundle in parallel, writes `<out>/<id>/<experiment>/...` and `<out>/<id>.svg`.
FigureOutput run_figure(const std::string& id, const std::filesystem::path& out_dir, unsigned threads = 0);

}  // namespace plyap
