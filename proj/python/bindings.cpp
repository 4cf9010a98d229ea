#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "plyap/ensembles.hpp"
#include "plyap/errors.hpp"
#include "plyap/estimators.hpp"
#include "plyap/io.hpp"
#include "plyap/maps.hpp"
#include "plyap/projective.hpp"
#include "plyap/quantum.hpp"
#include "plyap/runner.hpp"
#include "plyap/selftest.hpp"

namespace py = pybind11;
using namespace plyap;

namespace {

ProjectiveState as_state(const std::vector<Amplitude>& amplitudes) {
    return ProjectiveState(amplitudes, Discrete{amplitudes.size()});
}

MapDescriptor parse_map(const std::string& name, double parameter) {
    if (name == "linear") return LinearMap{parameter};
    if (name == "r_adic") return RAdicMap{static_cast<int>(parameter)};
    if (name == "baker") return BakerMap{};
    if (name == "rotation") return RotationMap{parameter};
    throw ContractError("unknown map '" + name + "' (expected linear, r_adic, baker or rotation)");
}

QuadraticSystem quadratic(const std::string& kind, double omega) {
    if (kind == "oscillator") return {omega, +1};
    if (kind == "barrier") return {omega, -1};
    throw ContractError("unknown system '" + kind + "' (expected oscillator or barrier)");
}

std::optional<std::pair<double, double>> window_arg(const std::optional<std::pair<double, std::optional<double>>>& w) {
    if (!w) return std::nullopt;
    return std::pair{w->first, w->second.value_or(std::numeric_limits<double>::infinity())};
}

py::dict analysis_dict(const DistanceSeries& d, const DivergenceSeries& lam, const Analysis& a) {
    py::dict out;
    out["times"] = d.times;
    out["distances"] = d.values;
    out["log_divergence"] = lam.log_values;
    out["saturated"] = std::vector<bool>(d.saturated.begin(), d.saturated.end());
    out["saturation_time"] = d.saturation_time;
    out["classification"] = to_string(a.classification.kind);
    out["exponent"] = a.classification.exponent;
    out["note"] = a.note;
    if (a.estimate) {
        py::dict e;
        e["method"] = to_string(a.estimate->method);
        e["asymptotic_value"] = a.estimate->asymptotic_value;
        e["fit_window"] = a.estimate->fit_window;
        e["fit_points"] = a.estimate->fit_points;
        e["residual"] = a.estimate->residual;
        std::vector<double> t, l;
        for (const auto& p : a.estimate->finite_time_curve) {
            t.push_back(p.t);
            l.push_back(p.lambda);
        }
        e["curve_t"] = t;
        e["curve_lambda"] = l;
        out["estimate"] = e;
    } else {
        out["estimate"] = py::none();
    }
    return out;
}

EstimatorSettings settings(const std::string& method, double threshold, std::size_t delta_index,
                           const std::optional<std::pair<double, std::optional<double>>>& window) {
    EstimatorSettings s;
    s.method = parse_method(method);
    s.threshold = threshold;
    s.delta_index = delta_index;
    s.window = window_arg(window);
    return s;
}

}  // namespace

PYBIND11_MODULE(_plyap, m) {
    m.doc() = "P-Lyapunov exponents of classical and quantum dynamics";
    m.attr("__version__") = PLYAP_VERSION;

    const auto base = py::register_exception<Error>(m, "PlyapError", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", base);
    py::register_exception<InvalidStateError>(m, "InvalidStateError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<SaturationError>(m, "SaturationError", base);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base);
    py::register_exception<DegeneratePathError>(m, "DegeneratePathError", base);
    py::register_exception<DataError>(m, "DataError", base);
    py::register_exception<NumericalError>(m, "NumericalError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    // projective geometry
    m.def("fubini_study_distance", [](const std::vector<Amplitude>& a, const std::vector<Amplitude>& b) {
        return fubini_study_distance(as_state(a), as_state(b));
    }, py::arg("a"), py::arg("b"));
    m.def("overlap_magnitude", [](const std::vector<Amplitude>& a, const std::vector<Amplitude>& b) {
        return overlap_magnitude(as_state(a), as_state(b));
    }, py::arg("a"), py::arg("b"));
    m.def("hilbert_distance", [](const std::vector<Amplitude>& a, const std::vector<Amplitude>& b) {
        return hilbert_distance(as_state(a), as_state(b));
    }, py::arg("a"), py::arg("b"));
    m.def("bounded_euclidean_distance", &bounded_euclidean_distance, py::arg("d"));
    m.def("classical_divergence", &classical_divergence, py::arg("bounded_distance"));
    m.def("projective_divergence", &projective_divergence, py::arg("distance"));
    m.def("log_projective_divergence", &log_projective_divergence, py::arg("log_overlap"));
    m.def("distance_from_log_overlap", &distance_from_log_overlap, py::arg("log_overlap"));

    // estimators
    m.def("analyze_log_overlaps",
          [](std::vector<double> times, std::vector<double> log_overlaps, const std::string& method, double threshold,
             std::size_t delta_index, const std::optional<std::pair<double, std::optional<double>>>& window) {
              const auto d = make_distance_series(std::move(times), std::move(log_overlaps), threshold);
              const auto lam = to_divergence(d);
              return analysis_dict(d, lam, analyze(lam, settings(method, threshold, delta_index, window)));
          },
          py::arg("times"), py::arg("log_overlaps"), py::arg("method") = "regression",
          py::arg("threshold") = default_saturation_threshold, py::arg("delta_index") = 1,
          py::arg("window") = py::none());
    m.def("analyze_overlaps",
          [](std::vector<double> times, std::vector<double> overlaps, const std::string& convention,
             const std::string& method, double threshold, std::size_t delta_index,
             const std::optional<std::pair<double, std::optional<double>>>& window) {
              OverlapSeries raw{std::move(times), std::move(overlaps), parse_convention(convention)};
              const auto [d, lam] = ingest_overlap_series(raw, threshold);
              return analysis_dict(d, lam, analyze(lam, settings(method, threshold, delta_index, window)));
          },
          py::arg("times"), py::arg("overlaps"), py::arg("convention") = "amplitude",
          py::arg("method") = "regression", py::arg("threshold") = default_saturation_threshold,
          py::arg("delta_index") = 1, py::arg("window") = py::none());
    m.def("trajectory_lyapunov",
          [](const std::string& map, double parameter, std::vector<double> x0, double epsilon, std::size_t steps) {
              const auto t = trajectory_lyapunov(parse_map(map, parameter), PhasePoint(std::move(x0)), epsilon, steps);
              return std::pair{t.direct, t.via_divergence};
          },
          py::arg("map"), py::arg("parameter") = 0.0, py::arg("x0") = std::vector<double>{0.3137, 0.2718},
          py::arg("epsilon") = 1e-9, py::arg("steps") = 200);

    // ensembles
    m.def("linear_analytic_log_overlaps", [](double b, double r, int n) {
        return evolve_linear_analytic(b, r, n, 1e-9).log_overlaps;
    }, py::arg("b"), py::arg("r"), py::arg("steps"));
    m.def("transfer_1d", [](std::vector<double> values, double lo, double hi, const std::string& map, double parameter) {
        const auto out = transfer_step(GridDensity(Grid1D{values.size(), lo, hi}, std::move(values)), parse_map(map, parameter));
        const auto& g = std::get<Grid1D>(out.geometry());
        return py::make_tuple(out.values(), g.lo, g.hi);
    }, py::arg("values"), py::arg("lo"), py::arg("hi"), py::arg("map"), py::arg("parameter") = 0.0);
    m.def("baker_transfer", [](const Eigen::MatrixXd& rho) {
        const auto rows = static_cast<std::size_t>(rho.rows()), cols = static_cast<std::size_t>(rho.cols());
        std::vector<double> flat(rows * cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) flat[r * cols + c] = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
        const auto out = transfer_step(GridDensity(Grid2D{rows, cols}, std::move(flat)), BakerMap{});
        Eigen::MatrixXd result(rho.rows(), rho.cols());
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) result(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = out.values()[r * cols + c];
        }
        return result;
    }, py::arg("rho"), "Perron-Frobenius step of the baker map; rows run along y.");

    // quantum systems
    m.def("gaussian_autocorrelation", [](const std::string& kind, double omega, double omega0, double t) {
        return gaussian_autocorrelation(quadratic(kind, omega), GaussianState{0.0, 0.0, omega0}, t);
    }, py::arg("system"), py::arg("omega"), py::arg("omega0"), py::arg("t"));
    m.def("barrier_overlap_full_cross", &barrier_overlap_full_cross, py::arg("omega0"), py::arg("omega"), py::arg("t"));
    m.def("split_operator_autocorrelation",
          [](const std::string& kind, double omega, double omega0, double dt, std::size_t sample_every, std::size_t samples) {
              return split_operator_autocorrelation(quadratic(kind, omega), GaussianState{0.0, 0.0, omega0}, dt,
                                                    sample_every, samples);
          },
          py::arg("system"), py::arg("omega"), py::arg("omega0"), py::arg("dt"), py::arg("sample_every"),
          py::arg("samples"));
    m.def("bvs_transform", &bvs_transform, py::arg("n"));
    m.def("bvs_baker", &bvs_baker, py::arg("n"));
    m.def("bvs_coherent_state", [](int n, double q0, double p0, double alpha) {
        return bvs_coherent_state(n, q0, p0, alpha).amplitudes();
    }, py::arg("n"), py::arg("q0"), py::arg("p0"), py::arg("alpha"));

    // experiment runner
    m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("config_json"));
    m.def("evaluate_config", [](const std::string& text, const std::filesystem::path& base_dir) {
        return summary_json(evaluate(parse_config(text, base_dir)));
    }, py::arg("config_json"), py::arg("base_dir") = std::filesystem::path{},
       "Evaluate a config without writing files; returns summary.json text.");
    m.def("run_config", [](const std::string& text, const std::filesystem::path& output_dir) {
        auto c = parse_config(text);
        if (!output_dir.empty()) c.output_dir = output_dir.string();
        py::gil_scoped_release release;
        return summary_json(run(c));
    }, py::arg("config_json"), py::arg("output_dir") = std::filesystem::path{});
    m.def("run_figure", [](const std::string& id, const std::filesystem::path& out_dir, unsigned threads) {
        py::gil_scoped_release release;
        return run_figure(id, out_dir, threads).svg;
    }, py::arg("id"), py::arg("out_dir"), py::arg("threads") = 0);
    m.def("figure_ids", &figure_ids);
    m.def("selftest", [] {
        py::list out;
        for (const auto& r : run_selftest()) out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
    });
}
