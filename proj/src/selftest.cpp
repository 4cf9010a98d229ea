#include "plyap/selftest.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "plyap/ensembles.hpp"
#include "plyap/errors.hpp"
#include "plyap/estimators.hpp"
#include "plyap/io.hpp"
#include "plyap/maps.hpp"
#include "plyap/projective.hpp"
#include "plyap/quantum.hpp"
#include "plyap/runner.hpp"

namespace plyap {

namespace {

using std::numbers::pi;

struct Check {
    std::string name;
    std::function<std::string()> body;  // empty string on success
};

std::string fmt(const std::string& label, double value) {
    std::ostringstream s;
    s.precision(6);
    s << label << " = " << value;
    return s.str();
}

ProjectiveState random_state(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<Amplitude> a(n);
    for (auto& x : a) x = {g(rng), g(rng)};
    return ProjectiveState(std::move(a), Discrete{n});
}

std::string metric_axioms() {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const auto a = random_state(rng, 6), b = random_state(rng, 6), c = random_state(rng, 6);
        const double ab = fubini_study_distance(a, b), bc = fubini_study_distance(b, c), ac = fubini_study_distance(a, c);
        if (ab < 0.0 || ab > pi || std::abs(ab - fubini_study_distance(b, a)) > 1e-12) return "symmetry or range violated";
        worst = std::max(worst, ac - ab - bc);
        if (fubini_study_distance(a, a.scaled({0.3, -2.0})) > 1e-7) return "ray invariance violated";
    }
    return worst > 1e-12 ? fmt("triangle excess", worst) : "";
}

std::string divergence_identity() {
    for (double d : {1e-6, 0.5, 3.0, 40.0}) {
        if (std::abs(classical_divergence(bounded_euclidean_distance(d)) / d - 1.0) > 1e-12) return fmt("d", d);
    }
    for (double lo : {-1e-3, -0.7, -8.0}) {
        const double d = distance_from_log_overlap(lo);
        if (std::abs(std::exp(log_projective_divergence(lo)) / projective_divergence(d) - 1.0) > 1e-10) return fmt("log overlap", lo);
    }
    return "";
}

std::string linear_exponent() {
    for (int r : {2, 3, 5}) {
        const auto e = asymptotic_estimate(to_divergence(evolve_linear_analytic(1.0, r, 40, 1e-9)));
        if (std::abs(e.asymptotic_value / (std::log(r) / 2) - 1.0) > 0.01) return fmt("estimate", e.asymptotic_value);
    }
    return "";
}

std::string transfer_mass() {
    const Grid2D grid{64, 64};
    auto rho = box_density(0.3, 0.2, grid);
    for (int k = 0; k < 8; ++k) {
        rho = transfer_step(rho, BakerMap{});
        if (std::abs(rho.mass() - 1.0) > 1e-13) return fmt("mass", rho.mass());
    }
    Grid1D line{1024, 0.0, 1.0};
    auto r3 = square_density(0.1, line);
    for (int k = 0; k < 6; ++k) r3 = transfer_step(r3, RAdicMap{3});
    return std::abs(r3.mass() - 1.0) > 1e-13 ? fmt("r-adic mass", r3.mass()) : "";
}

std::string koopman_isometry() {
    const std::size_t side = 256;
    const Grid2D grid{side, side};
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    auto field = [&] {
        std::vector<Amplitude> c(25);
        for (auto& x : c) x = {g(rng), g(rng)};
        std::vector<Amplitude> a(side * side);
        for (std::size_t row = 0; row < side; ++row) {
            for (std::size_t col = 0; col < side; ++col) {
                const double x = (col + 0.5) / side, y = (row + 0.5) / side;
                Amplitude v = 0.0;
                for (int j = -2; j <= 2; ++j) {
                    for (int k = -2; k <= 2; ++k) v += c[(j + 2) * 5 + (k + 2)] * std::polar(1.0, 2.0 * pi * (j * x + k * y));
                }
                a[row * side + col] = v;
            }
        }
        return ProjectiveState(std::move(a), grid);
    };
    const auto a = field(), b = field();
    const double before = overlap_magnitude(a, b);
    const double after = overlap_magnitude(koopman_step(a, BakerMap{}), koopman_step(b, BakerMap{}));
    return std::abs(before - after) > 1e-3 ? fmt("overlap change", after - before) : "";
}

std::string bvs_unitary() {
    for (int n : {2, 8, 64}) {
        const auto b = bvs_baker(n);
        const double err = (b.adjoint() * b - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
        if (err > 1e-10) return fmt("N = " + std::to_string(n) + " error", err);
    }
    return "";
}

std::string barrier_and_oscillator() {
    std::vector<double> t, lb, lo;
    for (int k = 0; k <= 1000; ++k) {
        t.push_back(0.01 * k);
        lb.push_back(log_gaussian_autocorrelation({2.0, -1}, {0, 0, 1.0}, 0.01 * k));
        lo.push_back(log_gaussian_autocorrelation({2.0, +1}, {0, 0, 1.0}, 0.01 * k));
    }
    const auto e = asymptotic_estimate(to_divergence(make_distance_series(t, lb, 1e-9)));
    if (std::abs(e.asymptotic_value - 1.0) > 0.02) return fmt("barrier estimate", e.asymptotic_value);
    const auto a = analyze(to_divergence(make_distance_series(t, lo, 0.05)), EstimatorSettings{});
    return a.classification.kind == StabilityClass::stable ? "" : "oscillator not stable";
}

std::string split_operator_agreement() {
    const QuadraticSystem s{2.0, -1};
    const auto overlaps = split_operator_autocorrelation(s, {0, 0, 1.0}, 0.005, 10, 20);
    double worst = 0.0;
    for (std::size_t k = 0; k < overlaps.size(); ++k) {
        worst = std::max(worst, std::abs(overlaps[k] / gaussian_autocorrelation(s, {0, 0, 1.0}, 0.05 * k) - 1.0));
    }
    return worst > 1e-3 ? fmt("relative error", worst) : "";
}

std::string trajectory_paths() {
    const auto baker = trajectory_lyapunov(BakerMap{}, PhasePoint{0.3137, 0.2718}, 1e-9, 200);
    if (std::abs(baker.direct - std::log(2.0)) > 1e-6) return fmt("baker", baker.direct);
    if (std::abs(baker.direct - baker.via_divergence) > 1e-6) return fmt("path gap", baker.direct - baker.via_divergence);
    const auto rot = trajectory_lyapunov(RotationMap{0.1}, PhasePoint{0.3}, 1e-9, 200);
    return std::abs(rot.direct) > 1e-6 ? fmt("rotation", rot.direct) : "";
}

std::string ingestion() {
    OverlapSeries raw;
    raw.convention = OverlapConvention::probability;
    for (int k = 0; k <= 400; ++k) {
        raw.times.push_back(k);
        raw.overlaps.push_back(std::exp(-2.0 * 0.017 * k));
    }
    const auto lam = ingest_overlap_series(raw).second;
    const auto a = analyze(lam, EstimatorSettings{});
    if (a.classification.kind != StabilityClass::unstable) return "synthetic series not unstable";
    if (std::abs(a.classification.exponent / 0.017 - 1.0) > 0.05) return fmt("exponent", a.classification.exponent);
    return "";
}

std::string determinism() {
    const auto config = parse_config(R"({"system": "linear", "id": "selftest", "r": 3, "steps": 30})");
    const auto a = evaluate(config), b = evaluate(config);
    std::ostringstream sa, sb;
    write_divergence_csv(sa, a.divergence, a.hash);
    write_divergence_csv(sb, b.divergence, b.hash);
    return sa.str() == sb.str() ? "" : "divergence CSV differs between evaluations";
}

std::string config_errors() {
    try {
        parse_config(R"({"system": "linear", "r": "two"})");
    } catch (const ConfigError& e) {
        return e.field() == "r" ? "" : "error names field " + e.field();
    }
    return "malformed config accepted";
}

}  // namespace

std::vector<SelftestResult> run_selftest() {
    const std::vector<Check> checks = {
        {"fubini-study metric axioms", metric_axioms},
        {"divergence function identities", divergence_identity},
        {"linear map exponents ln(r)/2", linear_exponent},
        {"transfer operator conserves mass", transfer_mass},
        {"koopman operator is an isometry", koopman_isometry},
        {"bvs baker is unitary", bvs_unitary},
        {"barrier unstable, oscillator stable", barrier_and_oscillator},
        {"split-operator matches gaussian dynamics", split_operator_agreement},
        {"trajectory exponents on both paths", trajectory_paths},
        {"overlap ingestion recovers the rate", ingestion},
        {"reruns are byte-identical", determinism},
        {"config errors name the field", config_errors},
    };
    std::vector<SelftestResult> results;
    for (const auto& c : checks) {
        SelftestResult r{c.name, false, {}};
        try {
            r.detail = c.body();
            r.passed = r.detail.empty();
        } catch (const std::exception& e) {
            r.detail = std::string("threw: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

int report_selftest(std::ostream& out) {
    int failures = 0;
    for (const auto& r : run_selftest()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        out << '\n';
        failures += r.passed ? 0 : 1;
    }
    return failures;
}

}  // namespace plyap
