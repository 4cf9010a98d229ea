#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "plyap/errors.hpp"
#include "plyap/estimators.hpp"
#include "plyap/quantum.hpp"

using namespace plyap;
using std::numbers::pi;

namespace {

const QuadraticSystem barrier2{2.0, -1};
const QuadraticSystem barrier5{5.0, -1};
const QuadraticSystem oscillator2{2.0, +1};

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Split-operator overlaps sampled every 0.05 / omega over [0, 3 / omega].
std::vector<double> oracle(const QuadraticSystem& s, double omega0, std::size_t substeps = 5) {
    const double dt = 0.05 / (s.omega * static_cast<double>(substeps));
    return split_operator_autocorrelation(s, GaussianState{0.0, 0.0, omega0}, dt, substeps, 60);
}

}  // namespace

TEST_CASE("full cross-term barrier formula") {
    CHECK(barrier_overlap_full_cross(1.0, 2.0, 0.0) == 1.0);
    for (double t : {0.1, 1.0, 4.0}) {
        CHECK(barrier_overlap_full_cross(2.0, 2.0, t) == doctest::Approx(std::pow(std::cosh(2.0 * t), -0.5)).epsilon(1e-14));
    }
    // mpmath, 30 digits
    CHECK(barrier_overlap_full_cross(1.0, 2.0, 5.0) == doctest::Approx(0.007096950044607345641).epsilon(1e-13));
    CHECK(log_barrier_overlap_full_cross(1.0, 2.0, 500.0) == doctest::Approx(-500.0 - 0.25 * std::log(3.25 / 4.0)).epsilon(1e-13));
    CHECK_THROWS_AS(barrier_overlap_full_cross(0.0, 2.0, 1.0), DomainError);
}

TEST_CASE("exact Gaussian autocorrelation") {
    CHECK(gaussian_autocorrelation(barrier2, {0, 0, 1.0}, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double t : {0.3, 2.0, 17.0}) {
        CHECK(gaussian_autocorrelation(oscillator2, {0, 0, 2.0}, t) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(gaussian_autocorrelation(barrier2, {0, 0, 2.0}, t) - barrier_overlap_full_cross(2.0, 2.0, t)) <= 1e-12);
    }
    // mpmath, 30 digits, with the 1/4 cross term
    CHECK(gaussian_autocorrelation(barrier2, {0, 0, 1.0}, 5.0) == doctest::Approx(0.0085229037057832356715).epsilon(1e-13));
    // oscillator overlap has period pi / omega
    const double p = pi / 2.0;
    CHECK(gaussian_autocorrelation(oscillator2, {0, 0, 1.0}, 0.4) ==
          doctest::Approx(gaussian_autocorrelation(oscillator2, {0, 0, 1.0}, 0.4 + p)).epsilon(1e-13));
    // barrier decays like e^{-omega t / 2}
    const double l1 = log_gaussian_autocorrelation(barrier5, {0, 0, 1.0}, 100.0);
    const double l2 = log_gaussian_autocorrelation(barrier5, {0, 0, 1.0}, 101.0);
    CHECK(l2 - l1 == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_autocorrelation(barrier2, {0, 0, -1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(gaussian_autocorrelation(barrier2, {0.5, 0, 1.0}, 1.0), ContractError);
}

TEST_CASE("split-operator oracle agrees with exact Gaussian dynamics") {
    struct Case {
        QuadraticSystem system;
        double omega0;
    };
    for (const auto& c : {Case{oscillator2, 1.0}, Case{barrier2, 1.0}, Case{barrier5, 1.0}}) {
        const auto overlaps = oracle(c.system, c.omega0);
        double worst = 0.0;
        for (std::size_t k = 0; k < overlaps.size(); ++k) {
            const double t = 0.05 / c.system.omega * static_cast<double>(k);
            const double exact = gaussian_autocorrelation(c.system, {0, 0, c.omega0}, t);
            worst = std::max(worst, std::abs(overlaps[k] / exact - 1.0));
        }
        CHECK(worst < 1e-3);
    }
    // omega0 = omega: (cosh wt)^{-1/2}; the splitting error is O(dt^2), so a finer step here
    const auto same = oracle(barrier2, 2.0, 20);
    for (std::size_t k = 0; k < same.size(); ++k) {
        CHECK(std::abs(same[k] - std::pow(std::cosh(2.0 * 0.025 * static_cast<double>(k)), -0.5)) < 1e-6);
    }
    const auto ground = oracle(oscillator2, 2.0);
    for (double v : ground) CHECK(std::abs(v - 1.0) < 1e-6);
}

TEST_CASE("diagnostic: oracle selects the 1/4 cross term") {
    // at omega = 2, omega0 = 1, t = 1.5: full cross-term form 0.23513, 1/4 form 0.28214 (mpmath)
    const auto overlaps = oracle(barrier2, 1.0);
    const double split = overlaps.back();
    const double full = barrier_overlap_full_cross(1.0, 2.0, 1.5);
    const double exact = gaussian_autocorrelation(barrier2, {0, 0, 1.0}, 1.5);
    MESSAGE("split-operator " << split << ", full cross-term form " << full << ", exact Gaussian " << exact);
    CHECK(std::abs(split / exact - 1.0) < 1e-3);
    CHECK(std::abs(split / full - 1.0) > 0.1);
}

TEST_CASE("split-operator norm, step limit and domain guard") {
    const GaussianState g{0.0, 0.0, 1.0};
    const auto grid = split_operator_grid(oscillator2, g, 5.0);
    const auto psi = gaussian_grid_state(oscillator2, g, grid);
    const auto out = split_operator_propagate(psi, oscillator2, 0.005, 1000);
    CHECK(std::abs(out.squared_norm() / psi.squared_norm() - 1.0) < 1e-10);
    CHECK_THROWS_AS(split_operator_propagate(psi, oscillator2, 0.02, 10), DomainError);

    const Grid1D small{256, -4.0, 4.0};
    const auto tight = gaussian_grid_state(barrier2, g, small);
    CHECK_THROWS_AS(split_operator_propagate(tight, barrier2, 0.005, 600), NumericalError);
}

TEST_CASE("half-integer Fourier transform") {
    const auto g2 = bvs_transform(2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(g2(0, 0) - std::polar(s, -pi / 4)) < 1e-15);
    CHECK(std::abs(g2(0, 1) - std::polar(s, -3 * pi / 4)) < 1e-15);
    CHECK(std::abs(g2(1, 0) - std::polar(s, -3 * pi / 4)) < 1e-15);
    CHECK(std::abs(g2(1, 1) - std::polar(s, -pi / 4)) < 1e-15);
    for (int n : {2, 8, 128}) {
        const auto g = bvs_transform(n);
        const auto id = Eigen::MatrixXcd::Identity(n, n);
        CHECK(max_abs(g * g.adjoint() - id) < 1e-12);
        CHECK(max_abs(g.adjoint() * g - id) < 1e-12);
    }
}

TEST_CASE("BVS baker matrix") {
    // G_1 = exp(-i pi / 2) = -i, so B_2 = -i G_2^dagger
    const auto b2 = bvs_baker(2);
    const Eigen::MatrixXcd expect = Amplitude(0.0, -1.0) * bvs_transform(2).adjoint();
    CHECK(max_abs(b2 - expect) < 1e-15);
    const auto b = bvs_baker(128);
    CHECK(max_abs(b.adjoint() * b - Eigen::MatrixXcd::Identity(128, 128)) < 1e-10);
    CHECK_THROWS_AS(bvs_baker(7), DomainError);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(128);
    for (int i = 0; i < 128; ++i) v(i) = {g(rng), g(rng)};
    const BvsBaker fast(128);
    CHECK(max_abs(fast.apply(v) - b * v) < 1e-12);
}

TEST_CASE("BVS baker moves a coherent state like the classical map") {
    // packet at (q, p) = (0.2, 0.2) goes to (0.4, 0.1)
    const int n = 400;
    const double hbar = 1.0 / (2.0 * pi * n);
    const auto psi = bvs_coherent_state(n, 0.2, 0.2, hbar);
    const BvsBaker baker(n);
    const auto out = baker.apply(psi);
    auto peak = [](const Eigen::VectorXcd& v) {
        Eigen::Index i;
        v.cwiseAbs().maxCoeff(&i);
        return (static_cast<double>(i) + 0.5) / static_cast<double>(v.size());
    };
    const Eigen::VectorXcd in_q = Eigen::Map<const Eigen::VectorXcd>(psi.amplitudes().data(), n);
    const Eigen::VectorXcd out_q = Eigen::Map<const Eigen::VectorXcd>(out.amplitudes().data(), n);
    const auto gn = bvs_transform(n);
    CHECK(peak(in_q) == doctest::Approx(0.2).epsilon(0.02));
    CHECK(peak(out_q) == doctest::Approx(0.4).epsilon(0.02));
    CHECK(peak(gn * out_q) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("BVS coherent states") {
    const auto real = bvs_coherent_state(64, 0.3, 0.0, 0.01);
    for (const auto& a : real.amplitudes()) {
        CHECK(a.imag() == 0.0);
        CHECK(a.real() > 0.0);
    }
    const auto flat = bvs_coherent_state(64, 0.3, 0.2, 1e12);
    for (const auto& a : flat.amplitudes()) CHECK(std::abs(a) == doctest::Approx(1.0).epsilon(1e-10));
    // alpha = 1e-4: amplitude falls to e^{-1/2} one sqrt(alpha) = 18 cells from q0
    const auto packet = bvs_coherent_state(1800, 0.5 + 0.5 / 1800, 0.003, 1e-4);
    const auto& a = packet.amplitudes();
    CHECK(std::abs(a[900 + 18]) / std::abs(a[900]) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(bvs_coherent_state(1800, 1.2, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(bvs_coherent_state(1800, 0.2, 0.0, 0.0), DomainError);
}

TEST_CASE("barrier and oscillator exponents") {
    for (double w : {2.0, 5.0}) {
        const QuadraticSystem s{w, -1};
        std::vector<double> t, lv;
        const double dt = 0.01;
        for (int k = 0; k * dt <= 20.0 / w + 1e-12; ++k) {
            t.push_back(k * dt);
            lv.push_back(log_gaussian_autocorrelation(s, {0, 0, 1.0}, k * dt));
        }
        const auto lam = to_divergence(make_distance_series(t, lv, 1e-9));
        CHECK(asymptotic_estimate(lam).asymptotic_value == doctest::Approx(w / 2).epsilon(0.02));
    }
    std::vector<double> t, lv;
    for (int k = 0; k <= 5000; ++k) {
        t.push_back(k * 0.01);
        lv.push_back(log_gaussian_autocorrelation(oscillator2, {0, 0, 1.0}, k * 0.01));
    }
    const auto a = analyze(to_divergence(make_distance_series(t, lv, 0.05)), EstimatorSettings{});
    CHECK(a.classification.kind == StabilityClass::stable);
    REQUIRE(a.estimate.has_value());
    CHECK(std::abs(a.estimate->finite_time_curve.back().lambda) < 0.05);
    CHECK(a.estimate->finite_time_curve.back().t == doctest::Approx(49.99));
}
