#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "plyap/errors.hpp"
#include "plyap/maps.hpp"
#include "plyap/projective.hpp"
#include "plyap/quantum.hpp"

using namespace plyap;
using std::numbers::pi;

namespace {

ProjectiveState random_state(std::mt19937_64& rng, const Basis& basis) {
    std::normal_distribution<double> g;
    std::vector<Amplitude> a(basis_size(basis));
    for (auto& z : a) z = {g(rng), g(rng)};
    return ProjectiveState(std::move(a), basis);
}

ProjectiveState unit_vector(std::size_t n, std::size_t k) {
    std::vector<Amplitude> a(n);
    a[k] = 1.0;
    return ProjectiveState(std::move(a), Discrete{n});
}

}  // namespace

TEST_CASE("overlap of a ray with itself and with orthogonal vectors") {
    std::mt19937_64 rng(1);
    const auto psi = random_state(rng, Discrete{6});
    CHECK(overlap_magnitude(psi, psi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(overlap_magnitude(unit_vector(4, 0), unit_vector(4, 1)) == 0.0);
    CHECK(fubini_study_distance(psi, psi) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(fubini_study_distance(unit_vector(4, 0), unit_vector(4, 1)) == doctest::Approx(pi));
}

TEST_CASE("overlap of square densities of widths b and 4b is 1/2") {
    // sqrt of indicator on [0,1) vs on [0,4), both normalised, on a grid over [0,4)
    const Grid1D grid{64, 0.0, 4.0};
    std::vector<double> narrow(64, 0.0), wide(64, 0.5);
    for (int i = 0; i < 16; ++i) narrow[i] = 1.0;
    const auto a = ProjectiveState::from_real(narrow, grid);
    const auto b = ProjectiveState::from_real(wide, grid);
    CHECK(overlap_magnitude(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    const double half = 0.5;
    CHECK(fubini_study_distance(a, b) == doctest::Approx(2.0 * std::acos(half)));
}

TEST_CASE("distance examples") {
    std::vector<Amplitude> a{1.0, 0.0};
    std::vector<Amplitude> b{0.5, std::sqrt(0.75)};
    const ProjectiveState sa(a, Discrete{2}), sb(b, Discrete{2});
    CHECK(fubini_study_distance(sa, sb) == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-14));
}

TEST_CASE("basis mismatch and invalid states") {
    CHECK_THROWS_AS(overlap_magnitude(unit_vector(3, 0), unit_vector(4, 0)), ContractError);
    CHECK_THROWS_AS(ProjectiveState(std::vector<Amplitude>(3, 0.0), Discrete{3}), InvalidStateError);
    CHECK_THROWS_AS(ProjectiveState(std::vector<Amplitude>(2, 1.0), Discrete{3}), ContractError);
    std::vector<Amplitude> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(ProjectiveState(bad, Discrete{2}), InvalidStateError);
}

TEST_CASE("bounded distance and classical divergence") {
    CHECK(bounded_euclidean_distance(0.0) == 0.0);
    CHECK(bounded_euclidean_distance(1.0) == doctest::Approx(pi / 2));
    CHECK(bounded_euclidean_distance(1e300) < pi);
    CHECK_THROWS_AS(bounded_euclidean_distance(-1.0), DomainError);
    CHECK(classical_divergence(0.0) == 0.0);
    CHECK(classical_divergence(pi / 2) == doctest::Approx(1.0));
    // (3 pi / 4) / (pi / 4) = 3 by direct evaluation
    CHECK(bounded_euclidean_distance(3.0) == doctest::Approx(3.0 * pi / 4.0).epsilon(1e-15));
    CHECK(classical_divergence(bounded_euclidean_distance(3.0)) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(classical_divergence(pi), SaturationError);
    for (double d : {0.0, 1e-6, 1.0}) {
        CHECK(std::abs(classical_divergence(bounded_euclidean_distance(d)) - d) <= 1e-12);
    }
    // pi - d_b carries the rounding of d_b, amplified by (1 + d)
    const double big = 1e6;
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + big) * big;
    CHECK(std::abs(classical_divergence(bounded_euclidean_distance(big)) - big) <= tol);
    double prev = -1.0;
    for (double d = 0.0; d < 100.0; d += 0.37) {
        const double b = bounded_euclidean_distance(d);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("projective divergence and its log-domain form") {
    CHECK(projective_divergence(0.0) == 0.0);
    CHECK(projective_divergence(pi / 2) == doctest::Approx(1.0));
    CHECK(projective_divergence(2 * pi / 3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(projective_divergence(pi), SaturationError);
    CHECK(std::isinf(log_projective_divergence(0.0)));

    // v = 2^-20 (n = 40): direct path vs log path
    const double v = std::pow(2.0, -20.0);
    const double direct = std::log(projective_divergence(2.0 * std::acos(v)));
    const double logged = log_projective_divergence(std::log(v));
    CHECK(std::abs(direct - logged) <= 1e-9 * std::abs(direct));
    // far below double underflow of v itself
    const double deep = log_projective_divergence(-2000.0);
    CHECK(deep == doctest::Approx(std::log(pi) - std::log(2.0) + 2000.0).epsilon(1e-14));
    // near v = 1 the series branch matches the closed form
    for (double lv : {-1e-5, -1e-7, -1e-10}) {
        const double d = 2.0 * std::asin(std::sqrt(-std::expm1(2.0 * lv)));
        const double expect = std::log(d / (pi - d));
        CHECK(log_projective_divergence(lv) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("distances from log overlaps") {
    CHECK(distance_from_log_overlap(0.0) == 0.0);
    CHECK(distance_from_log_overlap(std::log(0.5)) == doctest::Approx(2 * pi / 3).epsilon(1e-15));
    const double lv = -10.0 * std::log(5.0);  // r = 5, k = 20
    CHECK(distance_gap_from_log_overlap(lv) == doctest::Approx(2.0 * std::pow(5.0, -10.0)).epsilon(1e-12));
    CHECK_THROWS_AS(distance_from_log_overlap(0.1), DomainError);
}

TEST_CASE("ray invariance") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto a = random_state(rng, Discrete{5});
        const auto b = random_state(rng, Discrete{5});
        const Amplitude c = std::polar(0.1 + 9.0 * i, 0.3 * i);
        CHECK(std::abs(fubini_study_distance(a.scaled(c), b) - fubini_study_distance(a, b)) <= 1e-12);
    }
}

TEST_CASE("metric axioms on random triples") {
    std::mt19937_64 rng(11);
    const Basis bases[] = {Grid1D{16, -1.0, 3.0}, Grid2D{4, 6}, Discrete{9}};
    for (const auto& basis : bases) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto a = random_state(rng, basis);
            const auto b = random_state(rng, basis);
            const auto c = random_state(rng, basis);
            const double ab = fubini_study_distance(a, b);
            CHECK(ab == fubini_study_distance(b, a));
            CHECK(ab >= 0.0);
            CHECK(ab <= pi);
            worst = std::max(worst, ab - fubini_study_distance(a, c) - fubini_study_distance(c, b));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("Euclidean phase distance") {
    CHECK(euclidean_phase_distance(PhasePoint{0.3}, PhasePoint{0.3}) == 0.0);
    CHECK(euclidean_phase_distance(PhasePoint{0.0, 0.0}, PhasePoint{3.0, 4.0}) == 5.0);
    const double eps = 1e-3;
    const MapDescriptor lin = LinearMap{2.0};
    const auto x1 = apply_map(lin, PhasePoint{1.0});
    const auto y1 = apply_map(lin, PhasePoint{1.0 + eps});
    CHECK(euclidean_phase_distance(x1, y1) == doctest::Approx(2.0 * eps).epsilon(1e-12));
    CHECK_THROWS_AS(euclidean_phase_distance(PhasePoint{0.0}, PhasePoint{0.0, 1.0}), ContractError);
    CHECK_THROWS_AS(PhasePoint({std::nan("")}), InvalidStateError);
}

TEST_CASE("Hilbert distance") {
    std::mt19937_64 rng(3);
    const auto a = random_state(rng, Discrete{4});
    CHECK(hilbert_distance(a, a) == 0.0);
    CHECK(hilbert_distance(unit_vector(3, 0), unit_vector(3, 2)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Hilbert distance is preserved by the BVS baker") {
    std::mt19937_64 rng(5);
    const BvsBaker baker(128);
    for (int i = 0; i < 10; ++i) {
        const auto a = random_state(rng, Discrete{128});
        const auto b = random_state(rng, Discrete{128});
        CHECK(std::abs(hilbert_distance(baker.apply(a), baker.apply(b)) - hilbert_distance(a, b)) <= 1e-10);
    }
}
