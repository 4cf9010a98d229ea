#include "plyap/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "plyap/errors.hpp"

namespace plyap {

namespace {

constexpr double pi = std::numbers::pi;

struct SizeVisitor {
    std::size_t operator()(const Grid1D& g) const { return g.cells; }
    std::size_t operator()(const Grid2D& g) const { return g.rows * g.cols; }
    std::size_t operator()(const Discrete& d) const { return d.n; }
};

struct WeightVisitor {
    double operator()(const Grid1D& g) const { return g.width(); }
    double operator()(const Grid2D& g) const { return g.width_x() * g.width_y(); }
    double operator()(const Discrete&) const { return 1.0; }
};

void require_same_basis(const ProjectiveState& a, const ProjectiveState& b, const char* op) {
    if (!(a.basis() == b.basis())) {
        throw ContractError(std::string(op) + ": states live on different bases");
    }
}

// ln(2 asin v) for v = exp(log_v) in [0, 1].
double log_gap(double log_v) {
    const double v = std::exp(log_v);
    if (v < 1e-4) {
        // asin(v)/v = 1 + v^2/6 + 3 v^4/40 + O(v^6)
        const double v2 = v * v;
        return std::numbers::ln2 + log_v + std::log1p(v2 / 6.0 + 3.0 * v2 * v2 / 40.0);
    }
    return std::log(2.0 * std::asin(std::min(v, 1.0)));
}

double checked_log_overlap(double log_overlap) {
    if (std::isnan(log_overlap)) throw DomainError("log overlap is NaN");
    if (log_overlap > 1e-12) throw DomainError("log overlap must be <= 0");
    return std::min(log_overlap, 0.0);
}

}  // namespace

std::size_t basis_size(const Basis& basis) { return std::visit(SizeVisitor{}, basis); }

double basis_weight(const Basis& basis) { return std::visit(WeightVisitor{}, basis); }

void validate_basis(const Basis& basis) {
    if (basis_size(basis) == 0) throw ContractError("basis has no elements");
    if (const auto* g = std::get_if<Grid1D>(&basis)) {
        if (!(g->hi > g->lo) || !std::isfinite(g->lo) || !std::isfinite(g->hi)) {
            throw ContractError("grid-1d interval must satisfy lo < hi");
        }
    }
}

ProjectiveState::ProjectiveState(std::vector<Amplitude> amplitudes, Basis basis)
    : amplitudes_(std::move(amplitudes)), basis_(basis), weight_(0.0) {
    validate_basis(basis_);
    if (amplitudes_.size() != basis_size(basis_)) {
        throw ContractError("amplitude count " + std::to_string(amplitudes_.size()) +
                            " does not match basis size " + std::to_string(basis_size(basis_)));
    }
    weight_ = basis_weight(basis_);
    const double n2 = squared_norm();
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw InvalidStateError("state norm must be positive and finite");
    }
}

ProjectiveState ProjectiveState::from_real(std::span<const double> values, Basis basis) {
    std::vector<Amplitude> amps(values.begin(), values.end());
    return ProjectiveState(std::move(amps), basis);
}

double ProjectiveState::squared_norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum * weight_;
}

ProjectiveState ProjectiveState::scaled(Amplitude factor) const {
    std::vector<Amplitude> out(amplitudes_);
    for (auto& a : out) a *= factor;
    return ProjectiveState(std::move(out), basis_);
}

ProjectiveState ProjectiveState::normalized() const { return scaled(1.0 / std::sqrt(squared_norm())); }

Amplitude inner_product(const ProjectiveState& a, const ProjectiveState& b) {
    require_same_basis(a, b, "inner_product");
    Amplitude sum{0.0, 0.0};
    const auto& x = a.amplitudes();
    const auto& y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::conj(x[i]) * y[i];
    return sum * a.weight();
}

double overlap_magnitude(const ProjectiveState& a, const ProjectiveState& b) {
    const double value = std::abs(inner_product(a, b)) / std::sqrt(a.squared_norm() * b.squared_norm());
    return std::clamp(value, 0.0, 1.0);
}

double fubini_study_distance(const ProjectiveState& a, const ProjectiveState& b) {
    return 2.0 * std::acos(overlap_magnitude(a, b));
}

double hilbert_distance(const ProjectiveState& a, const ProjectiveState& b) {
    require_same_basis(a, b, "hilbert_distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a.amplitudes()[i] - b.amplitudes()[i]);
    return std::sqrt(sum * a.weight());
}

double bounded_euclidean_distance(double d) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("euclidean distance must be finite and >= 0");
    // rounding would reach pi for d beyond ~1e16
    return std::min(pi * d / (1.0 + d), std::nextafter(pi, 0.0));
}

double classical_divergence(double bounded_distance) {
    if (!(bounded_distance >= 0.0)) throw DomainError("bounded distance must be >= 0");
    if (bounded_distance >= pi) throw SaturationError("bounded distance reached pi", std::nullopt);
    return bounded_distance / (pi - bounded_distance);
}

double projective_divergence(double distance) {
    if (!(distance >= 0.0)) throw DomainError("projective distance must be >= 0");
    if (distance >= pi) throw SaturationError("projective distance reached pi", std::nullopt);
    return distance / (pi - distance);
}

double distance_from_log_overlap(double log_overlap) {
    const double lv = checked_log_overlap(log_overlap);
    // 2 acos(v) = 4 asin(sqrt((1 - v) / 2)), with 1 - v = -expm1(ln v).
    return 4.0 * std::asin(std::sqrt(-std::expm1(lv) / 2.0));
}

double distance_gap_from_log_overlap(double log_overlap) {
    const double lv = checked_log_overlap(log_overlap);
    return 2.0 * std::asin(std::min(std::exp(lv), 1.0));
}

double log_projective_divergence(double log_overlap) {
    const double lv = checked_log_overlap(log_overlap);
    if (lv == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(distance_from_log_overlap(lv)) - log_gap(lv);
}

PhasePoint::PhasePoint(std::vector<double> coordinates) : coordinates_(std::move(coordinates)) {
    for (double c : coordinates_) {
        if (!std::isfinite(c)) throw InvalidStateError("phase point coordinates must be finite");
    }
}

PhasePoint::PhasePoint(std::initializer_list<double> coordinates)
    : PhasePoint(std::vector<double>(coordinates)) {}

double euclidean_phase_distance(const PhasePoint& x, const PhasePoint& y) {
    if (x.dimension() != y.dimension()) throw ContractError("phase points differ in dimension");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.dimension(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace plyap
