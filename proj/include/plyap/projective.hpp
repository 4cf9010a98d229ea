#pragma once

// Ray-space states and the distance / divergence primitives shared by every
// estimator. Distances are computed on rays: amplitudes are normalised inside
// each operation, so callers may pass states in any normalisation.

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace plyap {

using Amplitude = std::complex<double>;

/// Uniform grid of `cells` cells on [lo, hi).
struct Grid1D {
    std::size_t cells = 0;
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return (hi - lo) / static_cast<double>(cells); }
    bool operator==(const Grid1D&) const = default;
};

/// Uniform `rows` x `cols` grid on the unit square. Row index runs along y,
/// column index along x; values are stored row-major.
struct Grid2D {
    std::size_t rows = 0;
    std::size_t cols = 0;

    double width_x() const { return 1.0 / static_cast<double>(cols); }
    double width_y() const { return 1.0 / static_cast<double>(rows); }
    bool operator==(const Grid2D&) const = default;
};

/// Finite orthonormal basis of dimension n.
struct Discrete {
    std::size_t n = 0;
    bool operator==(const Discrete&) const = default;
};

using Basis = std::variant<Grid1D, Grid2D, Discrete>;

std::size_t basis_size(const Basis& basis);
/// Integration weight of one basis element: the cell measure for grids, 1 otherwise.
double basis_weight(const Basis& basis);
void validate_basis(const Basis& basis);

/// Representative of a ray in (real or complex) projective space.
class ProjectiveState {
public:
    ProjectiveState(std::vector<Amplitude> amplitudes, Basis basis);

    static ProjectiveState from_real(std::span<const double> values, Basis basis);

    const std::vector<Amplitude>& amplitudes() const { return amplitudes_; }
    const Basis& basis() const { return basis_; }
    double weight() const { return weight_; }
    std::size_t size() const { return amplitudes_.size(); }

    /// Weighted sum of |amplitude|^2.
    double squared_norm() const;
    ProjectiveState scaled(Amplitude factor) const;
    ProjectiveState normalized() const;

private:
    std::vector<Amplitude> amplitudes_;
    Basis basis_;
    double weight_;
};

/// Weighted inner product <a, b> (antilinear in a). No normalisation.
Amplitude inner_product(const ProjectiveState& a, const ProjectiveState& b);

/// |<a,b>| / (|a| |b|), clamped to [0, 1].
double overlap_magnitude(const ProjectiveState& a, const ProjectiveState& b);

/// 2 arccos of the overlap magnitude; in [0, pi].
double fubini_study_distance(const ProjectiveState& a, const ProjectiveState& b);

/// Weighted 2-norm of a - b, without any ray normalisation.
double hilbert_distance(const ProjectiveState& a, const ProjectiveState& b);

/// pi d / (1 + d), mapping [0, inf) onto [0, pi).
double bounded_euclidean_distance(double d);

/// d_b / (pi - d_b) for a bounded classical distance d_b in [0, pi).
double classical_divergence(double bounded_distance);

/// Lambda = d_P / (pi - d_P) for a projective distance in [0, pi).
double projective_divergence(double distance);

/// ln Lambda computed from ln(overlap) without forming the overlap's
/// complement; stays accurate when the overlap underflows. Returns -inf for
/// log_overlap == 0 (identical rays).
double log_projective_divergence(double log_overlap);

/// d_P = 2 arccos(v) evaluated from ln v, accurate for v close to 1.
double distance_from_log_overlap(double log_overlap);

/// pi - d_P = 2 arcsin(v) evaluated from ln v, accurate for v close to 0.
double distance_gap_from_log_overlap(double log_overlap);

/// Point in a classical phase space.
class PhasePoint {
public:
    PhasePoint() = default;
    explicit PhasePoint(std::vector<double> coordinates);
    PhasePoint(std::initializer_list<double> coordinates);

    const std::vector<double>& coordinates() const { return coordinates_; }
    std::vector<double>& coordinates() { return coordinates_; }
    std::size_t dimension() const { return coordinates_.size(); }
    double operator[](std::size_t i) const { return coordinates_[i]; }

private:
    std::vector<double> coordinates_;
};

double euclidean_phase_distance(const PhasePoint& x, const PhasePoint& y);

}  // namespace plyap
