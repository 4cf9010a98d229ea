#pragma once

// Quadratic Hamiltonians with exact Gaussian dynamics, a split-operator grid
// propagator used as an independent oracle, and the BVS quantum baker map.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "plyap/projective.hpp"

namespace plyap {

/// H = p^2 / 2m + sign * m omega^2 x^2 / 2; sign +1 oscillator, -1 barrier.
struct QuadraticSystem {
    double omega = 1.0;
    int sign = 1;
    double mass = 1.0;
    double hbar = 1.0;
};

/// psi(x) ~ exp(-m omega0 (x - q0)^2 / 2 hbar + i p0 x / hbar)
struct GaussianState {
    double q0 = 0.0;
    double p0 = 0.0;
    double omega0 = 1.0;
};

void validate(const QuadraticSystem& system);
void validate(const GaussianState& state);

/// (cosh^2 wt + (w/w0 - w0/w)^2 sinh^2 wt)^(-1/4). Agrees with the exact
/// evolution only at w0 = w; kept for comparison with it.
double barrier_overlap_full_cross(double omega0, double omega, double t);
double log_barrier_overlap_full_cross(double omega0, double omega, double t);

/// |<psi(0)|psi(t)>| for a centred Gaussian from the exact evolution of its
/// complex width. For the barrier this is
/// (cosh^2 wt + (1/4)(w/w0 - w0/w)^2 sinh^2 wt)^(-1/4).
double gaussian_autocorrelation(const QuadraticSystem& system, const GaussianState& state, double t);
double log_gaussian_autocorrelation(const QuadraticSystem& system, const GaussianState& state, double t);

/// Position and momentum amplitude widths of the evolved (centred) Gaussian.
double gaussian_position_width(const QuadraticSystem& system, const GaussianState& state, double t);
double gaussian_momentum_width(const QuadraticSystem& system, const GaussianState& state, double t);

/// Symmetric grid [-L, L) with a power-of-two cell count, L = 6 x the largest
/// position width over [0, duration] and the momentum cutoff 6 x the largest
/// momentum width (plus the centre offsets).
Grid1D split_operator_grid(const QuadraticSystem& system, const GaussianState& state, double duration);

ProjectiveState gaussian_grid_state(const QuadraticSystem& system, const GaussianState& state, const Grid1D& grid);

/// Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2). Requires
/// dt * omega <= 0.01. Throws NumericalError when more than 1e-8 of the
/// probability reaches the outer 10% of the grid.
ProjectiveState split_operator_propagate(const ProjectiveState& psi, const QuadraticSystem& system, double dt,
                                         std::size_t steps);

/// Overlaps |<psi(0)|psi(t_k)>| at t_k = k * sample_every * dt, k = 0..samples.
std::vector<double> split_operator_autocorrelation(const QuadraticSystem& system, const GaussianState& state,
                                                   double dt, std::size_t sample_every, std::size_t samples);

/// (G_N)_{kj} = N^{-1/2} exp(-2 pi i (k + 1/2)(j + 1/2) / N), N even.
Eigen::MatrixXcd bvs_transform(int n);

/// B = G_N^{-1} diag(G_{N/2}, G_{N/2}).
Eigen::MatrixXcd bvs_baker(int n);

/// Applies B through its two factors (O(N^2), no dense product formed).
class BvsBaker {
public:
    explicit BvsBaker(int n);

    int dimension() const { return n_; }
    ProjectiveState apply(const ProjectiveState& state) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& amplitudes) const;

private:
    int n_;
    Eigen::MatrixXcd g_full_adjoint_;
    Eigen::MatrixXcd g_half_;
};

/// exp(-(q0 - q_j)^2 / 2 alpha + i p0 q_j / alpha) on q_j = (j + 1/2) / N.
ProjectiveState bvs_coherent_state(int n, double q0, double p0, double alpha);

}  // namespace plyap
