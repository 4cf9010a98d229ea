#include "plyap/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "plyap/errors.hpp"

namespace plyap {

namespace {

using std::numbers::pi;

// Exact complex-width evolution in scaled units x -> x sqrt(m / hbar):
// Q(t) = dx(t)/dx(0) + i a dx(t)/dp(0), P = dQ/dt, a = omega0.
struct WidthFlow {
    std::complex<double> q;
    std::complex<double> p;
};

WidthFlow width_flow(const QuadraticSystem& s, double a, double t) {
    const double w = s.omega;
    const double x = w * t;
    if (s.sign > 0) {
        return {{std::cos(x), a * std::sin(x) / w}, {-w * std::sin(x), a * std::cos(x)}};
    }
    return {{std::cosh(x), a * std::sinh(x) / w}, {w * std::sinh(x), a * std::cosh(x)}};
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
}

std::size_t next_power_of_two(double value) {
    std::size_t n = 2;
    while (static_cast<double>(n) < value) n *= 2;
    return n;
}

double outer_mass_fraction(const std::vector<Amplitude>& psi) {
    const std::size_t n = psi.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 20);
    double outer = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = std::norm(psi[j]);
        total += p;
        if (j < edge || j >= n - edge) outer += p;
    }
    return outer / total;
}

class SplitOperator {
public:
    SplitOperator(const QuadraticSystem& system, const Grid1D& grid, double dt) {
        const std::size_t n = grid.cells;
        const double dx = grid.width();
        half_potential_.resize(n);
        kinetic_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = grid.lo + (static_cast<double>(j) + 0.5) * dx;
            const double v = system.sign * system.mass * system.omega * system.omega * x * x / 2.0;
            half_potential_[j] = std::polar(1.0, -v * dt / (2.0 * system.hbar));
            const double index = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
            const double k = 2.0 * pi * index / (static_cast<double>(n) * dx);
            kinetic_[j] = std::polar(1.0, -system.hbar * k * k * dt / (2.0 * system.mass));
        }
    }

    void step(std::vector<Amplitude>& psi) {
        for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= half_potential_[j];
        fft_.fwd(spectrum_, psi);
        for (std::size_t j = 0; j < spectrum_.size(); ++j) spectrum_[j] *= kinetic_[j];
        fft_.inv(psi, spectrum_);
        for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= half_potential_[j];
    }

private:
    std::vector<Amplitude> half_potential_;
    std::vector<Amplitude> kinetic_;
    std::vector<Amplitude> spectrum_;
    Eigen::FFT<double> fft_;
};

void check_split_step(const QuadraticSystem& system, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
    if (dt * system.omega > 0.01 * (1.0 + 1e-12)) throw DomainError("split-operator step needs dt * omega <= 0.01");
}

void check_domain(const std::vector<Amplitude>& psi, std::size_t step) {
    if (outer_mass_fraction(psi) > 1e-8) {
        throw NumericalError("domain overflow: probability reached the outer 10% of the grid at step " +
                             std::to_string(step));
    }
}

}  // namespace

void validate(const QuadraticSystem& system) {
    if (!(system.omega > 0.0) || !std::isfinite(system.omega)) throw DomainError("omega must be positive");
    if (system.sign != 1 && system.sign != -1) throw DomainError("sign must be +1 or -1");
    if (!(system.mass > 0.0) || !(system.hbar > 0.0)) throw DomainError("mass and hbar must be positive");
}

void validate(const GaussianState& state) {
    if (!(state.omega0 > 0.0) || !std::isfinite(state.omega0)) throw DomainError("omega0 must be positive");
    if (!std::isfinite(state.q0) || !std::isfinite(state.p0)) throw DomainError("packet centre must be finite");
}

double log_barrier_overlap_full_cross(double omega0, double omega, double t) {
    if (!(omega0 > 0.0) || !(omega > 0.0)) throw DomainError("omega and omega0 must be positive");
    check_time(t);
    const double c = omega / omega0 - omega0 / omega;
    const double x = omega * t;
    const double e = std::exp(-2.0 * x);
    // cosh^2 + c^2 sinh^2 = e^{2x} ((1 + e)^2 + c^2 (1 - e)^2) / 4
    const double inner = ((1.0 + e) * (1.0 + e) + c * c * (1.0 - e) * (1.0 - e)) / 4.0;
    return -(2.0 * x + std::log(inner)) / 4.0;
}

double barrier_overlap_full_cross(double omega0, double omega, double t) {
    return std::exp(log_barrier_overlap_full_cross(omega0, omega, t));
}

double log_gaussian_autocorrelation(const QuadraticSystem& system, const GaussianState& state, double t) {
    validate(system);
    validate(state);
    check_time(t);
    if (state.q0 != 0.0 || state.p0 != 0.0) throw ContractError("closed form needs a centred state (q0 = p0 = 0)");
    const double a = state.omega0;
    const double w = system.omega;
    const double x = w * t;
    // |<psi0|psi_t>| = sqrt(2a / |Q a - i P|)
    if (system.sign > 0) {
        const std::complex<double> z(2.0 * a * std::cos(x), std::sin(x) * (a * a / w + w));
        return 0.5 * (std::log(2.0 * a) - std::log(std::abs(z)));
    }
    const double e = std::exp(-2.0 * x);
    const std::complex<double> z(2.0 * a * (1.0 + e), (1.0 - e) * (a * a / w - w));
    const double log_abs_z = x - std::log(2.0) + std::log(std::abs(z));
    return 0.5 * (std::log(2.0 * a) - log_abs_z);
}

double gaussian_autocorrelation(const QuadraticSystem& system, const GaussianState& state, double t) {
    return std::min(1.0, std::exp(log_gaussian_autocorrelation(system, state, t)));
}

double gaussian_position_width(const QuadraticSystem& system, const GaussianState& state, double t) {
    validate(system);
    validate(state);
    check_time(t);
    const auto f = width_flow(system, state.omega0, t);
    return std::sqrt(system.hbar / system.mass) * std::abs(f.q) / std::sqrt(state.omega0);
}

double gaussian_momentum_width(const QuadraticSystem& system, const GaussianState& state, double t) {
    validate(system);
    validate(state);
    check_time(t);
    const auto f = width_flow(system, state.omega0, t);
    return std::sqrt(system.hbar * system.mass) * std::abs(f.p) / std::sqrt(state.omega0);
}

Grid1D split_operator_grid(const QuadraticSystem& system, const GaussianState& state, double duration) {
    validate(system);
    validate(state);
    check_time(duration);
    const double w = system.omega;
    const double m = system.mass;
    double x_extent = 0.0, p_extent = 0.0;
    const int samples = 256;
    for (int i = 0; i <= samples; ++i) {
        const double t = duration * i / samples;
        const double x = w * t;
        double qc, pc;
        if (system.sign > 0) {
            qc = state.q0 * std::cos(x) + state.p0 / (m * w) * std::sin(x);
            pc = state.p0 * std::cos(x) - m * w * state.q0 * std::sin(x);
        } else {
            qc = state.q0 * std::cosh(x) + state.p0 / (m * w) * std::sinh(x);
            pc = state.p0 * std::cosh(x) + m * w * state.q0 * std::sinh(x);
        }
        x_extent = std::max(x_extent, std::abs(qc) + 6.0 * gaussian_position_width(system, state, t));
        p_extent = std::max(p_extent, std::abs(pc) + 6.0 * gaussian_momentum_width(system, state, t));
    }
    const double half_width = x_extent;
    const double dx_max = pi * system.hbar / p_extent;
    const std::size_t cells = next_power_of_two(2.0 * half_width / dx_max);
    if (cells > (std::size_t{1} << 26)) throw NumericalError("split-operator grid would need more than 2^26 points");
    return Grid1D{cells, -half_width, half_width};
}

ProjectiveState gaussian_grid_state(const QuadraticSystem& system, const GaussianState& state, const Grid1D& grid) {
    validate(system);
    validate(state);
    validate_basis(grid);
    std::vector<Amplitude> psi(grid.cells);
    const double dx = grid.width();
    for (std::size_t j = 0; j < grid.cells; ++j) {
        const double x = grid.lo + (static_cast<double>(j) + 0.5) * dx;
        const double u = x - state.q0;
        psi[j] = std::polar(std::exp(-system.mass * state.omega0 * u * u / (2.0 * system.hbar)),
                            state.p0 * x / system.hbar);
    }
    return ProjectiveState(std::move(psi), grid);
}

ProjectiveState split_operator_propagate(const ProjectiveState& psi, const QuadraticSystem& system, double dt,
                                         std::size_t steps) {
    validate(system);
    check_split_step(system, dt);
    const auto* grid = std::get_if<Grid1D>(&psi.basis());
    if (grid == nullptr) throw ContractError("split-operator propagation needs a grid-1d state");
    SplitOperator op(system, *grid, dt);
    std::vector<Amplitude> amplitudes = psi.amplitudes();
    check_domain(amplitudes, 0);
    for (std::size_t k = 1; k <= steps; ++k) {
        op.step(amplitudes);
        if (k % 64 == 0 || k == steps) check_domain(amplitudes, k);
    }
    return ProjectiveState(std::move(amplitudes), psi.basis());
}

std::vector<double> split_operator_autocorrelation(const QuadraticSystem& system, const GaussianState& state,
                                                   double dt, std::size_t sample_every, std::size_t samples) {
    validate(system);
    check_split_step(system, dt);
    if (sample_every == 0) throw ContractError("sample_every must be positive");
    const double duration = dt * static_cast<double>(sample_every * samples);
    const Grid1D grid = split_operator_grid(system, state, duration);
    const ProjectiveState initial = gaussian_grid_state(system, state, grid);
    SplitOperator op(system, grid, dt);
    std::vector<Amplitude> amplitudes = initial.amplitudes();
    std::vector<double> overlaps{1.0};
    std::size_t step = 0;
    for (std::size_t k = 1; k <= samples; ++k) {
        for (std::size_t i = 0; i < sample_every; ++i) {
            op.step(amplitudes);
            ++step;
            if (step % 64 == 0) check_domain(amplitudes, step);
        }
        check_domain(amplitudes, step);
        overlaps.push_back(overlap_magnitude(initial, ProjectiveState(amplitudes, grid)));
    }
    return overlaps;
}

Eigen::MatrixXcd bvs_transform(int n) {
    if (n < 1) throw DomainError("transform size must be positive");
    Eigen::MatrixXcd g(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            // phase index reduced mod 4N keeps the argument small
            const long long m = (static_cast<long long>(2 * k + 1) * (2 * j + 1)) % (4LL * n);
            g(k, j) = std::polar(scale, -2.0 * pi * static_cast<double>(m) / (4.0 * n));
        }
    }
    return g;
}

Eigen::MatrixXcd bvs_baker(int n) {
    if (n < 2 || n % 2 != 0) throw DomainError("baker dimension must be even");
    const int h = n / 2;
    Eigen::MatrixXcd blocks = Eigen::MatrixXcd::Zero(n, n);
    const Eigen::MatrixXcd g_half = bvs_transform(h);
    blocks.topLeftCorner(h, h) = g_half;
    blocks.bottomRightCorner(h, h) = g_half;
    return bvs_transform(n).adjoint() * blocks;
}

BvsBaker::BvsBaker(int n) : n_(n) {
    if (n < 2 || n % 2 != 0) throw DomainError("baker dimension must be even");
    g_full_adjoint_ = bvs_transform(n).adjoint();
    g_half_ = bvs_transform(n / 2);
}

Eigen::VectorXcd BvsBaker::apply(const Eigen::VectorXcd& amplitudes) const {
    if (amplitudes.size() != n_) throw ContractError("state dimension does not match the baker matrix");
    const int h = n_ / 2;
    Eigen::VectorXcd mid(n_);
    mid.head(h).noalias() = g_half_ * amplitudes.head(h);
    mid.tail(h).noalias() = g_half_ * amplitudes.tail(h);
    Eigen::VectorXcd out(n_);
    out.noalias() = g_full_adjoint_ * mid;
    return out;
}

ProjectiveState BvsBaker::apply(const ProjectiveState& state) const {
    const auto* basis = std::get_if<Discrete>(&state.basis());
    if (basis == nullptr || basis->n != static_cast<std::size_t>(n_)) {
        throw ContractError("baker matrix needs a discrete state of matching dimension");
    }
    const auto& a = state.amplitudes();
    const Eigen::VectorXcd in = Eigen::Map<const Eigen::VectorXcd>(a.data(), n_);
    const Eigen::VectorXcd out = apply(in);
    return ProjectiveState(std::vector<Amplitude>(out.data(), out.data() + n_), state.basis());
}

ProjectiveState bvs_coherent_state(int n, double q0, double p0, double alpha) {
    if (n < 2 || n % 2 != 0) throw DomainError("baker dimension must be even");
    if (!(q0 >= 0.0 && q0 < 1.0) || !(p0 >= 0.0 && p0 < 1.0)) throw DomainError("q0 and p0 must lie in [0, 1)");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    std::vector<Amplitude> psi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double q = (j + 0.5) / n;
        psi[static_cast<std::size_t>(j)] = std::polar(std::exp(-(q0 - q) * (q0 - q) / (2.0 * alpha)), p0 * q / alpha);
    }
    return ProjectiveState(std::move(psi), Discrete{static_cast<std::size_t>(n)});
}

}  // namespace plyap
