#pragma once

// Piecewise-constant classical densities on uniform grids and their exact
// Frobenius-Perron / Koopman evolution under the built-in maps.
//
// Each output cell receives the exact average of the input over the preimage
// of that cell. The preimages are finite unions of intervals (rectangles in
// 2D), so the evolution is exact for piecewise-constant input and conserves
// mass up to rounding.

#include <iosfwd>
#include <string>
#include <vector>

#include "plyap/estimators.hpp"
#include "plyap/maps.hpp"
#include "plyap/projective.hpp"

namespace plyap {

class GridDensity {
public:
    GridDensity(Grid1D grid, std::vector<double> values);
    GridDensity(Grid2D grid, std::vector<double> values);

    const Basis& geometry() const { return geometry_; }
    const std::vector<double>& values() const { return values_; }
    double mass() const { return mass_; }
    double cell_measure() const { return basis_weight(geometry_); }
    bool is_1d() const { return std::holds_alternative<Grid1D>(geometry_); }

private:
    void validate();

    Basis geometry_;
    std::vector<double> values_;
    double mass_ = 0.0;
};

GridDensity uniform_density(const Basis& geometry);

/// Indicator of [lo, lo + b), unit mass. `b` is snapped to a whole number of
/// cells; when snapping changes it a message is stored in `warning`.
GridDensity square_density(double b, const Grid1D& grid, std::string* warning = nullptr);

/// Indicator of [0, width_x) x [0, width_y) on the unit square, unit mass,
/// widths snapped to whole cells.
GridDensity box_density(double width_x, double width_y, const Grid2D& grid);

/// Real amplitudes sqrt(rho) on the same grid.
ProjectiveState sqrt_embed(const GridDensity& density);

/// Closed-form distances 2 arccos(r^{-k/2}), k = 0..n, for the square density
/// under x -> r x with reference the initial state.
DistanceSeries evolve_linear_analytic(double b, double r, int n,
                                      double threshold = default_saturation_threshold);

/// Frobenius-Perron image. The linear map rescales a 1D grid to [r lo, r hi);
/// r-adic and rotation act on [0, 1); the baker map acts on an even 2D grid.
GridDensity transfer_step(const GridDensity& density, const MapDescriptor& map);

/// psi -> psi o Phi^{-1} for the baker map, cell-averaged with the same
/// preimage bookkeeping as transfer_step. Complex amplitudes allowed.
ProjectiveState koopman_step(const ProjectiveState& state, const MapDescriptor& map);

/// Overlap  int sqrt(rho_a) sqrt(rho_b) / sqrt(m_a m_b)  between 1D densities on
/// possibly different grids; each density is zero outside its own interval.
double embedded_overlap(const GridDensity& a, const GridDensity& b);

/// Distances for the square density under x -> r x realised on an expanding
/// grid of `cells` cells; the reference stays on the original window.
DistanceSeries linear_grid_distance_series(double b, double r, int n, std::size_t cells, double domain,
                                           double threshold = default_saturation_threshold);

/// `cell_index,value` rows with a header line.
void write_density_csv(std::ostream& out, const GridDensity& density);
/// {"geometry": {...}, "values": [...]}
std::string density_to_json(const GridDensity& density);

}  // namespace plyap
