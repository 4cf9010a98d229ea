#include "plyap/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "json.hpp"

#include "plyap/errors.hpp"
#include "plyap/io.hpp"

namespace plyap {

namespace {

// Integral of a piecewise-constant function over [a, b); zero outside the grid.
template <class T>
T integrate_interval(const std::vector<T>& values, const Grid1D& grid, double a, double b) {
    T sum{};
    if (!(b > a)) return sum;
    const double h = grid.width();
    const auto n = static_cast<long long>(grid.cells);
    const long long first = std::max(0LL, static_cast<long long>(std::floor((a - grid.lo) / h)));
    const long long last = std::min(n - 1, static_cast<long long>(std::floor((b - grid.lo) / h)));
    for (long long k = first; k <= last; ++k) {
        const double lo = grid.lo + static_cast<double>(k) * h;
        const double hi = grid.lo + static_cast<double>(k + 1) * h;
        const double len = std::min(b, hi) - std::max(a, lo);
        if (len > 0.0) sum += values[static_cast<std::size_t>(k)] * len;
    }
    return sum;
}

// Same, for a grid on [0, 1) read periodically; requires b - a <= 1.
template <class T>
T integrate_periodic(const std::vector<T>& values, const Grid1D& grid, double a, double b) {
    const double shift = std::floor(a);
    a -= shift;
    b -= shift;
    if (b <= 1.0) return integrate_interval(values, grid, a, b);
    return integrate_interval(values, grid, a, 1.0) + integrate_interval(values, grid, 0.0, b - 1.0);
}

template <class T>
T integrate_rect(const std::vector<T>& values, const Grid2D& grid, double x0, double x1, double y0, double y1) {
    T sum{};
    if (!(x1 > x0) || !(y1 > y0)) return sum;
    const double hx = grid.width_x();
    const double hy = grid.width_y();
    const auto cols = static_cast<long long>(grid.cols);
    const auto rows = static_cast<long long>(grid.rows);
    const long long c0 = std::max(0LL, static_cast<long long>(std::floor(x0 / hx)));
    const long long c1 = std::min(cols - 1, static_cast<long long>(std::floor(x1 / hx)));
    const long long r0 = std::max(0LL, static_cast<long long>(std::floor(y0 / hy)));
    const long long r1 = std::min(rows - 1, static_cast<long long>(std::floor(y1 / hy)));
    for (long long r = r0; r <= r1; ++r) {
        const double oy = std::min(y1, static_cast<double>(r + 1) * hy) - std::max(y0, static_cast<double>(r) * hy);
        if (oy <= 0.0) continue;
        for (long long c = c0; c <= c1; ++c) {
            const double ox =
                std::min(x1, static_cast<double>(c + 1) * hx) - std::max(x0, static_cast<double>(c) * hx);
            if (ox <= 0.0) continue;
            sum += values[static_cast<std::size_t>(r * cols + c)] * (ox * oy);
        }
    }
    return sum;
}

void require_unit_interval(const Grid1D& grid, const std::string& map) {
    if (grid.lo != 0.0 || grid.hi != 1.0) {
        throw ContractError(map + " map needs a grid on [0, 1)");
    }
}

void require_baker_grid(const Grid2D& grid) {
    if (grid.rows % 2 != 0 || grid.cols % 2 != 0) throw ContractError("baker map needs an even 2D grid");
}

template <class T>
std::vector<T> transfer_1d(const std::vector<T>& values, const Grid1D& grid, const MapDescriptor& map,
                           Grid1D& out_grid) {
    std::vector<T> out(values.size());
    const double h = grid.width();
    if (const auto* m = std::get_if<LinearMap>(&map)) {
        out_grid = Grid1D{grid.cells, m->r * grid.lo, m->r * grid.hi};
        const double h_out = out_grid.width();
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double a = out_grid.lo + static_cast<double>(j) * h_out;
            const double b = out_grid.lo + static_cast<double>(j + 1) * h_out;
            out[j] = integrate_interval(values, grid, a / m->r, b / m->r) / h_out;
        }
    } else if (const auto* m = std::get_if<RAdicMap>(&map)) {
        require_unit_interval(grid, "r-adic");
        out_grid = grid;
        const double r = static_cast<double>(m->r);
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double a = static_cast<double>(j) * h;
            const double b = static_cast<double>(j + 1) * h;
            T sum{};
            for (int k = 0; k < m->r; ++k) sum += integrate_interval(values, grid, (a + k) / r, (b + k) / r);
            out[j] = sum / h;
        }
    } else if (const auto* m = std::get_if<RotationMap>(&map)) {
        require_unit_interval(grid, "rotation");
        out_grid = grid;
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double a = static_cast<double>(j) * h;
            const double b = static_cast<double>(j + 1) * h;
            out[j] = integrate_periodic(values, grid, a - m->c, b - m->c) / h;
        }
    } else {
        throw ContractError(map_name(map) + " map does not act on a 1D grid");
    }
    return out;
}

template <class T>
std::vector<T> baker_preimage_average(const std::vector<T>& values, const Grid2D& grid) {
    require_baker_grid(grid);
    std::vector<T> out(values.size());
    const double hx = grid.width_x();
    const double hy = grid.width_y();
    const double area = hx * hy;
    for (std::size_t row = 0; row < grid.rows; ++row) {
        const double y0 = static_cast<double>(row) * hy;
        const double y1 = static_cast<double>(row + 1) * hy;
        for (std::size_t col = 0; col < grid.cols; ++col) {
            const double x0 = static_cast<double>(col) * hx;
            const double x1 = static_cast<double>(col + 1) * hx;
            T sum{};
            // Lower output half comes from the left strip, upper half from the right strip.
            if (const double yb = std::min(y1, 0.5); y0 < yb) {
                sum += integrate_rect(values, grid, x0 / 2.0, x1 / 2.0, 2.0 * y0, 2.0 * yb);
            }
            if (const double ya = std::max(y0, 0.5); ya < y1) {
                sum += integrate_rect(values, grid, (x0 + 1.0) / 2.0, (x1 + 1.0) / 2.0, 2.0 * ya - 1.0,
                                      2.0 * y1 - 1.0);
            }
            out[row * grid.cols + col] = sum / area;
        }
    }
    return out;
}

}  // namespace

GridDensity::GridDensity(Grid1D grid, std::vector<double> values) : geometry_(grid), values_(std::move(values)) {
    validate();
}

GridDensity::GridDensity(Grid2D grid, std::vector<double> values) : geometry_(grid), values_(std::move(values)) {
    validate();
}

void GridDensity::validate() {
    validate_basis(geometry_);
    if (values_.size() != basis_size(geometry_)) throw ContractError("density size does not match its grid");
    // Neumaier summation; grids reach 2^20 cells
    double sum = 0.0, carry = 0.0;
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidStateError("density values must be finite and >= 0");
        const double t = sum + v;
        carry += std::abs(sum) >= v ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    mass_ = (sum + carry) * cell_measure();
    if (!(mass_ > 0.0)) throw InvalidStateError("density must have positive mass");
}

GridDensity uniform_density(const Basis& geometry) {
    if (const auto* g = std::get_if<Grid1D>(&geometry)) {
        return GridDensity(*g, std::vector<double>(g->cells, 1.0 / (g->hi - g->lo)));
    }
    if (const auto* g = std::get_if<Grid2D>(&geometry)) {
        return GridDensity(*g, std::vector<double>(g->rows * g->cols, 1.0));
    }
    throw ContractError("densities need a grid geometry");
}

GridDensity square_density(double b, const Grid1D& grid, std::string* warning) {
    validate_basis(grid);
    const double length = grid.hi - grid.lo;
    if (!(b > 0.0) || b > length * (1.0 + 1e-12)) throw DomainError("square width must lie in (0, domain length]");
    const double h = grid.width();
    const auto cells = std::clamp<long long>(std::llround(b / h), 1, static_cast<long long>(grid.cells));
    const double snapped = static_cast<double>(cells) * h;
    if (warning != nullptr) {
        warning->clear();
        if (std::abs(snapped - b) > 1e-12 * std::max(1.0, b)) {
            *warning = "square width " + format_double(b) + " snapped to " + format_double(snapped);
        }
    }
    std::vector<double> values(grid.cells, 0.0);
    std::fill_n(values.begin(), cells, 1.0 / snapped);
    return GridDensity(grid, std::move(values));
}

GridDensity box_density(double width_x, double width_y, const Grid2D& grid) {
    validate_basis(grid);
    if (!(width_x > 0.0 && width_x <= 1.0 && width_y > 0.0 && width_y <= 1.0)) {
        throw DomainError("box widths must lie in (0, 1]");
    }
    const auto nx = std::clamp<long long>(std::llround(width_x / grid.width_x()), 1, static_cast<long long>(grid.cols));
    const auto ny = std::clamp<long long>(std::llround(width_y / grid.width_y()), 1, static_cast<long long>(grid.rows));
    const double area = static_cast<double>(nx) * grid.width_x() * static_cast<double>(ny) * grid.width_y();
    std::vector<double> values(grid.rows * grid.cols, 0.0);
    for (long long r = 0; r < ny; ++r) {
        for (long long c = 0; c < nx; ++c) values[static_cast<std::size_t>(r) * grid.cols + static_cast<std::size_t>(c)] = 1.0 / area;
    }
    return GridDensity(grid, std::move(values));
}

ProjectiveState sqrt_embed(const GridDensity& density) {
    std::vector<double> roots(density.values().size());
    std::transform(density.values().begin(), density.values().end(), roots.begin(),
                   [](double v) { return std::sqrt(v); });
    return ProjectiveState::from_real(roots, density.geometry());
}

DistanceSeries evolve_linear_analytic(double b, double r, int n, double threshold) {
    if (!(b > 0.0)) throw DomainError("square width must be positive");
    validate_map(LinearMap{r});
    if (n < 0) throw DomainError("step count must be >= 0");
    std::vector<double> times(static_cast<std::size_t>(n) + 1);
    std::vector<double> logs(times.size());
    const double log_r = std::log(r);
    for (std::size_t k = 0; k < times.size(); ++k) {
        times[k] = static_cast<double>(k);
        logs[k] = -0.5 * static_cast<double>(k) * log_r;
    }
    return make_distance_series(std::move(times), std::move(logs), threshold);
}

GridDensity transfer_step(const GridDensity& density, const MapDescriptor& map) {
    validate_map(map);
    if (const auto* g = std::get_if<Grid1D>(&density.geometry())) {
        Grid1D out_grid;
        auto values = transfer_1d(density.values(), *g, map, out_grid);
        return GridDensity(out_grid, std::move(values));
    }
    const auto& g = std::get<Grid2D>(density.geometry());
    if (!std::holds_alternative<BakerMap>(map)) throw ContractError(map_name(map) + " map does not act on a 2D grid");
    return GridDensity(g, baker_preimage_average(density.values(), g));
}

ProjectiveState koopman_step(const ProjectiveState& state, const MapDescriptor& map) {
    if (!std::holds_alternative<BakerMap>(map)) throw ContractError("koopman_step supports the baker map only");
    const auto* g = std::get_if<Grid2D>(&state.basis());
    if (g == nullptr) throw ContractError("koopman_step needs a grid-2d state");
    return ProjectiveState(baker_preimage_average(state.amplitudes(), *g), *g);
}

double embedded_overlap(const GridDensity& a, const GridDensity& b) {
    const auto* ga = std::get_if<Grid1D>(&a.geometry());
    const auto* gb = std::get_if<Grid1D>(&b.geometry());
    if (ga == nullptr || gb == nullptr) throw ContractError("embedded_overlap needs 1D densities");
    double x = std::max(ga->lo, gb->lo);
    const double end = std::min(ga->hi, gb->hi);
    double sum = 0.0;
    if (x < end) {
        const double ha = ga->width();
        const double hb = gb->width();
        auto i = static_cast<std::size_t>(std::max(0.0, std::floor((x - ga->lo) / ha)));
        auto j = static_cast<std::size_t>(std::max(0.0, std::floor((x - gb->lo) / hb)));
        while (x < end && i < ga->cells && j < gb->cells) {
            const double next_a = ga->lo + static_cast<double>(i + 1) * ha;
            const double next_b = gb->lo + static_cast<double>(j + 1) * hb;
            const double next = std::min({next_a, next_b, end});
            if (next > x) sum += std::sqrt(a.values()[i] * b.values()[j]) * (next - x);
            x = next;
            if (next >= next_a) ++i;
            if (next >= next_b) ++j;
        }
    }
    return std::clamp(sum / std::sqrt(a.mass() * b.mass()), 0.0, 1.0);
}

DistanceSeries linear_grid_distance_series(double b, double r, int n, std::size_t cells, double domain,
                                           double threshold) {
    validate_map(LinearMap{r});
    if (n < 0) throw DomainError("step count must be >= 0");
    const Grid1D grid{cells, 0.0, domain};
    const GridDensity reference = square_density(b, grid);
    GridDensity current = reference;
    std::vector<double> times;
    std::vector<double> logs;
    for (int k = 0; k <= n; ++k) {
        times.push_back(static_cast<double>(k));
        logs.push_back(std::min(0.0, std::log(embedded_overlap(reference, current))));
        if (k < n) current = transfer_step(current, LinearMap{r});
    }
    return make_distance_series(std::move(times), std::move(logs), threshold);
}

void write_density_csv(std::ostream& out, const GridDensity& density) {
    out << "cell_index,value\n";
    for (std::size_t i = 0; i < density.values().size(); ++i) {
        out << i << ',' << format_double(density.values()[i]) << '\n';
    }
}

std::string density_to_json(const GridDensity& density) {
    nlohmann::json geometry;
    if (const auto* g = std::get_if<Grid1D>(&density.geometry())) {
        geometry = {{"kind", "grid-1d"}, {"cells", g->cells}, {"lo", g->lo}, {"hi", g->hi}};
    } else {
        const auto& g2 = std::get<Grid2D>(density.geometry());
        geometry = {{"kind", "grid-2d"}, {"rows", g2.rows}, {"cols", g2.cols}};
    }
    nlohmann::json doc = {{"geometry", geometry}, {"values", density.values()}};
    return doc.dump();
}

}  // namespace plyap
