#include "plyap/maps.hpp"

#include <cmath>

#include "plyap/errors.hpp"

namespace plyap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double wrap_unit(double x) { return x - std::floor(x); }

}  // namespace

void validate_map(const MapDescriptor& map) {
    std::visit(Overloaded{
                   [](const LinearMap& m) {
                       if (!(m.r > 1.0) || !std::isfinite(m.r)) throw DomainError("linear map needs r > 1");
                   },
                   [](const RAdicMap& m) {
                       if (m.r < 2) throw DomainError("r-adic map needs integer r >= 2");
                   },
                   [](const BakerMap&) {},
                   [](const RotationMap& m) {
                       if (!(m.c >= 0.0 && m.c < 1.0)) throw DomainError("rotation needs c in [0, 1)");
                   },
               },
               map);
}

std::string map_name(const MapDescriptor& map) {
    return std::visit(Overloaded{
                          [](const LinearMap&) { return std::string("linear"); },
                          [](const RAdicMap&) { return std::string("r_adic"); },
                          [](const BakerMap&) { return std::string("baker"); },
                          [](const RotationMap&) { return std::string("rotation"); },
                      },
                      map);
}

std::size_t phase_dimension(const MapDescriptor& map) { return std::holds_alternative<BakerMap>(map) ? 2 : 1; }

bool is_periodic(const MapDescriptor& map) { return !std::holds_alternative<LinearMap>(map); }

PhasePoint apply_map(const MapDescriptor& map, const PhasePoint& x) {
    if (x.dimension() != phase_dimension(map)) {
        throw ContractError(map_name(map) + " map expects a point of dimension " +
                            std::to_string(phase_dimension(map)));
    }
    return std::visit(Overloaded{
                          [&](const LinearMap& m) { return PhasePoint{m.r * x[0]}; },
                          [&](const RAdicMap& m) { return PhasePoint{wrap_unit(m.r * x[0])}; },
                          [&](const BakerMap&) {
                              const double branch = std::floor(2.0 * x[0]);
                              return PhasePoint{2.0 * x[0] - branch, (x[1] + branch) / 2.0};
                          },
                          [&](const RotationMap& m) { return PhasePoint{wrap_unit(x[0] + m.c)}; },
                      },
                      map);
}

std::vector<double> displacement(const MapDescriptor& map, const PhasePoint& x, const PhasePoint& y) {
    if (x.dimension() != y.dimension()) throw ContractError("phase points differ in dimension");
    std::vector<double> d(x.dimension());
    const bool periodic = is_periodic(map);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = y[i] - x[i];
        if (periodic) d[i] -= std::round(d[i]);
    }
    return d;
}

}  // namespace plyap
