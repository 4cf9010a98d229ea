#pragma once

#include <string>
#include <variant>
#include <vector>

#include "plyap/projective.hpp"

namespace plyap {

/// x -> r x on the half line, r > 1.
struct LinearMap {
    double r = 2.0;
};

/// x -> r x (mod 1), integer r >= 2.
struct RAdicMap {
    int r = 2;
};

/// (x, y) -> (2x - [2x], (y + [2x]) / 2) on the unit square.
struct BakerMap {};

/// x -> x + c (mod 1), an isometry of the circle.
struct RotationMap {
    double c = 0.0;
};

using MapDescriptor = std::variant<LinearMap, RAdicMap, BakerMap, RotationMap>;

void validate_map(const MapDescriptor& map);
std::string map_name(const MapDescriptor& map);
std::size_t phase_dimension(const MapDescriptor& map);
/// True when the map acts on the unit circle / torus.
bool is_periodic(const MapDescriptor& map);

PhasePoint apply_map(const MapDescriptor& map, const PhasePoint& x);

/// y - x, taking the minimum image on the torus for periodic maps.
std::vector<double> displacement(const MapDescriptor& map, const PhasePoint& x, const PhasePoint& y);

}  // namespace plyap
