#pragma once

// Finite-time and asymptotic P-Lyapunov exponents from time-indexed distance
// data, plus the two-trajectory classical exponent used as a reference.
//
// All estimators work on ln(Lambda), never on Lambda itself: for unstable
// paths Lambda grows like 1/overlap and the overlap underflows long before
// the exponent stops being well defined.

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plyap/maps.hpp"
#include "plyap/projective.hpp"

namespace plyap {

inline constexpr double default_saturation_threshold = 0.05;

/// Distances to a fixed reference along a path.
///
/// `log_overlaps` keeps the source overlaps in log form so that the divergence
/// can be formed without cancellation; `values` is derived from it.
/// A point is saturated when pi - d_P < threshold, or when it lies at or after
/// the saturation time (first gap-saturated point or start of a terminal plateau).
struct DistanceSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> log_overlaps;
    std::vector<bool> saturated;
    double saturation_threshold = default_saturation_threshold;
    std::optional<double> saturation_time;

    std::size_t size() const { return times.size(); }
};

struct DivergenceSeries {
    std::vector<double> times;
    /// ln Lambda; -inf where the state coincides with the reference.
    std::vector<double> log_values;
    std::vector<bool> saturated;
    std::optional<double> saturation_time;

    std::size_t size() const { return times.size(); }
    /// True when every point sits on the reference ray.
    bool degenerate() const;
    /// Number of leading unsaturated points.
    std::size_t usable_prefix() const;
};

struct FiniteTimePoint {
    double t;
    double lambda;
};

enum class EstimateMethod { pointwise, regression };

struct ExponentEstimate {
    std::vector<FiniteTimePoint> finite_time_curve;
    double asymptotic_value = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
    EstimateMethod method = EstimateMethod::regression;
    std::optional<double> saturation_time;
    /// RMS residual of the regression fit (pointwise: RMS deviation from the mean).
    double residual = 0.0;
    std::size_t fit_points = 0;
};

enum class OverlapConvention { amplitude, probability };

struct OverlapSeries {
    std::vector<double> times;
    std::vector<double> overlaps;
    OverlapConvention convention = OverlapConvention::amplitude;
};

/// Build a distance series from ln(overlap) samples. Validates strictly
/// increasing times and threshold in (0, pi/2).
DistanceSeries make_distance_series(std::vector<double> times, std::vector<double> log_overlaps,
                                    double threshold = default_saturation_threshold);

DivergenceSeries to_divergence(const DistanceSeries& distances);

/// Distances of each path state to `reference`, and the matching divergence series.
std::pair<DistanceSeries, DivergenceSeries> divergence_series(std::span<const ProjectiveState> path,
                                                              std::span<const double> times,
                                                              const ProjectiveState& reference,
                                                              double threshold = default_saturation_threshold);

/// First time after which the distance holds within `threshold` of its terminal
/// plateau (or of `plateau_value`). A plateau must hold for at least three
/// samples and a tenth of the series; a series flat from its first sample has none.
std::optional<double> detect_saturation(std::span<const double> times, std::span<const double> distances,
                                        double threshold, std::optional<double> plateau_value = std::nullopt);
std::optional<double> detect_saturation(const DistanceSeries& series,
                                        std::optional<double> plateau_value = std::nullopt);

/// ln|Lambda(t_{i+delta}) - Lambda(t_i)| for every stencil inside the usable prefix.
std::vector<double> log_divergence_increments(const DivergenceSeries& series, std::size_t delta_index = 1);

/// lambda_P^t = (ln|dLambda(t)| - ln|dLambda(0)|) / t using the single-path
/// perturbation psi_S(t + dt), dt = delta_index samples.
std::vector<FiniteTimePoint> finite_time_p_lyapunov(const DivergenceSeries& series,
                                                    std::size_t delta_index = 1);

ExponentEstimate asymptotic_estimate(const DivergenceSeries& series,
                                     EstimateMethod method = EstimateMethod::regression,
                                     std::optional<std::pair<double, double>> window = std::nullopt,
                                     std::size_t delta_index = 1);

struct EstimatorSettings {
    EstimateMethod method = EstimateMethod::regression;
    double threshold = default_saturation_threshold;
    std::size_t delta_index = 1;
    std::optional<std::pair<double, double>> window;
};

enum class StabilityClass { stable, unstable, saturated };

struct Classification {
    StabilityClass kind = StabilityClass::stable;
    double exponent = 0.0;
    std::optional<double> saturation_time;
};

std::string to_string(StabilityClass kind);
std::string to_string(EstimateMethod method);
std::string to_string(OverlapConvention convention);
EstimateMethod parse_method(const std::string& text);
OverlapConvention parse_convention(const std::string& text);

struct Analysis {
    std::optional<ExponentEstimate> estimate;
    Classification classification;
    std::string note;
};

/// Estimate plus stable/unstable/saturated classification. Degenerate and
/// fully saturated paths are classified instead of raising.
/// A path is unstable when the fitted growth of ln|dLambda| over the usable
/// span is at least one natural-log unit.
Analysis analyze(const DivergenceSeries& series, const EstimatorSettings& settings);

void validate(const OverlapSeries& raw);
std::pair<DistanceSeries, DivergenceSeries> ingest_overlap_series(const OverlapSeries& raw,
                                                                  double threshold = default_saturation_threshold);

/// Parse CSV with header `t,overlap`. Errors carry the 1-based line number.
OverlapSeries read_overlap_csv(std::istream& in, OverlapConvention convention);

struct TrajectoryExponent {
    /// ln growth of the Euclidean separation.
    double direct = 0.0;
    /// Same growth measured through the bounded distance and its divergence function.
    double via_divergence = 0.0;
};

/// The initial offset lies along the first coordinate (the baker map's
/// expanding direction); after every `renormalize_every` steps the separation
/// is rescaled to epsilon * max(1, |x|).
TrajectoryExponent trajectory_lyapunov(const MapDescriptor& map, const PhasePoint& x0, double epsilon,
                                       std::size_t steps, std::size_t renormalize_every = 1);

}  // namespace plyap
