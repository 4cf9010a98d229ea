#include "plyap/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "plyap/errors.hpp"

namespace plyap {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ln|e^a - e^b|
double log_abs_difference(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double hi = std::max(a, b);
    const double gap = std::abs(a - b);
    if (gap == 0.0) return neg_inf;
    return hi + std::log1p(-std::exp(-gap));
}

void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw ContractError("times must be finite");
        if (i > 0 && !(times[i] > times[i - 1])) throw ContractError("times must be strictly increasing");
    }
}

void check_threshold(double threshold) {
    if (!(threshold > 0.0 && threshold < std::numbers::pi / 2)) {
        throw DomainError("saturation threshold must lie in (0, pi/2)");
    }
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

// Start index of the automatic regression window over the increments.
std::size_t auto_window_start(const std::vector<double>& increments) {
    const double target = increments.front() + 2.0;
    const std::size_t n = increments.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (increments[i] >= target) {
            return n - i >= 4 ? i : (n >= 4 ? n - 4 : 0);
        }
    }
    return n > 2 ? 1 : 0;
}

struct RegressionResult {
    LineFit fit;
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t points = 0;
};

RegressionResult regress(const DivergenceSeries& series, const std::vector<double>& increments,
                         std::optional<std::pair<double, double>> window) {
    std::vector<double> x, y;
    RegressionResult result;
    bool any = false;
    const std::size_t start = window ? 0 : auto_window_start(increments);
    for (std::size_t i = start; i < increments.size(); ++i) {
        const double t = series.times[i];
        if (window && (t < window->first || t > window->second)) continue;
        if (!std::isfinite(increments[i])) continue;
        if (!any) result.first = i;
        any = true;
        result.last = i;
        x.push_back(t);
        y.push_back(increments[i]);
    }
    const std::size_t needed = window ? 4 : 2;
    if (x.size() < needed) {
        throw InsufficientDataError("regression window holds " + std::to_string(x.size()) +
                                    " unsaturated points, need " + std::to_string(needed));
    }
    result.fit = fit_line(x, y);
    result.points = x.size();
    return result;
}

double parse_field(std::string_view text, std::size_t line, const char* name) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw DataError("line " + std::to_string(line) + ": cannot parse " + name + " '" + std::string(text) + "'",
                        line);
    }
    return value;
}

}  // namespace

bool DivergenceSeries::degenerate() const {
    return std::all_of(log_values.begin(), log_values.end(), [](double v) { return v == neg_inf; });
}

std::size_t DivergenceSeries::usable_prefix() const {
    std::size_t n = 0;
    while (n < saturated.size() && !saturated[n]) ++n;
    return n;
}

DistanceSeries make_distance_series(std::vector<double> times, std::vector<double> log_overlaps, double threshold) {
    check_threshold(threshold);
    if (times.empty()) throw ContractError("empty path");
    if (times.size() != log_overlaps.size()) throw ContractError("times and overlaps differ in length");
    check_times(times);

    DistanceSeries series;
    series.saturation_threshold = threshold;
    series.values.reserve(times.size());
    std::optional<double> first_flagged;
    std::vector<bool> flagged(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        series.values.push_back(distance_from_log_overlap(log_overlaps[i]));
        flagged[i] = distance_gap_from_log_overlap(log_overlaps[i]) < threshold;
        if (flagged[i] && !first_flagged) first_flagged = times[i];
    }
    series.times = std::move(times);
    series.log_overlaps = std::move(log_overlaps);

    auto t_b = detect_saturation(series);
    if (first_flagged && (!t_b || *first_flagged < *t_b)) t_b = first_flagged;
    series.saturation_time = t_b;
    series.saturated.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        series.saturated[i] = flagged[i] || (t_b && series.times[i] >= *t_b);
    }
    return series;
}

DivergenceSeries to_divergence(const DistanceSeries& distances) {
    DivergenceSeries out;
    out.times = distances.times;
    out.saturated = distances.saturated;
    out.saturation_time = distances.saturation_time;
    out.log_values.reserve(distances.size());
    for (double lv : distances.log_overlaps) out.log_values.push_back(log_projective_divergence(lv));
    return out;
}

std::pair<DistanceSeries, DivergenceSeries> divergence_series(std::span<const ProjectiveState> path,
                                                              std::span<const double> times,
                                                              const ProjectiveState& reference, double threshold) {
    if (path.empty()) throw ContractError("empty path");
    if (path.size() != times.size()) throw ContractError("path and times differ in length");
    std::vector<double> log_overlaps;
    log_overlaps.reserve(path.size());
    for (const auto& state : path) {
        const double v = overlap_magnitude(reference, state);
        log_overlaps.push_back(v > 0.0 ? std::log(v) : neg_inf);
    }
    auto distances = make_distance_series(std::vector<double>(times.begin(), times.end()), std::move(log_overlaps),
                                          threshold);
    auto divergence = to_divergence(distances);
    return {std::move(distances), std::move(divergence)};
}

std::optional<double> detect_saturation(std::span<const double> times, std::span<const double> distances,
                                        double threshold, std::optional<double> plateau_value) {
    if (times.size() != distances.size()) throw ContractError("times and distances differ in length");
    const std::size_t n = distances.size();
    if (n == 0) return std::nullopt;
    const double plateau = plateau_value.value_or(distances[n - 1]);
    if (std::abs(distances[n - 1] - plateau) > threshold) return std::nullopt;
    std::size_t k = n - 1;
    while (k > 0 && std::abs(distances[k - 1] - plateau) <= threshold) --k;
    const std::size_t run = n - k;
    // a series flat from the start is stationary, not saturated
    if (k == 0 || run < 3 || static_cast<double>(run) < 0.1 * static_cast<double>(n)) return std::nullopt;
    return times[k];
}

std::optional<double> detect_saturation(const DistanceSeries& series, std::optional<double> plateau_value) {
    return detect_saturation(series.times, series.values, series.saturation_threshold, plateau_value);
}

std::vector<double> log_divergence_increments(const DivergenceSeries& series, std::size_t delta_index) {
    if (delta_index == 0) throw ContractError("delta_index must be positive");
    const std::size_t usable = series.usable_prefix();
    std::vector<double> out;
    for (std::size_t i = 0; i + delta_index < usable; ++i) {
        out.push_back(log_abs_difference(series.log_values[i + delta_index], series.log_values[i]));
    }
    return out;
}

std::vector<FiniteTimePoint> finite_time_p_lyapunov(const DivergenceSeries& series, std::size_t delta_index) {
    const auto increments = log_divergence_increments(series, delta_index);
    if (increments.size() < 2) {
        throw InsufficientDataError("finite-time exponent needs at least " + std::to_string(delta_index + 2) +
                                    " unsaturated points");
    }
    if (increments.front() == neg_inf) throw DegeneratePathError("Lambda(dt) equals Lambda(0)");
    std::vector<FiniteTimePoint> curve;
    for (std::size_t i = 1; i < increments.size(); ++i) {
        if (!std::isfinite(increments[i])) continue;
        const double t = series.times[i];
        curve.push_back({t, (increments[i] - increments.front()) / (t - series.times.front())});
    }
    return curve;
}

ExponentEstimate asymptotic_estimate(const DivergenceSeries& series, EstimateMethod method,
                                     std::optional<std::pair<double, double>> window, std::size_t delta_index) {
    if (series.degenerate()) throw DegeneratePathError("path stays on the reference ray");
    if (series.usable_prefix() == 0) throw SaturationError("every point is saturated", series.saturation_time);
    if (window && !(window->first <= window->second)) throw ContractError("fit window must satisfy t1 <= t2");

    ExponentEstimate estimate;
    estimate.method = method;
    estimate.saturation_time = series.saturation_time;
    estimate.finite_time_curve = finite_time_p_lyapunov(series, delta_index);

    if (method == EstimateMethod::regression) {
        const auto increments = log_divergence_increments(series, delta_index);
        const auto r = regress(series, increments, window);
        estimate.asymptotic_value = r.fit.slope;
        estimate.residual = r.fit.residual;
        estimate.fit_window = {series.times[r.first], series.times[r.last]};
        estimate.fit_points = r.points;
    } else {
        const auto& curve = estimate.finite_time_curve;
        std::vector<FiniteTimePoint> used;
        if (window) {
            for (const auto& p : curve) {
                if (p.t >= window->first && p.t <= window->second) used.push_back(p);
            }
        } else if (!curve.empty()) {
            const std::size_t take = std::max<std::size_t>(1, curve.size() / 4);
            used.assign(curve.end() - static_cast<std::ptrdiff_t>(take), curve.end());
        }
        if (used.empty()) throw InsufficientDataError("no finite-time points inside the window");
        double mean = 0.0;
        for (const auto& p : used) mean += p.lambda;
        mean /= static_cast<double>(used.size());
        double ss = 0.0;
        for (const auto& p : used) ss += (p.lambda - mean) * (p.lambda - mean);
        estimate.asymptotic_value = mean;
        estimate.residual = std::sqrt(ss / static_cast<double>(used.size()));
        estimate.fit_window = {used.front().t, used.back().t};
        estimate.fit_points = used.size();
    }
    if (!std::isfinite(estimate.asymptotic_value)) throw NumericalError("exponent estimate is not finite");
    return estimate;
}

std::string to_string(StabilityClass kind) {
    switch (kind) {
        case StabilityClass::stable: return "stable";
        case StabilityClass::unstable: return "unstable";
        case StabilityClass::saturated: return "saturated";
    }
    return "unknown";
}

std::string to_string(EstimateMethod method) {
    return method == EstimateMethod::pointwise ? "pointwise" : "regression";
}

std::string to_string(OverlapConvention convention) {
    return convention == OverlapConvention::amplitude ? "amplitude" : "probability";
}

EstimateMethod parse_method(const std::string& text) {
    if (text == "pointwise") return EstimateMethod::pointwise;
    if (text == "regression") return EstimateMethod::regression;
    throw ContractError("unknown estimator method '" + text + "'");
}

OverlapConvention parse_convention(const std::string& text) {
    if (text == "amplitude") return OverlapConvention::amplitude;
    if (text == "probability") return OverlapConvention::probability;
    throw ContractError("unknown overlap convention '" + text + "'");
}

Analysis analyze(const DivergenceSeries& series, const EstimatorSettings& settings) {
    Analysis analysis;
    analysis.classification.saturation_time = series.saturation_time;
    if (series.degenerate()) {
        analysis.classification.kind = StabilityClass::stable;
        analysis.note = "stationary path: state stays on the reference ray";
        return analysis;
    }
    const auto increments = log_divergence_increments(series, settings.delta_index);
    if (increments.size() < 2) {
        analysis.classification.kind = StabilityClass::saturated;
        analysis.note = "too few unsaturated points for an exponent";
        return analysis;
    }
    if (increments.front() == neg_inf) {
        analysis.classification.kind = StabilityClass::stable;
        analysis.note = "degenerate path: Lambda(dt) equals Lambda(0)";
        return analysis;
    }
    analysis.estimate = asymptotic_estimate(series, settings.method, settings.window, settings.delta_index);
    analysis.classification.exponent = analysis.estimate->asymptotic_value;

    const auto trend = regress(series, increments, std::nullopt);
    double span = 0.0;
    for (std::size_t i = increments.size(); i-- > 0;) {
        if (std::isfinite(increments[i])) {
            span = series.times[i] - series.times.front();
            break;
        }
    }
    analysis.classification.kind =
        trend.fit.slope * span >= 1.0 ? StabilityClass::unstable : StabilityClass::stable;
    return analysis;
}

void validate(const OverlapSeries& raw) {
    if (raw.times.empty()) throw DataError("overlap series is empty");
    if (raw.times.size() != raw.overlaps.size()) throw DataError("times and overlaps differ in length");
    for (std::size_t i = 0; i < raw.times.size(); ++i) {
        if (!std::isfinite(raw.times[i])) throw DataError("row " + std::to_string(i) + ": time is not finite", i);
        if (i > 0 && !(raw.times[i] > raw.times[i - 1])) {
            throw DataError("row " + std::to_string(i) + ": times must be strictly increasing", i);
        }
        const double o = raw.overlaps[i];
        if (!(o >= 0.0 && o <= 1.0)) {
            throw DataError("row " + std::to_string(i) + ": overlap outside [0, 1]", i);
        }
    }
}

std::pair<DistanceSeries, DivergenceSeries> ingest_overlap_series(const OverlapSeries& raw, double threshold) {
    validate(raw);
    std::vector<double> log_overlaps;
    log_overlaps.reserve(raw.overlaps.size());
    const double power = raw.convention == OverlapConvention::amplitude ? 1.0 : 0.5;
    for (double o : raw.overlaps) log_overlaps.push_back(o > 0.0 ? power * std::log(o) : neg_inf);
    auto distances = make_distance_series(raw.times, std::move(log_overlaps), threshold);
    auto divergence = to_divergence(distances);
    return {std::move(distances), std::move(divergence)};
}

OverlapSeries read_overlap_csv(std::istream& in, OverlapConvention convention) {
    OverlapSeries series;
    series.convention = convention;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            std::string compact;
            for (char c : line) {
                if (c != ' ' && c != '\t') compact.push_back(c);
            }
            if (compact != "t,overlap") {
                throw DataError("line " + std::to_string(line_no) + ": expected header 't,overlap'", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw DataError("line " + std::to_string(line_no) + ": expected two comma-separated fields", line_no);
        }
        const std::string_view view(line);
        const double t = parse_field(view.substr(0, comma), line_no, "time");
        const double o = parse_field(view.substr(comma + 1), line_no, "overlap");
        if (!std::isfinite(t)) throw DataError("line " + std::to_string(line_no) + ": time is not finite", line_no);
        if (!series.times.empty() && !(t > series.times.back())) {
            throw DataError("line " + std::to_string(line_no) + ": times must be strictly increasing", line_no);
        }
        if (!(o >= 0.0 && o <= 1.0)) {
            throw DataError("line " + std::to_string(line_no) + ": overlap outside [0, 1]", line_no);
        }
        series.times.push_back(t);
        series.overlaps.push_back(o);
    }
    if (!header_seen) throw DataError("missing header 't,overlap'");
    if (series.times.empty()) throw DataError("no data rows");
    return series;
}

TrajectoryExponent trajectory_lyapunov(const MapDescriptor& map, const PhasePoint& x0, double epsilon,
                                       std::size_t steps, std::size_t renormalize_every) {
    validate_map(map);
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
    if (steps == 0) throw ContractError("steps must be positive");
    if (renormalize_every == 0) throw ContractError("renormalize_every must be positive");
    const std::size_t dim = phase_dimension(map);
    if (x0.dimension() != dim) throw ContractError("initial point has the wrong dimension");
    const bool periodic = is_periodic(map);

    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double c : v) s += c * c;
        return std::sqrt(s);
    };
    auto place = [&](const PhasePoint& x, const std::vector<double>& direction, double length) {
        std::vector<double> y(dim);
        const double n = norm(direction);
        for (std::size_t i = 0; i < dim; ++i) {
            y[i] = x[i] + direction[i] * (length / n);
            if (periodic) y[i] -= std::floor(y[i]);
        }
        return PhasePoint(std::move(y));
    };
    auto classical_lambda = [](double d) { return classical_divergence(bounded_euclidean_distance(d)); };

    PhasePoint x = x0;
    double scale = std::max(1.0, norm(x.coordinates()));
    double separation = epsilon * scale;
    std::vector<double> first_axis(dim, 0.0);
    first_axis[0] = 1.0;
    PhasePoint y = place(x, first_axis, separation);
    double direct = 0.0;
    double via = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        try {
            x = apply_map(map, x);
            y = apply_map(map, y);
        } catch (const InvalidStateError&) {
            throw NumericalError("trajectory left the floating-point range at step " + std::to_string(k));
        }
        if (k % renormalize_every != 0 && k != steps) continue;
        const auto d_vec = displacement(map, x, y);
        const double d = norm(d_vec);
        if (!std::isfinite(d) || !std::isfinite(norm(x.coordinates()))) {
            throw NumericalError("trajectory left the floating-point range at step " + std::to_string(k));
        }
        if (d == 0.0) throw DegeneratePathError("trajectories merged at step " + std::to_string(k));
        direct += std::log(d / separation);
        // distances in units of the current phase-space scale
        via += std::log(classical_lambda(d / scale) / classical_lambda(epsilon));
        scale = std::max(1.0, norm(x.coordinates()));
        separation = epsilon * scale;
        if (!std::isfinite(separation)) throw NumericalError("trajectory left the floating-point range");
        y = place(x, d_vec, separation);
    }
    const auto t = static_cast<double>(steps);
    return {direct / t, via / t};
}

}  // namespace plyap
