#pragma once

// Minimal self-contained SVG line plots (no fonts or scripts referenced).

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plyap {

struct PlotCurve {
    std::string label;
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f77b4";
    bool markers = false;
};

struct ReferenceLine {
    double value = 0.0;
    std::string label;
    bool vertical = false;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotCurve> curves;
    std::vector<ReferenceLine> references;
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> y_range;
};

/// Deterministic output: identical input gives identical bytes.
std::string render_svg(const LinePlot& plot);

/// Colour for the i-th curve of a figure.
std::string palette(std::size_t i);

}  // namespace plyap
