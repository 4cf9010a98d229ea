#include "plyap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace plyap {

namespace {

constexpr double width = 720.0;
constexpr double height = 480.0;
constexpr double left = 70.0;
constexpr double right = 180.0;
constexpr double top = 40.0;
constexpr double bottom = 55.0;

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return buffer;
}

std::string tick_label(double v, double step) {
    char buffer[32];
    const int digits = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

std::pair<double, double> padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.5;
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[i % 6];
}

std::string render_svg(const LinePlot& plot) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& c : plot.curves) {
        for (const auto& [x, y] : c.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    for (const auto& r : plot.references) {
        if (r.vertical) {
            x_lo = std::min(x_lo, r.value);
            x_hi = std::max(x_hi, r.value);
        } else {
            y_lo = std::min(y_lo, r.value);
            y_hi = std::max(y_hi, r.value);
        }
    }
    if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
    if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
    if (plot.x_range) std::tie(x_lo, x_hi) = *plot.x_range;
    if (plot.y_range) std::tie(y_lo, y_hi) = *plot.y_range;
    else std::tie(y_lo, y_hi) = padded(y_lo, y_hi);
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;

    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(plot.title) << "</text>\n";

    out << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    const double xs = nice_step(x_hi - x_lo);
    const double ys = nice_step(y_hi - y_lo);
    std::ostringstream labels;
    for (double x = std::ceil(x_lo / xs) * xs; x <= x_hi + 1e-9 * xs; x += xs) {
        out << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(sx(x)) << "\" y2=\""
            << num(top + ph) << "\"/>\n";
        labels << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
               << tick_label(x, xs) << "</text>\n";
    }
    for (double y = std::ceil(y_lo / ys) * ys; y <= y_hi + 1e-9 * ys; y += ys) {
        out << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
            << num(sy(y)) << "\"/>\n";
        labels << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">"
               << tick_label(y, ys) << "</text>\n";
    }
    out << "</g>\n" << labels.str();
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 12) << "\" text-anchor=\"middle\">"
        << escape(plot.x_label) << "</text>\n";
    out << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(plot.y_label) << "</text>\n";

    out << "<defs><clipPath id=\"plot\"><rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n";
    out << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& r : plot.references) {
        if (r.vertical) {
            out << "<line x1=\"" << num(sx(r.value)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(sx(r.value))
                << "\" y2=\"" << num(top + ph) << "\" stroke=\"#555555\" stroke-dasharray=\"2,3\"/>\n";
        } else {
            out << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(r.value)) << "\" x2=\"" << num(left + pw)
                << "\" y2=\"" << num(sy(r.value)) << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
        }
    }
    for (const auto& c : plot.curves) {
        std::ostringstream path;
        bool pen_down = false;
        for (const auto& [x, y] : c.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                pen_down = false;
                continue;
            }
            path << (pen_down ? " L" : " M") << num(sx(x)) << ',' << num(sy(y));
            pen_down = true;
        }
        out << "<path d=\"" << path.str().substr(path.str().empty() ? 0 : 1) << "\" fill=\"none\" stroke=\""
            << c.color << "\" stroke-width=\"1.8\"/>\n";
        if (c.markers) {
            for (const auto& [x, y] : c.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\"" << c.color
                    << "\"/>\n";
            }
        }
    }
    out << "</g>\n";

    double ly = top + 10;
    for (const auto& c : plot.curves) {
        out << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 36)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << c.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4) << "\">" << escape(c.label)
            << "</text>\n";
        ly += 20;
    }
    for (const auto& r : plot.references) {
        if (r.label.empty()) continue;
        out << "<text x=\"" << num(left + pw + 12) << "\" y=\"" << num(ly + 4) << "\" fill=\"#555555\">"
            << escape(r.label) << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace plyap
