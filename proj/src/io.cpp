#include "plyap/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace plyap {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

void write_distance_csv(std::ostream& out, const DistanceSeries& series, const std::string& config_hash) {
    out << "# config_hash=" << config_hash << '\n' << "t,d_p,saturated\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_double(series.times[i]) << ',' << format_double(series.values[i]) << ','
            << (series.saturated[i] ? 1 : 0) << '\n';
    }
}

void write_divergence_csv(std::ostream& out, const DivergenceSeries& series, const std::string& config_hash) {
    out << "# config_hash=" << config_hash << '\n' << "t,log_lambda,saturated\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_double(series.times[i]) << ',' << format_double(series.log_values[i]) << ','
            << (series.saturated[i] ? 1 : 0) << '\n';
    }
}

void write_lambda_csv(std::ostream& out, const std::vector<FiniteTimePoint>& curve, const std::string& config_hash) {
    out << "# config_hash=" << config_hash << '\n' << "t,lambda\n";
    for (const auto& p : curve) out << format_double(p.t) << ',' << format_double(p.lambda) << '\n';
}

}  // namespace plyap
