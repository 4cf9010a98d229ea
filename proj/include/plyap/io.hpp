#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "plyap/estimators.hpp"

namespace plyap {

/// 17 significant digits ("%.17g"); non-finite values print as inf, -inf, nan.
std::string format_double(double value);

/// FNV-1a 64-bit hash, printed as 16 hex digits.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

/// `# config_hash=<hash>` header line followed by `t,d_p,saturated` rows.
void write_distance_csv(std::ostream& out, const DistanceSeries& series, const std::string& config_hash);
/// `t,log_lambda,saturated`
void write_divergence_csv(std::ostream& out, const DivergenceSeries& series, const std::string& config_hash);
/// `t,lambda`
void write_lambda_csv(std::ostream& out, const std::vector<FiniteTimePoint>& curve, const std::string& config_hash);

}  // namespace plyap
