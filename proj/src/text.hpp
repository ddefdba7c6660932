#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carbonledger::detail {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Parses `text` and multiplies by 10^shift without an intermediate rounding:
/// the shift is applied to the decimal exponent before conversion.
std::optional<double> parse_scaled(std::string_view text, int shift);

/// Shortest decimal text t such that parse_scaled(t, shift) == x.
std::string format_scaled(double x, int shift);

/// Reporting format: `digits` significant digits, no trailing zeros.
std::string format_sig(double x, int digits = 6);

}  // namespace carbonledger::detail
