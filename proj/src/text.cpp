#include "text.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace carbonledger::detail {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_scaled(std::string_view text, int shift) {
    text = trim(text);
    if (!parse_double(text)) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    // Hex floats, inf and nan are already rejected by parse_double/from_chars
    // in general format.
    std::string mantissa;
    long long exponent = shift;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = std::string(text.substr(0, e));
        auto exp = parse_int(text.substr(e + 1));
        if (!exp) return std::nullopt;
        exponent += *exp;
    } else {
        mantissa = std::string(text);
    }
    return parse_double(fmt::format("{}e{}", mantissa, exponent));
}

std::string format_scaled(double x, int shift) {
    if (x == 0.0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    std::string_view sci(buf, static_cast<std::size_t>(end - buf));

    const bool negative = sci.front() == '-';
    if (negative) sci.remove_prefix(1);
    const auto epos = sci.find('e');
    std::string digits;
    for (char c : sci.substr(0, epos)) {
        if (c != '.') digits += c;
    }
    const int exponent = static_cast<int>(*parse_int(sci.substr(epos + 1))) - shift;
    const int n = static_cast<int>(digits.size());

    std::string body;
    if (exponent < -7 || exponent > 15) {
        body = digits.substr(0, 1);
        if (n > 1) body += "." + digits.substr(1);
        body += fmt::format("e{}", exponent);
    } else if (exponent + 1 >= n) {
        body = digits + std::string(static_cast<std::size_t>(exponent + 1 - n), '0');
    } else if (exponent + 1 <= 0) {
        body = "0." + std::string(static_cast<std::size_t>(-(exponent + 1)), '0') + digits;
    } else {
        body = digits.substr(0, static_cast<std::size_t>(exponent + 1)) + "." +
               digits.substr(static_cast<std::size_t>(exponent + 1));
    }
    return negative ? "-" + body : body;
}

std::string format_sig(double x, int digits) {
    if (x == 0.0) return "0";
    return fmt::format("{:.{}g}", x, digits);
}

}  // namespace carbonledger::detail
