#include "carbonledger/error.hpp"

#include <fmt/format.h>

namespace carbonledger {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::unsupported_source: return "unsupported-source";
        case ErrorCode::unit_mismatch: return "unit-mismatch";
        case ErrorCode::domain: return "domain";
        case ErrorCode::validation: return "validation";
        case ErrorCode::parse: return "parse";
        case ErrorCode::duplicate_key: return "duplicate-key";
        case ErrorCode::incomplete_prefix: return "incomplete-prefix";
        case ErrorCode::missing_data: return "missing-data";
        case ErrorCode::configuration: return "configuration";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::undefined_contributions: return "undefined-contributions";
        case ErrorCode::usage: return "usage";
    }
    return "unknown";
}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

std::string join_diagnostics(const std::vector<Diagnostic>& v) {
    std::string out;
    for (const auto& d : v) {
        if (!out.empty()) out += "\n";
        out += d.describe();
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(ErrorCode::validation, join_violations(violations)),
      violations_(std::move(violations)) {}

std::string Diagnostic::describe() const {
    std::string where = file.empty() ? "<input>" : file;
    if (line > 0) where += fmt::format(":{}", line);
    if (column > 0) where += fmt::format(":{}", column);
    return fmt::format("{}: {}", where, message);
}

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorCode::parse, join_diagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace carbonledger
