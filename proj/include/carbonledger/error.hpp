#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace carbonledger {

enum class ErrorCode {
    unsupported_source,
    unit_mismatch,
    domain,
    validation,
    parse,
    duplicate_key,
    incomplete_prefix,
    missing_data,
    configuration,
    insufficient_data,
    undefined_contributions,
    usage,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Carries every violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A located problem in an input file. Line and column are 1-based; 0 means
/// "not applicable" (e.g. a file-level problem).
struct Diagnostic {
    std::string file;
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;

    std::string describe() const;
};

class ParseError : public Error {
public:
    explicit ParseError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace carbonledger
