#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snowflake {

/// Raised when an exponent tuple violates the existence threshold
/// (gamma = alpha + beta_1 + ... + beta_n must exceed the dimension).
class ExponentError : public std::runtime_error {
public:
    explicit ExponentError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for invalid run configurations (bad flags, malformed domains, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the field-expression parser; carries the byte offset of the
/// offending token and, for syntax errors, what was expected there.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset, std::string expected = {})
        : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

}  // namespace snowflake
