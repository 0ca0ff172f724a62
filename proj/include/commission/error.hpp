#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace commission {

// Invalid or unparsable configuration (files, CLI values, strategy names).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file-format problem tied to a specific line.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ConfigError("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Reference has no range, so the normalization base d would be zero.
class DegenerateExcitation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace commission
