#pragma once

#include <stdexcept>
#include <string>

namespace dub {

// Base class for everything this library throws on bad input or blown limits.
// The CLI maps these onto exit codes (validation/parse -> 2, resource -> 3).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Parse failure in the rule DSL or a data file; line/column are 1-based,
// column 0 when the position is not meaningful (e.g. whole-line errors).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column = 0)
        : Error(msg), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ResourceLimitError : public Error {
public:
    explicit ResourceLimitError(const std::string& msg) : Error(msg) {}
};

}  // namespace dub
