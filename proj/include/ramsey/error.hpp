#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ramsey {

/// Precondition violated by the caller (bad vertex, bad clique size, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is undefined for the object's current state, e.g. a Ramsey
/// check on a graph that still has gray edges.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A computation would exceed a configured budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line and 0-based column.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", offset " +
                             std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace ramsey
