#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sg {

/// Malformed model text. `line` is 1-based; 0 when no position applies.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A structurally broken game was handed to an operation that requires a valid one.
class ValidationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unknown builtin model name, or bad parameters for a known one.
class UnknownBuiltin : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The exact solver would have to enumerate more strategy pairs than allowed.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double required)
        : std::runtime_error(what), required_(required) {}

    /// Number of strategy pairs the request would need (approximate above 2^53).
    double required_pairs() const noexcept { return required_; }

private:
    double required_;
};

/// collapse_sec was called without the caller vouching for its precondition.
class NotCertified : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sg
