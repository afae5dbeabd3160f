#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace scicheck {

// Base for all domain errors. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input with a 1-based position; `unit` says what is counted
// ("line", "cue", ...).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what, const std::string& unit = "line")
        : Error(unit + " " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A value violates a type invariant; `field` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace scicheck
