#pragma once

#include <stdexcept>
#include <string>

namespace gfm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (scaling factor out of range, negative r_eq, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A network or fault impedance combination is singular.
class SingularNetworkError : public Error {
public:
    using Error::Error;
};

/// A bracketed root search could not bracket or converge.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// An integrated state became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double last_valid_time)
        : Error(what), last_valid_time_(last_valid_time) {}
    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

/// A scenario field failed validation.
class ValidationError : public Error {
public:
    ValidationError(std::string field, std::string constraint, double value);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A scenario document could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A time-domain window is not in steady state.
class NotSettledError : public Error {
public:
    using Error::Error;
};

}  // namespace gfm
