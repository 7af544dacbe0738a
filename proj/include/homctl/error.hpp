#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace homctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incompatible matrix/vector shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A plant mode fails validation (e.g. uncontrollable pair). `mode` is 0-based.
class ModeError : public Error {
public:
    ModeError(std::size_t mode, const std::string& what) : Error(what), mode_(mode) {}
    std::size_t mode() const noexcept { return mode_; }

private:
    std::size_t mode_;
};

/// An equation or inequality system has no solution at the requested tolerance.
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what, std::optional<std::size_t> mode = std::nullopt,
                             double measure = 0.0)
        : Error(what), mode_(mode), measure_(measure) {}

    /// Offending mode (0-based) when the failure is mode-local.
    std::optional<std::size_t> mode() const noexcept { return mode_; }
    /// Residual or slack that decided infeasibility.
    double measure() const noexcept { return measure_; }

private:
    std::optional<std::size_t> mode_;
    double measure_;
};

/// Numerical breakdown: singular factor, failed bracket, solver failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace homctl
