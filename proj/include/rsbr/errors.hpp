#pragma once

#include <stdexcept>
#include <string>

namespace rsbr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (negative time,
/// unsorted path, NaN from an integrand, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A model parameter violates a constraint. `path()` names the field,
/// relative to the object that was validated.
class ValidationError : public Error {
public:
    ValidationError(std::string path, std::string constraint)
        : Error(path.empty() ? constraint : path + ": " + constraint),
          path_(std::move(path)),
          constraint_(std::move(constraint)) {}

    const std::string& path() const noexcept { return path_; }
    const std::string& constraint() const noexcept { return constraint_; }

    /// Same error with `prefix` prepended to the field path.
    ValidationError with_prefix(const std::string& prefix) const {
        if (path_.empty()) return {prefix, constraint_};
        const bool indexed = path_.front() == '[';
        return {prefix + (indexed ? "" : ".") + path_, constraint_};
    }

private:
    std::string path_;
    std::string constraint_;
};

/// Adaptive quadrature ran out of subdivisions before meeting tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : Error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// An improper integral or a renewal cycle showed no sign of terminating.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double partial)
        : Error(what), partial_(partial) {}

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// The model cannot support the requested operation.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario document. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Rejection sampling would accept too rarely to be practical.
class InefficiencyError : public Error {
public:
    using Error::Error;
};

}  // namespace rsbr
