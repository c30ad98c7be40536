#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fuelclust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition on arguments (dimension mismatch, k > N, bins = 0, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input file is readable but its content cannot be turned into records.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::string column)
        : Error(what), row_(row), column_(std::move(column)) {}

    /// 1-based data row (the header is not counted); 0 when the header itself is at fault.
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

/// An M-step found a component whose effective count fell below epsilon.
class ComponentCollapse : public Error {
public:
    explicit ComponentCollapse(std::size_t component)
        : Error("mixture component " + std::to_string(component) + " collapsed (no responsibility mass)"),
          component_(component) {}

    std::size_t component() const noexcept { return component_; }

private:
    std::size_t component_;
};

/// A covariance matrix is not positive definite even after flooring.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// Every EM restart collapsed.
class FitFailure : public Error {
public:
    using Error::Error;
};

/// A split candidate no longer matches the assignment it is applied to.
class StaleCandidate : public Error {
public:
    using Error::Error;
};

} // namespace fuelclust
