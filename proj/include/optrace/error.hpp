#pragma once

#include <stdexcept>
#include <string>

namespace optrace {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter values (non-positive volatility, negative time, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the support of a density or special function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The caller should reflect w -> 1 - w and call again.
class UseSymmetryError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The requested distribution collapses to a point mass (alpha == 0, chi -> 0).
class DegenerateDistributionError : public Error {
public:
    using Error::Error;
};

/// A precondition on the model regime is violated (e.g. mu <= 0 where mu > 0 is required).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Quadrature or root finding failed to reach the requested tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::string diagnostics)
        : Error(what + (diagnostics.empty() ? "" : " [" + diagnostics + "]")),
          diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace optrace
