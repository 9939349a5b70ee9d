#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace optrace::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Accept once the error is below l1_rel_tol * integral(|f|). Guards
    /// integrals whose value nearly cancels.
    double l1_rel_tol = 0.0;
    std::size_t max_intervals = 2000;
    /// When false, a non-converged result is returned with converged == false.
    bool throw_on_failure = true;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod integration over [a, b].
///
/// The interval with the largest error estimate is bisected until the total
/// error satisfies the tolerance in Options. Non-finite integrand values and
/// exhausted interval budgets raise NumericalError (with the worst interval
/// in the diagnostics) unless throw_on_failure is false.
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

/// As integrate(), with the range pre-split at the given interior breakpoints.
Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 const Options& opt = {});

}  // namespace optrace::quad
