#pragma once

#include <string>

#include "optrace/core.hpp"

/// Density Psi(tau) of the exponential functional
///   tau = int_0^T exp(-sigma^2 mu t / 2 + sigma B_t) dt.
///
/// Every formula is evaluated in the dimensionless tau' = sigma^2 tau / 2;
/// returned values are densities per unit tau (one sigma^2/2 Jacobian).
namespace optrace::psi {

enum class Method {
    discrete_branch,
    exact_negative_mu,
    approx_negative_mu,
    limiting_infinity,
    large_tau_asymptotic,
    small_tau_asymptotic,
};

std::string to_string(Method m);

struct PsiEvaluation {
    double tau = 0.0;
    double value = 0.0;
    Method method = Method::discrete_branch;
    /// Absolute error estimate of value (0 for closed forms).
    double error_estimate = 0.0;
    /// False when evaluated outside the validated parameter regime.
    bool validated = true;
};

/// tau' = sigma^2 tau / 2.
double reduced_tau(double tau, const ModelParams& params);
double tau_from_reduced(double tau_reduced, const ModelParams& params);

/// Discrete branch: sum over integers 0 <= n < mu/2. Requires mu > 0.
PsiEvaluation psi_discrete_branch(double tau, const ModelParams& params, const EffectiveMaturity& alpha);

/// Number of terms of the discrete branch, i.e. #{n integer : 0 <= n < mu/2}.
int discrete_branch_terms(double mu);

/// alpha -> infinity limit for mu > 0 (inverse-gamma law with a fat algebraic tail).
PsiEvaluation psi_infinity(double tau, const ModelParams& params);

/// theta(x, alpha/2): the kernel of the mu < 0 reduction, from
///   theta = (alpha/2) 2 e^{pi^2/alpha} / (pi alpha)^{3/2}
///           * x int_0^inf sinh(xi) exp(-x cosh xi - xi^2/alpha) sin(2 pi xi / alpha) dxi
/// with the Taylor polynomial of exp(-x cosh xi) subtracted (each of its
/// terms integrates to zero).
double theta(double x, double alpha);

/// psi(alpha, tau') = int_0^inf x^(-1-mu) exp(-tau' x^2 / 4) theta(x, alpha/2) dx.
double psi_kernel(double tau_reduced, double mu, double alpha);

/// Exact continuous-branch density for mu < 0 by nested quadrature.
/// Validated for alpha >= 5; 1 <= alpha < 5 is flagged, alpha < 1 rejected.
PsiEvaluation psi_exact_negative_mu(double tau, const ModelParams& params, const EffectiveMaturity& alpha);

/// Large-alpha approximation built from U(-mu/2, 1, 1/tau'). Requires mu < 0.
PsiEvaluation psi_approx_negative_mu(double tau, const ModelParams& params, const EffectiveMaturity& alpha);

/// Normalizing constant of the approximation (per unit tau).
double approx_constant(const ModelParams& params, const EffectiveMaturity& alpha);

/// Log-normal large-tau asymptotic (2 sqrt(pi alpha))^-1 tau^-1 exp(-ln^2 tau / (4 alpha)),
/// in the reduced variable tau'.
double psi_lognormal_tail(double tau_reduced, double alpha);

/// Leading small-tau value of psi(alpha, 0) for mu < 0.
double psi_kernel_at_zero_leading(double mu, double alpha);

/// Small-x asymptotic of theta(x, alpha/2).
double theta_small_x(double x, double alpha);

}  // namespace optrace::psi
