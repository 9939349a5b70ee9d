#pragma once

#include <span>

#include "optrace/core.hpp"

/// Closed-form and single-quadrature weight densities.
namespace optrace::analytic {

/// Logit-normal density of the European weight W for independent increments.
/// Independent of the drift index.
double european_weight_density(double w, const EffectiveMaturity& alpha);

/// European weight density for spring-coupled increments: the logit-normal
/// law with alpha replaced by effective_alpha(alpha, chi).
double correlated_european_weight_density(double w, const EffectiveMaturity& alpha,
                                          const CorrelationScale& chi);

/// alpha * chi^2 / (2 + chi^2); alpha itself for independent increments.
double effective_alpha(double alpha, const CorrelationScale& chi);

/// P(W < w) for the (possibly correlated) European weight.
double european_weight_cdf(double w, const EffectiveMaturity& alpha, const CorrelationScale& chi);

/// Exact Asian weight density at mu = 0 by quadrature of its u-integral
/// representation (absolute tolerance 1e-10 on the integral).
double asian_mu0_weight_density(double w, const EffectiveMaturity& alpha);

/// Mass of the mu = 0 Asian density on [0, w_edge] (w_edge < 1/2), by
/// quadrature in log(1/w).
double asian_mu0_edge_mass(double w_edge, const EffectiveMaturity& alpha);

/// Asymptotic form of the mu = 0 Asian density as w -> 1. Valid for
/// w in (1/2, 1); smaller w raises UseSymmetryError.
double asian_weight_asymptotic(double w, const EffectiveMaturity& alpha);

/// Beta(mu, mu) density, the alpha -> infinity limit for mu > 0.
double limiting_beta_density(double w, double mu);

/// Critical maturity (2 + chi^2) / (2 chi^2) of the European density; 1/2
/// for independent increments.
double critical_maturity_european(const CorrelationScale& chi);

/// Least-squares fit of the logit-normal law with a free maturity.
struct LogitNormalFit {
    double alpha_tilde = 0.0;
    /// sqrt(sum (p - f)^2 / sum f^2) over the fitted points.
    double residual = 0.0;
    /// max |p / f - 1| over the fitted points.
    double max_relative = 0.0;
    std::size_t points = 0;
};

/// Fits p(w) on w in [w_lo, w_hi]. With sigma empty the misfit is relative,
/// otherwise it is weighted by 1 / sigma^2 (points with sigma <= 0 skipped).
LogitNormalFit fit_logit_normal(std::span<const double> w, std::span<const double> p,
                                std::span<const double> sigma, double w_lo = 0.05,
                                double w_hi = 0.95);

// Tabulation on an open grid. Curves carry exact endpoint masses where known.

DensityCurve european_curve(const EffectiveMaturity& alpha, const CorrelationScale& chi,
                            std::span<const double> grid);
DensityCurve asian_mu0_curve(const EffectiveMaturity& alpha, std::span<const double> grid);
/// Asymptotic form reflected onto w < 1/2; the value at exactly 1/2 uses the
/// w -> 1 branch.
DensityCurve asian_asymptotic_curve(const EffectiveMaturity& alpha, std::span<const double> grid);
DensityCurve beta_limit_curve(double mu, std::span<const double> grid);

}  // namespace optrace::analytic
