#pragma once

namespace optrace::special {

/// Real Gamma function; thin wrapper over std::tgamma with a domain check
/// at the poles.
double gamma(double x);
double log_gamma(double x);

/// Generalized Laguerre polynomial L_n^gamma(x) by three-term recurrence.
double laguerre_generalized(int n, double gamma, double x);

/// Modified Bessel function K_0(x) = int_0^inf exp(-x cosh t) dt, x > 0.
double bessel_k0(double x);
/// exp(x) K_0(x); finite for large x where K_0 underflows.
double bessel_k0_scaled(double x);

/// Tricomi confluent hypergeometric function U(a, 1, z) for a > 0, z > 0:
///   U(a, 1, z) = Gamma(a)^-1 int_0^inf exp(-z t) t^(a-1) (1 + t)^(-a) dt.
double confluent_u(double a, double z);

}  // namespace optrace::special
