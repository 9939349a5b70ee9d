#include "optrace/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "optrace/error.hpp"
#include "optrace/quadrature.hpp"

namespace optrace::special {

double gamma(double x) {
    if (x <= 0.0 && std::floor(x) == x) throw DomainError("Gamma function pole");
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (x <= 0.0 && std::floor(x) == x) throw DomainError("Gamma function pole");
    return std::lgamma(x);
}

double laguerre_generalized(int n, double gamma, double x) {
    if (n < 0) throw DomainError("Laguerre order must be >= 0");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + gamma - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + gamma - x) * cur - (k + gamma) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double bessel_k0_scaled(double x) {
    if (!(x > 0.0)) throw DomainError("K0 requires x > 0");
    // exp(x) K0(x) = int exp(-x (cosh t - 1)) dt, cosh t - 1 = 2 sinh^2(t/2).
    const double t_max = std::acosh(1.0 + 42.0 / x);
    auto f = [x](double t) {
        const double s = std::sinh(0.5 * t);
        return std::exp(-2.0 * x * s * s);
    };
    quad::Options opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-13;
    // The integrand turns over near t = log(2/x) for small x.
    const std::array<double, 1> bp{std::log(2.0 / x)};
    return quad::integrate(f, 0.0, t_max, bp, opt).value;
}

double bessel_k0(double x) {
    const double scaled = bessel_k0_scaled(x);
    return scaled * std::exp(-x);
}

double confluent_u(double a, double z) {
    if (!(a > 0.0)) throw ContractError("U(a, 1, z) is implemented for a > 0 only");
    if (!(z > 0.0)) throw DomainError("U(a, 1, z) requires z > 0");

    quad::Options opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-12;

    // t in (0, 1]: t = v^(1/a) absorbs the t^(a-1) endpoint singularity.
    auto head = [a, z](double v) {
        if (v <= 0.0) return 1.0 / a;
        const double t = std::pow(v, 1.0 / a);
        return std::exp(-z * t - a * std::log1p(t)) / a;
    };
    const double head_val = quad::integrate(head, 0.0, 1.0, opt).value;

    // t in [1, inf): t = e^s, t^(a-1) dt = e^(a s) ds.
    double tail_val = 0.0;
    if (z < 60.0) {
        const double s_max = std::max(1.0, std::log(60.0 / z));
        auto tail = [a, z](double s) {
            const double t = std::exp(s);
            return std::exp(-z * t + a * s - a * std::log1p(t));
        };
        const std::array<double, 1> bp{-std::log(z)};
        tail_val = quad::integrate(tail, 0.0, s_max, bp, opt).value;
    }
    return (head_val + tail_val) / gamma(a);
}

}  // namespace optrace::special
