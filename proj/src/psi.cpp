#include "optrace/psi.hpp"

#include <algorithm>
#include <array>
#include <vector>
#include <cmath>
#include <numbers>
#include <sstream>

#include "optrace/error.hpp"
#include "optrace/quadrature.hpp"
#include "optrace/special_functions.hpp"

namespace optrace::psi {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive and finite");
}

void require_negative_mu(const ModelParams& p) {
    if (!(p.mu() < 0.0)) throw ContractError("this route requires mu < 0");
}

double log_sinh(double xi) { return xi + std::log1p(-std::exp(-2.0 * xi)) - std::numbers::ln2; }

// Prefactor of the mu < 0 representation, per unit tau, as a logarithm:
//   Psi(tau) = 2^(mu-1) sigma^2 exp(-alpha mu^2 / 4) exp(-1/tau') tau'^(-mu-1) psi(alpha, tau').
double log_exact_prefactor(double tau_r, const ModelParams& p, double alpha) {
    const double mu = p.mu();
    return (mu - 1.0) * std::numbers::ln2 + std::log(p.sigma_sq()) - 0.25 * alpha * mu * mu -
           1.0 / tau_r - (mu + 1.0) * std::log(tau_r);
}

}  // namespace


std::string to_string(Method m) {
    switch (m) {
        case Method::discrete_branch: return "discrete_branch";
        case Method::exact_negative_mu: return "exact_negative_mu";
        case Method::approx_negative_mu: return "approx_negative_mu";
        case Method::limiting_infinity: return "limiting_infinity";
        case Method::large_tau_asymptotic: return "large_tau_asymptotic";
        case Method::small_tau_asymptotic: return "small_tau_asymptotic";
    }
    return "unknown";
}

double reduced_tau(double tau, const ModelParams& params) { return 0.5 * params.sigma_sq() * tau; }

double tau_from_reduced(double tau_reduced, const ModelParams& params) {
    return 2.0 * tau_reduced / params.sigma_sq();
}

int discrete_branch_terms(double mu) {
    int n = 0;
    while (static_cast<double>(n) < 0.5 * mu) ++n;
    return n;
}

PsiEvaluation psi_discrete_branch(double tau, const ModelParams& params, const EffectiveMaturity& alpha) {
    require_positive_tau(tau);
    const double mu = params.mu();
    if (!(mu > 0.0)) throw ContractError("the discrete branch exists only for mu > 0");
    const double z = 1.0 / reduced_tau(tau, params);
    const double lz = std::log(z);
    const double a = alpha.alpha();

    double sum = 0.0;
    const int terms = discrete_branch_terms(mu);
    for (int n = 0; n < terms; ++n) {
        const double nn = n;
        const double log_mag =
            -z + (1.0 + mu - nn) * lz - a * nn * (mu - nn) - special::log_gamma(1.0 + mu - nn);
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += sign * (mu - 2.0 * nn) * std::exp(log_mag) *
               special::laguerre_generalized(n, mu - 2.0 * nn, z);
    }
    PsiEvaluation out;
    out.tau = tau;
    out.value = 0.5 * params.sigma_sq() * sum;
    out.method = Method::discrete_branch;
    return out;
}

PsiEvaluation psi_infinity(double tau, const ModelParams& params) {
    require_positive_tau(tau);
    const double mu = params.mu();
    if (!(mu > 0.0)) throw ContractError("the alpha -> infinity limit exists only for mu > 0");
    const double s2 = params.sigma_sq();
    const double st = s2 * tau;
    const double log_val = mu * std::numbers::ln2 + std::log(s2) - special::log_gamma(mu) -
                           (1.0 + mu) * std::log(st) - 2.0 / st;
    PsiEvaluation out;
    out.tau = tau;
    out.value = std::exp(log_val);
    out.method = Method::limiting_infinity;
    return out;
}

namespace {

// e^-y minus its Taylor polynomial of degree j - 1.
double exp_remainder(double y, int j) {
    if (j == 0) return std::exp(-y);
    if (y <= j + 1.0) {
        double term = 1.0;
        for (int i = 1; i <= j; ++i) term *= -y / i;
        double sum = term;
        for (int i = j + 1; i < j + 200; ++i) {
            term *= -y / i;
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    double term = 1.0, poly = 1.0;
    for (int i = 1; i < j; ++i) {
        term *= -y / i;
        poly += term;
    }
    return std::exp(-y) - poly;
}

}  // namespace

double theta(double x, double alpha) {
    if (!(x > 0.0)) throw DomainError("theta requires x > 0");
    if (!(alpha > 0.0)) throw DomainError("theta requires alpha > 0");

    const double k = 2.0 * kPi / alpha;
    const double lx = std::log(x);
    const double xi_peak = std::asinh(1.0 / x);
    const double xi0 = std::log(2.0 / x);
    // Every Taylor term of exp(-x cosh xi) integrates to zero against
    // sinh(xi) sin(k xi) exp(-xi^2/alpha); subtracting the first j of them
    // removes the cancellation at small x.
    const int j = xi0 > 0.0 ? std::clamp(static_cast<int>(std::ceil(2.0 * xi0 / alpha)) - 1, 0, 200) : 0;
    const double xi_gauss = std::sqrt(41.45 * alpha);
    double xi_max;
    std::vector<double> bp{xi_peak};
    if (j == 0) {
        xi_max = std::min(xi_gauss, std::acosh(std::cosh(xi_peak) + 60.0 / x));
    } else {
        xi_max = 0.5 * j * alpha + xi_gauss;
        bp.push_back(0.5 * j * alpha);
    }
    std::sort(bp.begin(), bp.end());
    std::erase_if(bp, [&](double b) { return !(b > 0.0 && b < xi_max); });

    auto f = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double c = std::cosh(xi);
        if (j == 0) {
            const double e = lx + log_sinh(xi) - x * c - xi * xi / alpha;
            return std::exp(e) * std::sin(k * xi);
        }
        const double e = lx + log_sinh(xi) - xi * xi / alpha;
        return std::exp(e) * exp_remainder(x * c, j) * std::sin(k * xi);
    };
    quad::Options opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-11;
    opt.l1_rel_tol = 1e-14;
    opt.max_intervals = 4000;
    double val;
    try {
        val = quad::integrate(f, 0.0, xi_max, bp, opt).value;
    } catch (const NumericalError& e) {
        std::ostringstream d;
        d << "x=" << x << " alpha=" << alpha << "; " << e.diagnostics();
        throw NumericalError("theta quadrature failed", d.str());
    }
    const double pref = alpha * std::exp(kPi * kPi / alpha) / std::pow(kPi * alpha, 1.5);
    return pref * val;
}

double psi_kernel(double tau_r, double mu, double alpha) {
    if (!(tau_r >= 0.0)) throw DomainError("tau' must be >= 0");
    if (!(mu < 0.0)) throw ContractError("psi kernel requires mu < 0");

    quad::Options opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-9;
    opt.l1_rel_tol = 1e-13;
    opt.max_intervals = 1000;
    // theta carries its own relative noise; accept a stalled refinement that
    // is still well inside 1e-6.
    opt.throw_on_failure = false;
    auto accept = [](const quad::Result& r) {
        if (!r.converged && !(r.error <= 1e-6 * std::abs(r.value))) {
            std::ostringstream d;
            d << "value=" << r.value << " error=" << r.error << " intervals=" << r.intervals;
            throw NumericalError("x-integral did not converge", d.str());
        }
        return r.value;
    };

    // x in (0, 1]: x = e^-s, x^(-1-mu) dx = e^(mu s) ds.
    const double s_on = tau_r > 0.0 ? std::max(0.0, 0.5 * std::log(tau_r / 4.0)) : 0.0;
    const double s_lo = tau_r > 0.0 ? std::max(0.0, 0.5 * std::log(tau_r / 180.0)) : 0.0;
    const double b = -mu + 2.0 * s_on / alpha;
    const double delta = 0.5 * alpha * (-b + std::sqrt(b * b + 180.0 / alpha));
    const double s_hi = s_on + std::max(delta, 5.0);

    auto lower = [&](double s) {
        const double x = std::exp(-s);
        const double damp = tau_r * x * x / 4.0;
        return std::exp(mu * s - damp) * theta(x, alpha);
    };
    const std::array<double, 1> bp{s_on};

    double total = 0.0;
    try {
        total = accept(quad::integrate(lower, s_lo, s_hi, bp, opt));
        // x in [1, inf): theta decays like K0(x); exp(-tau' x^2/4) switches the tail off.
        if (tau_r < 180.0) {
            auto upper = [&](double x) {
                return std::exp(-(1.0 + mu) * std::log(x) - tau_r * x * x / 4.0) * theta(x, alpha);
            };
            total += accept(quad::integrate(upper, 1.0, 50.0, opt));
        }
    } catch (const NumericalError& e) {
        std::ostringstream d;
        d << "tau'=" << tau_r << " mu=" << mu << " alpha=" << alpha << "; " << e.diagnostics();
        throw NumericalError("psi x-integral failed", d.str());
    }
    return total;
}

PsiEvaluation psi_exact_negative_mu(double tau, const ModelParams& params, const EffectiveMaturity& alpha) {
    require_positive_tau(tau);
    require_negative_mu(params);
    const double a = alpha.alpha();
    if (a < 1.0) {
        throw ContractError("exact mu < 0 quadrature is not supported below alpha = 1");
    }
    const double tau_r = reduced_tau(tau, params);
    const double kernel = psi_kernel(tau_r, params.mu(), a);
    PsiEvaluation out;
    out.tau = tau;
    out.value = std::max(0.0, std::exp(log_exact_prefactor(tau_r, params, a)) * kernel);
    out.method = Method::exact_negative_mu;
    out.error_estimate = 1e-9 * out.value;
    out.validated = a >= 5.0;
    return out;
}

double approx_constant(const ModelParams& params, const EffectiveMaturity& alpha) {
    const double mu = params.mu();
    if (!(mu < 0.0)) throw ContractError("the approximation requires mu < 0");
    const double a = alpha.alpha();
    if (!(a > 0.0)) throw DomainError("alpha must be positive");
    const double lg = special::log_gamma(-0.5 * mu);
    return params.sigma_sq() *
           std::exp(2.0 * lg - 0.25 * a * mu * mu) / (4.0 * std::sqrt(kPi) * std::pow(a, 1.5));
}

PsiEvaluation psi_approx_negative_mu(double tau, const ModelParams& params, const EffectiveMaturity& alpha) {
    require_positive_tau(tau);
    require_negative_mu(params);
    const double mu = params.mu();
    const double a = alpha.alpha();
    const double tr = reduced_tau(tau, params);
    const double c = approx_constant(params, alpha);
    const double ash = std::asinh(std::sqrt(tr));
    const double log_rest = -1.0 / tr - (1.0 + 0.5 * mu) * std::log(tr) - ash * ash / a;
    PsiEvaluation out;
    out.tau = tau;
    out.value = c * std::exp(log_rest) * special::confluent_u(-0.5 * mu, 1.0 / tr);
    out.method = Method::approx_negative_mu;
    out.validated = a >= 10.0;
    return out;
}

double psi_lognormal_tail(double tau_reduced, double alpha) {
    if (!(tau_reduced > 0.0)) throw DomainError("tau' must be positive");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    const double l = std::log(tau_reduced);
    return std::exp(-l * l / (4.0 * alpha)) / (2.0 * std::sqrt(kPi * alpha) * tau_reduced);
}

double psi_kernel_at_zero_leading(double mu, double alpha) {
    if (!(mu < 0.0)) throw ContractError("requires mu < 0");
    const double g = special::gamma(-0.5 * mu);
    return g * g / (std::sqrt(kPi) * std::pow(2.0, 1.0 + mu) * std::pow(alpha, 1.5));
}

double theta_small_x(double x, double alpha) {
    const double ash = std::asinh(0.5 / x);
    return 2.0 / (std::sqrt(kPi) * std::pow(alpha, 1.5)) * ash * std::exp(-ash * ash / alpha);
}

}  // namespace optrace::psi
