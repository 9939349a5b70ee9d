#include "optrace/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include "optrace/error.hpp"
#include "optrace/quadrature.hpp"
#include "optrace/special_functions.hpp"

namespace optrace::analytic {
namespace {

constexpr double kPi = std::numbers::pi;

void require_open_unit(double w) {
    if (!(w > 0.0 && w < 1.0)) throw DomainError("weight must lie in the open interval (0, 1)");
}

double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double logit_normal(double w, double a_eff) {
    w = std::min(w, 1.0 - w);
    const double z = std::log(w / (1.0 - w));
    return std::exp(-z * z / (8.0 * a_eff)) / (std::sqrt(8.0 * kPi * a_eff) * w * (1.0 - w));
}

double checked_effective_alpha(const EffectiveMaturity& alpha, const CorrelationScale& chi) {
    const double a = effective_alpha(alpha.alpha(), chi);
    if (!(a > 0.0)) {
        throw DegenerateDistributionError(
            "weight distribution is a point mass at 1/2 (zero effective maturity)");
    }
    return a;
}

// Integral over u in [0, inf) of the mu = 0 representation, without the
// constant exp(pi^2 / (4 alpha)).
double asian_mu0_u_integral(double w, double alpha) {
    const double r = std::sqrt(w / (1.0 - w));
    auto g = [r, alpha](double u) {
        const double eta = std::asinh(r * std::cosh(u));
        const double expo = log_cosh(u) - log_cosh(eta) - (u * u + eta * eta) / alpha;
        return std::exp(expo) * std::cos(kPi * u / alpha);
    };
    // For w -> 0 the envelope behaves as exp(u - u^2/alpha); the cut covers
    // that shifted Gaussian as well as exp(-u^2/alpha) < 1e-16.
    const double u_max = 0.5 * alpha + std::sqrt(37.0 * alpha) + 1.0;
    quad::Options opt;
    opt.abs_tol = 0.5e-10 * std::exp(-kPi * kPi / (4.0 * alpha));
    opt.rel_tol = 1e-12;
    opt.max_intervals = 4000;
    try {
        return quad::integrate(g, 0.0, u_max, opt).value;
    } catch (const NumericalError& e) {
        std::ostringstream d;
        d << "w=" << w << " alpha=" << alpha << "; " << e.diagnostics();
        throw NumericalError("mu = 0 Asian density quadrature failed", d.str());
    }
}

}  // namespace

double effective_alpha(double alpha, const CorrelationScale& chi) {
    if (chi.is_independent()) return alpha;
    const double c2 = chi.chi() * chi.chi();
    return alpha * c2 / (2.0 + c2);
}

double european_weight_density(double w, const EffectiveMaturity& alpha) {
    return correlated_european_weight_density(w, alpha, CorrelationScale::independent());
}

double correlated_european_weight_density(double w, const EffectiveMaturity& alpha,
                                          const CorrelationScale& chi) {
    require_open_unit(w);
    return logit_normal(w, checked_effective_alpha(alpha, chi));
}

double european_weight_cdf(double w, const EffectiveMaturity& alpha, const CorrelationScale& chi) {
    if (w <= 0.0) return 0.0;
    if (w >= 1.0) return 1.0;
    const double a = checked_effective_alpha(alpha, chi);
    const double z = std::log(w / (1.0 - w)) / (2.0 * std::sqrt(a));
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double asian_mu0_weight_density(double w, const EffectiveMaturity& alpha) {
    require_open_unit(w);
    const double a = alpha.alpha();
    if (!(a > 0.0)) throw DegenerateDistributionError("alpha == 0: weight is a point mass at 1/2");
    if (w > 0.5) w = 1.0 - w;
    const double integral = 2.0 * asian_mu0_u_integral(w, a);
    const double pref = std::exp(kPi * kPi / (4.0 * a)) /
                        (kPi * a * std::sqrt(w) * std::pow(1.0 - w, 1.5));
    return std::max(0.0, pref * integral);
}

double asian_mu0_edge_mass(double w_edge, const EffectiveMaturity& alpha) {
    if (!(w_edge > 0.0 && w_edge < 0.5)) throw DomainError("edge must lie in (0, 1/2)");
    // w = exp(-t): mass = int_{t0}^inf p(e^-t) e^-t dt.
    const double t0 = -std::log(w_edge);
    const double t1 = t0 + 2.0 * std::sqrt(40.0 * std::max(alpha.alpha(), 0.25)) + 10.0;
    auto f = [&alpha](double t) {
        const double w = std::exp(-t);
        return asian_mu0_weight_density(w, alpha) * w;
    };
    quad::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-10;
    return quad::integrate(f, t0, t1, opt).value;
}

double asian_weight_asymptotic(double w, const EffectiveMaturity& alpha) {
    require_open_unit(w);
    if (w <= 0.5) {
        throw UseSymmetryError("asymptotic form is for w > 1/2; evaluate at 1 - w");
    }
    const double a = alpha.alpha();
    if (!(a > 0.0)) throw DegenerateDistributionError("alpha == 0: weight is a point mass at 1/2");
    const double sw = std::sqrt(w);
    const double lz = std::log((1.0 + sw) / std::sqrt(1.0 - w));
    const double q = 1.0 + sw * lz;
    const double expo = -lz * lz / a + kPi * kPi * sw * lz / (4.0 * a * q);
    return std::exp(expo) / (std::sqrt(q) * std::sqrt(kPi * a * w) * (1.0 - w));
}

double limiting_beta_density(double w, double mu) {
    require_open_unit(w);
    if (!(mu > 0.0)) {
        throw ContractError("no limiting weight density for mu <= 0");
    }
    const double log_norm = special::log_gamma(2.0 * mu) - 2.0 * special::log_gamma(mu);
    return std::exp(log_norm + (mu - 1.0) * (std::log(w) + std::log1p(-w)));
}

double critical_maturity_european(const CorrelationScale& chi) {
    if (chi.is_independent()) return 0.5;
    const double c2 = chi.chi() * chi.chi();
    if (c2 == 0.0) return kInf;
    return (2.0 + c2) / (2.0 * c2);
}

LogitNormalFit fit_logit_normal(std::span<const double> w, std::span<const double> p,
                                std::span<const double> sigma, double w_lo, double w_hi) {
    if (w.size() != p.size() || (!sigma.empty() && sigma.size() != p.size())) {
        throw ValidationError("fit inputs must have equal lengths");
    }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < w_lo || w[i] > w_hi || !(w[i] > 0.0 && w[i] < 1.0)) continue;
        if (!sigma.empty() && !(sigma[i] > 0.0)) continue;
        idx.push_back(i);
    }
    if (idx.size() < 3) throw DegenerateDistributionError("too few points to fit");

    auto objective = [&](double log_a) {
        const double a = std::exp(log_a);
        double s = 0.0;
        for (auto i : idx) {
            const double f = logit_normal(w[i], a);
            const double scale = sigma.empty() ? f : sigma[i];
            const double r = (p[i] - f) / scale;
            s += r * r;
        }
        return s;
    };
    // Coarse scan, then Brent around the best bracket.
    const double lo = std::log(1e-4), hi = std::log(1e4);
    const int n = 80;
    int best = 0;
    double best_v = kInf;
    for (int k = 0; k <= n; ++k) {
        const double v = objective(lo + (hi - lo) * k / n);
        if (v < best_v) { best_v = v; best = k; }
    }
    const double step = (hi - lo) / n;
    const auto r = boost::math::tools::brent_find_minima(
        objective, lo + step * std::max(best - 1, 0), lo + step * std::min(best + 1, n), 50);

    LogitNormalFit out;
    out.alpha_tilde = std::exp(r.first);
    out.points = idx.size();
    double num = 0.0, den = 0.0;
    for (auto i : idx) {
        const double f = logit_normal(w[i], out.alpha_tilde);
        num += (p[i] - f) * (p[i] - f);
        den += f * f;
        out.max_relative = std::max(out.max_relative, std::abs(p[i] / f - 1.0));
    }
    out.residual = std::sqrt(num / den);
    return out;
}

DensityCurve european_curve(const EffectiveMaturity& alpha, const CorrelationScale& chi,
                            std::span<const double> grid) {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = correlated_european_weight_density(g[i], alpha, chi);
    }
    CurveMeta meta;
    meta.provenance = Provenance::analytic;
    meta.set("model", chi.is_independent() ? "european" : "european-correlated");
    meta.set("alpha", alpha.alpha());
    meta.set("chi", chi.chi());
    meta.set("method", "logit-normal");
    const double left = european_weight_cdf(g.front(), alpha, chi);
    const double right = 1.0 - european_weight_cdf(g.back(), alpha, chi);
    return DensityCurve(std::move(g), std::move(v), std::move(meta), NormRule::trapezoid(left, right));
}

DensityCurve asian_mu0_curve(const EffectiveMaturity& alpha, std::span<const double> grid) {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        // Lower half, mirrored.
        const double w = std::min(g[i], 1.0 - g[i]);
        v[i] = asian_mu0_weight_density(w, alpha);
    }
    CurveMeta meta;
    meta.provenance = Provenance::quadrature;
    meta.set("model", "asian-mu0");
    meta.set("alpha", alpha.alpha());
    meta.set("mu", 0.0);
    meta.set("method", "u-integral");
    double left = std::nan("");
    double right = std::nan("");
    if (g.front() < 0.5 && g.back() > 0.5) {
        left = asian_mu0_edge_mass(g.front(), alpha);
        right = asian_mu0_edge_mass(1.0 - g.back(), alpha);
    }
    return DensityCurve(std::move(g), std::move(v), std::move(meta), NormRule::trapezoid(left, right));
}

DensityCurve asian_asymptotic_curve(const EffectiveMaturity& alpha, std::span<const double> grid) {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = std::max(g[i], 1.0 - g[i]);
        v[i] = w > 0.5 ? asian_weight_asymptotic(w, alpha)
                       : asian_weight_asymptotic(std::nextafter(0.5, 1.0), alpha);
    }
    CurveMeta meta;
    meta.provenance = Provenance::analytic;
    meta.set("model", "asian-mu0-asymptotic");
    meta.set("alpha", alpha.alpha());
    meta.set("mu", 0.0);
    meta.set("method", "w->1 asymptotic");
    return DensityCurve(std::move(g), std::move(v), std::move(meta));
}

DensityCurve beta_limit_curve(double mu, std::span<const double> grid) {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = limiting_beta_density(std::min(g[i], 1.0 - g[i]), mu);
    }
    CurveMeta meta;
    meta.provenance = Provenance::limiting;
    meta.set("model", "beta-limit");
    meta.set("mu", mu);
    meta.set("method", "beta(mu,mu)");
    quad::Options opt;
    opt.rel_tol = 1e-12;
    const double interior =
        quad::integrate([mu](double w) { return limiting_beta_density(w, mu); }, g.front(), g.back(), opt).value;
    const double mass = boost::math::ibeta(mu, mu, g.front()) + interior + boost::math::ibetac(mu, mu, g.back());
    return DensityCurve(std::move(g), std::move(v), std::move(meta), NormRule::given(mass));
}

}  // namespace optrace::analytic
