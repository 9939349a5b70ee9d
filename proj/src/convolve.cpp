#include "optrace/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "optrace/error.hpp"
#include "optrace/io.hpp"
#include "optrace/quadrature.hpp"
#include "optrace/special_functions.hpp"

namespace optrace::convolve {
namespace {

// Below tau' = 1/700 every mu < 0 density carries exp(-700).
constexpr double kLogReducedLo = -6.551080335043404;

double density_pair(const TauDensity& psi, double w_lo, double w_hi, const QuadConfig& cfg) {
    const double lw_lo = std::log(w_lo);
    const double lw_hi = std::log(w_hi);
    const double v_lo = psi.log_tau_lo - lw_lo;
    const double v_hi = psi.log_tau_hi - lw_hi;
    if (!(v_lo < v_hi)) return 0.0;

    std::vector<double> bp;
    for (double b : psi.log_breakpoints) {
        for (double c : {b - lw_lo, b - lw_hi}) {
            if (c > v_lo && c < v_hi) bp.push_back(c);
        }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    auto f = [&](double v) {
        const double u = std::exp(v);
        const double a = psi.density(w_lo * u);
        if (a == 0.0) return 0.0;
        return u * u * a * psi.density(w_hi * u);
    };
    quad::Options opt;
    opt.abs_tol = cfg.abs_tol;
    opt.rel_tol = cfg.rel_tol;
    opt.max_intervals = cfg.max_intervals;
    try {
        return quad::integrate(f, v_lo, v_hi, bp, opt).value;
    } catch (const NumericalError& e) {
        std::ostringstream d;
        d << "w=" << w_lo << " psi=" << psi.label << "; " << e.diagnostics();
        throw NumericalError("weight density quadrature failed", d.str());
    }
}

// Mass of the weight density for log-odds t in [t_a, t_b], t_b <= 0.
double logit_mass(const TauDensity& psi, double t_a, double t_b, const QuadConfig& cfg) {
    auto g = [&](double t) {
        const double e = std::exp(t);
        const double w = e / (1.0 + e);
        const double wc = 1.0 / (1.0 + e);
        return density_pair(psi, w, wc, cfg) * w * wc;
    };
    quad::Options opt;
    opt.abs_tol = 1e-11;
    opt.rel_tol = 1e-9;
    opt.max_intervals = cfg.max_intervals;
    return quad::integrate(g, t_a, t_b, opt).value;
}

}  // namespace

TauDensity tau_density_infinity(const ModelParams& params) {
    const double mu = params.mu();
    if (!(mu > 0.0)) throw ContractError("Psi_inf exists only for mu > 0");
    TauDensity t;
    t.density = [params](double tau) { return psi::psi_infinity(tau, params).value; };
    // tau' = 1/X with X ~ Gamma(mu): upper tail mass tau'^-mu / Gamma(mu + 1) < 1e-13.
    const double shift = std::log(2.0 / params.sigma_sq());
    const double upper = (13.0 * std::numbers::ln10 - special::log_gamma(mu + 1.0)) / mu;
    t.log_tau_lo = kLogReducedLo + shift;
    t.log_tau_hi = std::max(upper, 5.0) + shift;
    t.log_breakpoints = {-std::log1p(mu) + shift, -std::log(mu) + shift};
    t.label = "psi_inf";
    return t;
}

double tau_density_mass(const TauDensity& psi) {
    auto f = [&](double l) {
        const double tau = std::exp(l);
        return tau * psi.density(tau);
    };
    std::vector<double> bp;
    for (double b : psi.log_breakpoints)
        if (b > psi.log_tau_lo && b < psi.log_tau_hi) bp.push_back(b);
    std::sort(bp.begin(), bp.end());
    quad::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-11;
    opt.max_intervals = 4000;
    return quad::integrate(f, psi.log_tau_lo, psi.log_tau_hi, bp, opt).value;
}

double weight_density_from_psi(const TauDensity& psi, double w, const QuadConfig& cfg) {
    if (!(w > 0.0 && w < 1.0)) throw DomainError("weight must lie in the open interval (0, 1)");
    const double w_lo = w <= 0.5 ? w : 1.0 - w;
    return density_pair(psi, w_lo, 1.0 - w_lo, cfg);
}

double weight_edge_mass(const TauDensity& psi, double w_edge, const QuadConfig& cfg) {
    if (!(w_edge > 0.0 && w_edge <= 0.5)) throw DomainError("edge must lie in (0, 1/2]");
    const double t_b = std::log(w_edge / (1.0 - w_edge));
    const double t_a = psi.log_tau_lo - psi.log_tau_hi;
    if (!(t_a < t_b)) return 0.0;
    return logit_mass(psi, t_a, t_b, cfg);
}

double weight_density_mass(const TauDensity& psi, const QuadConfig& cfg) {
    return 2.0 * weight_edge_mass(psi, 0.5, cfg);
}

DensityCurve weight_curve_from_psi(const TauDensity& psi, std::span<const double> grid, CurveMeta meta,
                                   const QuadConfig& cfg) {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = weight_density_from_psi(psi, g[i], cfg);

    const double mass = tau_density_mass(psi);
    meta.set("psi_mass", mass);
    if (std::abs(mass - 1.0) > 1e-3) {
        meta.set("warning", "tau density mass " + format_double(mass) + " differs from 1");
    }
    return DensityCurve(std::move(g), std::move(v), std::move(meta), NormRule::given(weight_density_mass(psi, cfg)));
}

std::string to_string(NegMuMethod m) { return m == NegMuMethod::exact ? "exact" : "approx"; }

struct PsiCache::Table {
    boost::math::interpolators::cardinal_cubic_b_spline<double> s;
    double lo;
    double hi;
    std::size_t n;
    double half_sigma_sq;
    double log_pref_const;
    double power;

    double operator()(double tau) const {
        if (!(tau > 0.0)) return 0.0;
        const double tr = half_sigma_sq * tau;
        const double l = std::log(tr);
        if (l < lo || l > hi) return 0.0;
        return std::exp(log_pref_const - 1.0 / tr + power * l + s(l));
    }
};

PsiCache::PsiCache(const ModelParams& params, const EffectiveMaturity& alpha, NegMuMethod method,
                   double nodes_per_decade)
    : params_(params), alpha_(alpha.alpha()), method_(method) {
    const double mu = params.mu();
    if (!(mu < 0.0)) throw ContractError("PsiCache requires mu < 0");
    if (!(nodes_per_decade >= 4.0)) throw ValidationError("nodes_per_decade must be >= 4");
    const double a = alpha_;
    double log_pref_const;
    if (method == NegMuMethod::exact) {
        if (a < 1.0) throw ContractError("exact mu < 0 quadrature is not supported below alpha = 1");
        validated_ = a >= 5.0;
        log_pref_const = (mu - 1.0) * std::numbers::ln2 + std::log(params.sigma_sq()) - 0.25 * a * mu * mu;
    } else {
        if (!(a > 0.0)) throw DegenerateDistributionError("alpha == 0: weight is a point mass at 1/2");
        validated_ = a >= 10.0;
        log_pref_const = std::log(psi::approx_constant(params, alpha));
    }

    // tau' Psi peaks near ln tau' = -mu alpha with log-normal width sqrt(2 alpha).
    const double lo = kLogReducedLo;
    const double hi = -mu * a + std::sqrt(160.0 * a) + 5.0;
    const double h = std::numbers::ln10 / nodes_per_decade;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double l = lo + h * static_cast<double>(i);
        const double tr = std::exp(l);
        double k;
        if (method == NegMuMethod::exact) {
            k = psi::psi_kernel(tr, mu, a);
        } else {
            const double ash = std::asinh(std::sqrt(tr));
            k = special::confluent_u(-0.5 * mu, 1.0 / tr) * std::exp(-ash * ash / a);
        }
        y[i] = std::log(std::max(k, 1e-300));
    }
    const double power = method == NegMuMethod::exact ? -(mu + 1.0) : -(1.0 + 0.5 * mu);
    table_ = std::make_shared<const Table>(Table{boost::math::interpolators::cardinal_cubic_b_spline<double>(y.begin(), y.end(), lo, h),
                                                 lo, lo + h * static_cast<double>(n - 1), n,
                                                 0.5 * params.sigma_sq(), log_pref_const, power});
}

std::size_t PsiCache::nodes() const noexcept { return table_->n; }
double PsiCache::log_reduced_lo() const noexcept { return table_->lo; }
double PsiCache::log_reduced_hi() const noexcept { return table_->hi; }

double PsiCache::operator()(double tau) const { return (*table_)(tau); }

TauDensity PsiCache::as_tau_density() const {
    TauDensity t;
    t.density = [tab = table_](double tau) { return (*tab)(tau); };
    const double shift = std::log(2.0 / params_.sigma_sq());
    t.log_tau_lo = table_->lo + shift;
    t.log_tau_hi = table_->hi + shift;
    t.log_breakpoints = {shift, -params_.mu() * alpha_ + shift};
    t.label = "psi_" + to_string(method_);
    return t;
}

NegativeMuWeightDensity::NegativeMuWeightDensity(const ModelParams& params, const EffectiveMaturity& alpha,
                                                 NegMuMethod method, double nodes_per_decade)
    : params_(params),
      alpha_(alpha.alpha()),
      cache_(params, alpha, method, nodes_per_decade),
      tau_(cache_.as_tau_density()) {
    raw_mass_ = tau_density_mass(tau_);
    if (method == NegMuMethod::approx) {
        // The approximate law is not normalized; use it as a shape.
        auto base = tau_.density;
        const double m = raw_mass_;
        tau_.density = [base, m](double tau) { return base(tau) / m; };
    }
}

double NegativeMuWeightDensity::operator()(double w) const { return weight_density_from_psi(tau_, w); }

double NegativeMuWeightDensity::mass() const { return weight_density_mass(tau_); }

DensityCurve NegativeMuWeightDensity::curve(std::span<const double> grid) const {
    CurveMeta meta;
    meta.provenance = Provenance::quadrature;
    meta.set("model", "asian-neg-mu");
    meta.set("alpha", alpha_);
    meta.set("mu", params_.mu());
    meta.set("method", "psi-" + to_string(cache_.method()));
    meta.set("cache_nodes", static_cast<double>(cache_.nodes()));
    meta.set("psi_raw_mass", raw_mass_);
    if (!cache_.validated()) meta.set("validated", "false");
    return weight_curve_from_psi(tau_, grid, std::move(meta));
}

double asian_weight_density_negative_mu(double w, const ModelParams& params, const EffectiveMaturity& alpha,
                                        NegMuMethod method) {
    return NegativeMuWeightDensity(params, alpha, method)(w);
}

}  // namespace optrace::convolve
