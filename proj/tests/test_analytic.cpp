#include <cmath>

#include <boost/math/distributions/beta.hpp>

#include "doctest.h"
#include "optrace/analytic.hpp"
#include "optrace/error.hpp"
#include "optrace/quadrature.hpp"

using namespace optrace;

namespace {

// Log-odds of the terminal weight are N(0, 4 alpha).
double logit_normal(double w, double alpha) {
    const double x = std::log(w / (1.0 - w));
    const double v = 4.0 * alpha;
    return std::exp(-0.5 * x * x / v) / std::sqrt(2.0 * M_PI * v) / (w * (1.0 - w));
}

double logit_mass(const std::function<double(double)>& p) {
    const auto f = [&](double x) {
        const double w = 1.0 / (1.0 + std::exp(-x));
        return p(w) * w * (1.0 - w);
    };
    return quad::integrate(f, -35.0, 35.0).value;
}

}  // namespace

TEST_CASE("European density is logit-normal") {
    for (double a : {0.05, 0.25, 0.5, 0.7, 3.0}) {
        for (double w : {1e-4, 0.1, 0.5, 0.73, 0.999}) {
            CAPTURE(a);
            CAPTURE(w);
            CHECK(analytic::european_weight_density(w, EffectiveMaturity(a)) ==
                  doctest::Approx(logit_normal(w, a)).epsilon(1e-13));
        }
        CHECK(logit_mass([&](double w) { return analytic::european_weight_density(w, EffectiveMaturity(a)); }) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(analytic::european_weight_density(0.0, EffectiveMaturity(0.3)), DomainError);
    CHECK_THROWS_AS(analytic::european_weight_density(0.3, EffectiveMaturity(0.0)), DegenerateDistributionError);
}

TEST_CASE("correlated European density") {
    CHECK(analytic::effective_alpha(2.0, CorrelationScale::finite(std::sqrt(2.0))) == doctest::Approx(1.0));
    CHECK(analytic::effective_alpha(2.0, CorrelationScale::independent()) == 2.0);
    const auto chi = CorrelationScale::finite(0.8);
    const double ae = 1.3 * 0.64 / 2.64;
    CHECK(analytic::correlated_european_weight_density(0.3, EffectiveMaturity(1.3), chi) ==
          doctest::Approx(logit_normal(0.3, ae)).epsilon(1e-13));
    CHECK(analytic::critical_maturity_european(chi) == doctest::Approx(2.64 / (2.0 * 0.64)));
    CHECK(analytic::critical_maturity_european(CorrelationScale::independent()) == 0.5);
}

TEST_CASE("European CDF integrates the density") {
    const auto chi = CorrelationScale::finite(1.0);
    const EffectiveMaturity a(0.9);
    const auto f = [&](double w) { return analytic::correlated_european_weight_density(w, a, chi); };
    CHECK(analytic::european_weight_cdf(0.5, a, chi) == doctest::Approx(0.5));
    CHECK(analytic::european_weight_cdf(0.8, a, chi) - analytic::european_weight_cdf(0.2, a, chi) ==
          doctest::Approx(quad::integrate(f, 0.2, 0.8).value).epsilon(1e-10));
}

TEST_CASE("Asian mu = 0 density: symmetry and mass") {
    for (double a : {0.5, 1.63, 3.5}) {
        const EffectiveMaturity m(a);
        for (double w : {0.03125, 0.1875, 0.4375}) {
            CHECK(analytic::asian_mu0_weight_density(w, m) == analytic::asian_mu0_weight_density(1.0 - w, m));
        }
        const auto f = [&](double w) { return analytic::asian_mu0_weight_density(w, m); };
        const double mass = 2.0 * analytic::asian_mu0_edge_mass(0.05, m) + quad::integrate(f, 0.05, 0.95).value;
        CAPTURE(a);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("Asian asymptotic form approaches the exact density as w -> 1") {
    const EffectiveMaturity m(1.0);
    const auto rel = [&](double w) {
        return std::abs(analytic::asian_weight_asymptotic(w, m) / analytic::asian_mu0_weight_density(w, m) - 1.0);
    };
    CHECK(rel(0.9999) < rel(0.99));
    CHECK(rel(0.9999) < 0.1);
    CHECK_THROWS_AS(analytic::asian_weight_asymptotic(0.3, m), UseSymmetryError);
}

TEST_CASE("beta limit") {
    for (double mu : {0.5, 2.0, 4.5}) {
        const boost::math::beta_distribution<double> b(mu, mu);
        for (double w : {0.01, 0.3, 0.5}) {
            CHECK(analytic::limiting_beta_density(w, mu) == doctest::Approx(boost::math::pdf(b, w)).epsilon(1e-12));
        }
    }
    const auto c = analytic::beta_limit_curve(1.0, open_grid(11));
    for (double v : c.values()) CHECK(v == 1.0);
    CHECK_THROWS_AS(analytic::limiting_beta_density(0.5, -1.0), ContractError);
}

TEST_CASE("logit-normal fit recovers the maturity") {
    const auto g = open_grid(99);
    std::vector<double> p;
    for (double w : g) p.push_back(logit_normal(w, 0.37));
    const auto f = analytic::fit_logit_normal(g, p, {});
    CHECK(f.alpha_tilde == doctest::Approx(0.37).epsilon(1e-6));
    CHECK(f.residual < 1e-8);
    CHECK(f.points == 91);
}

TEST_CASE("curves carry their parameters and normalization") {
    const auto c = analytic::european_curve(EffectiveMaturity(0.7), CorrelationScale::independent(), open_grid(999));
    CHECK(c.meta().get("alpha") == std::optional<std::string>("0.7"));
    CHECK(c.norm_estimate() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(c.max_asymmetry() <= 1e-12 * *std::max_element(c.values().begin(), c.values().end()));
}
