#include <cmath>

#include <boost/math/distributions/beta.hpp>

#include "doctest.h"
#include "optrace/convolve.hpp"
#include "optrace/error.hpp"
#include "optrace/psi.hpp"

using namespace optrace;

TEST_CASE("limiting tau law convolves to Beta(mu, mu)") {
    for (double mu : {0.5, 1.0, 2.0, 3.5}) {
        const auto psi = convolve::tau_density_infinity(make_params(1.0, DriftIndex{mu}));
        CHECK(convolve::tau_density_mass(psi) == doctest::Approx(1.0).epsilon(1e-9));
        const boost::math::beta_distribution<double> b(mu, mu);
        for (double w : {0.05, 0.2, 0.37, 0.5, 0.81, 0.95}) {
            CAPTURE(mu);
            CAPTURE(w);
            CHECK(convolve::weight_density_from_psi(psi, w) == doctest::Approx(boost::math::pdf(b, w)).epsilon(1e-9));
        }
    }
}

TEST_CASE("weight density from a tau law is exactly symmetric") {
    const auto psi = convolve::tau_density_infinity(make_params(1.0, DriftIndex{0.7}));
    for (double w : {0.015625, 0.25, 0.375}) {
        CHECK(convolve::weight_density_from_psi(psi, w) == convolve::weight_density_from_psi(psi, 1.0 - w));
    }
    for (double w : {0.01, 0.3, 0.4999}) {
        const double p = convolve::weight_density_from_psi(psi, w);
        CHECK(std::abs(p - convolve::weight_density_from_psi(psi, 1.0 - w)) <= 1e-13 * p);
    }
    CHECK_THROWS_AS(convolve::weight_density_from_psi(psi, 0.0), DomainError);
}

TEST_CASE("initial price does not enter the tau law") {
    const auto a = convolve::tau_density_infinity(make_params(0.4, DriftIndex{1.3}, 1.0));
    const auto b = convolve::tau_density_infinity(make_params(0.4, DriftIndex{1.3}, 37.0));
    for (double t : {0.1, 3.0, 90.0}) CHECK(a.density(t) == b.density(t));
}

TEST_CASE("weight mass and edge masses") {
    const auto psi = convolve::tau_density_infinity(make_params(1.0, DriftIndex{0.5}));
    CHECK(convolve::weight_density_mass(psi) == doctest::Approx(1.0).epsilon(1e-8));
    const boost::math::beta_distribution<double> b(0.5, 0.5);
    CHECK(convolve::weight_edge_mass(psi, 0.01) == doctest::Approx(boost::math::cdf(b, 0.01)).epsilon(1e-8));
}

TEST_CASE("cached exact tau law for negative mu") {
    const auto p = make_params(1.0, DriftIndex{-1.0});
    const EffectiveMaturity a(5.0);
    const convolve::PsiCache cache(p, a, convolve::NegMuMethod::exact);
    CHECK(cache.validated());
    CHECK(convolve::tau_density_mass(cache.as_tau_density()) == doctest::Approx(1.0).epsilon(1e-6));
    for (double tr : {0.05, 0.7, 12.0, 400.0}) {
        const double tau = psi::tau_from_reduced(tr, p);
        CAPTURE(tr);
        CHECK(cache(tau) == doctest::Approx(psi::psi_exact_negative_mu(tau, p, a).value).epsilon(1e-6));
    }
}

TEST_CASE("negative-mu weight density") {
    const auto p = make_params(1.0, DriftIndex{-1.0});
    const convolve::NegativeMuWeightDensity d(p, EffectiveMaturity(5.0), convolve::NegMuMethod::exact);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d(0.2) == d(0.8));
    // Long maturity: bimodal with a dip at the center.
    CHECK(d(0.5) < d(0.2));

    const convolve::NegativeMuWeightDensity ap(p, EffectiveMaturity(20.0), convolve::NegMuMethod::approx);
    CHECK(ap.raw_psi_mass() < 0.95);
    CHECK(ap.mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(convolve::NegativeMuWeightDensity(p, EffectiveMaturity(0.5), convolve::NegMuMethod::exact),
                    ContractError);
}
