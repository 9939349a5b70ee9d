#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "optrace/analytic.hpp"
#include "optrace/error.hpp"
#include "optrace/montecarlo.hpp"
#include "optrace/quadrature.hpp"

using namespace optrace;

namespace {

mc::WalkConfig small(double mu, std::uint64_t paths) {
    mc::WalkConfig c;
    c.n_steps = 40;
    c.dt = 0.02;
    c.mu = mu;
    c.n_paths = paths;
    c.seed = 11;
    c.bins = 50;
    return c;
}

}  // namespace

TEST_CASE("step schedule for a target maturity") {
    const auto c = mc::config_for_alpha(1.5, 0.0, CorrelationScale::independent(), 10, 1, 0.01, 400);
    CHECK(c.n_steps == 300);
    CHECK(c.alpha() == doctest::Approx(1.5).epsilon(1e-15));
    const auto capped = mc::config_for_alpha(8.0, 0.0, CorrelationScale::independent(), 10, 1, 0.01, 400);
    CHECK(capped.n_steps == 400);
    CHECK(capped.alpha() == doctest::Approx(8.0).epsilon(1e-15));
    mc::WalkConfig w;
    w.alpha_target = 0.7;
    w.dt = 0.1;
    CHECK(w.resolved().n_steps == 14);
    w.n_paths = 0;
    CHECK_THROWS_AS(w.validate(), ValidationError);
}

TEST_CASE("histograms do not depend on the worker count") {
    auto c = small(-1.0, 40000);
    c.threads = 1;
    const auto a = mc::run_race(c, mc::Style::asian);
    c.threads = 3;
    const auto b = mc::run_race(c, mc::Style::asian);
    CHECK(a.counts() == b.counts());
    CHECK(a.n_paths() == 40000);
}

TEST_CASE("swapping the walks mirrors the histogram") {
    auto c = small(0.5, 30000);
    const auto a = mc::run_race(c, mc::Style::asian);
    c.swap_walks = true;
    const auto b = mc::run_race(c, mc::Style::asian);
    std::vector<std::uint64_t> rev(b.counts().rbegin(), b.counts().rend());
    CHECK(a.counts() == rev);
}

TEST_CASE("independent European race against the logit-normal law") {
    for (double alpha : {0.25, 0.7}) {
        auto c = mc::config_for_alpha(alpha, 0.3, CorrelationScale::independent(), 200000, 5, 2.0 * alpha, 1);
        c.bins = 100;
        const auto h = mc::run_race(c, mc::Style::european);
        const EffectiveMaturity m(alpha);
        const auto g = mc::chi_square_gof(
            h, [&](double w) { return analytic::european_weight_cdf(w, m, CorrelationScale::independent()); });
        CAPTURE(alpha);
        CHECK(g.p_value > 1e-3);
    }
}

TEST_CASE("correlated European race against its closed form") {
    const auto chi = CorrelationScale::finite(1.0);
    auto c = mc::config_for_alpha(1.0, 0.0, chi, 200000, 9, 2.0, 1);
    c.bins = 100;
    const auto h = mc::run_race(c, mc::Style::european);
    const auto g =
        mc::chi_square_gof(h, [&](double w) { return analytic::european_weight_cdf(w, EffectiveMaturity(1.0), chi); });
    CHECK(g.p_value > 1e-3);
    // The wrong (independent) law is rejected.
    const auto bad = mc::chi_square_gof(
        h, [&](double w) { return analytic::european_weight_cdf(w, EffectiveMaturity(1.0), CorrelationScale::independent()); });
    CHECK(bad.p_value < 1e-6);
}

TEST_CASE("Asian race at mu = 0 against the exact density") {
    auto c = mc::config_for_alpha(0.5, 0.0, CorrelationScale::independent(), 200000, 3, 0.01, 400);
    c.bins = 40;
    const auto h = mc::run_race(c, mc::Style::asian);
    const EffectiveMaturity m(0.5);
    const auto cdf = [&](double w) {
        if (w <= 0.0) return 0.0;
        if (w >= 1.0) return 1.0;
        if (w <= 0.05) return analytic::asian_mu0_edge_mass(w, m);
        const auto f = [&](double x) { return analytic::asian_mu0_weight_density(x, m); };
        return analytic::asian_mu0_edge_mass(0.05, m) + quad::integrate(f, 0.05, w).value;
    };
    const auto g = mc::chi_square_gof(h, cdf);
    CHECK(g.p_value > 1e-3);
}

TEST_CASE("negative tau moment for a single step") {
    // tau = dt (1/2 + exp(x) / 2), x ~ N(-mu dt / 2, dt).
    mc::WalkConfig c;
    c.n_steps = 1;
    c.dt = 0.5;
    c.mu = -1.0;
    c.n_paths = 200000;
    c.seed = 21;
    const int orders[] = {0, 1, 2};
    const auto m = mc::sample_tau_moments(c, orders, 100);
    for (int k : {1, 2}) {
        const auto f = [&](double z) {
            const double x = -0.5 * c.mu * c.dt + std::sqrt(c.dt) * z;
            const double tau = c.dt * 0.5 * (1.0 + std::exp(x));
            return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI) * std::pow(tau, -k);
        };
        const double ref = quad::integrate(f, -12.0, 12.0).value;
        CAPTURE(k);
        CHECK(std::abs(m[k].value - ref) < 4.0 * m[k].std_error);
        CHECK(m[k].std_error > 0.0);
    }
    CHECK(m[0].value == 1.0);
}

TEST_CASE("effective maturity fit") {
    auto c = mc::config_for_alpha(0.6, 0.0, CorrelationScale::independent(), 200000, 13, 1.2, 1);
    const auto h = mc::run_race(c, mc::Style::european);
    const auto f = mc::fit_effective_maturity(h);
    CHECK(f.alpha_tilde == doctest::Approx(0.6).epsilon(0.03));
    CHECK(f.residual < 0.05);

    Histogram tiny(10);
    for (int i = 0; i < 100; ++i) tiny.add(0.5);
    CHECK_THROWS_AS(mc::fit_effective_maturity(tiny), ValidationError);
    Histogram point(10);
    for (int i = 0; i < 20000; ++i) point.add(0.55);
    CHECK_THROWS_AS(mc::fit_effective_maturity(point), DegenerateDistributionError);
}

TEST_CASE("chi-square statistic on an exact histogram") {
    Histogram h(10);
    for (std::size_t b = 0; b < 10; ++b) {
        for (int i = 0; i < 1000; ++i) h.add_to_bin(b);
    }
    const auto g = mc::chi_square_gof(h, [](double w) { return w; });
    CHECK(g.statistic == doctest::Approx(0.0).scale(1.0));
    CHECK(g.dof == 9);
    CHECK(g.p_value == doctest::Approx(1.0));
}
