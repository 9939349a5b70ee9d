#include <cmath>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "optrace/error.hpp"
#include "optrace/special_functions.hpp"

using namespace optrace;

TEST_CASE("gamma wrappers") {
    CHECK(special::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(special::gamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));
    CHECK(special::log_gamma(100.0) == doctest::Approx(359.1342053695754).epsilon(1e-14));
    CHECK_THROWS_AS(special::gamma(-2.0), DomainError);
}

TEST_CASE("K0 agrees with the standard library") {
    for (double x : {1e-6, 0.01, 0.3, 1.0, 2.5, 10.0, 40.0}) {
        CAPTURE(x);
        CHECK(special::bessel_k0(x) == doctest::Approx(std::cyl_bessel_k(0.0, x)).epsilon(1e-13));
        CHECK(special::bessel_k0_scaled(x) ==
              doctest::Approx(std::exp(x) * std::cyl_bessel_k(0.0, x)).epsilon(1e-12));
    }
    CHECK(std::isfinite(special::bessel_k0_scaled(2000.0)));
    CHECK(special::bessel_k0_scaled(2000.0) == doctest::Approx(std::sqrt(M_PI / 4000.0)).epsilon(1e-4));
}

TEST_CASE("U(1, 1, z) = e^z E1(z)") {
    for (double z : {0.01, 0.5, 1.0, 3.0, 20.0}) {
        CAPTURE(z);
        const double e1 = -std::expint(-z);
        CHECK(special::confluent_u(1.0, z) == doctest::Approx(std::exp(z) * e1).epsilon(1e-11));
    }
}

TEST_CASE("U(1/2, 1, z) = e^{z/2} K0(z/2) / sqrt(pi)") {
    for (double z : {0.02, 0.7, 4.0, 30.0}) {
        CAPTURE(z);
        const double ref = std::exp(0.5 * z) * std::cyl_bessel_k(0.0, 0.5 * z) / std::sqrt(M_PI);
        CHECK(special::confluent_u(0.5, z) == doctest::Approx(ref).epsilon(1e-11));
    }
    CHECK_THROWS_AS(special::confluent_u(-0.5, 1.0), ContractError);
}

TEST_CASE("generalized Laguerre polynomials against the explicit sum") {
    using big = boost::multiprecision::cpp_bin_float_50;
    for (int n : {0, 1, 2, 5, 9}) {
        for (double g : {-0.7, 0.0, 1.3, 4.0}) {
            for (double x : {0.1, 1.0, 3.5, 12.0}) {
                // L_n^g(x) = sum_k (-1)^k binom(n + g, n - k) x^k / k!
                big sum = 0;
                for (int k = 0; k <= n; ++k) {
                    big binom = 1;
                    for (int j = 1; j <= n - k; ++j) binom = binom * (big(n + g) - (n - k) + j) / j;
                    big term = binom * pow(big(x), k) / boost::math::factorial<big>(k);
                    sum += (k % 2 ? -term : term);
                }
                CAPTURE(n);
                CAPTURE(g);
                CAPTURE(x);
                CHECK(special::laguerre_generalized(n, g, x) ==
                      doctest::Approx(sum.convert_to<double>()).epsilon(1e-11).scale(1.0));
            }
        }
    }
}
