#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "doctest.h"
#include "optrace/rng.hpp"

using namespace optrace;

TEST_CASE("Philox4x32-10 known answers") {
    using rng::Counter;
    CHECK(rng::philox4x32(Counter{0, 0, 0, 0}, {0, 0}) ==
          Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(rng::philox4x32(Counter{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(rng::philox4x32(Counter{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal quantile matches the reference implementation") {
    const boost::math::normal_distribution<double> n;
    double worst = 0.0;
    for (double p : {1e-300, 1e-20, 1e-9, 1e-4, 0.02, 0.3, 0.5 - 1e-12, 0.5, 0.7, 0.975, 1 - 1e-10}) {
        const double ref = boost::math::quantile(n, p);
        const double got = rng::normal_quantile(p);
        worst = std::max(worst, ref == 0.0 ? std::abs(got) : std::abs(got / ref - 1.0));
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("path streams are pure functions of their coordinates") {
    rng::PathStream a(42, 0, 1000), b(42, 0, 1000), c(42, 0, 1001), d(43, 0, 1000), e(42, 1, 1000);
    const auto x = a.uniform_pair();
    CHECK(x == b.uniform_pair());
    CHECK(x != c.uniform_pair());
    CHECK(x != d.uniform_pair());
    CHECK(x != e.uniform_pair());
    CHECK(a.uniform_pair() != x);
}

TEST_CASE("uniform and normal moments") {
    rng::PathStream s(7, 0, 0);
    const int n = 200000;
    double su = 0.0, sz = 0.0, sz2 = 0.0, lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto u = s.uniform_pair();
        su += u[0] + u[1];
        lo = std::min({lo, u[0], u[1]});
        hi = std::max({hi, u[0], u[1]});
        const auto z = s.normal_pair();
        sz += z[0] + z[1];
        sz2 += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(su / (2.0 * n) - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / (2.0 * n)));
    CHECK(std::abs(sz / (2.0 * n)) < 5.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(sz2 / (2.0 * n) - 1.0) < 5.0 * std::sqrt(2.0 / (2.0 * n)));
}
