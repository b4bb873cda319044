#include <catch2/catch_amalgamated.hpp>

#include "taperflow/special.hpp"

using namespace taperflow;
using Catch::Approx;

TEST_CASE("riemann zeta against reference values", "[special]") {
    CHECK(riemann_zeta(0.75) == Approx(-3.4412853869452229).epsilon(1e-12));
    CHECK(riemann_zeta(1.25) == Approx(4.5951118258429434).epsilon(1e-12));
    CHECK(riemann_zeta(2.0) == Approx(1.6449340668482264).epsilon(1e-12));
    CHECK(riemann_zeta(3.0) == Approx(1.2020569031595943).epsilon(1e-12));
    CHECK_THROWS_AS(riemann_zeta(1.0), domain_error);
    CHECK_THROWS_AS(riemann_zeta(-0.5), domain_error);
}

TEST_CASE("harmonic partial sums and smooth continuation agree", "[special]") {
    CHECK(harmonic_partial(0.75, 1000) == Approx(19.055178975831392).epsilon(1e-13));
    CHECK(harmonic_partial(1.25, 50000) == Approx(4.3276163725898931).epsilon(1e-13));

    for (double s : {0.6, 0.75, 1.25, 1.4, 2.0, 3.0}) {
        harmonic_continuation hc(s);
        for (std::int64_t v : {20000LL, 50000LL, 123456LL}) {
            const double exact = harmonic_partial(s, v);
            CHECK(hc(static_cast<double>(v)) == Approx(exact).epsilon(1e-13));
        }
    }
    // Flat filter: H(v) = v for any v.
    harmonic_continuation flat(0.0);
    CHECK(flat(12345.0) == 12345.0);
}

TEST_CASE("scaled upper incomplete gamma", "[special]") {
    // E(b+R)^r identities: r=1 -> b+1, r=2 -> b^2+2b+2 (a = r+1, x = b).
    CHECK(egamma_upper_scaled(2.0, 1.0) == Approx(2.0).epsilon(1e-12));
    CHECK(egamma_upper_scaled(3.0, 1.0) == Approx(5.0).epsilon(1e-12));
    CHECK(egamma_upper_scaled(3.0, 2.0) == Approx(10.0).epsilon(1e-12));
    CHECK(egamma_upper_scaled(2.5, 3.0) == Approx(8.176202962254631).epsilon(1e-12));
    // Overflow regime: e^750 would not fit a double, the scaled form does.
    CHECK(egamma_upper_scaled(2.0, 750.0) == Approx(751.0).epsilon(1e-12));
    CHECK(egamma_upper_scaled(2.0, 0.0) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(egamma_upper_scaled(-1.0, 1.0), domain_error);
}

TEST_CASE("lower/upper gamma split is consistent", "[special]") {
    for (double a : {0.75, 1.25, 2.5}) {
        for (double x : {0.01, 0.5, 1.0, 4.0, 9.0}) {
            CHECK(gamma_lower(a, x) + gamma_upper(a, x) == Approx(std::tgamma(a)).epsilon(1e-12));
            CHECK(gamma_lower(a, x) >= 0.0);
        }
        // small-x series behaviour: gamma_lower ~ x^a / a
        const double x = 1e-8;
        CHECK(gamma_lower(a, x) == Approx(std::pow(x, a) / a).epsilon(1e-6));
    }
}

TEST_CASE("normal helpers", "[special]") {
    CHECK(normal_cdf(0.0) == Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == Approx(0.975).epsilon(1e-10));
    CHECK(normal_abs_moment(2.0) == Approx(1.0).epsilon(1e-12));
    CHECK(normal_abs_moment(3.0) == Approx(1.5957691216057308).epsilon(1e-12));
    CHECK(normal_abs_moment(4.0) == Approx(3.0).epsilon(1e-12));
}
