#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "taperflow/coefficients.hpp"
#include "taperflow/rng.hpp"
#include "taperflow/special.hpp"

using namespace taperflow;
using Catch::Approx;

namespace {

// Independent oracle: expand S_n(t) = sum_k sum_u a_u xi_{k-u} term by term
// and collect the weight of every innovation index.
std::map<std::int64_t, double> brute_force_weights(std::span<const double> filt, std::int64_t n,
                                                   double t) {
    const auto m = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t + 1e-9));
    std::map<std::int64_t, double> w;
    for (std::int64_t k = 1; k <= m; ++k)
        for (std::int64_t u = 0; u < static_cast<std::int64_t>(filt.size()); ++u)
            w[k - u] += filt[static_cast<std::size_t>(u)];
    return w;
}

double brute_force_sum_sq(std::span<const double> filt, std::int64_t n, double t) {
    double s = 0.0;
    for (const auto& [j, d] : brute_force_weights(filt, n, t)) s += d * d;
    return s;
}

}  // namespace

TEST_CASE("d coefficients on the worked examples", "[coefficients]") {
    // filter [1, 1], n = 2, t = 1: S_2 = xi_0 + 2 xi_1 + xi_2.
    {
        const std::vector<double> filt{1.0, 1.0};
        const auto p = d_coefficients(filt, 2, 1.0);
        CHECK(p.j_min() == 0);
        CHECK(p.at(0) == 1.0);
        CHECK(p.at(1) == 2.0);
        CHECK(p.at(2) == 1.0);
        CHECK(p.sum_sq == Approx(6.0));
        const auto [v1, v2] = v1_v2(p);
        CHECK(v1 == Approx(1.0));
        CHECK(v2 == Approx(5.0));
    }
    // lambda = 0: the i.i.d. reduction.
    {
        const std::vector<double> filt{1.0};
        const auto p = d_coefficients(filt, 7, 1.0);
        for (std::int64_t j = 1; j <= 7; ++j) CHECK(p.at(j) == 1.0);
        CHECK(p.sum_sq == Approx(7.0));
        CHECK(v1_v2(p).first == 0.0);
        CHECK(exact_variance(p, 2.0) == Approx(14.0));
        CHECK(exact_variance(p, 0.0) == 0.0);
    }
    // flat filter, lambda = 2, n = 4: d = [1,2,3,3,2,1] over j = -1..4.
    {
        const std::vector<double> filt{1.0, 1.0, 1.0};
        const auto p = d_coefficients(filt, 4, 1.0);
        CHECK(p.j_min() == -1);
        const std::vector<double> expect{1.0, 2.0, 3.0, 3.0, 2.0, 1.0};
        for (std::int64_t j = -1; j <= 4; ++j)
            CHECK(p.at(j) == Approx(expect[static_cast<std::size_t>(j + 1)]));
        CHECK(p.sum_sq == Approx(28.0));
        const auto [v1, v2] = v1_v2(p);
        CHECK(v1 == Approx(5.0));
        CHECK(v2 == Approx(23.0));
    }
    CHECK_THROWS_AS(d_coefficients(std::vector<double>{1.0}, 10, 0.05), domain_error);
}

TEST_CASE("profile matches the brute-force expansion", "[coefficients]") {
    xoshiro256pp rng(31337);
    for (int rep = 0; rep < 100; ++rep) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 64);
        const std::int64_t lambda = static_cast<std::int64_t>(rng() % 17);
        const double t = 0.25 + 1.75 * uniform01(rng);
        if (floor_nt(n, t) < 1) continue;
        std::vector<double> filt(static_cast<std::size_t>(lambda + 1));
        for (auto& a : filt) a = 2.0 * uniform01(rng) - 1.0;
        const auto p = d_coefficients(filt, n, t);
        const auto w = brute_force_weights(filt, n, t);
        for (const auto& [j, d] : w) CHECK(p.at(j) == Approx(d).margin(1e-12));
        CHECK(p.sum_sq == Approx(brute_force_sum_sq(filt, n, t)).epsilon(1e-12));
        const auto [v1, v2] = v1_v2(p);
        CHECK(v1 + v2 == Approx(p.sum_sq).epsilon(1e-14));
    }
}

TEST_CASE("shift stationarity of window weights", "[coefficients]") {
    // The squared-weight sum of S over window [a+1, a+m] does not depend on a.
    xoshiro256pp rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const std::int64_t m = 3 + static_cast<std::int64_t>(rng() % 30);
        const std::int64_t lambda = static_cast<std::int64_t>(rng() % 9);
        std::vector<double> filt(static_cast<std::size_t>(lambda + 1));
        for (auto& a : filt) a = 2.0 * uniform01(rng) - 1.0;
        auto window_sum_sq = [&](std::int64_t a) {
            std::map<std::int64_t, double> w;
            for (std::int64_t k = a + 1; k <= a + m; ++k)
                for (std::int64_t u = 0; u <= lambda; ++u) w[k - u] += filt[static_cast<std::size_t>(u)];
            double s = 0.0;
            for (const auto& [j, d] : w) s += d * d;
            return s;
        };
        const double base = window_sum_sq(0);
        CHECK(window_sum_sq(5) == Approx(base).epsilon(1e-12));
        CHECK(window_sum_sq(1000) == Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("max window sums", "[coefficients]") {
    {
        const std::vector<double> filt{1.0};
        const auto w = max_window_sums(filt, 5, 1.0);
        CHECK(w.i1 == 0.0);
        CHECK(w.i2 == 1.0);
    }
    {
        const std::vector<double> filt{1.0, 1.0};
        const auto w = max_window_sums(filt, 2, 1.0);
        CHECK(w.i1 == Approx(1.0));
        CHECK(w.i2 == Approx(2.0));
    }
    // max(I1, I2) equals max_j |d| for random configurations.
    xoshiro256pp rng(4242);
    for (int rep = 0; rep < 50; ++rep) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 40);
        const std::int64_t lambda = static_cast<std::int64_t>(rng() % 9);
        std::vector<double> filt(static_cast<std::size_t>(lambda + 1));
        for (auto& a : filt) a = 2.0 * uniform01(rng) - 1.0;
        const auto w = max_window_sums(filt, n, 1.0);
        const auto p = d_coefficients(filt, n, 1.0);
        double dmax = 0.0;
        for (double d : p.d) dmax = std::max(dmax, std::abs(d));
        CHECK(std::max(w.i1, w.i2) == Approx(dmax).margin(1e-12));
    }
}

TEST_CASE("lyapunov fraction", "[coefficients]") {
    // iid closed form: L = rho n^{-1/2} at t = 1, delta = 1.
    const std::vector<double> filt{1.0};
    const std::int64_t n = 400;
    const auto p = d_coefficients(filt, n, 1.0);
    const double rho = 1.5957691216057308;
    CHECK(lyapunov_fraction(p, p, 1.0, rho) ==
          Approx(rho / std::sqrt(static_cast<double>(n))).epsilon(1e-12));
    CHECK(lyapunov_fraction(p, p, 1.0, 0.0) == 0.0);
    const auto zero = d_coefficients(std::vector<double>{0.0}, n, 1.0);
    CHECK_THROWS_AS(lyapunov_fraction(zero, zero, 1.0, 1.0), config_error);
}

TEST_CASE("delta for case", "[coefficients]") {
    CHECK(delta_for_case(case_id(3), 1.25) == Approx(1.0));
    CHECK(delta_for_case(case_id(6), 1.4) == Approx(0.25));
    CHECK(delta_for_case(case_id(1), 0.75) == Approx(1.0));
    CHECK(delta_for_case(case_id(8), 2.0) == Approx(1.0));
    CHECK_THROWS_AS(delta_for_case(case_id(3), 0.75), config_error);
}

TEST_CASE("analytic stats agree with materialised profiles", "[coefficients]") {
    struct probe {
        dependence_class dep;
        double beta;
        double gamma1;
        double c;
    };
    for (const auto& pr : {probe{dependence_class::lrd, 0.75, 0.5, 1.0},
                           probe{dependence_class::srd, 2.0, 0.5, 1.0},
                           probe{dependence_class::nd, 1.25, 0.5, 1.0},
                           probe{dependence_class::lrd, 0.6, 1.5, 1.0},
                           probe{dependence_class::srd, 1.5, 1.0, 0.5},
                           probe{dependence_class::flat, 0.0, 1.5, 1.0}}) {
        filter_spec spec(pr.dep, pr.beta, pr.gamma1, pr.c);
        for (std::int64_t n : {37LL, 200LL, 1024LL}) {
            for (double t : {0.5, 1.0, 2.0}) {
                const auto filt = build_filter(spec, n);
                if (floor_nt(n, t) < 1) continue;
                const auto p = d_coefficients(filt, n, t);
                const auto f = analytic_filter::from(spec, n);
                const auto s = analytic_d_stats(f, n, t, 3.0);
                CHECK(s.sum_sq == Approx(p.sum_sq).epsilon(1e-10));
                CHECK(s.v1 == Approx(p.v1).margin(1e-10 * (1.0 + p.sum_sq)));
                CHECK(s.v2 == Approx(p.v2).epsilon(1e-10));
                double abs3 = 0.0, dmax = 0.0;
                for (double d : p.d) {
                    abs3 += std::abs(d) * d * d;
                    dmax = std::max(dmax, std::abs(d));
                }
                CHECK(s.sum_abs_p == Approx(abs3).epsilon(1e-10));
                CHECK(s.max_abs_d == Approx(dmax).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("euler-maclaurin segments match direct streaming at scale", "[coefficients]") {
    // lambda large enough to trigger the EM middle, small enough to verify by
    // brute force.
    const analytic_filter f{0.75, -riemann_zeta(0.75), 3000000};
    const std::int64_t n = 100000;
    const auto s = analytic_d_stats(f, n, 1.0, 3.0);

    const std::int64_t m = n;
    const harmonic_continuation hc(0.75);
    // V2 direct.
    double v2 = 0.0, h = 0.0, sum3 = 0.0;
    for (std::int64_t k = 0; k < std::min(m, f.lambda + 1); ++k) {
        if (k > 0) h += std::pow(static_cast<double>(k), -0.75);
        const double d = f.a0 + h;
        v2 += d * d;
        sum3 += d * d * d;
    }
    // V1 direct.
    double v1 = 0.0;
    double hi_run = harmonic_partial(0.75, m), lo_run = 0.0;
    for (std::int64_t i = 0; i <= f.lambda - m; ++i) {
        if (i > 0) {
            hi_run += std::pow(static_cast<double>(i + m), -0.75);
            lo_run += std::pow(static_cast<double>(i), -0.75);
        }
        const double d = hi_run - lo_run;
        v1 += d * d;
        sum3 += d * d * d;
    }
    const double hl = hi_run;  // H(lambda) reached at the end of the sweep
    double h_run = lo_run;
    for (std::int64_t i = f.lambda - m + 1; i <= f.lambda - 1; ++i) {
        h_run += std::pow(static_cast<double>(i), -0.75);
        const double d = hl - h_run;
        v1 += d * d;
        sum3 += d * d * d;
    }
    CHECK(s.v1 == Approx(v1).epsilon(1e-9));
    CHECK(s.v2 == Approx(v2).epsilon(1e-9));
    CHECK(s.sum_abs_p == Approx(sum3).epsilon(1e-9));
}

TEST_CASE("gram tail matches direct products", "[coefficients]") {
    filter_spec spec(dependence_class::lrd, 0.75, 1.5);
    const std::int64_t n = 60;  // lambda = 464
    const auto f = analytic_filter::from(spec, n);
    const std::vector<std::int64_t> ms{30, 60};
    const std::int64_t w0 = 5;
    const auto gram = analytic_d_gram_tail(f, ms, w0);

    const auto filt = build_filter(spec, n);
    auto d_of = [&](std::int64_t m, std::int64_t w) {
        double s = 0.0;
        for (std::int64_t u = w + 1; u <= std::min(w + m, f.lambda); ++u)
            s += filt[static_cast<std::size_t>(u)];
        return s;
    };
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            double direct = 0.0;
            for (std::int64_t w = w0; w <= f.lambda - 1; ++w)
                direct += d_of(ms[a], w) * d_of(ms[b], w);
            CHECK(gram[a * 2 + b] == Approx(direct).epsilon(1e-9));
        }
}

TEST_CASE("gram tail euler-maclaurin branch at scale", "[coefficients]") {
    const analytic_filter f{0.75, 1.0, 1000000};
    const std::vector<std::int64_t> ms{10000, 30000};
    const std::int64_t w0 = 1000;
    const auto gram = analytic_d_gram_tail(f, ms, w0);

    auto pw = [](std::int64_t u) { return std::pow(static_cast<double>(u), -0.75); };
    double h_w = harmonic_partial(0.75, w0);
    std::array<double, 2> hi{harmonic_partial(0.75, w0 + ms[0]), harmonic_partial(0.75, w0 + ms[1])};
    std::array<std::array<double, 2>, 2> acc{};
    for (std::int64_t w = w0; w <= f.lambda - 1; ++w) {
        const std::array<double, 2> g{hi[0] - h_w, hi[1] - h_w};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) acc[a][b] += g[a] * g[b];
        h_w += pw(w + 1);
        for (int k = 0; k < 2; ++k)
            if (w + 1 + ms[k] <= f.lambda) hi[k] += pw(w + 1 + ms[k]);
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(gram[a * 2 + b] == Approx(acc[a][b]).epsilon(1e-8));
}
