#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "taperflow/innovations.hpp"
#include "taperflow/quadrature.hpp"
#include "taperflow/rng.hpp"
#include "taperflow/stats.hpp"

using namespace taperflow;
using Catch::Approx;

TEST_CASE("pareto cdf", "[innovations]") {
    CHECK(pareto_cdf(pareto_spec(1.0), 2.0) == Approx(0.5));
    CHECK(pareto_cdf(pareto_spec(2.0), 1.0) == Approx(0.0));
    CHECK(pareto_cdf(pareto_spec(0.5), 16.0) == Approx(0.75));
    CHECK_THROWS_AS(pareto_cdf(pareto_spec(1.0), 0.5), domain_error);
    CHECK_THROWS_AS(pareto_spec(-1.0), domain_error);
}

TEST_CASE("tapered pareto density", "[innovations]") {
    tapered_pareto_spec spec(2.0, 2.0);
    CHECK(tapered_pareto_pdf(spec, 1.5) == Approx(2.0 * std::pow(1.5, -3.0)).epsilon(1e-12));
    CHECK(tapered_pareto_pdf(spec, 2.0) == Approx(0.25).epsilon(1e-12));
    CHECK(tapered_pareto_pdf(spec, 0.5) == 0.0);
    CHECK_THROWS_AS(tapered_pareto_spec(2.0, 0.5), domain_error);

    // Density at b agrees with numeric differentiation of the CDF from above.
    const double h = 1e-6;
    const double num = (tapered_pareto_cdf(spec, 2.0 + h) - tapered_pareto_cdf(spec, 2.0)) / h;
    CHECK(num == Approx(0.25).epsilon(1e-5));

    // Normalisation over a parameter grid.
    for (double alpha : {0.8, 1.5, 2.0}) {
        for (double b : {1.0, 2.0, 10.0, 1000.0}) {
            tapered_pareto_spec s(alpha, b);
            quad_options opt;
            opt.rel_tol = 1e-12;
            double total = 0.0;
            if (b > 1.0) total += adaptive_integrate([&](double x) { return tapered_pareto_pdf(s, x); }, 1.0, b, opt);
            total += integrate_semi_infinite([&](double x) { return tapered_pareto_pdf(s, x); }, b, opt);
            CHECK(total == Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("sampler follows the analytic law", "[innovations]") {
    // b = 1: the variable is exactly 1 + Exp(1).
    {
        tapered_pareto_spec s(2.0, 1.0);
        xoshiro256pp rng(1234);
        std::vector<double> xs(200000);
        for (auto& x : xs) x = sample_tapered_pareto(s, rng);
        CHECK(compute_moments(xs).mean == Approx(2.0).margin(0.01));
    }
    // Determinism under a fixed stream.
    {
        tapered_pareto_spec s(1.5, 10.0);
        auto r1 = replication_stream(7, 0);
        auto r2 = replication_stream(7, 0);
        for (int i = 0; i < 100; ++i)
            CHECK(sample_tapered_pareto(s, r1) == sample_tapered_pareto(s, r2));
    }
    // Huge taper level: moments match the plain Pareto for r < alpha.
    {
        tapered_pareto_spec s(2.0, 1e6);
        xoshiro256pp rng(5);
        const std::size_t n = 400000;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += sample_tapered_pareto(s, rng);
        CHECK(sum / static_cast<double>(n) == Approx(2.0).margin(0.05));  // alpha/(alpha-1)
    }
    // KS against the analytic CDF over the parameter grid.
    for (double alpha : {0.8, 1.2, 1.5, 2.0}) {
        for (double b : {1.0, 2.0, 10.0, 1000.0}) {
            tapered_pareto_spec s(alpha, b);
            xoshiro256pp rng(static_cast<std::uint64_t>(alpha * 1000 + b));
            const std::size_t n = 100000;
            std::vector<double> xs(n);
            for (auto& x : xs) x = sample_tapered_pareto(s, rng);
            const double d = ks_distance(xs, [&](double x) { return tapered_pareto_cdf(s, x); });
            CHECK(d < ks_critical_value(n, 0.01));
        }
    }
}

TEST_CASE("zeta moments", "[innovations]") {
    CHECK(moment_zeta(tapered_pareto_spec(2.0, 2.0), 1.0) == Approx(1.75).epsilon(1e-12));
    CHECK(moment_zeta(tapered_pareto_spec(2.0, 1.0), 1.0) == Approx(2.0).epsilon(1e-12));
    CHECK(moment_zeta(tapered_pareto_spec(2.0, 2.0), 2.0) ==
          Approx(3.8862943611198906).epsilon(1e-12));

    // Analytic pieces against quadrature over the density, r in {0.5, 1, 2, 3}.
    for (double alpha : {1.2, 2.0}) {
        for (double b : {1.0, 2.0, 50.0}) {
            tapered_pareto_spec s(alpha, b);
            for (double r : {0.5, 1.0, 2.0, 3.0}) {
                quad_options opt;
                opt.rel_tol = 1e-12;
                auto f = [&](double x) { return std::pow(x, r) * tapered_pareto_pdf(s, x); };
                double q = 0.0;
                if (b > 1.0) q += adaptive_integrate(f, 1.0, b, opt);
                q += integrate_semi_infinite(f, b, opt);
                CHECK(moment_zeta(s, r) == Approx(q).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("centered absolute moments", "[innovations]") {
    CHECK(centered_abs_moment(tapered_pareto_spec(2.0, 2.0), 2.0) ==
          Approx(0.8237943611198906).epsilon(1e-9));
    CHECK(centered_abs_moment(tapered_pareto_spec(2.0, 1.0), 2.0) == Approx(1.0).epsilon(1e-10));

    // p = 2 equals the moment-based variance.
    for (double alpha : {1.2, 1.5}) {
        for (double b : {2.0, 100.0}) {
            tapered_pareto_spec s(alpha, b);
            CHECK(centered_abs_moment(s, 2.0) ==
                  Approx(tapered_pareto_variance(s)).epsilon(1e-9));
        }
    }

    // Growth ~ 2 b^{2-alpha}/(2-alpha) as b grows (alpha = 1.5): the Pareto
    // branch contributes alpha/(2-alpha) b^{2-alpha} and the exponential
    // overshoot branch contributes b^{2-alpha} at the same order.
    double prev_gap = 1e9;
    for (double b : {1e2, 1e3, 1e4}) {
        tapered_pareto_spec s(1.5, b);
        const double asymptotic = 2.0 * std::pow(b, 0.5) / 0.5;
        const double ratio = centered_abs_moment(s, 2.0) / asymptotic;
        const double gap = std::abs(ratio - 1.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.05);
}

TEST_CASE("lyapunov moment ratio", "[innovations]") {
    // b = 1: E|R-1|^3 / Var(R)^{3/2} = 12/e - 2.
    CHECK(moment_ratio(tapered_pareto_spec(2.0, 1.0), 1.0) ==
          Approx(2.4145532940573079).epsilon(1e-9));

    // Hard-tapering bound: ratio / n^{gamma alpha delta / 2} stays bounded and
    // settles (alpha = 1.2, b = n^{1/2}, delta = 1).
    double prev = 1e18;
    for (double n : {1e2, 1e4, 1e6}) {
        tapered_pareto_spec s(1.2, std::sqrt(n));
        const double scaled = moment_ratio(s, 1.0) / std::pow(n, 0.5 * 1.2 * 1.0 / 2.0);
        CHECK(scaled < prev * 1.02);
        prev = scaled;
    }
    CHECK(prev > 0.0);
}

TEST_CASE("innovation models center and standardize", "[innovations]") {
    // Centering: 1e6 samples within 4 sd / 1e3 of zero.
    {
        const auto model = innovation_model::tapered_pareto(1.5, 0.4);
        resolved_innovation inn(model, 100000);
        xoshiro256pp rng(2024);
        const std::size_t n = 1000000;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = inn.draw(rng);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / static_cast<double>(n);
        const double sd = std::sqrt(sumsq / static_cast<double>(n) - mean * mean);
        CHECK(std::abs(mean) < 4.0 * sd / 1000.0);
        // Sampled variance against the analytic sigma^2.
        CHECK(sumsq / static_cast<double>(n) == Approx(inn.sigma2()).epsilon(0.05));
    }
    // Unit-variance variants.
    for (auto kind : {innovation_kind::gaussian, innovation_kind::standardized_uniform,
                      innovation_kind::standardized_exponential, innovation_kind::two_point}) {
        innovation_model m;
        m.kind = kind;
        resolved_innovation inn(m, 100);
        xoshiro256pp rng(55);
        std::vector<double> xs(100000);
        for (auto& x : xs) x = inn.draw(rng);
        const auto mom = compute_moments(xs);
        CHECK(std::abs(mom.mean) < 0.02);
        CHECK(mom.variance == Approx(1.0).margin(0.02));
    }
    // Scope guards.
    CHECK_THROWS_AS(innovation_model::tapered_pareto(2.5, 0.3), domain_error);
    CHECK_THROWS_AS(innovation_model::tapered_pareto(1.5, -0.1), domain_error);
}
