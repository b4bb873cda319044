#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "taperflow/montecarlo.hpp"
#include "taperflow/path_engine.hpp"

using namespace taperflow;
using Catch::Approx;

namespace {

experiment_config base_config(int j, double beta, double gamma1, double c = 1.0) {
    experiment_config cfg;
    cfg.kase = case_id(j);
    cfg.beta = beta;
    cfg.gamma1 = gamma1;
    cfg.c = c;
    cfg.n_list = {1000};
    cfg.t_grid = {0.5, 1.0};
    cfg.replications = 200;
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("normality diagnostics", "[montecarlo]") {
    xoshiro256pp rng(42);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = normal_draw(rng);
    const auto d = normality_diagnostics(xs);
    CHECK(d.ks < 0.02);
    CHECK(std::abs(d.skew) < 0.1);
    CHECK(std::abs(d.exkurt) < 0.2);

    std::vector<double> two;
    for (int i = 0; i < 200; ++i) {
        two.push_back(1.0);
        two.push_back(-1.0);
    }
    const auto d2 = normality_diagnostics(two);
    CHECK(d2.skew == Approx(0.0).margin(1e-12));
    CHECK(d2.exkurt == Approx(-2.0).epsilon(1e-12));

    CHECK_THROWS_AS(normality_diagnostics(std::vector<double>(500, 3.14)), numerical_error);
    CHECK_THROWS_AS(normality_diagnostics(std::vector<double>(50, 0.0)), domain_error);
}

TEST_CASE("config validation", "[montecarlo]") {
    auto cfg = base_config(2, 2.0, 0.5);
    cfg.replications = 0;
    CHECK_THROWS_AS(run_experiment(cfg), config_error);

    auto soft = base_config(2, 2.0, 0.5);
    soft.innovation = innovation_model::tapered_pareto(1.5, 0.8);  // gamma > 1/alpha
    CHECK_THROWS_AS(soft.validate(), config_error);

    auto bad_beta = base_config(4, 0.75, 1.5);
    bad_beta.beta = 2.0;
    CHECK_THROWS_AS(bad_beta.validate(), config_error);

    auto bad_gamma = base_config(2, 2.0, 1.5);  // j=2 is strong tapering
    CHECK_THROWS_AS(bad_gamma.validate(), config_error);
}

TEST_CASE("replication kernel equals the convolution route", "[montecarlo]") {
    const filter_spec spec(dependence_class::srd, 2.0, 0.5);
    const std::int64_t n = 500;
    const std::vector<double> t_grid{0.5, 1.0};
    path_config pcfg;
    pcfg.filter = build_filter(spec, n);
    pcfg.n = n;
    pcfg.t_grid = t_grid;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        auto r1 = replication_stream(77, rep);
        auto r2 = replication_stream(77, rep);
        const auto s_kernel = replication_partial_sums(spec, innovation_model{}, n, t_grid, r1);
        const auto path = generate_path(pcfg, r2);
        const auto s_path = partial_sums(path, n, t_grid);
        for (std::size_t g = 0; g < t_grid.size(); ++g)
            CHECK(s_kernel[g] == Approx(s_path[g]).margin(1e-9 * (1.0 + std::abs(s_path[g]))));
    }
}

TEST_CASE("experiment reports are deterministic", "[montecarlo]") {
    auto cfg = base_config(2, 2.0, 0.5);
    cfg.threads = 2;
    const auto r1 = run_experiment(cfg);
    auto cfg_serial = cfg;
    cfg_serial.threads = 1;
    const auto r2 = run_experiment(cfg_serial);
    REQUIRE(r1.variance.size() == r2.variance.size());
    for (std::size_t i = 0; i < r1.variance.size(); ++i) {
        CHECK(r1.variance[i].var_z_emp == r2.variance[i].var_z_emp);  // bitwise
        CHECK(r1.variance[i].var_exact_s == r2.variance[i].var_exact_s);
    }
    REQUIRE(!r1.normality.empty());
    CHECK(r1.normality[0].ks == r2.normality[0].ks);
}

TEST_CASE("cross-oracle: empirical variance matches coefficients", "[montecarlo]") {
    // Full simulation window.
    {
        auto cfg = base_config(2, 3.0, 0.5);
        cfg.n_list = {4000};
        cfg.replications = 2000;
        const auto rep = run_experiment(cfg);
        for (const auto& v : rep.variance) {
            CHECK(std::abs(v.var_z_emp - v.var_ratio_exact) < 4.0 * v.var_z_se);
        }
        // Covariance entry sits within 4 SE of the limit kernel for n large.
        REQUIRE(!rep.covariance.empty());
    }
    // Forced tail aggregation (window cap below lambda + m): the injected
    // block must reproduce the exact total variance.
    {
        auto cfg = base_config(4, 0.75, 1.5);
        cfg.n_list = {300};  // lambda = 300^1.5 ~ 5196
        cfg.replications = 4000;
        cfg.sim_window_cap = 2048;
        const auto rep = run_experiment(cfg);
        for (const auto& v : rep.variance)
            CHECK(std::abs(v.var_z_emp - v.var_ratio_exact) < 4.0 * v.var_z_se);
    }
    // Tapered-Pareto innovations (hard regime), full window.
    {
        auto cfg = base_config(2, 2.0, 0.5);
        cfg.innovation = innovation_model::tapered_pareto(1.5, 0.4);
        cfg.n_list = {2000};
        cfg.replications = 2000;
        const auto rep = run_experiment(cfg);
        for (const auto& v : rep.variance)
            CHECK(std::abs(v.var_z_emp - v.var_ratio_exact) < 4.0 * v.var_z_se);
    }
    // Non-Gaussian innovations cannot use tail aggregation.
    {
        auto cfg = base_config(4, 0.75, 1.5);
        cfg.innovation = innovation_model::tapered_pareto(1.5, 0.4);
        cfg.n_list = {300};
        cfg.sim_window_cap = 2048;
        CHECK_THROWS_AS(run_experiment(cfg), capacity_error);
    }
}

TEST_CASE("convergence table", "[montecarlo]") {
    auto cfg = base_config(2, 2.0, 0.5);
    cfg.n_list = {1000, 10000, 100000};
    cfg.t_grid = {1.0};
    const auto rows = convergence_table(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].abs_err <= rows[1].abs_err);
    CHECK(rows[1].abs_err <= rows[0].abs_err);
    CHECK(rows[2].abs_err <= 0.1);
    for (const auto& r : rows) CHECK_FALSE(r.non_monotone);

    // Flat filter j=10: ratio within 0.02 at n = 1e5.
    auto flat = base_config(10, 0.0, 0.5);
    flat.n_list = {100000};
    flat.t_grid = {1.0};
    const auto frows = convergence_table(flat);
    CHECK(frows[0].abs_err <= 0.02);

    // Empty window flag.
    auto tiny = base_config(2, 2.0, 0.5);
    tiny.n_list = {100};
    tiny.t_grid = {1e-4, 1.0};
    const auto trows = convergence_table(tiny);
    CHECK(trows[0].empty_window);
    CHECK_FALSE(trows[1].empty_window);
}

TEST_CASE("lyapunov table matches the profile route", "[montecarlo]") {
    auto cfg = base_config(2, 2.0, 0.5);
    cfg.n_list = {500, 2000};
    const auto rows = lyapunov_table(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].value < rows[0].value);

    const filter_spec spec(dependence_class::srd, 2.0, 0.5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto filt = build_filter(spec, cfg.n_list[i]);
        const auto p = d_coefficients(filt, cfg.n_list[i], 1.0);
        const double expect = lyapunov_fraction(p, p, rows[i].delta, rows[i].moment_ratio);
        CHECK(rows[i].value == Approx(expect).epsilon(1e-9));
    }
}
