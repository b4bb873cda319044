#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "taperflow/fft.hpp"
#include "taperflow/path_engine.hpp"
#include "taperflow/rng.hpp"

using namespace taperflow;
using Catch::Approx;

TEST_CASE("lambda zero reproduces the innovations", "[path_engine]") {
    path_config cfg;
    cfg.filter = {1.0};
    cfg.n = 64;
    cfg.t_grid = {1.0};
    cfg.seed = 11;
    auto r1 = replication_stream(11, 0);
    const auto path = generate_path(cfg, r1);
    auto r2 = replication_stream(11, 0);
    resolved_innovation inn(cfg.innovation, cfg.n);
    for (double x : path) CHECK(x == inn.draw(r2));
}

TEST_CASE("hand convolution with a two-tap filter", "[path_engine]") {
    path_config cfg;
    cfg.filter = {1.0, 1.0};
    cfg.n = 16;
    cfg.t_grid = {1.0};
    auto r1 = replication_stream(3, 0);
    const auto path = generate_path(cfg, r1);
    auto r2 = replication_stream(3, 0);
    resolved_innovation inn(cfg.innovation, cfg.n);
    std::vector<double> xi(17);
    for (auto& x : xi) x = inn.draw(r2);  // xi[k] is the innovation at index k - 0 (1-lambda = 0)
    for (std::int64_t k = 1; k <= 16; ++k)
        CHECK(path[static_cast<std::size_t>(k - 1)] ==
              Approx(xi[static_cast<std::size_t>(k)] + xi[static_cast<std::size_t>(k - 1)]).epsilon(1e-15));
}

TEST_CASE("fft convolution agrees with the direct path", "[path_engine]") {
    xoshiro256pp rng(777);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t m = 16 + rng() % 2033;
        const std::size_t lam = rng() % 64;
        std::vector<double> x(m + lam), h(lam + 1);
        for (auto& v : x) v = 2.0 * uniform01(rng) - 1.0;
        for (auto& v : h) v = 2.0 * uniform01(rng) - 1.0;
        const auto a = convolve_fft(x, h);
        const auto b = convolve_direct(x, h);
        REQUIRE(a.size() == b.size());
        double scale = 0.0;
        for (double v : b) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a[i] - b[i]) <= 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("fft and direct generate_path agree", "[path_engine]") {
    path_config direct_cfg;
    direct_cfg.filter.resize(33);
    for (std::size_t i = 0; i < direct_cfg.filter.size(); ++i)
        direct_cfg.filter[i] = 1.0 / (1.0 + static_cast<double>(i));
    direct_cfg.n = 900;
    direct_cfg.t_grid = {1.0};
    direct_cfg.fft_threshold = 1u << 30;  // force direct
    auto fft_cfg = direct_cfg;
    fft_cfg.fft_threshold = 1;  // force FFT

    auto r1 = replication_stream(5, 1);
    auto r2 = replication_stream(5, 1);
    const auto a = generate_path(direct_cfg, r1);
    const auto b = generate_path(fft_cfg, r2);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == Approx(b[i]).margin(1e-9 * (1.0 + std::abs(a[i]))));
}

TEST_CASE("determinism and linearity", "[path_engine]") {
    path_config cfg;
    cfg.filter = {1.0, 0.5, 0.25, 0.125};
    cfg.n = 256;
    cfg.t_grid = {1.0};
    cfg.seed = 123;
    const auto p1 = generate_path(cfg);
    const auto p2 = generate_path(cfg);
    CHECK(p1 == p2);  // bitwise

    auto scaled_cfg = cfg;
    for (auto& a : scaled_cfg.filter) a *= 3.0;
    const auto p3 = generate_path(scaled_cfg);
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(p3[i] == Approx(3.0 * p1[i]).epsilon(1e-12));
}

TEST_CASE("capacity guard", "[path_engine]") {
    path_config cfg;
    cfg.filter = {1.0};
    cfg.n = 100000;
    cfg.t_grid = {1.0};
    cfg.capacity = 1024;
    CHECK_THROWS_AS(generate_path(cfg), capacity_error);
}

TEST_CASE("partial sums", "[path_engine]") {
    std::vector<double> ones(10, 1.0);
    const std::vector<double> tg{0.5, 1.0};
    const auto s = partial_sums(ones, 10, tg);
    CHECK(s[0] == 5.0);
    CHECK(s[1] == 10.0);

    // Empty window: [nt] = 0 -> S = 0.
    const std::vector<double> tiny{0.05};
    CHECK(partial_sums(ones, 10, tiny)[0] == 0.0);

    // Random path: exact match with direct per-point summation.
    xoshiro256pp rng(9);
    std::vector<double> path(500);
    for (auto& x : path) x = 2.0 * uniform01(rng) - 1.0;
    const std::vector<double> grid{0.2, 0.64, 1.0};
    const auto sums = partial_sums(path, 500, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double direct = 0.0;
        const auto m = floor_nt(500, grid[g]);
        for (std::int64_t k = 0; k < m; ++k) direct += path[static_cast<std::size_t>(k)];
        CHECK(sums[g] == direct);  // same summation order, bitwise
    }
}

TEST_CASE("z values", "[path_engine]") {
    const std::vector<double> s{2.0};
    CHECK(z_values(s, 4.0)[0] == Approx(1.0));
    CHECK(z_values(s, 1.0)[0] == Approx(2.0));
    const std::vector<double> many{1.0, -3.0, 7.0};
    const auto a = z_values(many, 4.0);
    const auto b = z_values(many, 1.0);
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(a[i] == Approx(b[i] / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(z_values(s, 0.0), domain_error);
    CHECK_THROWS_AS(z_values(s, -1.0), domain_error);
}
