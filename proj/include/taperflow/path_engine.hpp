#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "taperflow/coefficients.hpp"
#include "taperflow/errors.hpp"
#include "taperflow/fft.hpp"
#include "taperflow/innovations.hpp"
#include "taperflow/rng.hpp"

namespace taperflow {

struct path_config {
    std::vector<double> filter;  // tapered coefficients, filter[0] = a0
    innovation_model innovation;
    std::int64_t n = 0;
    std::vector<double> t_grid;  // strictly increasing, > 0
    std::uint64_t seed = 0;
    std::size_t fft_threshold = 4096;       // direct convolution below
    std::size_t capacity = std::size_t{1} << 26;  // innovation cap per path

    void validate() const {
        if (filter.empty()) throw config_error("path_config: empty filter");
        if (n < 1) throw config_error("path_config: n >= 1 required");
        if (t_grid.empty()) throw config_error("path_config: empty t grid");
        double prev = 0.0;
        for (double t : t_grid) {
            if (!(t > prev)) throw config_error("path_config: t grid must be strictly increasing and > 0");
            prev = t;
        }
    }
};

// X_k = sum_{j=0}^{lambda} a_j xi_{k-j}, k = 1..[n t_max]. Draws exactly
// M + lambda innovations xi_{1-lambda}..xi_M in ascending index order from
// the given stream.
template <class Rng>
inline std::vector<double> generate_path(const path_config& config, Rng& rng) {
    config.validate();
    const std::int64_t m = floor_nt(config.n, config.t_grid.back());
    const std::int64_t lambda = static_cast<std::int64_t>(config.filter.size()) - 1;
    if (m < 1) throw config_error("generate_path: empty window ([n t_max] = 0)");
    const std::size_t draws = static_cast<std::size_t>(m + lambda);
    if (draws > config.capacity)
        throw capacity_error("generate_path: " + std::to_string(draws) +
                             " innovations exceed the configured cap");
    const resolved_innovation innovation(config.innovation, config.n);
    std::vector<double> xi(draws);
    for (auto& x : xi) x = innovation.draw(rng);

    std::vector<double> path(static_cast<std::size_t>(m));
    if (draws > config.fft_threshold) {
        const auto conv = convolve_fft(xi, config.filter);
        for (std::int64_t k = 1; k <= m; ++k)
            path[static_cast<std::size_t>(k - 1)] = conv[static_cast<std::size_t>(lambda + k - 1)];
    } else {
        // Direct: X_k = sum_j a_j xi[(k - j) + lambda - 1].
        for (std::int64_t k = 1; k <= m; ++k) {
            double acc = 0.0;
            for (std::int64_t j = 0; j <= lambda; ++j) {
                const std::int64_t idx = k - j + lambda - 1;
                acc += config.filter[static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(idx)];
            }
            path[static_cast<std::size_t>(k - 1)] = acc;
        }
    }
    return path;
}

inline std::vector<double> generate_path(const path_config& config) {
    auto rng = replication_stream(config.seed, 0);
    return generate_path(config, rng);
}

// S_n(t) = sum_{k<=[nt]} X_k for each grid point, one cumulative pass.
// An empty window ([nt] = 0) yields S = 0.
inline std::vector<double> partial_sums(std::span<const double> path, std::int64_t n,
                                        std::span<const double> t_grid) {
    std::vector<double> out(t_grid.size(), 0.0);
    if (t_grid.empty()) return out;
    const std::int64_t m_max = floor_nt(n, t_grid.back());
    if (static_cast<std::size_t>(m_max) > path.size())
        throw domain_error("partial_sums: path shorter than [n t_max]");
    double running = 0.0;
    std::size_t g = 0;
    std::vector<std::int64_t> ms(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) ms[i] = floor_nt(n, t_grid[i]);
    for (std::int64_t k = 0; k <= m_max; ++k) {
        while (g < ms.size() && ms[g] == k) out[g++] = running;
        if (k < m_max) running += path[static_cast<std::size_t>(k)];
    }
    return out;
}

inline std::vector<double> z_values(std::span<const double> sums, double a2) {
    if (!(a2 > 0.0)) throw domain_error("z_values: A_n^2 > 0 required");
    const double inv = 1.0 / std::sqrt(a2);
    std::vector<double> out(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) out[i] = sums[i] * inv;
    return out;
}

}  // namespace taperflow
