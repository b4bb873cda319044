#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "taperflow/errors.hpp"
#include "taperflow/special.hpp"
#include "taperflow/summation.hpp"

namespace taperflow {

struct sample_moments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased (n-1)
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

// Two-pass central moments; compensated sums keep this exact enough for the
// 4-standard-error acceptance bands.
inline sample_moments compute_moments(std::span<const double> xs) {
    sample_moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    kahan_sum s;
    for (double x : xs) s += x;
    m.mean = s.value() / static_cast<double>(xs.size());
    kahan_sum m2, m3, m4;
    for (double x : xs) {
        const double d = x - m.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(xs.size());
    const double mu2 = m2.value() / n;
    if (xs.size() > 1) m.variance = m2.value() / (n - 1.0);
    if (mu2 > 0.0) {
        m.skewness = (m3.value() / n) / std::pow(mu2, 1.5);
        m.excess_kurtosis = (m4.value() / n) / (mu2 * mu2) - 3.0;
    }
    return m;
}

// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
inline double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw domain_error("ks_distance: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double fi = cdf(sorted[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(hi - fi, fi - lo));
    }
    return d;
}

inline double ks_distance_normal(std::span<const double> samples) {
    return ks_distance(samples, [](double x) { return normal_cdf(x); });
}

// Asymptotic one-sample KS critical value at tail probability `alpha`
// (c(alpha) / sqrt(n), c(0.01) ~ 1.628).
inline double ks_critical_value(std::size_t n, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c / std::sqrt(static_cast<double>(n));
}

}  // namespace taperflow
