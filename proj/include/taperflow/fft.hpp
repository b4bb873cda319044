#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "taperflow/errors.hpp"

namespace taperflow {

// Iterative radix-2 complex FFT, in place. n must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw domain_error("fft_inplace: size must be a power of two");
    // Bit reversal.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi_v<double> / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Full linear convolution, FFT-based; result length |x| + |h| - 1.
inline std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> h) {
    if (x.empty() || h.empty()) throw domain_error("convolve_fft: empty input");
    const std::size_t out_len = x.size() + h.size() - 1;
    const std::size_t n = next_pow2(out_len);
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < x.size(); ++i) fa[i] = x[i];
    for (std::size_t i = 0; i < h.size(); ++i) fb[i] = h[i];
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_inplace(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

// Direct linear convolution; the small-size reference path.
inline std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h) {
    if (x.empty() || h.empty()) throw domain_error("convolve_direct: empty input");
    std::vector<double> out(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += x[i] * h[j];
    return out;
}

}  // namespace taperflow
