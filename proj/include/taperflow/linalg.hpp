#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "taperflow/errors.hpp"

namespace taperflow {

// Rank-revealing pivoted Cholesky of a symmetric PSD matrix (row-major).
// Stops when the largest remaining diagonal falls under rank_tol; flags
// indefiniteness when a remaining diagonal dips below -neg_tol.
struct pivoted_cholesky_result {
    std::size_t n = 0;
    std::size_t rank = 0;
    std::vector<double> l;       // n x rank, row-major, rows in permuted order
    std::vector<std::size_t> perm;  // row i of l corresponds to original index perm[i]
    bool indefinite = false;
    double min_remaining_diag = 0.0;

    double entry(std::size_t i, std::size_t k) const { return l[i * rank + k]; }
};

inline pivoted_cholesky_result pivoted_cholesky(std::vector<double> a, std::size_t n,
                                                double rank_tol, double neg_tol) {
    pivoted_cholesky_result out;
    out.n = n;
    out.perm.resize(n);
    std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
    std::vector<double> l(n * n, 0.0);
    std::size_t rank = n;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (a[i * n + i] > a[best * n + best]) best = i;
        if (best != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[best * n + j]);
            for (std::size_t i = 0; i < n; ++i) std::swap(a[i * n + k], a[i * n + best]);
            for (std::size_t j = 0; j < n; ++j) std::swap(l[k * n + j], l[best * n + j]);
            std::swap(out.perm[k], out.perm[best]);
        }
        const double pivot = a[k * n + k];
        if (pivot <= rank_tol) {
            rank = k;
            double mn = 0.0;
            for (std::size_t i = k; i < n; ++i) mn = std::min(mn, a[i * n + i]);
            out.min_remaining_diag = mn;
            out.indefinite = (mn < -neg_tol);
            break;
        }
        const double root = std::sqrt(pivot);
        l[k * n + k] = root;
        for (std::size_t i = k + 1; i < n; ++i) l[i * n + k] = a[i * n + k] / root;
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j <= i; ++j) {
                a[i * n + j] -= l[i * n + k] * l[j * n + k];
                a[j * n + i] = a[i * n + j];
            }
    }
    out.rank = rank;
    out.l.resize(n * rank);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < rank; ++k) out.l[i * rank + k] = l[i * n + k];
    return out;
}

// Plain (unpivoted) Cholesky; returns empty vector on failure.
inline std::vector<double> plain_cholesky(std::vector<double> a, std::size_t n) {
    std::vector<double> l(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double d = a[k * n + k];
        for (std::size_t j = 0; j < k; ++j) d -= l[k * n + j] * l[k * n + j];
        if (!(d > 0.0)) return {};
        l[k * n + k] = std::sqrt(d);
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = a[i * n + k];
            for (std::size_t j = 0; j < k; ++j) s -= l[i * n + j] * l[k * n + j];
            l[i * n + k] = s / l[k * n + k];
        }
    }
    return l;
}

}  // namespace taperflow
