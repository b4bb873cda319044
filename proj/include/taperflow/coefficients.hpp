#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "taperflow/errors.hpp"
#include "taperflow/filters.hpp"
#include "taperflow/quadrature.hpp"
#include "taperflow/special.hpp"
#include "taperflow/summation.hpp"

namespace taperflow {

// m = [nt] with a snap guard against n*t landing just under an integer.
inline std::int64_t floor_nt(std::int64_t n, double t) {
    if (!(t > 0.0)) throw domain_error("floor_nt: t > 0 required");
    const double x = static_cast<double>(n) * t;
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(x));
}

// ---------------------------------------------------------------------------
// Materialised coefficient profile d_{n,j,t} over the support j in [1-lambda, m].

struct coefficient_profile {
    std::int64_t n = 0;
    double t = 0.0;
    std::int64_t m = 0;       // [nt]
    std::int64_t lambda = 0;  // filter length - 1
    std::vector<double> d;    // index k <-> j = k + (1 - lambda)
    double sum_sq = 0.0;
    double v1 = 0.0;  // sum over j <= 0
    double v2 = 0.0;  // sum over j >= 1

    std::int64_t j_min() const { return 1 - lambda; }

    double at(std::int64_t j) const {
        const std::int64_t k = j - j_min();
        if (k < 0 || k >= static_cast<std::int64_t>(d.size())) return 0.0;
        return d[static_cast<std::size_t>(k)];
    }
};

// All d values in O(m + lambda) through prefix sums of the filter.
inline coefficient_profile d_coefficients(std::span<const double> filter, std::int64_t n, double t) {
    if (filter.empty()) throw domain_error("d_coefficients: empty filter");
    const std::int64_t m = floor_nt(n, t);
    if (m < 1) throw domain_error("d_coefficients: empty window ([nt] = 0)");
    const std::int64_t lambda = static_cast<std::int64_t>(filter.size()) - 1;

    // prefix[v] = sum_{u=0}^{v-1} a_u, so sums over [lo, hi] are prefix[hi+1]-prefix[lo].
    std::vector<double> prefix(filter.size() + 1, 0.0);
    {
        kahan_sum acc;
        for (std::size_t u = 0; u < filter.size(); ++u) {
            acc += filter[u];
            prefix[u + 1] = acc.value();
        }
    }
    auto window_sum = [&](std::int64_t lo, std::int64_t hi) {
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min(hi, lambda);
        if (lo > hi) return 0.0;
        return prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
    };

    coefficient_profile p;
    p.n = n;
    p.t = t;
    p.m = m;
    p.lambda = lambda;
    p.d.resize(static_cast<std::size_t>(m + lambda));
    kahan_sum v1_acc, v2_acc;
    for (std::int64_t j = p.j_min(); j <= m; ++j) {
        const double dj = (j <= 0) ? window_sum(1 - j, m - j) : window_sum(0, m - j);
        p.d[static_cast<std::size_t>(j - p.j_min())] = dj;
        if (j <= 0) v1_acc += dj * dj;
        else v2_acc += dj * dj;
    }
    p.v1 = v1_acc.value();
    p.v2 = v2_acc.value();
    p.sum_sq = p.v1 + p.v2;
    return p;
}

inline double exact_variance(const coefficient_profile& p, double sigma2) {
    if (!(sigma2 >= 0.0)) throw domain_error("exact_variance: sigma2 >= 0 required");
    return sigma2 * p.sum_sq;
}

inline std::pair<double, double> v1_v2(const coefficient_profile& p) { return {p.v1, p.v2}; }

struct window_maxima {
    double i1;  // max_k |sum_{i=1}^m a_{i+k}|
    double i2;  // max_{0<k<=m} |sum_{i=k}^m a_{i-k}|
};

inline window_maxima max_window_sums(std::span<const double> filter, std::int64_t n, double t) {
    if (filter.empty()) throw domain_error("max_window_sums: empty filter");
    const std::int64_t m = floor_nt(n, t);
    if (m < 1) throw domain_error("max_window_sums: empty window");
    const std::int64_t lambda = static_cast<std::int64_t>(filter.size()) - 1;
    std::vector<double> prefix(filter.size() + 1, 0.0);
    for (std::size_t u = 0; u < filter.size(); ++u) prefix[u + 1] = prefix[u] + filter[u];
    auto window_sum = [&](std::int64_t lo, std::int64_t hi) {
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min(hi, lambda);
        if (lo > hi) return 0.0;
        return prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
    };
    window_maxima out{0.0, 0.0};
    for (std::int64_t k = 0; k <= lambda; ++k)
        out.i1 = std::max(out.i1, std::abs(window_sum(k + 1, k + m)));
    for (std::int64_t k = 1; k <= m; ++k)
        out.i2 = std::max(out.i2, std::abs(window_sum(0, m - k)));
    return out;
}

// delta(j) from the proof of Proposition 5: unrestricted for the LRD/SRD
// cases, min(1, (3-2b)/(2(b-1))) for the ND cases. (The proposition's
// statement carries the looser bound (3-2b)/(b-1); the proof's choice is
// used here.)
inline double delta_for_case(case_id c, double beta) {
    validate_case_beta(c, beta);
    if (c.dependence() == dependence_class::nd)
        return std::min(1.0, (3.0 - 2.0 * beta) / (2.0 * (beta - 1.0)));
    return 1.0;
}

// L(2+delta, n, t): coefficient part times the innovation moment ratio.
inline double lyapunov_fraction(const coefficient_profile& profile_t,
                                const coefficient_profile& profile_1, double delta,
                                double moment_ratio) {
    if (!(delta > 0.0 && delta <= 1.0)) throw domain_error("lyapunov_fraction: delta in (0,1]");
    if (profile_t.n != profile_1.n) throw config_error("lyapunov_fraction: profiles must share n");
    if (!(profile_1.sum_sq > 0.0))
        throw config_error("lyapunov_fraction: degenerate configuration (zero variance at t=1)");
    const double p = 2.0 + delta;
    kahan_sum num;
    for (double dj : profile_t.d) num += std::pow(std::abs(dj), p);
    return num.value() / std::pow(profile_1.sum_sq, 0.5 * p) * moment_ratio;
}

// ---------------------------------------------------------------------------
// Analytic engine for power-law / flat filters.
//
// The acceptance sizes reach lambda(n) = 1e9 coefficients; profiles cannot be
// materialised there. d-value sums split into at most four index segments on
// which the summand is smooth, each evaluated by a direct compensated loop
// when short and by Euler-Maclaurin (integral + endpoint corrections, with
// the partial sums H continued smoothly via zeta) when long.

struct analytic_filter {
    double beta = 1.0;  // 0 denotes the flat filter (a_u = 1)
    double a0 = 1.0;
    std::int64_t lambda = 0;

    static analytic_filter from(const filter_spec& spec, std::int64_t n) {
        analytic_filter f;
        f.beta = (spec.dependence == dependence_class::flat) ? 0.0 : spec.beta;
        f.a0 = filter_a0(spec);
        f.lambda = lambda_of(spec, n);
        return f;
    }

    double coef(std::int64_t u) const {
        if (u < 0 || u > lambda) return 0.0;
        if (u == 0) return a0;
        return beta == 0.0 ? 1.0 : std::pow(static_cast<double>(u), -beta);
    }
};

struct d_stats {
    std::int64_t m = 0;
    double sum_sq = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double sum_abs_p = 0.0;  // only when a p-exponent was requested
    double max_abs_d = 0.0;
};

namespace detail {

inline constexpr std::int64_t seg_direct_cap = 400000;  // loop below, EM above
inline constexpr std::int64_t seg_edge = 20000;         // exact terms at each end

// Exact H(v) = sum_{u<=v} u^-beta; loops when small, zeta-continued beyond.
inline double h_exact(const harmonic_continuation& hc, std::int64_t v) {
    if (v <= 0) return 0.0;
    if (hc.exponent() == 0.0) return static_cast<double>(v);
    if (v > 50000) return hc(static_cast<double>(v));
    double s = 0.0;
    for (std::int64_t k = 1; k <= v; ++k) s += std::pow(static_cast<double>(k), -hc.exponent());
    return s;
}

// Accumulates sum_sq and (optionally) sum |.|^p of a smooth segment family.
struct seg_sums {
    kahan_sum sq;
    kahan_sum abs_p;
};

// Direct segment loop: values produced by a generator g(i) (monotone index).
template <class G>
inline void direct_segment(G&& g, std::int64_t lo, std::int64_t hi, double p, seg_sums& out) {
    for (std::int64_t i = lo; i <= hi; ++i) {
        const double d = g(i);
        out.sq += d * d;
        if (p > 0.0) out.abs_p += std::pow(std::abs(d), p);
    }
}

// Euler-Maclaurin segment: f must be smooth on [lo-1, hi+1] (real argument).
template <class F>
inline void em_segment(F&& f, std::int64_t lo, std::int64_t hi, double p, seg_sums& out) {
    quad_options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 0.0;
    auto f2 = [&](double y) { const double v = f(y); return v * v; };
    out.sq += euler_maclaurin_sum(f2, static_cast<double>(lo), static_cast<double>(hi), opt);
    if (p > 0.0) {
        auto fp = [&](double y) { return std::pow(std::abs(f(y)), p); };
        out.abs_p += euler_maclaurin_sum(fp, static_cast<double>(lo), static_cast<double>(hi), opt);
    }
}

}  // namespace detail

// Sums of d_{n,j,t} powers over the full support without materialising the
// profile. p = 0 skips the |d|^p accumulation.
inline d_stats analytic_d_stats(const analytic_filter& f, std::int64_t n, double t, double p = 0.0) {
    const std::int64_t m = floor_nt(n, t);
    if (m < 1) throw domain_error("analytic_d_stats: empty window ([nt] = 0)");
    const std::int64_t lambda = f.lambda;
    const harmonic_continuation hc(f.beta);
    const double h_lambda = detail::h_exact(hc, lambda);

    // V2: sum_{k=0}^{m-1} (a0 + H(min(k, lambda)))^2.
    detail::seg_sums v2;
    {
        const std::int64_t len = std::min(m, lambda + 1);  // k in [0, len-1] unclipped
        if (len <= detail::seg_direct_cap) {
            double h = 0.0;
            for (std::int64_t k = 0; k < len; ++k) {
                if (k > 0) h += f.coef(k);
                const double d = f.a0 + h;
                v2.sq += d * d;
                if (p > 0.0) v2.abs_p += std::pow(std::abs(d), p);
            }
        } else {
            const std::int64_t e = detail::seg_edge;
            double h = 0.0;
            for (std::int64_t k = 0; k < e; ++k) {
                if (k > 0) h += f.coef(k);
                const double d = f.a0 + h;
                v2.sq += d * d;
                if (p > 0.0) v2.abs_p += std::pow(std::abs(d), p);
            }
            auto mid = [&](double y) { return f.a0 + hc(y); };
            detail::em_segment(mid, e, len - 1 - e, p, v2);
            double h2 = detail::h_exact(hc, len - e - 1);
            for (std::int64_t k = len - e; k < len; ++k) {
                h2 += f.coef(k);
                const double d = f.a0 + h2;
                v2.sq += d * d;
                if (p > 0.0) v2.abs_p += std::pow(std::abs(d), p);
            }
        }
        if (m - 1 > lambda) {
            const double d = f.a0 + h_lambda;
            const double cnt = static_cast<double>(m - 1 - lambda);
            v2.sq += cnt * d * d;
            if (p > 0.0) v2.abs_p += cnt * std::pow(std::abs(d), p);
        }
    }

    // V1: sum_{i=0}^{lambda-1} (H(min(i+m, lambda)) - H(i))^2, split at the
    // clipping boundary i = lambda - m.
    detail::seg_sums v1;
    if (lambda >= 1) {
        const std::int64_t b = lambda - m;
        if (b >= 0) {
            // Unclipped segment i in [0, b].
            if (b + 1 <= detail::seg_direct_cap) {
                double hi_run = detail::h_exact(hc, m);
                double lo_run = 0.0;
                for (std::int64_t i = 0; i <= b; ++i) {
                    if (i > 0) {
                        hi_run += f.coef(i + m);
                        lo_run += f.coef(i);
                    }
                    const double d = hi_run - lo_run;
                    v1.sq += d * d;
                    if (p > 0.0) v1.abs_p += std::pow(d, p);
                }
            } else {
                const std::int64_t e = detail::seg_edge;
                double hi_run = detail::h_exact(hc, m);
                double lo_run = 0.0;
                for (std::int64_t i = 0; i < e; ++i) {
                    if (i > 0) {
                        hi_run += f.coef(i + m);
                        lo_run += f.coef(i);
                    }
                    const double d = hi_run - lo_run;
                    v1.sq += d * d;
                    if (p > 0.0) v1.abs_p += std::pow(d, p);
                }
                auto mid = [&](double y) { return hc(y + static_cast<double>(m)) - hc(y); };
                detail::em_segment(mid, e, b - e, p, v1);
                double hi2 = detail::h_exact(hc, b - e + m);
                double lo2 = detail::h_exact(hc, b - e);
                for (std::int64_t i = b - e + 1; i <= b; ++i) {
                    hi2 += f.coef(i + m);
                    lo2 += f.coef(i);
                    const double d = hi2 - lo2;
                    v1.sq += d * d;
                    if (p > 0.0) v1.abs_p += std::pow(d, p);
                }
            }
        }
        // Clipped segment i in [max(0, b+1), lambda-1]: d = H(lambda) - H(i).
        const std::int64_t lo = std::max<std::int64_t>(0, b + 1);
        const std::int64_t hi = lambda - 1;
        if (lo <= hi) {
            if (hi - lo + 1 <= detail::seg_direct_cap) {
                double h_run = detail::h_exact(hc, lo);
                for (std::int64_t i = lo; i <= hi; ++i) {
                    if (i > lo) h_run += f.coef(i);
                    const double d = h_lambda - h_run;
                    v1.sq += d * d;
                    if (p > 0.0) v1.abs_p += std::pow(std::abs(d), p);
                }
            } else {
                const std::int64_t e = detail::seg_edge;
                double h_run = detail::h_exact(hc, lo);
                for (std::int64_t i = lo; i < lo + e; ++i) {
                    if (i > lo) h_run += f.coef(i);
                    const double d = h_lambda - h_run;
                    v1.sq += d * d;
                    if (p > 0.0) v1.abs_p += std::pow(std::abs(d), p);
                }
                auto mid = [&](double y) { return h_lambda - hc(y); };
                detail::em_segment(mid, lo + e, hi - e, p, v1);
                double h2 = detail::h_exact(hc, hi - e);
                for (std::int64_t i = hi - e + 1; i <= hi; ++i) {
                    h2 += f.coef(i);
                    const double d = h_lambda - h2;
                    v1.sq += d * d;
                    if (p > 0.0) v1.abs_p += std::pow(std::abs(d), p);
                }
            }
        }
    }

    d_stats out;
    out.m = m;
    out.v1 = v1.sq.value();
    out.v2 = v2.sq.value();
    out.sum_sq = out.v1 + out.v2;
    out.sum_abs_p = v1.abs_p.value() + v2.abs_p.value();
    // d is monotone within segments; the extremes sit at segment endpoints.
    const double cand1 = detail::h_exact(hc, std::min(m, lambda));  // i = 0 in V1
    const double cand2 = std::abs(f.a0);
    const double cand3 = std::abs(f.a0 + detail::h_exact(hc, std::min(m - 1, lambda)));
    out.max_abs_d = std::max({cand1, cand2, cand3});
    return out;
}

// Gram matrix sum_{w=w0}^{lambda-1} g_t(w) g_s(w) of the pre-sample weights
// g_t(w) = H(min(w+m_t, lambda)) - H(w) for each window size m_t. Feeds the
// exact Gaussian tail aggregation of the Monte Carlo kernel.
inline std::vector<double> analytic_d_gram_tail(const analytic_filter& f,
                                                std::span<const std::int64_t> ms, std::int64_t w0) {
    const std::size_t nt = ms.size();
    std::vector<double> gram(nt * nt, 0.0);
    if (f.lambda < 1 || w0 > f.lambda - 1) return gram;
    const harmonic_continuation hc(f.beta);
    const double h_lambda = detail::h_exact(hc, f.lambda);

    // Segment boundaries where any g_t switches to its clipped form.
    std::vector<std::int64_t> cuts{w0, f.lambda};
    for (auto m : ms) {
        const std::int64_t b = f.lambda - m + 1;  // first clipped w
        if (b > w0 && b < f.lambda) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<kahan_sum> acc(nt * nt);
    auto g_smooth = [&](std::size_t ti, double y) {
        const double top = std::min(y + static_cast<double>(ms[ti]), static_cast<double>(f.lambda));
        const double upper = (top >= static_cast<double>(f.lambda)) ? h_lambda : hc(top);
        return upper - hc(y);
    };
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const std::int64_t lo = cuts[s];
        const std::int64_t hi = cuts[s + 1] - 1;
        if (lo > hi) continue;
        const std::int64_t len = hi - lo + 1;
        if (len <= detail::seg_direct_cap) {
            std::vector<double> run_hi(nt), g(nt);
            double run_lo = detail::h_exact(hc, lo);
            for (std::size_t ti = 0; ti < nt; ++ti)
                run_hi[ti] = detail::h_exact(hc, std::min(lo + ms[ti], f.lambda));
            for (std::int64_t w = lo; w <= hi; ++w) {
                if (w > lo) {
                    run_lo += f.coef(w);
                    for (std::size_t ti = 0; ti < nt; ++ti) run_hi[ti] += f.coef(w + ms[ti]);
                }
                for (std::size_t ti = 0; ti < nt; ++ti) g[ti] = run_hi[ti] - run_lo;
                for (std::size_t a = 0; a < nt; ++a)
                    for (std::size_t b = a; b < nt; ++b) acc[a * nt + b] += g[a] * g[b];
            }
        } else {
            quad_options opt;
            opt.rel_tol = 1e-11;
            opt.abs_tol = 0.0;
            for (std::size_t a = 0; a < nt; ++a)
                for (std::size_t b = a; b < nt; ++b) {
                    auto fpair = [&](double y) { return g_smooth(a, y) * g_smooth(b, y); };
                    acc[a * nt + b] +=
                        euler_maclaurin_sum(fpair, static_cast<double>(lo), static_cast<double>(hi), opt);
                }
        }
    }
    for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t b = a; b < nt; ++b) {
            gram[a * nt + b] = acc[a * nt + b].value();
            gram[b * nt + a] = gram[a * nt + b];
        }
    return gram;
}

}  // namespace taperflow
