#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "taperflow/errors.hpp"
#include "taperflow/filters.hpp"
#include "taperflow/quadrature.hpp"
#include "taperflow/special.hpp"

namespace taperflow {

namespace detail {

// Shared memo for the quadrature-backed constants. Keyed by (id, a, b) on
// the exact double bits; the cache is immutable once written.
inline double memoized(int id, double a, double b, const std::function<double()>& compute) {
    using key_t = std::tuple<int, double, double>;
    static std::map<key_t, double> cache;
    static std::mutex mutex;
    const key_t key{id, a, b};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = compute();
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, value);
    return value;
}

inline void require_beta_open(double beta) {
    if (!(beta > 0.5 && beta < 1.5) || beta == 1.0)
        throw domain_error("limit constant: beta in (1/2,3/2)\\{1} required");
}

}  // namespace detail

// I(z) = int_0^{z-1} (y(1+y))^{1-beta} dy. Pochhammer series on 1 < z < 2,
// adaptive quadrature beyond; the two agree to 1e-9 on the overlap. beta = 1
// is regular here (the integrand is constant).
inline double i_series(double z, double beta) {
    if (!(beta > 0.0 && beta < 2.0)) throw domain_error("i_series: beta in (0,2) required");
    if (z < 1.0) throw domain_error("i_series: z >= 1 required");
    const double zm1 = z - 1.0;
    if (zm1 == 0.0) return 0.0;
    if (z < 2.0) {
        // sum_k (beta-1)_k / (2-beta+k) * (-(z-1))^k / k!
        double u = 1.0;  // (beta-1)_k (-(z-1))^k / k!
        double sum = 1.0 / (2.0 - beta);
        for (int k = 1; k < 100000; ++k) {
            u *= (beta - 1.0 + static_cast<double>(k - 1)) * (-zm1) / static_cast<double>(k);
            const double term = u / (2.0 - beta + static_cast<double>(k));
            sum += term;
            if (std::abs(term) < 1e-12 * std::max(1.0, std::abs(sum)) && k > 4) break;
        }
        return std::pow(zm1, 2.0 - beta) * sum;
    }
    auto f = [&](double y) { return std::pow(y * (1.0 + y), 1.0 - beta); };
    quad_options opt;
    opt.rel_tol = 1e-11;
    return adaptive_integrate(f, 0.0, zm1, opt);
}

// --- the constants of Proposition 1 / Proposition 3 -------------------------
//
// Inner integrals are reduced to closed power forms first; what remains is a
// single quadrature per constant, evaluated in cancellation-safe form.
// z = c/t throughout.

namespace detail {

// C1 = int_0^inf (int_0^1 (x+y)^-b dx)^2 dy.
inline double c1_value(double beta) {
    require_beta_open(beta);
    return memoized(1, beta, 0.0, [&] {
        const double s = 1.0 - beta;
        auto g = [&](double y) {
            const double d = power_diff_shift(y, 1.0, s) / s;
            return d * d;
        };
        quad_options opt;
        opt.rel_tol = 1e-11;
        opt.max_cells = 60000;
        return adaptive_integrate(g, 0.0, 1.0, opt) + integrate_semi_infinite(g, 1.0, opt);
    });
}

// C6 = int_0^1 (int_0^{1-y} x^-b dx)^2 dy = 1/((1-b)^2 (3-2b)); the same
// closed form continues C15 (inner tail integral) for beta > 1.
inline double c6_closed(double beta) {
    return 1.0 / ((1.0 - beta) * (1.0 - beta) * (3.0 - 2.0 * beta));
}

// C4 = int_0^{z-1} (int_0^1 (x+y)^-b dx)^2 dy, z >= 1.
inline double c4_value(double z, double beta) {
    require_beta_open(beta);
    if (!(z >= 1.0)) throw domain_error("C4: z = c/t >= 1 required");
    if (z == 1.0) return 0.0;
    return memoized(4, z, beta, [&] {
        const double s = 1.0 - beta;
        auto g = [&](double y) {
            const double d = power_diff_shift(y, 1.0, s) / s;
            return d * d;
        };
        quad_options opt;
        opt.rel_tol = 1e-11;
        opt.max_cells = 60000;
        if (z - 1.0 <= 1.0) return adaptive_integrate(g, 0.0, z - 1.0, opt);
        return adaptive_integrate(g, 0.0, 1.0, opt) + adaptive_integrate(g, 1.0, z - 1.0, opt);
    });
}

// C5 = int_{z-1}^{z} (int_0^{z-y} (x+y)^-b dx)^2 dy, z >= 1.
inline double c5_value(double z, double beta) {
    require_beta_open(beta);
    if (!(z >= 1.0)) throw domain_error("C5: z = c/t >= 1 required");
    return memoized(5, z, beta, [&] {
        const double s = 1.0 - beta;
        auto g = [&](double y) {
            const double d = power_diff_to(y, z, s) / s;
            return d * d;
        };
        quad_options opt;
        opt.rel_tol = 1e-11;
        opt.max_cells = 60000;
        return adaptive_integrate(g, z - 1.0, z, opt);
    });
}

// C8 = (1-z) (z^{1-b}/(1-b))^2 and C18 its ND analogue; identical values.
inline double c8_closed(double z, double beta) {
    const double inner = std::pow(z, 1.0 - beta) / (1.0 - beta);
    return (1.0 - z) * inner * inner;
}

// C9 = int_{1-z}^1 (int_0^{1-y} x^-b dx)^2 dy = z^{3-2b}/((1-b)^2(3-2b)); C17 likewise.
inline double c9_closed(double z, double beta) {
    return std::pow(z, 3.0 - 2.0 * beta) * c6_closed(beta);
}

// C10 = int_0^z (int_0^{z-y} (x+y)^-b dx)^2 dy = 2 z^{3-2b}/((2-b)(3-2b)).
inline double c10_closed(double z, double beta) {
    return 2.0 * std::pow(z, 3.0 - 2.0 * beta) / ((2.0 - beta) * (3.0 - 2.0 * beta));
}

inline double c7_value(double z, double beta) {
    return c4_value(z, beta) + c5_value(z, beta) + c6_closed(beta);
}

inline double c11_value(double z, double beta) {
    return c8_closed(z, beta) + c9_closed(z, beta) + c10_closed(z, beta);
}

// C12: the j=7 variance profile as a function of z = c/t.
inline double c12_value(double z, double beta) {
    if (!(beta > 0.5 && beta < 1.0)) throw domain_error("C12: LRD requires 1/2 < beta < 1");
    return (z >= 1.0) ? c7_value(z, beta) : c11_value(z, beta);
}

inline double c14_value(double z, double beta) {
    return c4_value(z, beta) + c5_value(z, beta) + c6_closed(beta);  // C15 == C6 closed form
}

inline double c16_value(double z, double beta) {
    return c10_closed(z, beta) + c9_closed(z, beta) + c8_closed(z, beta);
}

// C19: the j=9 profile; same continuation as C12 but on the ND beta range.
inline double c19_value(double z, double beta) {
    if (!(beta > 1.0 && beta < 1.5)) throw domain_error("C19: ND requires 1 < beta < 3/2");
    return (z >= 1.0) ? c14_value(z, beta) : c16_value(z, beta);
}

inline double c21_value(double c) {
    if (!(c > 0.0)) throw domain_error("C21: c > 0 required");
    return (c <= 1.0) ? c * c - c * c * c / 3.0 : c - 1.0 / 3.0;
}

inline double c22_value(double t, double c) {
    if (!(t > 0.0 && t <= c)) throw domain_error("C22: 0 < t <= c required");
    return c * (1.0 - t / (3.0 * c)) / c21_value(c);
}

inline double c23_value(double t, double c) {
    if (!(c > 0.0 && c < t)) throw domain_error("C23: 0 < c < t required");
    return c * c * (1.0 - c / (3.0 * t)) / c21_value(c);
}

}  // namespace detail

// Evaluate constant C_id at (t, beta, c); ids follow the proof of
// Proposition 1 (C1..C20) and Proposition 3 (C21..C23). z = c/t.
inline double limit_constant(int id, double t, double beta, double c) {
    if (!(t > 0.0)) throw domain_error("limit_constant: t > 0 required");
    if (id >= 4 && id <= 20 && !(c > 0.0)) throw domain_error("limit_constant: c > 0 required");
    const double z = c / t;
    switch (id) {
        case 1: return detail::c1_value(beta);
        case 2:
            if (!(beta > 0.5 && beta < 1.0)) throw domain_error("C2: 1/2 < beta < 1 required");
            return detail::c6_closed(beta) + detail::c1_value(beta);
        case 3:
            if (!(beta > 1.0 && beta < 1.5)) throw domain_error("C3: 1 < beta < 3/2 required");
            return detail::c6_closed(beta) + detail::c1_value(beta);
        case 4: return detail::c4_value(z, beta);
        case 5: return detail::c5_value(z, beta);
        case 6:
            if (!(beta > 0.5 && beta < 1.0)) throw domain_error("C6: 1/2 < beta < 1 required");
            return detail::c6_closed(beta);
        case 7: return detail::c7_value(z, beta);
        case 8:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C8: z = c/t in (0,1] required");
            return detail::c8_closed(z, beta);
        case 9:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C9: z = c/t in (0,1] required");
            return detail::c9_closed(z, beta);
        case 10:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C10: z = c/t in (0,1] required");
            return detail::c10_closed(z, beta);
        case 11:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C11: z = c/t in (0,1] required");
            return detail::c11_value(z, beta);
        case 12: return detail::c12_value(z, beta);
        case 13: return detail::c12_value(z, beta) / detail::c12_value(c, beta);
        case 14: return detail::c14_value(z, beta);
        case 15:
            if (!(beta > 1.0 && beta < 1.5)) throw domain_error("C15: 1 < beta < 3/2 required");
            return detail::c6_closed(beta);
        case 16:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C16: z = c/t in (0,1] required");
            return detail::c16_value(z, beta);
        case 17:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C17: z = c/t in (0,1] required");
            return detail::c9_closed(z, beta);
        case 18:
            if (!(z > 0.0 && z <= 1.0)) throw domain_error("C18: z = c/t in (0,1] required");
            return detail::c8_closed(z, beta);
        case 19: return detail::c19_value(z, beta);
        case 20: return detail::c19_value(z, beta) / detail::c19_value(c, beta);
        case 21: return detail::c21_value(c);
        case 22: return detail::c22_value(t, c);
        case 23: return detail::c23_value(t, c);
        default: throw domain_error("limit_constant: id must be in 1..23");
    }
}

struct hurst_info {
    bool piecewise = false;  // j = 12 has no single exponent
    double value = 0.0;
};

inline hurst_info hurst(case_id c, double beta) {
    validate_case_beta(c, beta);
    switch (c.j) {
        case 1: case 2: case 3: case 5: case 8: case 10:
            return {false, 0.5};
        case 4: case 6: case 7: case 9:
            return {false, 1.5 - beta};
        case 11:
            return {false, 1.0};
        case 12:
            return {true, 0.0};
    }
    throw config_error("hurst: bad case");
}

// Limit variance function W^(j); W(1) = 1 in every case.
inline double w_function(case_id c, double beta, double gamma1, double cc, double t) {
    if (!(t > 0.0)) throw domain_error("w_function: t > 0 required");
    validate_case_beta(c, beta);
    (void)gamma1;
    switch (c.j) {
        case 1: case 2: case 3: case 5: case 8: case 10:
            return t;
        case 4: case 6:
            return std::pow(t, 3.0 - 2.0 * beta);
        case 7:
            return std::pow(t, 3.0 - 2.0 * beta) * limit_constant(13, t, beta, cc);
        case 9:
            return std::pow(t, 3.0 - 2.0 * beta) * limit_constant(20, t, beta, cc);
        case 11:
            return t * t;
        case 12:
            return (t <= cc) ? t * t * limit_constant(22, t, 0.0, cc)
                             : t * limit_constant(23, t, 0.0, cc);
    }
    throw config_error("w_function: bad case");
}

// A_n^2 per Proposition 1 (j = 1..9) and Proposition 3 (j = 10..12).
// filter_sum is required for the SRD cases j = 2, 5, 8.
inline double normalizer_sq(case_id c, double beta, double gamma1, double cc,
                            std::optional<double> filter_sum, std::int64_t n) {
    if (n < 1) throw domain_error("normalizer_sq: n >= 1 required");
    validate_case_beta(c, beta);
    const double nd = static_cast<double>(n);
    switch (c.j) {
        case 1: case 3: {
            const double s = 1.0 - beta;
            return std::pow(nd, 1.0 + 2.0 * gamma1 * s) / (s * s);
        }
        case 2: case 5: case 8: {
            if (!filter_sum) throw config_error("normalizer_sq: filter_sum required for j=2,5,8");
            return (*filter_sum) * (*filter_sum) * nd;
        }
        case 4:
            return limit_constant(2, 1.0, beta, 1.0) * std::pow(nd, 3.0 - 2.0 * beta);
        case 6:
            return limit_constant(3, 1.0, beta, 1.0) * std::pow(nd, 3.0 - 2.0 * beta);
        case 7:
            return detail::c12_value(cc, beta) * std::pow(nd, 3.0 - 2.0 * beta);
        case 9:
            return detail::c19_value(cc, beta) * std::pow(nd, 3.0 - 2.0 * beta);
        case 10:
            return std::pow(nd, 2.0 * gamma1 + 1.0);
        case 11:
            return std::pow(nd, 2.0 + gamma1);
        case 12:
            return detail::c21_value(cc) * nd * nd * nd;
    }
    throw config_error("normalizer_sq: bad case");
}

// The limit law of case j: variance function, covariance kernel, normalizer.
class limit_law {
  public:
    limit_law(case_id c, double beta, double gamma1, double cc)
        : case_(c), beta_(beta), gamma1_(gamma1), c_(cc), hurst_(taperflow::hurst(c, beta)) {
        if (c.dependence() == dependence_class::srd)
            filter_sum_ = 1.0 + riemann_zeta(beta);
        if (c.taper() != classify_filter_taper(gamma1))
            throw config_error("limit_law: gamma1 inconsistent with case j=" + std::to_string(c.j));
    }

    case_id kase() const { return case_; }
    double beta() const { return beta_; }
    double gamma1() const { return gamma1_; }
    double c() const { return c_; }
    hurst_info hurst() const { return hurst_; }
    std::optional<double> filter_sum() const { return filter_sum_; }

    double w(double t) const { return w_function(case_, beta_, gamma1_, c_, t); }

    // 1/2 (W(t) + W(s) - W(|t-s|)), with W(0) = 0. The 1/2 makes the kernel
    // self-consistent at s = t (Cov = Var), matching the FBM kernel.
    double covariance(double s, double t) const {
        if (!(s > 0.0 && t > 0.0)) throw domain_error("covariance: s,t > 0 required");
        const double gap = std::abs(t - s);
        const double wgap = (gap == 0.0) ? 0.0 : w(gap);
        return 0.5 * (w(t) + w(s) - wgap);
    }

    double normalizer_sq(std::int64_t n) const {
        return taperflow::normalizer_sq(case_, beta_, gamma1_, c_, filter_sum_, n);
    }

  private:
    case_id case_;
    double beta_;
    double gamma1_;
    double c_;
    hurst_info hurst_;
    std::optional<double> filter_sum_;
};

// Local log-log slope of a variance function; the empirical scaling exponent
// near t0.
template <class W>
inline double scaling_probe(const W& w, double t0, double factor) {
    if (!(t0 > 0.0) || !(factor > 1.0)) throw domain_error("scaling_probe: t0 > 0, factor > 1");
    const double w0 = w(t0);
    const double w1 = w(t0 * factor);
    if (!(w0 > 0.0) || !(w1 > 0.0)) throw domain_error("scaling_probe: W must be positive");
    return std::log(w1 / w0) / std::log(factor);
}

// |C4(z) - C1| residuals along a z grid; each must sit under the dominated
// tail bound 3 (z-1)^{1-2b} / (2b-1).
inline std::vector<double> c4_limit_check(double beta, std::span<const double> z_grid) {
    const double c1 = detail::c1_value(beta);
    std::vector<double> residuals;
    residuals.reserve(z_grid.size());
    for (double z : z_grid) residuals.push_back(std::abs(detail::c4_value(z, beta) - c1));
    return residuals;
}

}  // namespace taperflow
