#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "taperflow/errors.hpp"

namespace taperflow {

namespace detail {

// (y + w)^e - y^e without cancellation (y >= 0, w > 0).
inline double power_diff_shift(double y, double w, double e) {
    if (y == 0.0) return std::pow(w, e);
    return std::pow(y, e) * std::expm1(e * std::log1p(w / y));
}

// z^e - y^e for 0 <= y <= z.
inline double power_diff_to(double y, double z, double e) {
    if (y == 0.0) return std::pow(z, e);
    return -std::pow(y, e) * std::expm1(e * std::log(z / y));
}

}  // namespace detail

// Riemann zeta for real s > 0, s != 1 (analytic continuation on (0,1)).
// Direct sum to N plus Euler-Maclaurin tail correction; absolute error well
// below 1e-13 over the range used here (0.5 < s <= 6).
inline double riemann_zeta(double s) {
    if (!(s > 0.0)) throw domain_error("riemann_zeta: requires s > 0");
    if (std::abs(s - 1.0) < 1e-9) throw domain_error("riemann_zeta: pole at s = 1");
    constexpr int n = 64;
    double sum = 0.0;
    for (int k = 1; k < n; ++k) sum += std::pow(static_cast<double>(k), -s);
    const double ns = std::pow(static_cast<double>(n), -s);
    // Tail sum_{k>=N} k^-s by Euler-Maclaurin.
    double tail = static_cast<double>(n) * ns / (s - 1.0) + 0.5 * ns;
    tail += s * ns / static_cast<double>(n) / 12.0;
    tail -= s * (s + 1.0) * (s + 2.0) * ns / std::pow(static_cast<double>(n), 3.0) / 720.0;
    tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * ns /
            std::pow(static_cast<double>(n), 5.0) / 30240.0;
    return sum + tail;
}

// Partial sum H(v) = sum_{k=1}^{v} k^-s, exact compensated loop.
inline double harmonic_partial(double s, std::int64_t v) {
    double sum = 0.0;
    double comp = 0.0;
    for (std::int64_t k = 1; k <= v; ++k) {
        const double x = std::pow(static_cast<double>(k), -s);
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Smooth continuation of the partial sum H(v) = sum_{k<=v} k^-s to real
// arguments, via zeta minus the Euler-Maclaurin tail. Agrees with the exact
// integer sum to ~1e-15 relative for y >= 1e4; used by the segment summers
// where coefficient ranges reach 1e9. s == 0 denotes the flat filter
// (H(y) = y exactly, any y).
class harmonic_continuation {
  public:
    explicit harmonic_continuation(double s) : s_(s), zeta_(s == 0.0 ? 0.0 : riemann_zeta(s)) {}

    double operator()(double y) const {
        if (s_ == 0.0) return y;
        const double ys = std::pow(y, -s_);
        double tail = y * ys / (s_ - 1.0) - 0.5 * ys;
        tail += s_ * ys / y / 12.0;
        tail -= s_ * (s_ + 1.0) * (s_ + 2.0) * ys / (y * y * y) / 720.0;
        tail += s_ * (s_ + 1.0) * (s_ + 2.0) * (s_ + 3.0) * (s_ + 4.0) * ys / std::pow(y, 5.0) / 30240.0;
        return zeta_ - tail;
    }

    // H(y + w) - H(y), cancellation-free: the zeta constant drops out and
    // each tail term is a stable power difference. Essential where the
    // window difference is many orders below H itself (SRD deep ranges).
    double diff(double y, double w) const {
        if (s_ == 0.0) return w;
        const double s = s_;
        double d = -detail::power_diff_shift(y, w, 1.0 - s) / (s - 1.0);
        d += 0.5 * detail::power_diff_shift(y, w, -s);
        d -= s * detail::power_diff_shift(y, w, -s - 1.0) / 12.0;
        d += s * (s + 1.0) * (s + 2.0) * detail::power_diff_shift(y, w, -s - 3.0) / 720.0;
        d -= s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) *
             detail::power_diff_shift(y, w, -s - 5.0) / 30240.0;
        return d;
    }

    double exponent() const { return s_; }
    double zeta() const { return zeta_; }

  private:
    double s_;
    double zeta_;
};

// e^x * Gamma(a, x) for a > 0, x >= 0. The scaled form never materialises
// e^x, so there is no overflow for large tapering levels. Series branch for
// x < a+1 (x is small there, e^x is harmless), Lentz continued fraction
// otherwise.
inline double egamma_upper_scaled(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw domain_error("egamma_upper_scaled: a > 0, x >= 0 required");
    if (x == 0.0) return std::tgamma(a);
    if (x < a + 1.0) {
        // gamma_lower(a,x) series, then e^x*(Gamma(a) - lower).
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < 500; ++k) {
            term *= x / (a + static_cast<double>(k));
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        const double lower_scaled = std::pow(x, a) * sum;  // e^x * gamma_lower = x^a * sum
        return std::exp(x) * std::tgamma(a) - lower_scaled;
    }
    // Continued fraction: Gamma(a,x) = e^-x x^a / (x+1-a - 1(1-a)/(x+3-a - ...)).
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 2000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::pow(x, a) * h;
}

namespace detail {

// e^x * gamma_lower(a, x) = x^a sum_k x^k / (a (a+1) ... (a+k)); accurate for
// x < a + 1.
inline double egamma_lower_scaled_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= x / (a + static_cast<double>(k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::pow(x, a) * sum;
}

}  // namespace detail

inline double gamma_lower(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw domain_error("gamma_lower: a > 0, x >= 0 required");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::exp(-x) * detail::egamma_lower_scaled_series(a, x);
    return std::tgamma(a) - std::exp(-x) * egamma_upper_scaled(a, x);
}

inline double gamma_upper(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw domain_error("gamma_upper: a > 0, x >= 0 required");
    if (x < a + 1.0) return std::tgamma(a) - gamma_lower(a, x);
    return std::exp(-x) * egamma_upper_scaled(a, x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2_v<double> / 2.0); }

// E|N(0,1)|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
inline double normal_abs_moment(double p) {
    if (!(p >= 0.0)) throw domain_error("normal_abs_moment: p >= 0 required");
    return std::exp2(0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(std::numbers::pi_v<double>);
}

}  // namespace taperflow
