#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taperflow/errors.hpp"
#include "taperflow/special.hpp"

namespace taperflow {

enum class dependence_class { lrd, srd, nd, flat };
enum class filter_taper { strong, weak, moderate };
enum class innovation_taper { hard, soft, intermediate };
enum class a0_mode { one, balanced };

inline const char* to_string(dependence_class d) {
    switch (d) {
        case dependence_class::lrd: return "LRD";
        case dependence_class::srd: return "SRD";
        case dependence_class::nd: return "ND";
        case dependence_class::flat: return "flat";
    }
    return "?";
}

inline const char* to_string(filter_taper t) {
    switch (t) {
        case filter_taper::strong: return "strong";
        case filter_taper::weak: return "weak";
        case filter_taper::moderate: return "moderate";
    }
    return "?";
}

// gamma1 < 1 / > 1 / == 1. Equality is exact on the double value; callers
// that mean "moderate" must pass gamma1 = 1 exactly.
inline filter_taper classify_filter_taper(double gamma1) {
    if (!(gamma1 > 0.0)) throw domain_error("classify_filter_taper: gamma1 > 0 required");
    if (gamma1 < 1.0) return filter_taper::strong;
    if (gamma1 > 1.0) return filter_taper::weak;
    return filter_taper::moderate;
}

// Innovation tapering regime for b(n) = n^gamma against Pareto tails with
// exponent alpha: hard iff gamma < 1/alpha. Only 0 < alpha < 2 is meaningful.
inline innovation_taper classify_innovation_taper(double gamma, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw domain_error("classify_innovation_taper: alpha in (0,2) required");
    if (!(gamma > 0.0)) throw domain_error("classify_innovation_taper: gamma > 0 required");
    const double boundary = 1.0 / alpha;
    if (gamma < boundary) return innovation_taper::hard;
    if (gamma > boundary) return innovation_taper::soft;
    return innovation_taper::intermediate;
}

// Case index j = 1..12: rows strong/weak/moderate, columns LRD/SRD/ND for
// j <= 9; j = 10,11,12 are the flat-filter (beta = 0) regimes.
struct case_id {
    int j;

    explicit case_id(int jj) : j(jj) {
        if (j < 1 || j > 12) throw config_error("case_id: j must be in 1..12");
    }

    static case_id of(filter_taper t, dependence_class d) {
        if (d == dependence_class::flat) {
            switch (t) {
                case filter_taper::strong: return case_id(10);
                case filter_taper::weak: return case_id(11);
                case filter_taper::moderate: return case_id(12);
            }
        }
        const int row = (t == filter_taper::strong) ? 0 : (t == filter_taper::weak) ? 1 : 2;
        const int col = (d == dependence_class::lrd) ? 1 : (d == dependence_class::srd) ? 2 : 3;
        return case_id(3 * row + col);
    }

    filter_taper taper() const {
        if (j >= 10) return j == 10 ? filter_taper::strong : j == 11 ? filter_taper::weak : filter_taper::moderate;
        const int row = (j - 1) / 3;
        return row == 0 ? filter_taper::strong : row == 1 ? filter_taper::weak : filter_taper::moderate;
    }

    dependence_class dependence() const {
        if (j >= 10) return dependence_class::flat;
        const int col = (j - 1) % 3;
        return col == 0 ? dependence_class::lrd : col == 1 ? dependence_class::srd : dependence_class::nd;
    }

    bool flat() const { return j >= 10; }
    bool operator==(const case_id&) const = default;
};

// Checks the (case, beta) ranges of Section 2: (i) 1/2<beta<1, (ii) beta>1,
// (iii) 1<beta<3/2; flat cases carry beta = 0.
inline void validate_case_beta(case_id c, double beta) {
    switch (c.dependence()) {
        case dependence_class::lrd:
            if (!(beta > 0.5 && beta < 1.0))
                throw config_error("case j=" + std::to_string(c.j) + " (LRD) requires 1/2 < beta < 1");
            return;
        case dependence_class::srd:
            if (!(beta > 1.0))
                throw config_error("case j=" + std::to_string(c.j) + " (SRD) requires beta > 1");
            return;
        case dependence_class::nd:
            if (!(beta > 1.0 && beta < 1.5))
                throw config_error("case j=" + std::to_string(c.j) + " (ND) requires 1 < beta < 3/2");
            return;
        case dependence_class::flat:
            if (beta != 0.0)
                throw config_error("case j=" + std::to_string(c.j) + " (flat) requires beta = 0");
            return;
    }
}

// Power-law filter a_i = i^-beta truncated at lambda(n) = c n^gamma1.
//
// a0 is not fixed by the asymptotics; the balanced mode a0 = -zeta(beta)
// makes the truncated prefix sums track their limiting integrals (for ND it
// realises sum a_i = 0 exactly, for LRD it removes the O(1) offset that
// otherwise dominates finite-n variance ratios). SRD keeps a0 = 1 so the
// filter sum stays away from zero.
struct filter_spec {
    dependence_class dependence;
    double beta;
    double gamma1;
    double c = 1.0;
    a0_mode a0 = a0_mode::one;

    filter_spec(dependence_class dep, double beta_, double gamma1_, double c_ = 1.0,
                std::optional<a0_mode> mode = std::nullopt)
        : dependence(dep), beta(beta_), gamma1(gamma1_), c(c_) {
        validate_case_beta(case_id::of(classify_filter_taper(gamma1), dependence), beta);
        if (gamma1 != 1.0 && c != 1.0)
            throw config_error("filter_spec: c is only meaningful for moderate tapering (gamma1 = 1)");
        if (!(c > 0.0)) throw config_error("filter_spec: c > 0 required");
        if (mode) {
            a0 = *mode;
        } else {
            a0 = (dependence == dependence_class::lrd || dependence == dependence_class::nd)
                     ? a0_mode::balanced
                     : a0_mode::one;
        }
        if (dependence == dependence_class::nd && a0 == a0_mode::one)
            throw config_error("filter_spec: ND requires the balanced a0 (sum a_i = 0)");
        if (dependence == dependence_class::srd && a0 == a0_mode::balanced)
            throw config_error("filter_spec: balanced a0 would zero the SRD filter sum");
        if (dependence == dependence_class::flat && a0 == a0_mode::balanced)
            throw config_error("filter_spec: flat filter has no balanced a0");
    }

    case_id case_of() const { return case_id::of(classify_filter_taper(gamma1), dependence); }
};

inline double filter_a0(const filter_spec& spec) {
    if (spec.dependence == dependence_class::flat) return 1.0;
    return spec.a0 == a0_mode::one ? 1.0 : -riemann_zeta(spec.beta);
}

// lambda(n) = floor(c n^gamma1), with a snap-to-integer guard against pow()
// landing just under an exact integer.
inline std::int64_t lambda_of(const filter_spec& spec, std::int64_t n) {
    if (n < 1) throw domain_error("lambda_of: n >= 1 required");
    const double x = spec.c * std::pow(static_cast<double>(n), spec.gamma1);
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
        return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(x));
}

// Materialised truncated filter; length lambda(n) + 1.
inline std::vector<double> build_filter(const filter_spec& spec, std::int64_t n) {
    const std::int64_t lambda = lambda_of(spec, n);
    constexpr std::int64_t max_len = (std::int64_t{1} << 26);
    if (lambda + 1 > max_len)
        throw capacity_error("build_filter: lambda(n) = " + std::to_string(lambda) +
                             " exceeds the materialisation cap; use the analytic engine");
    std::vector<double> a(static_cast<std::size_t>(lambda + 1));
    if (spec.dependence == dependence_class::flat) {
        for (auto& v : a) v = 1.0;
        return a;
    }
    a[0] = filter_a0(spec);
    for (std::int64_t i = 1; i <= lambda; ++i)
        a[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i), -spec.beta);
    return a;
}

// sum_{i>=0} a_i for the untruncated filter: a0 + zeta(beta) for SRD, exactly
// zero for ND. Diverges (or is unused) elsewhere.
inline double filter_sum(const filter_spec& spec) {
    switch (spec.dependence) {
        case dependence_class::srd:
            return filter_a0(spec) + riemann_zeta(spec.beta);
        case dependence_class::nd:
            return 0.0;
        default:
            throw config_error("filter_sum: defined only for SRD and ND filters");
    }
}

}  // namespace taperflow
