#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "taperflow/coefficients.hpp"
#include "taperflow/errors.hpp"
#include "taperflow/filters.hpp"
#include "taperflow/innovations.hpp"
#include "taperflow/limit_theory.hpp"
#include "taperflow/linalg.hpp"
#include "taperflow/rng.hpp"
#include "taperflow/stats.hpp"
#include "taperflow/summation.hpp"
#include "taperflow/version.hpp"

namespace taperflow {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TAPERFLOW_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct experiment_config {
    case_id kase{1};
    double beta = 0.75;
    double gamma1 = 0.5;
    double c = 1.0;
    std::optional<a0_mode> a0_override;
    innovation_model innovation;
    std::vector<std::int64_t> n_list;
    std::vector<double> t_grid;
    std::int64_t replications = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    // Innovations simulated per replication; anything older is aggregated
    // into an exact Gaussian tail block (Gaussian innovations only).
    std::int64_t sim_window_cap = 1000000;

    filter_spec make_filter_spec() const {
        return filter_spec(kase.dependence(), beta, gamma1, c, a0_override);
    }

    void validate_core() const {
        validate_case_beta(kase, beta);
        if (classify_filter_taper(gamma1) != kase.taper())
            throw config_error("experiment_config: gamma1 inconsistent with case j=" +
                               std::to_string(kase.j));
        make_filter_spec();  // validates beta/c/a0 combinations
        if (n_list.empty()) throw config_error("experiment_config: empty n list");
        for (auto n : n_list)
            if (n < 1) throw config_error("experiment_config: n >= 1 required");
        if (t_grid.empty()) throw config_error("experiment_config: empty t grid");
        double prev = 0.0;
        for (double t : t_grid) {
            if (!(t > prev)) throw config_error("experiment_config: t grid must be increasing and > 0");
            prev = t;
        }
        if (innovation.kind == innovation_kind::tapered_pareto) {
            // Theorem 2 covers hard tapering only; stable-limit regimes are a
            // different paper.
            if (classify_innovation_taper(innovation.gamma, innovation.alpha) != innovation_taper::hard)
                throw config_error(
                    "experiment_config: soft/intermediate innovation tapering is out of scope "
                    "(hard tapering requires gamma < 1/alpha)");
        }
        if (sim_window_cap < 1024) throw config_error("experiment_config: sim_window_cap too small");
    }

    void validate() const {
        validate_core();
        if (replications < 1) throw config_error("experiment_config: replications >= 1 required");
    }
};

struct normality_stats {
    double ks;
    double skew;
    double exkurt;
};

// Standardizes by the empirical mean and, unless an exact sd is supplied, the
// empirical sd; KS against the standard normal plus moment diagnostics.
inline normality_stats normality_diagnostics(std::span<const double> samples,
                                             std::optional<double> exact_sd = std::nullopt) {
    if (samples.size() < 100) throw domain_error("normality_diagnostics: need >= 100 samples");
    const sample_moments mom = compute_moments(samples);
    if (!(mom.variance > 0.0))
        throw numerical_error("normality_diagnostics: degenerate sample (zero variance)");
    const double sd = exact_sd ? *exact_sd : std::sqrt(mom.variance);
    std::vector<double> standardized(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) standardized[i] = (samples[i] - mom.mean) / sd;
    return {ks_distance_normal(standardized), mom.skewness, mom.excess_kurtosis};
}

namespace detail {

// Precomputed sweep for the per-replication kernel: S_n(t) = sum_i d_i xi_i,
// run as one ascending pass over the simulated index window. Weights update
// incrementally, d_{i+1} = d_i + a_{-i} - a_{m-i}; the pre-window remainder
// (i < i_lo) is injected as an exact Gaussian block with the tail Gram
// matrix, which is legitimate for Gaussian innovations only.
struct sweep_plan {
    std::int64_t lambda = 0;
    std::int64_t i_lo = 0;
    std::int64_t m_max = 0;
    std::int64_t u_max = 0;
    std::vector<std::int64_t> ms;
    std::vector<double> d_start;
    std::vector<double> coef;  // a_u for u in [0, u_max]
    // tail block
    std::size_t tail_rank = 0;
    std::vector<double> tail_l;          // nt x rank, rows in permuted order
    std::vector<std::size_t> tail_perm;

    std::size_t nt() const { return ms.size(); }
};

inline sweep_plan build_sweep_plan(const filter_spec& spec, std::int64_t n,
                                   std::span<const double> t_grid, std::int64_t window_cap,
                                   bool gaussian_innovations) {
    sweep_plan plan;
    const analytic_filter f = analytic_filter::from(spec, n);
    plan.lambda = f.lambda;
    plan.ms.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        plan.ms[i] = floor_nt(n, t_grid[i]);
        if (plan.ms[i] < 1)
            throw config_error("sweep_plan: [nt] = 0 at t = " + std::to_string(t_grid[i]));
    }
    plan.m_max = plan.ms.back();
    if (window_cap < plan.m_max + 1)
        throw capacity_error("sweep_plan: sim_window_cap must exceed [n t_max]");
    plan.i_lo = std::max<std::int64_t>(1 - plan.lambda, plan.m_max + 1 - window_cap);
    const bool has_tail = plan.i_lo > 1 - plan.lambda;
    if (has_tail && !gaussian_innovations)
        throw capacity_error(
            "sweep_plan: window exceeds sim_window_cap and tail aggregation needs Gaussian "
            "innovations; raise sim_window_cap");

    plan.u_max = std::min(plan.lambda, plan.m_max - plan.i_lo);
    plan.coef.resize(static_cast<std::size_t>(plan.u_max + 1));
    for (std::int64_t u = 0; u <= plan.u_max; ++u)
        plan.coef[static_cast<std::size_t>(u)] = f.coef(u);

    if (plan.nt() > 16) throw config_error("sweep_plan: at most 16 grid points supported");
    const harmonic_continuation hc(f.beta);
    plan.d_start.resize(plan.nt());
    for (std::size_t ti = 0; ti < plan.nt(); ++ti) {
        // d at i_lo: window sums over the truncated filter.
        const std::int64_t i0 = plan.i_lo;
        const std::int64_t hi = std::min(plan.ms[ti] - i0, plan.lambda);
        if (i0 <= 0) {
            plan.d_start[ti] = h_exact(hc, hi) - h_exact(hc, -i0);
        } else {
            plan.d_start[ti] = f.a0 + h_exact(hc, hi);
        }
    }

    if (has_tail) {
        const std::int64_t w0 = 1 - plan.i_lo;
        const auto gram = analytic_d_gram_tail(f, plan.ms, w0);
        double trace = 0.0;
        for (std::size_t i = 0; i < plan.nt(); ++i) trace += gram[i * plan.nt() + i];
        auto piv = pivoted_cholesky(gram, plan.nt(), 1e-14 * trace, 1e-8 * trace);
        if (piv.indefinite)
            throw numerical_error("sweep_plan: tail Gram matrix indefinite");
        plan.tail_rank = piv.rank;
        plan.tail_perm = piv.perm;
        plan.tail_l.assign(piv.l.begin(), piv.l.end());
    }
    return plan;
}

// One replication: fills S_n(t) for every grid point.
template <class Rng>
inline void run_replication(const sweep_plan& plan, const resolved_innovation& innovation,
                            Rng& rng, std::vector<double>& d_work, std::span<double> out_s) {
    const std::size_t nt = plan.nt();
    d_work.assign(plan.d_start.begin(), plan.d_start.end());
    std::vector<kahan_sum> s(nt);
    const std::int64_t lambda_clip = plan.u_max;
    for (std::int64_t i = plan.i_lo; i <= plan.m_max; ++i) {
        const double xi = innovation.draw(rng);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            if (i <= plan.ms[ti]) {
                s[ti] += d_work[ti] * xi;
                if (i < plan.ms[ti]) {
                    double upd = 0.0;
                    if (i <= 0) upd += plan.coef[static_cast<std::size_t>(-i)];
                    const std::int64_t sub = plan.ms[ti] - i;
                    if (sub <= lambda_clip) upd -= plan.coef[static_cast<std::size_t>(sub)];
                    d_work[ti] += upd;
                }
            }
        }
    }
    if (plan.tail_rank > 0) {
        std::array<double, 16> z{};
        for (std::size_t k = 0; k < plan.tail_rank; ++k) z[k] = normal_draw(rng);
        for (std::size_t r = 0; r < nt; ++r) {
            double add = 0.0;
            for (std::size_t k = 0; k < plan.tail_rank; ++k)
                add += plan.tail_l[r * plan.tail_rank + k] * z[k];
            s[plan.tail_perm[r]] += add;
        }
    }
    for (std::size_t ti = 0; ti < nt; ++ti) out_s[ti] = s[ti].value();
}

inline std::uint64_t seed_for_n(std::uint64_t master, std::size_t n_index) {
    std::uint64_t s = master ^ (0x9E3779B97F4A7C15ULL * (n_index + 2));
    return splitmix64_next(s);
}

}  // namespace detail

// One replication's partial sums through the coefficient representation;
// identical in law to generate_path + partial_sums (and numerically equal up
// to summation order when the window is fully simulated).
template <class Rng>
inline std::vector<double> replication_partial_sums(const filter_spec& spec,
                                                    const innovation_model& innovation,
                                                    std::int64_t n, std::span<const double> t_grid,
                                                    Rng& rng,
                                                    std::int64_t window_cap = 1000000) {
    const auto plan = detail::build_sweep_plan(spec, n, t_grid, window_cap,
                                               innovation.kind == innovation_kind::gaussian);
    const resolved_innovation resolved(innovation, n);
    std::vector<double> d_work;
    std::vector<double> out(t_grid.size());
    detail::run_replication(plan, resolved, rng, d_work, out);
    return out;
}

struct experiment_report {
    // config echo
    int case_j = 0;
    double beta = 0.0, gamma1 = 0.0, c = 1.0;
    std::string innovation_name;
    double innovation_alpha = 0.0, innovation_gamma = 0.0;
    std::uint64_t seed = 0;
    std::int64_t replications = 0;
    std::string version;

    struct variance_entry {
        std::int64_t n;
        double t;
        std::int64_t m;
        double var_exact_s;      // sigma^2 sum d^2
        double a2_bar;           // A_n^2 E xi^2
        double var_ratio_exact;  // exact Var Z_n(t)
        double w;                // W(t)
        double var_z_emp;
        double var_z_se;  // 4-SE bands use this
    };
    struct covariance_entry {
        std::int64_t n;
        double s, t;
        double empirical;
        double se;
        double kernel;
    };
    struct normality_entry {
        std::int64_t n;
        double t;  // grid point diagnosed (1 when present)
        double sigma2;
        double ks, skew, exkurt;
        double lyapunov;
        double delta;
        double moment_ratio;
    };

    std::vector<variance_entry> variance;
    std::vector<covariance_entry> covariance;
    std::vector<normality_entry> normality;
};

// Seeded replication harness: exact coefficient variances, empirical moments
// of Z_n(t), covariance against the limit kernel, normality diagnostics and
// the Lyapunov fraction per n.
inline experiment_report run_experiment(const experiment_config& config) {
    config.validate();
    const filter_spec spec = config.make_filter_spec();
    const limit_law law(config.kase, config.beta, config.gamma1, config.c);
    const double delta = delta_for_case(config.kase, config.beta);

    experiment_report report;
    report.case_j = config.kase.j;
    report.beta = config.beta;
    report.gamma1 = config.gamma1;
    report.c = config.c;
    report.innovation_name = to_string(config.innovation.kind);
    report.innovation_alpha = config.innovation.alpha;
    report.innovation_gamma = config.innovation.gamma;
    report.seed = config.seed;
    report.replications = config.replications;
    report.version = version_string;

    const std::size_t nt = config.t_grid.size();
    const auto r = static_cast<std::size_t>(config.replications);

    for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
        const std::int64_t n = config.n_list[ni];
        const resolved_innovation innovation(config.innovation, n);
        const double sigma2 = innovation.sigma2();
        const analytic_filter f = analytic_filter::from(spec, n);
        const double a2_bar = law.normalizer_sq(n) * sigma2;

        const auto plan = detail::build_sweep_plan(
            spec, n, config.t_grid, config.sim_window_cap,
            config.innovation.kind == innovation_kind::gaussian);

        // Exact per-t coefficient statistics (p-moment only needed at the
        // normality point).
        std::vector<d_stats> stats(nt);
        std::size_t norm_ti = nt - 1;
        for (std::size_t ti = 0; ti < nt; ++ti)
            if (std::abs(config.t_grid[ti] - 1.0) < 1e-12) norm_ti = ti;
        for (std::size_t ti = 0; ti < nt; ++ti)
            stats[ti] = analytic_d_stats(f, n, config.t_grid[ti], ti == norm_ti ? 2.0 + delta : 0.0);

        // Replications, partitioned by index; identical results for any
        // thread count.
        std::vector<double> z(r * nt);
        const std::uint64_t n_seed = detail::seed_for_n(config.seed, ni);
        const double inv_a = 1.0 / std::sqrt(a2_bar);
        const int threads = std::min<int>(resolve_thread_count(config.threads),
                                          static_cast<int>(std::max<std::size_t>(1, r)));
        auto worker = [&](std::size_t lo, std::size_t hi) {
            std::vector<double> d_work;
            std::vector<double> s(nt);
            for (std::size_t rep = lo; rep < hi; ++rep) {
                auto rng = replication_stream(n_seed, rep);
                detail::run_replication(plan, innovation, rng, d_work, std::span<double>(s));
                for (std::size_t ti = 0; ti < nt; ++ti) z[rep * nt + ti] = s[ti] * inv_a;
            }
        };
        if (threads <= 1) {
            worker(0, r);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (r + static_cast<std::size_t>(threads) - 1) / threads;
            for (int w = 0; w < threads; ++w) {
                const std::size_t lo = static_cast<std::size_t>(w) * chunk;
                const std::size_t hi = std::min(r, lo + chunk);
                if (lo < hi) pool.emplace_back(worker, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        // Per-t moments.
        std::vector<sample_moments> column_moments(nt);
        std::vector<double> column(r);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            for (std::size_t rep = 0; rep < r; ++rep) column[rep] = z[rep * nt + ti];
            column_moments[ti] = compute_moments(column);
            experiment_report::variance_entry e;
            e.n = n;
            e.t = config.t_grid[ti];
            e.m = stats[ti].m;
            e.var_exact_s = stats[ti].sum_sq * sigma2;
            e.a2_bar = a2_bar;
            e.var_ratio_exact = stats[ti].sum_sq * sigma2 / a2_bar;
            e.w = law.w(config.t_grid[ti]);
            e.var_z_emp = column_moments[ti].variance;
            e.var_z_se = column_moments[ti].variance * std::sqrt(2.0 / (static_cast<double>(r) - 1.0));
            report.variance.push_back(e);
        }

        // Pairwise covariances vs the limit kernel.
        for (std::size_t a = 0; a < nt; ++a)
            for (std::size_t b = a + 1; b < nt; ++b) {
                kahan_sum acc;
                for (std::size_t rep = 0; rep < r; ++rep)
                    acc += (z[rep * nt + a] - column_moments[a].mean) *
                           (z[rep * nt + b] - column_moments[b].mean);
                const double cov = acc.value() / (static_cast<double>(r) - 1.0);
                experiment_report::covariance_entry e;
                e.n = n;
                e.s = config.t_grid[a];
                e.t = config.t_grid[b];
                e.empirical = cov;
                e.se = std::sqrt((column_moments[a].variance * column_moments[b].variance + cov * cov) /
                                 (static_cast<double>(r) - 1.0));
                e.kernel = law.covariance(config.t_grid[a], config.t_grid[b]);
                report.covariance.push_back(e);
            }

        // Normality of standardized S_n(1) (exact-variance standardization)
        // plus the Lyapunov fraction.
        {
            for (std::size_t rep = 0; rep < r; ++rep) column[rep] = z[rep * nt + norm_ti];
            const double exact_sd = std::sqrt(stats[norm_ti].sum_sq * sigma2 / a2_bar);
            const auto diag = normality_diagnostics(column, exact_sd);
            const double ratio = innovation.lyapunov_moment_ratio(delta);
            experiment_report::normality_entry e;
            e.n = n;
            e.t = config.t_grid[norm_ti];
            e.sigma2 = sigma2;
            e.ks = diag.ks;
            e.skew = diag.skew;
            e.exkurt = diag.exkurt;
            e.delta = delta;
            e.moment_ratio = ratio;
            e.lyapunov = stats[norm_ti].sum_abs_p /
                         std::pow(stats[norm_ti].sum_sq, 0.5 * (2.0 + delta)) * ratio;
            report.normality.push_back(e);
        }
    }
    return report;
}

// --- deterministic tables ----------------------------------------------------

struct convergence_entry {
    std::int64_t n;
    double t;
    bool empty_window;
    double var_ratio;  // Var Z_n(t) / W(t)
    double abs_err;    // |ratio - 1|
    bool non_monotone;
};

// Exact-variance convergence toward W: no sampling involved.
inline std::vector<convergence_entry> convergence_table(const experiment_config& config) {
    config.validate_core();
    const filter_spec spec = config.make_filter_spec();
    const limit_law law(config.kase, config.beta, config.gamma1, config.c);
    std::vector<convergence_entry> rows;
    for (double t : config.t_grid) {
        double prev_err = -1.0;
        for (std::int64_t n : config.n_list) {
            convergence_entry e{};
            e.n = n;
            e.t = t;
            if (floor_nt(n, t) < 1) {
                e.empty_window = true;
                e.var_ratio = 0.0;
                e.abs_err = 1.0;
                e.non_monotone = false;
                rows.push_back(e);
                continue;
            }
            const analytic_filter f = analytic_filter::from(spec, n);
            const auto stats = analytic_d_stats(f, n, t);
            e.var_ratio = stats.sum_sq / law.normalizer_sq(n) / law.w(t);
            e.abs_err = std::abs(e.var_ratio - 1.0);
            e.non_monotone = (prev_err >= 0.0 && e.abs_err > prev_err);
            prev_err = e.abs_err;
            rows.push_back(e);
        }
    }
    return rows;
}

struct lyapunov_entry {
    std::int64_t n;
    double t;
    double delta;
    double moment_ratio;
    double value;
    bool non_monotone;
};

// L(2+delta, n, t) decay table at fixed t (default 1).
inline std::vector<lyapunov_entry> lyapunov_table(const experiment_config& config, double t = 1.0) {
    config.validate_core();
    const filter_spec spec = config.make_filter_spec();
    const double delta = delta_for_case(config.kase, config.beta);
    std::vector<lyapunov_entry> rows;
    double prev = -1.0;
    for (std::int64_t n : config.n_list) {
        const analytic_filter f = analytic_filter::from(spec, n);
        const auto stats_t = analytic_d_stats(f, n, t, 2.0 + delta);
        const auto stats_1 = (t == 1.0) ? stats_t : analytic_d_stats(f, n, 1.0);
        const resolved_innovation innovation(config.innovation, n);
        const double ratio = innovation.lyapunov_moment_ratio(delta);
        lyapunov_entry e{};
        e.n = n;
        e.t = t;
        e.delta = delta;
        e.moment_ratio = ratio;
        e.value = stats_t.sum_abs_p / std::pow(stats_1.sum_sq, 0.5 * (2.0 + delta)) * ratio;
        e.non_monotone = (prev >= 0.0 && e.value > prev);
        prev = e.value;
        rows.push_back(e);
    }
    return rows;
}

}  // namespace taperflow
