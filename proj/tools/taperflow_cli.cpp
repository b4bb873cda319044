// taperflow: simulation and verification CLI for tapered linear processes.
//
// Subcommands: simulate, constants, exact-var, lyapunov, limit-sim, verify,
// report. Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "taperflow/cli_io.hpp"
#include "taperflow/gaussian_limits.hpp"
#include "taperflow/path_engine.hpp"
#include "taperflow/taperflow.hpp"
#include "taperflow/verify.hpp"

namespace tf = taperflow;

namespace {

struct common_out {
    std::string out_dir;
};

void write_with_manifest(const std::filesystem::path& dir, const nlohmann::json& config_echo,
                         std::uint64_t seed, const std::string& started,
                         std::vector<tf::manifest_output> outputs) {
    const auto manifest = tf::make_manifest(config_echo, seed, started, tf::timestamp_utc(), outputs);
    std::ofstream m(dir / "manifest.json");
    m << manifest.dump(2) << "\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool want_paths) {
    const auto cfg = tf::parse_config(tf::read_file(config_path));
    if (cfg.task == tf::parsed_config::task_kind::constants)
        throw tf::config_error("simulate: config has task=constants");
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    const std::string started = tf::timestamp_utc();
    std::vector<tf::manifest_output> outputs;

    if (cfg.task == tf::parsed_config::task_kind::experiment) {
        const auto report = tf::run_experiment(cfg.experiment);
        outputs.push_back(tf::write_output_file(dir / "report.json", tf::report_to_json(report).dump(2)));
        outputs.push_back(tf::write_output_file(dir / "experiment.csv", tf::experiment_report_csv(report)));
        std::printf("experiment complete: %zu variance rows, %zu normality rows -> %s\n",
                    report.variance.size(), report.normality.size(), dir.string().c_str());
    } else {
        // Raw path / partial-sum emission through the convolution engine.
        const auto& e = cfg.experiment;
        e.validate();
        const tf::filter_spec spec = e.make_filter_spec();
        const std::int64_t n = e.n_list.front();
        tf::path_config pcfg;
        pcfg.filter = tf::build_filter(spec, n);
        pcfg.innovation = e.innovation;
        pcfg.n = n;
        pcfg.t_grid = e.t_grid;
        const tf::limit_law law(e.kase, e.beta, e.gamma1, e.c);
        const double sigma2 = tf::resolved_innovation(e.innovation, n).sigma2();
        const double a2_bar = law.normalizer_sq(n) * sigma2;
        std::string sums_csv = "rep,t,S,Z\n";
        std::string paths_csv = "rep,k,X\n";
        const std::int64_t m_max = tf::floor_nt(n, e.t_grid.back());
        for (std::int64_t rep = 0; rep < e.replications; ++rep) {
            auto rng = tf::replication_stream(e.seed, static_cast<std::uint64_t>(rep));
            const auto path = tf::generate_path(pcfg, rng);
            const auto sums = tf::partial_sums(path, n, e.t_grid);
            const auto zs = tf::z_values(sums, a2_bar);
            for (std::size_t g = 0; g < e.t_grid.size(); ++g)
                sums_csv += std::to_string(rep) + "," + tf::format_g17(e.t_grid[g]) + "," +
                            tf::format_g17(sums[g]) + "," + tf::format_g17(zs[g]) + "\n";
            if (want_paths && m_max <= 100000)
                for (std::int64_t k = 0; k < m_max; ++k)
                    paths_csv += std::to_string(rep) + "," + std::to_string(k + 1) + "," +
                                 tf::format_g17(path[static_cast<std::size_t>(k)]) + "\n";
        }
        outputs.push_back(tf::write_output_file(dir / "partial_sums.csv", sums_csv));
        if (want_paths && m_max <= 100000)
            outputs.push_back(tf::write_output_file(dir / "paths.csv", paths_csv));
        std::printf("simulated %lld replications at n=%lld -> %s\n",
                    static_cast<long long>(e.replications), static_cast<long long>(n),
                    dir.string().c_str());
    }
    write_with_manifest(dir, tf::config_to_json(cfg), cfg.experiment.seed, started, outputs);
    return 0;
}

int cmd_constants(std::vector<int> ids, double t, double beta, double c, const std::string& out_file) {
    std::string csv = "id,t,beta,c,value\n";
    for (int id : ids) {
        const double v = tf::limit_constant(id, t, beta, c);
        csv += std::to_string(id) + "," + tf::format_g17(t) + "," + tf::format_g17(beta) + "," +
               tf::format_g17(c) + "," + tf::format_g17(v) + "\n";
        std::printf("C%d(t=%g, beta=%g, c=%g) = %.10g\n", id, t, beta, c, v);
    }
    if (!out_file.empty()) tf::write_output_file(out_file, csv);
    return 0;
}

int cmd_exact_var(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = tf::parse_config(tf::read_file(config_path));
    const auto rows = tf::convergence_table(cfg.experiment);
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    const std::string started = tf::timestamp_utc();
    const auto csv = tf::convergence_csv(cfg.experiment.kase.j, cfg.experiment.seed, rows, cfg.experiment);
    std::vector<tf::manifest_output> outputs{tf::write_output_file(dir / "exact_var.csv", csv)};
    bool flagged = false;
    for (const auto& r : rows) {
        if (r.empty_window)
            std::printf("n=%lld t=%g: empty window ([nt] = 0)\n", static_cast<long long>(r.n), r.t);
        else
            std::printf("n=%-9lld t=%-6g VarZ/W = %.8f  (|err| %.3e)%s\n",
                        static_cast<long long>(r.n), r.t, r.var_ratio, r.abs_err,
                        r.non_monotone ? "  [non-monotone]" : "");
        flagged = flagged || r.non_monotone;
    }
    if (flagged) std::printf("note: non-monotone convergence flagged above\n");
    write_with_manifest(dir, tf::config_to_json(cfg), cfg.experiment.seed, started, outputs);
    return 0;
}

int cmd_lyapunov(const std::string& config_path, const std::string& out_dir, double t) {
    const auto cfg = tf::parse_config(tf::read_file(config_path));
    const auto rows = tf::lyapunov_table(cfg.experiment, t);
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    const std::string started = tf::timestamp_utc();
    const auto csv = tf::lyapunov_csv(cfg.experiment.kase.j, cfg.experiment.seed, rows);
    std::vector<tf::manifest_output> outputs{tf::write_output_file(dir / "lyapunov.csv", csv)};
    for (const auto& r : rows)
        std::printf("n=%-9lld L(2+%g, n, %g) = %.8e%s\n", static_cast<long long>(r.n), r.delta, r.t,
                    r.value, r.non_monotone ? "  [non-monotone]" : "");
    write_with_manifest(dir, tf::config_to_json(cfg), cfg.experiment.seed, started, outputs);
    return 0;
}

int cmd_limit_sim(int j, double beta, double gamma1, double c, std::vector<double> grid,
                  std::int64_t paths, std::uint64_t seed, const std::string& out_dir) {
    if (grid.empty()) grid = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    const tf::limit_law law(tf::case_id(j), beta, gamma1, c);
    tf::gaussian_grid_process proc(grid, [&](double s, double t) { return law.covariance(s, t); });
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    const std::string started = tf::timestamp_utc();
    std::string csv = "path,t,U\n";
    tf::xoshiro256pp rng(seed);
    for (std::int64_t p = 0; p < paths; ++p) {
        const auto u = proc.sample(rng);
        for (std::size_t g = 0; g < grid.size(); ++g)
            csv += std::to_string(p) + "," + tf::format_g17(grid[g]) + "," + tf::format_g17(u[g]) + "\n";
    }
    std::vector<tf::manifest_output> outputs{tf::write_output_file(dir / "limit_paths.csv", csv)};
    nlohmann::json echo;
    echo["case"] = j;
    echo["beta"] = beta;
    echo["gamma1"] = gamma1;
    echo["c"] = c;
    echo["grid"] = grid;
    echo["paths"] = paths;
    write_with_manifest(dir, echo, seed, started, outputs);
    std::printf("sampled %lld limit paths (rank %zu) -> %s\n", static_cast<long long>(paths),
                proc.rank(), dir.string().c_str());
    return 0;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed, const std::string& out_dir,
               int threads) {
    tf::verify_options opt;
    opt.seed = seed;
    opt.out_dir = out_dir.empty() ? "verify_out" : out_dir;
    opt.threads = threads;
    for (const auto& s : suites) {
        if (s == "all") continue;
        else if (s == "coefficients") opt.criteria.push_back(1);
        else if (s == "convergence") { opt.criteria.push_back(2); opt.criteria.push_back(3); }
        else if (s == "constants") opt.criteria.push_back(4);
        else if (s == "normality") opt.criteria.push_back(5);
        else if (s == "tapered") opt.criteria.push_back(6);
        else if (s == "lyapunov") opt.criteria.push_back(7);
        else if (s == "limits") { opt.criteria.push_back(8); opt.criteria.push_back(9); }
        else if (s == "engine") opt.criteria.push_back(10);
        else throw tf::config_error("verify: unknown suite '" + s +
                                    "' (all, coefficients, convergence, constants, normality, "
                                    "tapered, lyapunov, limits, engine)");
    }
    const auto results = tf::run_acceptance(opt);
    bool all_ok = true;
    for (const auto& r : results) {
        std::printf("[%s] C%-2d %-70s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.seconds);
        for (const auto& d : r.details) std::printf("       - %s\n", d.c_str());
        all_ok = all_ok && r.passed;
    }
    std::printf("%s\n", all_ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all_ok ? 0 : 2;
}

int cmd_report(const std::string& in_file, const std::string& out_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(tf::read_file(in_file));
    } catch (const nlohmann::json::exception& e) {
        throw tf::config_error(std::string("report: not valid JSON: ") + e.what());
    }
    const auto report = tf::report_from_json(j);
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    tf::write_output_file(dir / "experiment.csv", tf::experiment_report_csv(report));
    std::printf("case j=%d, %zu variance rows, %zu covariance rows, %zu normality rows\n",
                report.case_j, report.variance.size(), report.covariance.size(),
                report.normality.size());
    for (const auto& nm : report.normality)
        std::printf("n=%-9lld KS=%.4f skew=%+.4f exkurt=%+.4f L=%.3e\n",
                    static_cast<long long>(nm.n), nm.ks, nm.skew, nm.exkurt, nm.lyapunov);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taperflow: tapered linear processes, their Gaussian limits, and Monte Carlo "
                 "verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tf::version_string);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run seeded simulations from a JSON config");
    std::string sim_config, sim_out;
    bool sim_paths = false;
    sim->add_option("--config", sim_config, "JSON config file")->required();
    sim->add_option("--out", sim_out, "output directory");
    sim->add_flag("--paths", sim_paths, "also emit per-path CSV (small runs only)");

    // constants
    auto* con = app.add_subcommand("constants", "evaluate limit constants C1..C23");
    std::vector<int> con_ids;
    double con_t = 1.0, con_beta = 0.75, con_c = 1.0;
    std::string con_out;
    con->add_option("--id", con_ids, "constant id (repeatable)")->required();
    con->add_option("--t", con_t, "time argument");
    con->add_option("--beta", con_beta, "filter exponent");
    con->add_option("--c", con_c, "moderate-taper scale");
    con->add_option("--out", con_out, "CSV output file");

    // exact-var
    auto* ev = app.add_subcommand("exact-var", "deterministic variance-ratio convergence table");
    std::string ev_config, ev_out;
    ev->add_option("--config", ev_config, "JSON config file")->required();
    ev->add_option("--out", ev_out, "output directory");

    // lyapunov
    auto* ly = app.add_subcommand("lyapunov", "Lyapunov-fraction decay table");
    std::string ly_config, ly_out;
    double ly_t = 1.0;
    ly->add_option("--config", ly_config, "JSON config file")->required();
    ly->add_option("--out", ly_out, "output directory");
    ly->add_option("--t", ly_t, "time argument (default 1)");

    // limit-sim
    auto* ls = app.add_subcommand("limit-sim", "sample the Gaussian limit process on a grid");
    int ls_case = 2;
    double ls_beta = 2.0, ls_gamma1 = 0.5, ls_c = 1.0;
    std::vector<double> ls_grid;
    std::int64_t ls_paths = 1000;
    std::uint64_t ls_seed = 1;
    std::string ls_out;
    ls->add_option("--case", ls_case, "case id j = 1..12")->required();
    ls->add_option("--beta", ls_beta, "filter exponent");
    ls->add_option("--gamma1", ls_gamma1, "filter taper exponent");
    ls->add_option("--c", ls_c, "moderate-taper scale");
    ls->add_option("--grid", ls_grid, "time grid");
    ls->add_option("--paths", ls_paths, "number of paths");
    ls->add_option("--seed", ls_seed, "seed")->required();
    ls->add_option("--out", ls_out, "output directory");

    // verify
    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<std::string> ver_suites;
    std::uint64_t ver_seed = tf::verify_options{}.seed;
    std::string ver_out;
    int ver_threads = 0;
    ver->add_option("--suite", ver_suites, "suite filter (repeatable)");
    ver->add_option("--seed", ver_seed, "seed (fixed default; never wall clock)");
    ver->add_option("--out", ver_out, "output directory");
    ver->add_option("--threads", ver_threads, "worker cap (default: TAPERFLOW_THREADS or hardware)");

    // report
    auto* rep = app.add_subcommand("report", "re-render a stored experiment report");
    std::string rep_in, rep_out;
    rep->add_option("--in", rep_in, "report.json produced by simulate")->required();
    rep->add_option("--out", rep_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return (e.get_exit_code() == 0) ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_paths);
        if (con->parsed()) return cmd_constants(con_ids, con_t, con_beta, con_c, con_out);
        if (ev->parsed()) return cmd_exact_var(ev_config, ev_out);
        if (ly->parsed()) return cmd_lyapunov(ly_config, ly_out, ly_t);
        if (ls->parsed())
            return cmd_limit_sim(ls_case, ls_beta, ls_gamma1, ls_c, ls_grid, ls_paths, ls_seed, ls_out);
        if (ver->parsed()) return cmd_verify(ver_suites, ver_seed, ver_out, ver_threads);
        if (rep->parsed()) return cmd_report(rep_in, rep_out);
    } catch (const tf::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const tf::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const tf::capacity_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const tf::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
