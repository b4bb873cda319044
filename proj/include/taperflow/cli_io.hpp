#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "taperflow/errors.hpp"
#include "taperflow/montecarlo.hpp"
#include "taperflow/version.hpp"

namespace taperflow {

// 17 significant digits: round-trips doubles exactly.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------

struct parsed_config {
    enum class task_kind { experiment, simulate, constants };
    task_kind task = task_kind::experiment;
    experiment_config experiment;
    // constants request
    std::vector<int> constant_ids;
    double constants_t = 1.0;
    double constants_beta = 0.75;
    double constants_c = 1.0;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                                const std::string& prefix) {
    std::string bad;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed) ok = ok || (it.key() == k);
        if (!ok) bad += (bad.empty() ? "" : ", ") + prefix + it.key();
    }
    if (!bad.empty()) throw config_error("config: unknown keys: " + bad);
}

inline innovation_model parse_innovation(const nlohmann::json& j) {
    reject_unknown_keys(j, {"kind", "alpha", "gamma"}, "innovation.");
    std::string kind = j.value("kind", j.contains("alpha") ? "tapered-pareto" : "gaussian");
    if (kind == "gaussian") return innovation_model::gaussian();
    if (kind == "uniform") return innovation_model::standardized(innovation_kind::standardized_uniform);
    if (kind == "exponential")
        return innovation_model::standardized(innovation_kind::standardized_exponential);
    if (kind == "two-point") return innovation_model::standardized(innovation_kind::two_point);
    if (kind == "tapered-pareto") {
        if (!j.contains("alpha") || !j.contains("gamma"))
            throw config_error("config: innovation.alpha and innovation.gamma required");
        return innovation_model::tapered_pareto(j.at("alpha").get<double>(),
                                                j.at("gamma").get<double>());
    }
    throw config_error("config: unknown innovation.kind '" + kind + "'");
}

}  // namespace detail

// Strict schema-v1 parse; unknown keys are rejected with their paths.
inline parsed_config parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config: top level must be an object");
    detail::reject_unknown_keys(
        j,
        {"v", "task", "case", "beta", "gamma1", "c", "a0", "innovation", "n", "t", "reps", "seed",
         "threads", "sim_window_cap", "ids"},
        "");
    if (j.contains("v") && j.at("v").get<std::string>() != "v1")
        throw config_error("config: unsupported schema version (expected \"v1\")");

    parsed_config out;
    const std::string task = j.value("task", "experiment");
    if (task == "constants") {
        out.task = parsed_config::task_kind::constants;
        if (!j.contains("ids")) throw config_error("config: constants task requires 'ids'");
        out.constant_ids = j.at("ids").get<std::vector<int>>();
        out.constants_t = j.value("t", 1.0);
        out.constants_beta = j.value("beta", 0.75);
        out.constants_c = j.value("c", 1.0);
        return out;
    }
    if (task == "simulate") {
        out.task = parsed_config::task_kind::simulate;
    } else if (task != "experiment") {
        throw config_error("config: unknown task '" + task + "'");
    }

    // Innovation scope is checked before field completeness so that
    // out-of-scope tapering regimes are reported as such.
    if (j.contains("innovation")) out.experiment.innovation = detail::parse_innovation(j.at("innovation"));
    if (out.experiment.innovation.kind == innovation_kind::tapered_pareto &&
        classify_innovation_taper(out.experiment.innovation.gamma, out.experiment.innovation.alpha) !=
            innovation_taper::hard)
        throw config_error(
            "config: soft/intermediate innovation tapering is out of scope (requires gamma < 1/alpha)");

    if (!j.contains("case")) throw config_error("config: 'case' required");
    out.experiment.kase = case_id(j.at("case").get<int>());
    const bool flat = out.experiment.kase.flat();
    if (!flat && !j.contains("beta")) throw config_error("config: 'beta' required for cases 1..9");
    out.experiment.beta = flat ? j.value("beta", 0.0) : j.at("beta").get<double>();
    const filter_taper taper = out.experiment.kase.taper();
    if (taper == filter_taper::moderate) {
        out.experiment.gamma1 = j.value("gamma1", 1.0);
        out.experiment.c = j.value("c", 1.0);
    } else {
        if (!j.contains("gamma1"))
            throw config_error("config: 'gamma1' required for non-moderate cases");
        out.experiment.gamma1 = j.at("gamma1").get<double>();
        out.experiment.c = j.value("c", 1.0);
    }
    if (j.contains("a0")) {
        const std::string mode = j.at("a0").get<std::string>();
        if (mode == "one") out.experiment.a0_override = a0_mode::one;
        else if (mode == "balanced") out.experiment.a0_override = a0_mode::balanced;
        else throw config_error("config: a0 must be \"one\" or \"balanced\"");
    }
    if (!j.contains("n")) throw config_error("config: 'n' required");
    out.experiment.n_list = j.at("n").get<std::vector<std::int64_t>>();
    if (!j.contains("t")) throw config_error("config: 't' required");
    out.experiment.t_grid = j.at("t").get<std::vector<double>>();
    if (!j.contains("reps")) throw config_error("config: 'reps' required");
    out.experiment.replications = j.at("reps").get<std::int64_t>();
    if (!j.contains("seed")) throw config_error("config: 'seed' required (runs must be reproducible)");
    out.experiment.seed = j.at("seed").get<std::uint64_t>();
    out.experiment.threads = j.value("threads", 0);
    out.experiment.sim_window_cap = j.value("sim_window_cap", std::int64_t{1000000});

    out.experiment.validate_core();
    return out;
}

inline nlohmann::json config_to_json(const parsed_config& cfg) {
    nlohmann::json j;
    j["v"] = "v1";
    if (cfg.task == parsed_config::task_kind::constants) {
        j["task"] = "constants";
        j["ids"] = cfg.constant_ids;
        j["t"] = cfg.constants_t;
        j["beta"] = cfg.constants_beta;
        j["c"] = cfg.constants_c;
        return j;
    }
    j["task"] = cfg.task == parsed_config::task_kind::simulate ? "simulate" : "experiment";
    const auto& e = cfg.experiment;
    j["case"] = e.kase.j;
    j["beta"] = e.beta;
    j["gamma1"] = e.gamma1;
    j["c"] = e.c;
    if (e.a0_override)
        j["a0"] = (*e.a0_override == a0_mode::one) ? "one" : "balanced";
    if (e.innovation.kind != innovation_kind::gaussian) {
        nlohmann::json inn;
        inn["kind"] = to_string(e.innovation.kind);
        if (e.innovation.kind == innovation_kind::tapered_pareto) {
            inn["alpha"] = e.innovation.alpha;
            inn["gamma"] = e.innovation.gamma;
        }
        j["innovation"] = inn;
    }
    j["n"] = e.n_list;
    j["t"] = e.t_grid;
    j["reps"] = e.replications;
    j["seed"] = e.seed;
    if (e.threads != 0) j["threads"] = e.threads;
    if (e.sim_window_cap != 1000000) j["sim_window_cap"] = e.sim_window_cap;
    return j;
}

inline std::string serialize_config(const parsed_config& cfg) { return config_to_json(cfg).dump(2); }

// ---------------------------------------------------------------------------
// CSV emission. The main experiment schema is fixed:
//   case,n,t,var_exact,var_ratio,W,ks,skew,exkurt,lyapunov,seed
// with 17-significant-digit numbers. Per-n diagnostics (ks, skew, exkurt,
// lyapunov) repeat on each of that n's rows.

inline constexpr const char* experiment_csv_header =
    "case,n,t,var_exact,var_ratio,W,ks,skew,exkurt,lyapunov,seed";

inline std::string experiment_report_csv(const experiment_report& report) {
    std::string out = experiment_csv_header;
    out += "\n";
    for (const auto& v : report.variance) {
        const experiment_report::normality_entry* norm = nullptr;
        for (const auto& n : report.normality)
            if (n.n == v.n) norm = &n;
        out += std::to_string(report.case_j) + "," + std::to_string(v.n) + "," + format_g17(v.t) +
               "," + format_g17(v.var_exact_s) + "," + format_g17(v.var_z_emp) + "," +
               format_g17(v.w) + ",";
        if (norm) {
            out += format_g17(norm->ks) + "," + format_g17(norm->skew) + "," +
                   format_g17(norm->exkurt) + "," + format_g17(norm->lyapunov);
        } else {
            out += "nan,nan,nan,nan";
        }
        out += "," + std::to_string(report.seed) + "\n";
    }
    return out;
}

inline std::string convergence_csv(int case_j, std::uint64_t seed,
                                   const std::vector<convergence_entry>& rows,
                                   const experiment_config& cfg) {
    std::string out = experiment_csv_header;
    out += "\n";
    const limit_law law(cfg.kase, cfg.beta, cfg.gamma1, cfg.c);
    for (const auto& r : rows) {
        const double w = r.empty_window ? 0.0 : law.w(r.t);
        out += std::to_string(case_j) + "," + std::to_string(r.n) + "," + format_g17(r.t) + "," +
               (r.empty_window ? "nan" : format_g17(r.var_ratio * w * law.normalizer_sq(r.n))) +
               "," + (r.empty_window ? "nan" : format_g17(r.var_ratio)) + "," + format_g17(w) +
               ",nan,nan,nan,nan," + std::to_string(seed) + "\n";
    }
    return out;
}

inline std::string lyapunov_csv(int case_j, std::uint64_t seed,
                                const std::vector<lyapunov_entry>& rows) {
    std::string out = "case,n,t,delta,moment_ratio,lyapunov,seed\n";
    for (const auto& r : rows)
        out += std::to_string(case_j) + "," + std::to_string(r.n) + "," + format_g17(r.t) + "," +
               format_g17(r.delta) + "," + format_g17(r.moment_ratio) + "," + format_g17(r.value) +
               "," + std::to_string(seed) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Report JSON (full fidelity) and the run manifest.

inline nlohmann::json report_to_json(const experiment_report& r) {
    nlohmann::json j;
    j["tool"] = "taperflow";
    j["version"] = r.version;
    j["case"] = r.case_j;
    j["beta"] = r.beta;
    j["gamma1"] = r.gamma1;
    j["c"] = r.c;
    j["innovation"] = r.innovation_name;
    j["innovation_alpha"] = r.innovation_alpha;
    j["innovation_gamma"] = r.innovation_gamma;
    j["seed"] = r.seed;
    j["reps"] = r.replications;
    auto& variance = j["variance"] = nlohmann::json::array();
    for (const auto& v : r.variance)
        variance.push_back({{"n", v.n},
                            {"t", v.t},
                            {"m", v.m},
                            {"var_exact_s", v.var_exact_s},
                            {"a2_bar", v.a2_bar},
                            {"var_ratio_exact", v.var_ratio_exact},
                            {"w", v.w},
                            {"var_z_emp", v.var_z_emp},
                            {"var_z_se", v.var_z_se}});
    auto& covariance = j["covariance"] = nlohmann::json::array();
    for (const auto& cv : r.covariance)
        covariance.push_back({{"n", cv.n},
                              {"s", cv.s},
                              {"t", cv.t},
                              {"empirical", cv.empirical},
                              {"se", cv.se},
                              {"kernel", cv.kernel}});
    auto& normality = j["normality"] = nlohmann::json::array();
    for (const auto& nm : r.normality)
        normality.push_back({{"n", nm.n},
                             {"t", nm.t},
                             {"sigma2", nm.sigma2},
                             {"ks", nm.ks},
                             {"skew", nm.skew},
                             {"exkurt", nm.exkurt},
                             {"lyapunov", nm.lyapunov},
                             {"delta", nm.delta},
                             {"moment_ratio", nm.moment_ratio}});
    return j;
}

inline experiment_report report_from_json(const nlohmann::json& j) {
    experiment_report r;
    r.version = j.value("version", "");
    r.case_j = j.at("case").get<int>();
    r.beta = j.at("beta").get<double>();
    r.gamma1 = j.at("gamma1").get<double>();
    r.c = j.at("c").get<double>();
    r.innovation_name = j.value("innovation", "gaussian");
    r.innovation_alpha = j.value("innovation_alpha", 0.0);
    r.innovation_gamma = j.value("innovation_gamma", 0.0);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.replications = j.at("reps").get<std::int64_t>();
    for (const auto& v : j.at("variance"))
        r.variance.push_back({v.at("n").get<std::int64_t>(), v.at("t").get<double>(),
                              v.at("m").get<std::int64_t>(), v.at("var_exact_s").get<double>(),
                              v.at("a2_bar").get<double>(), v.at("var_ratio_exact").get<double>(),
                              v.at("w").get<double>(), v.at("var_z_emp").get<double>(),
                              v.at("var_z_se").get<double>()});
    for (const auto& cv : j.at("covariance"))
        r.covariance.push_back({cv.at("n").get<std::int64_t>(), cv.at("s").get<double>(),
                                cv.at("t").get<double>(), cv.at("empirical").get<double>(),
                                cv.at("se").get<double>(), cv.at("kernel").get<double>()});
    for (const auto& nm : j.at("normality"))
        r.normality.push_back({nm.at("n").get<std::int64_t>(), nm.at("t").get<double>(),
                               nm.at("sigma2").get<double>(), nm.at("ks").get<double>(),
                               nm.at("skew").get<double>(), nm.at("exkurt").get<double>(),
                               nm.at("lyapunov").get<double>(), nm.at("delta").get<double>(),
                               nm.at("moment_ratio").get<double>()});
    return r;
}

struct manifest_output {
    std::string path;
    std::uint64_t digest;
};

// Run manifest: config echo, seed, version, wall-clock stamps, output
// digests. Together with the config it pins every output byte.
inline nlohmann::json make_manifest(const nlohmann::json& config_echo, std::uint64_t seed,
                                    const std::string& started, const std::string& finished,
                                    const std::vector<manifest_output>& outputs) {
    nlohmann::json j;
    j["tool"] = "taperflow";
    j["version"] = version_string;
    j["seed"] = seed;
    j["config"] = config_echo;
    j["started"] = started;
    j["finished"] = finished;
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs) {
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(o.digest));
        outs.push_back({{"path", o.path}, {"fnv1a64", hex}});
    }
    return j;
}

inline std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline manifest_output write_output_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write file: " + path.string());
    out << bytes;
    out.close();
    return {path.string(), fnv1a64(bytes)};
}

}  // namespace taperflow
