#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "pbcast/calibrate.hpp"
#include "pbcast/centrality.hpp"
#include "pbcast/engine.hpp"
#include "pbcast/error.hpp"
#include "pbcast/graph.hpp"
#include "pbcast/mixing.hpp"
#include "pbcast/schedule.hpp"
#include "pbcast/spsa.hpp"

namespace pbcast {

// One experiment = one graph, one probability design, R realizations with
// fresh initial values, shared slot-indexed metrics. Field defaults are the
// standard benchmark setup (100-node random graph, K = 80, ten realizations).
struct ExperimentConfig {
    // graph source: a file takes precedence, otherwise generate
    std::string graph_file;
    int n = 100;
    double edge_prob = 0.1;
    std::uint64_t graph_seed = 7;
    int max_retries = 1000;

    // mixing step size; negative means 1/(max_degree + 1)
    double epsilon = -1.0;

    // probability design
    std::string method = "betweenness";  // degree|pagerank|betweenness|uniform|full|spsa|file:<path>
    double k = 80.0;
    double beta = -1.0;  // betweenness shift; negative means 1e-2 * max score
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-10;
    int pagerank_max_iter = 10000;

    // consensus runs
    int realizations = 10;
    double spread_tol = 1e-8;
    std::uint64_t max_rounds = 10000;
    std::uint64_t slot_budget = 20000;
    std::uint64_t grid_step = 100;

    // calibration (corrected runs)
    double cal_tol = 1e-10;
    std::uint64_t cal_max_rounds = 100000;
    bool mismatch_schedule = false;  // negative control: run under a stream
                                     // other than the calibrated one

    // seeds; every realization r derives its schedule stream as
    // (schedule_seed, "schedule#r") and its initial values from
    // (init_seed, "init-values") at counter (r, node)
    std::uint64_t init_seed = 101;
    std::uint64_t schedule_seed = 202;

    SpsaConfig spsa{.seed = 303};
    std::string spsa_init = "betweenness";

    // output
    std::string out_dir = "out";
    std::string tag;  // file-name prefix; empty means "run_<method>"
    bool dump_schedules = false;
};

inline void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(errc::io, "cannot create output directory " + dir + ": " + ec.message());
}

inline Graph experiment_graph(const ExperimentConfig& cfg) {
    if (!cfg.graph_file.empty()) {
        Graph g = load_edge_list(cfg.graph_file);
        if (!g.is_connected())
            throw Error(errc::domain, "graph in " + cfg.graph_file +
                                          " is not connected; simulation requires connectivity");
        return g;
    }
    return erdos_renyi(cfg.n, cfg.edge_prob, cfg.graph_seed, cfg.max_retries);
}

inline double resolve_epsilon(const ExperimentConfig& cfg, const Graph& g) {
    return cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(g);
}

inline double resolve_beta(const ExperimentConfig& cfg, const ScoreVector& betweenness) {
    return cfg.beta > 0.0 ? cfg.beta : default_beta(betweenness);
}

struct ResolvedMethod {
    ProbabilityVector p;
    OptimizationTrace trace;  // nonempty only for the spsa method
    bool has_trace = false;
};

inline ResolvedMethod resolve_method(const std::string& method, const ExperimentConfig& cfg,
                                     const Graph& g, const MixingMatrix& base) {
    ResolvedMethod out{ProbabilityVector::full(g.n()), {}, false};
    if (method == "full") {
        return out;
    } else if (method == "degree") {
        out.p = probability_vector(degree_scores(g), cfg.k);
    } else if (method == "pagerank") {
        out.p = probability_vector(
            pagerank_scores(g, cfg.pagerank_damping, cfg.pagerank_tol, cfg.pagerank_max_iter),
            cfg.k);
    } else if (method == "betweenness") {
        const ScoreVector b = betweenness_scores(g);
        out.p = probability_vector(shifted_scores(b, resolve_beta(cfg, b)), cfg.k);
    } else if (method == "uniform") {
        out.p = ProbabilityVector::uniform(g.n(), cfg.k);
    } else if (method == "spsa") {
        if (cfg.spsa_init == "spsa")
            throw Error(errc::config, "spsa cannot seed itself; pick another initial method");
        const ProbabilityVector init = resolve_method(cfg.spsa_init, cfg, g, base).p;
        auto [best, trace] = spsa_optimize(base, cfg.k, init, cfg.spsa);
        out.p = std::move(best);
        out.trace = std::move(trace);
        out.has_trace = true;
    } else if (method.rfind("file:", 0) == 0) {
        out.p = load_probability_vector(method.substr(5));
        if (out.p.size() != g.n())
            throw Error(errc::config, "probability file length does not match the graph");
    } else {
        throw Error(errc::config, "unknown method '" + method + "'");
    }
    return out;
}

inline std::string method_slug(const std::string& method) {
    if (method.rfind("file:", 0) == 0) return "file";
    return method;
}

inline void write_metrics_csv(const std::string& path,
                              const std::vector<std::vector<MetricsRow>>& series) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    out << "realization,round,cumulative_slots,stddev,rmse\n";
    for (std::size_t r = 0; r < series.size(); ++r)
        for (std::size_t round = 0; round < series[r].size(); ++round) {
            const auto& row = series[r][round];
            out << r << ',' << round << ',' << row.cumulative_slots << ','
                << format_double(row.stddev) << ',' << format_double(row.rmse) << '\n';
        }
    if (!out) throw Error(errc::io, "write failed: " + path);
}

inline void write_aggregate_csv(const std::string& path,
                                const std::vector<MetricsRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    out << "cumulative_slots,mean_stddev,mean_rmse\n";
    for (const auto& row : rows)
        out << row.cumulative_slots << ',' << format_double(row.stddev) << ','
            << format_double(row.rmse) << '\n';
    if (!out) throw Error(errc::io, "write failed: " + path);
}

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

inline void write_manifest(const std::string& path, const ManifestEntries& entries) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
    if (!out) throw Error(errc::io, "write failed: " + path);
}

struct RealizationSummary {
    int realization = 0;
    TerminalStatus status = TerminalStatus::iteration_cap;
    std::uint64_t rounds = 0;
    std::uint64_t consensus_slots = 0;
    double true_average = 0.0;
    double terminal_mean = 0.0;
    double terminal_rmse = 0.0;
    double terminal_stddev = 0.0;
    // calibration cost, corrected runs only
    std::uint64_t cal_rounds = 0;
    std::uint64_t cal_slots = 0;
    double cal_spread = 0.0;
};

struct RunOutput {
    ProbabilityVector p;
    std::vector<std::vector<MetricsRow>> series;
    std::vector<MetricsRow> aggregated;
    std::vector<RealizationSummary> summaries;
    std::vector<std::string> files;
};

inline std::vector<double> initial_values(const ExperimentConfig& cfg, int n, int realization) {
    const CounterStream init(cfg.init_seed, "init-values");
    std::vector<double> x0(n);
    for (int i = 0; i < n; ++i)
        x0[i] = init.normal(static_cast<std::uint64_t>(realization),
                            static_cast<std::uint64_t>(i));
    return x0;
}

inline ScheduleStream realization_stream(const ExperimentConfig& cfg, int realization,
                                         const char* prefix = "schedule") {
    return ScheduleStream(cfg.schedule_seed,
                          std::string(prefix) + "#" + std::to_string(realization));
}

inline void dump_schedule_log(const std::string& path, const ScheduleStream& stream,
                              const ProbabilityVector& p, std::uint64_t rounds) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    for (std::uint64_t t = 0; t < rounds; ++t)
        out << format_schedule_line(schedule(stream, p, t)) << '\n';
    if (!out) throw Error(errc::io, "write failed: " + path);
}

// Plain (uncorrected) experiment: R realizations, per-round metrics CSV,
// aggregated curve on the slot grid, probability vector on disk.
inline RunOutput run_experiment(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    const std::string tag = cfg.tag.empty() ? "run_" + method_slug(cfg.method) : cfg.tag;
    const std::string prefix = cfg.out_dir + "/" + tag;

    const Graph g = experiment_graph(cfg);
    const MixingMatrix base = base_mixing_matrix(g, resolve_epsilon(cfg, g));
    ResolvedMethod method = resolve_method(cfg.method, cfg, g, base);

    RunOutput out;
    out.p = std::move(method.p);
    const StopRule stop{cfg.spread_tol, cfg.max_rounds, cfg.slot_budget};
    for (int r = 0; r < cfg.realizations; ++r) {
        const std::vector<double> x0 = initial_values(cfg, g.n(), r);
        const double target = mean(x0);
        const ScheduleStream stream = realization_stream(cfg, r);
        const Trajectory traj = run_consensus(base, x0, out.p, stream, stop);
        out.series.push_back(metrics_series(traj, target));

        RealizationSummary s;
        s.realization = r;
        s.status = traj.status;
        s.rounds = traj.rounds();
        s.consensus_slots = traj.total_slots();
        s.true_average = target;
        s.terminal_mean = mean(traj.final_state());
        s.terminal_rmse = rmse(traj.final_state(), target);
        s.terminal_stddev = stddev(traj.final_state());
        out.summaries.push_back(s);

        if (cfg.dump_schedules) {
            const std::string log = prefix + "_schedules_r" + std::to_string(r) + ".log";
            dump_schedule_log(log, stream, out.p, traj.rounds());
            out.files.push_back(log);
        }
    }
    out.aggregated = aggregate(out.series, make_slot_grid(cfg.slot_budget, cfg.grid_step));

    const std::string metrics_path = prefix + "_metrics.csv";
    const std::string aggregate_path = prefix + ".csv";
    const std::string p_path = prefix + "_p.txt";
    write_metrics_csv(metrics_path, out.series);
    write_aggregate_csv(aggregate_path, out.aggregated);
    save_probability_vector(out.p, p_path);
    out.files.insert(out.files.end(), {metrics_path, aggregate_path, p_path});
    if (method.has_trace) {
        const std::string trace_path = prefix + "_spsa_trace.csv";
        save_trace_csv(method.trace, trace_path);
        out.files.push_back(trace_path);
    }
    return out;
}

// The single simulated calibration pass stands in for N unit-vector runs
// sharing the same schedules, so the on-air cost of calibration is N times
// the slots of that one pass (approximately J*K*N).
inline void write_summary_csv(const std::string& path, int n,
                              const std::vector<RealizationSummary>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    out << "realization,status,rounds,consensus_slots,cal_rounds,cal_slots,"
           "cal_slots_nrun_equivalent,cal_spread,true_average,terminal_mean,"
           "terminal_rmse,terminal_stddev\n";
    for (const auto& s : rows) {
        out << s.realization << ','
            << (s.status == TerminalStatus::converged ? "converged" : "iteration-cap") << ','
            << s.rounds << ',' << s.consensus_slots << ',' << s.cal_rounds << ','
            << s.cal_slots << ',' << s.cal_slots * static_cast<std::uint64_t>(n) << ','
            << format_double(s.cal_spread) << ',' << format_double(s.true_average) << ','
            << format_double(s.terminal_mean) << ',' << format_double(s.terminal_rmse) << ','
            << format_double(s.terminal_stddev) << '\n';
    }
    if (!out) throw Error(errc::io, "write failed: " + path);
}

// Corrected experiment: per realization, estimate alpha on the realization's
// schedule stream, pre-compensate fresh initial values, rerun on the same
// stream. Alpha files are cached per realization keyed by (graph, p, stream);
// a stale key forces recalibration. Calibration slot cost is reported both as
// the single matrix pass actually simulated and as the N-unit-vector-run
// equivalent an on-air deployment would pay.
inline RunOutput corrected_experiment(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    const std::string tag =
        cfg.tag.empty() ? "corrected_" + method_slug(cfg.method) : cfg.tag;
    const std::string prefix = cfg.out_dir + "/" + tag;

    const Graph g = experiment_graph(cfg);
    const MixingMatrix base = base_mixing_matrix(g, resolve_epsilon(cfg, g));
    ResolvedMethod method = resolve_method(cfg.method, cfg, g, base);

    RunOutput out;
    out.p = std::move(method.p);
    const std::uint64_t g_hash = g.content_hash();
    const std::uint64_t p_hash = probability_hash(out.p);
    const StopRule stop{cfg.spread_tol, cfg.max_rounds, cfg.slot_budget};
    const CalibrationStop cal_stop{cfg.cal_tol, cfg.cal_max_rounds};

    for (int r = 0; r < cfg.realizations; ++r) {
        const ScheduleStream cal_stream = realization_stream(cfg, r);
        const std::string alpha_path = prefix + "_alpha_r" + std::to_string(r) + ".txt";

        AlphaWeights weights;
        bool reused = false;
        if (std::filesystem::exists(alpha_path)) {
            try {
                const StoredAlpha stored = load_alpha(alpha_path);
                if (stored.graph_hash == g_hash && stored.p_hash == p_hash &&
                    stored.weights.seed == cal_stream.seed() &&
                    stored.weights.label == cal_stream.label() &&
                    stored.weights.size() == g.n()) {
                    weights = stored.weights;
                    reused = true;
                }
            } catch (const Error&) {
                // unreadable cache entry: recalibrate below
            }
        }
        if (!reused) {
            weights = estimate_alpha(base, out.p, cal_stream, cal_stop);
            save_alpha(weights, g_hash, p_hash, alpha_path);
        }
        out.files.push_back(alpha_path);

        const std::vector<double> x0 = initial_values(cfg, g.n(), r);
        const double target = mean(x0);
        const std::vector<double> compensated = precompensate(x0, weights);
        const ScheduleStream run_stream =
            cfg.mismatch_schedule ? realization_stream(cfg, r, "mismatch")
                                  : realization_stream(cfg, r);
        const Trajectory traj = run_consensus(base, compensated, out.p, run_stream, stop);
        out.series.push_back(metrics_series(traj, target));

        RealizationSummary s;
        s.realization = r;
        s.status = traj.status;
        s.rounds = traj.rounds();
        s.consensus_slots = traj.total_slots();
        s.true_average = target;
        s.terminal_mean = mean(traj.final_state());
        s.terminal_rmse = rmse(traj.final_state(), target);
        s.terminal_stddev = stddev(traj.final_state());
        s.cal_rounds = weights.rounds;
        s.cal_slots = weights.slots_used;
        s.cal_spread = weights.column_spread;
        out.summaries.push_back(s);
    }
    out.aggregated = aggregate(out.series, make_slot_grid(cfg.slot_budget, cfg.grid_step));

    const std::string metrics_path = prefix + "_metrics.csv";
    const std::string aggregate_path = prefix + ".csv";
    const std::string p_path = prefix + "_p.txt";
    const std::string summary_path = prefix + "_summary.csv";
    write_metrics_csv(metrics_path, out.series);
    write_aggregate_csv(aggregate_path, out.aggregated);
    save_probability_vector(out.p, p_path);
    write_summary_csv(summary_path, g.n(), out.summaries);
    out.files.insert(out.files.end(), {metrics_path, aggregate_path, p_path, summary_path});
    return out;
}

struct OptimizeOutput {
    ProbabilityVector p;
    OptimizationTrace trace;
    double initial_objective = 0.0;
    double best_objective = 0.0;
    std::vector<std::string> files;
};

inline OptimizeOutput optimize_experiment(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    const std::string tag = cfg.tag.empty() ? "optimize" : cfg.tag;
    const std::string prefix = cfg.out_dir + "/" + tag;

    const Graph g = experiment_graph(cfg);
    const MixingMatrix base = base_mixing_matrix(g, resolve_epsilon(cfg, g));
    const ProbabilityVector init = resolve_method(cfg.spsa_init, cfg, g, base).p;

    OptimizeOutput out;
    out.initial_objective = objective(base, init);
    auto [best, trace] = spsa_optimize(base, cfg.k, init, cfg.spsa);
    out.p = std::move(best);
    out.trace = std::move(trace);
    out.best_objective = out.trace.best_objective;

    const std::string p_path = prefix + "_p_spsa.txt";
    const std::string trace_path = prefix + "_spsa_trace.csv";
    save_probability_vector(out.p, p_path);
    save_trace_csv(out.trace, trace_path);
    out.files = {p_path, trace_path};
    return out;
}

struct VerifyOutput {
    int n = 0;
    double epsilon = 0.0;
    SpectrumReport report;
};

inline VerifyOutput verify_experiment(const ExperimentConfig& cfg) {
    const Graph g = experiment_graph(cfg);
    const double eps = resolve_epsilon(cfg, g);
    const MixingMatrix base = base_mixing_matrix(g, eps);
    return VerifyOutput{g.n(), eps, verify_convergence_conditions(base)};
}

// Figure pipelines: one aggregated CSV per plotted curve plus a manifest of
// every parameter and seed needed to regenerate the bundle byte for byte.
inline std::vector<std::string> reproduce(const std::string& figure, ExperimentConfig cfg) {
    if (figure != "fig1" && figure != "fig2" && figure != "fig3")
        throw Error(errc::usage, "unknown figure '" + figure + "' (expected fig1|fig2|fig3)");
    ensure_out_dir(cfg.out_dir);

    const Graph g = experiment_graph(cfg);
    const double eps = resolve_epsilon(cfg, g);
    const ScoreVector betw = betweenness_scores(g);
    const double beta = resolve_beta(cfg, betw);

    ManifestEntries manifest{
        {"figure", figure},
        {"graph_source", cfg.graph_file.empty() ? "generate" : cfg.graph_file},
        {"n", std::to_string(g.n())},
        {"edge_prob", format_double(cfg.edge_prob)},
        {"graph_seed", std::to_string(cfg.graph_seed)},
        {"graph_hash", std::to_string(g.content_hash())},
        {"k", format_double(cfg.k)},
        {"epsilon", format_double(eps)},
        {"beta", format_double(beta)},
        {"realizations", std::to_string(cfg.realizations)},
        {"spread_tol", format_double(cfg.spread_tol)},
        {"max_rounds", std::to_string(cfg.max_rounds)},
        {"slot_budget", std::to_string(cfg.slot_budget)},
        {"grid_step", std::to_string(cfg.grid_step)},
        {"init_seed", std::to_string(cfg.init_seed)},
        {"init_label", "init-values"},
        {"schedule_seed", std::to_string(cfg.schedule_seed)},
        {"schedule_label_pattern", "schedule#<realization>"},
    };

    std::vector<std::string> files;
    auto run_curve = [&](const std::string& method, const std::string& curve_tag) {
        ExperimentConfig c = cfg;
        c.method = method;
        c.tag = figure + "_" + curve_tag;
        c.beta = beta;
        const RunOutput r = run_experiment(c);
        files.insert(files.end(), r.files.begin(), r.files.end());
    };

    if (figure == "fig1") {
        run_curve("full", "full");
        run_curve("degree", "degree");
        run_curve("pagerank", "pagerank");
        run_curve("betweenness", "betweenness");
        manifest.emplace_back("curves", "full,degree,pagerank,betweenness");
        manifest.emplace_back("pagerank_damping", format_double(cfg.pagerank_damping));
        manifest.emplace_back("pagerank_tol", format_double(cfg.pagerank_tol));
    } else if (figure == "fig2") {
        run_curve("full", "full");
        run_curve("betweenness", "betweenness");
        ExperimentConfig c = cfg;
        c.method = "betweenness";
        c.tag = figure + "_betweenness_corrected";
        c.beta = beta;
        const RunOutput r = corrected_experiment(c);
        files.insert(files.end(), r.files.begin(), r.files.end());
        manifest.emplace_back("curves", "full,betweenness,betweenness_corrected");
        manifest.emplace_back("cal_tol", format_double(cfg.cal_tol));
        manifest.emplace_back("cal_max_rounds", std::to_string(cfg.cal_max_rounds));
    } else {
        run_curve("full", "full");
        run_curve("betweenness", "betweenness");
        ExperimentConfig c = cfg;
        c.method = "spsa";
        c.spsa_init = "betweenness";
        c.tag = figure + "_spsa";
        c.beta = beta;
        const RunOutput r = run_experiment(c);
        files.insert(files.end(), r.files.begin(), r.files.end());
        manifest.emplace_back("curves", "full,betweenness,spsa");
        manifest.emplace_back("spsa_iterations", std::to_string(cfg.spsa.iterations));
        manifest.emplace_back("spsa_a", format_double(cfg.spsa.a));
        manifest.emplace_back("spsa_A", format_double(cfg.spsa.resolved_stability()));
        manifest.emplace_back("spsa_c", format_double(cfg.spsa.c));
        manifest.emplace_back("spsa_alpha_gain", format_double(cfg.spsa.alpha_gain));
        manifest.emplace_back("spsa_gamma_gain", format_double(cfg.spsa.gamma_gain));
        manifest.emplace_back("spsa_p_min", format_double(cfg.spsa.p_min));
        manifest.emplace_back("spsa_seed", std::to_string(cfg.spsa.seed));
        manifest.emplace_back("spsa_init", "betweenness");
    }

    const std::string manifest_path = cfg.out_dir + "/" + figure + "_manifest.txt";
    write_manifest(manifest_path, manifest);
    files.push_back(manifest_path);
    return files;
}

}  // namespace pbcast
