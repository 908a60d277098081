// Command-line front end for the broadcast-consensus simulator.
//
//   pbcast generate       write a connected random graph as an edge list
//   pbcast run            consensus runs with a chosen probability design
//   pbcast corrected-run  the same, with alpha calibration and pre-compensation
//   pbcast optimize-p     SPSA optimization of the broadcast probabilities
//   pbcast reproduce      standard figure pipelines (fig1|fig2|fig3)
//   pbcast verify         convergence-condition report for a mixing matrix
//
// Every failure prints "error: <class>: <message>" on stderr and exits 1.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pbcast/pbcast.hpp"

namespace {

void add_graph_options(CLI::App* cmd, pbcast::ExperimentConfig& cfg) {
    cmd->add_option("--graph", cfg.graph_file, "read the graph from an edge-list file");
    cmd->add_option("--n", cfg.n, "node count for graph generation");
    cmd->add_option("--edge-prob", cfg.edge_prob, "edge probability for graph generation");
    cmd->add_option("--graph-seed", cfg.graph_seed, "seed for graph generation");
    cmd->add_option("--max-retries", cfg.max_retries,
                    "connected-sample retries before giving up");
}

void add_design_options(CLI::App* cmd, pbcast::ExperimentConfig& cfg) {
    cmd->add_option("--k", cfg.k, "broadcast budget K = expected transmissions per round");
    cmd->add_option("--epsilon", cfg.epsilon,
                    "mixing step size (default 1/(max_degree+1))");
    cmd->add_option("--beta", cfg.beta, "betweenness shift (default 1e-2 * max score)");
    cmd->add_option("--pagerank-damping", cfg.pagerank_damping, "PageRank damping factor");
    cmd->add_option("--pagerank-tol", cfg.pagerank_tol, "PageRank stopping tolerance");
    cmd->add_option("--pagerank-max-iter", cfg.pagerank_max_iter, "PageRank iteration cap");
}

void add_run_options(CLI::App* cmd, pbcast::ExperimentConfig& cfg) {
    cmd->add_option("--realizations", cfg.realizations, "independent runs to average");
    cmd->add_option("--spread-tol", cfg.spread_tol,
                    "stop once max(x)-min(x) falls below this");
    cmd->add_option("--max-rounds", cfg.max_rounds, "round cap per run");
    cmd->add_option("--slot-budget", cfg.slot_budget,
                    "stop once cumulative transmission slots reach this (0 = off)");
    cmd->add_option("--grid-step", cfg.grid_step, "slot checkpoint spacing for aggregation");
    cmd->add_option("--init-seed", cfg.init_seed, "seed of the initial-value stream");
    cmd->add_option("--schedule-seed", cfg.schedule_seed, "seed of the schedule streams");
    cmd->add_option("--out-dir", cfg.out_dir, "output directory");
    cmd->add_option("--tag", cfg.tag, "file-name prefix for outputs");
    cmd->add_flag("--dump-schedules", cfg.dump_schedules,
                  "also write per-round schedule bitstrings");
}

void add_spsa_options(CLI::App* cmd, pbcast::ExperimentConfig& cfg) {
    cmd->add_option("--iterations", cfg.spsa.iterations, "SPSA iteration count");
    cmd->add_option("--spsa-a", cfg.spsa.a, "SPSA step-size scale a");
    cmd->add_option("--spsa-A", cfg.spsa.stability,
                    "SPSA stability constant A (default 10% of iterations)");
    cmd->add_option("--spsa-c", cfg.spsa.c, "SPSA perturbation scale c");
    cmd->add_option("--alpha-gain", cfg.spsa.alpha_gain, "SPSA step-size decay exponent");
    cmd->add_option("--gamma-gain", cfg.spsa.gamma_gain, "SPSA perturbation decay exponent");
    cmd->add_option("--p-min", cfg.spsa.p_min, "probability floor for optimized vectors");
    cmd->add_option("--spsa-seed", cfg.spsa.seed, "seed of the SPSA perturbation stream");
    cmd->add_option("--init-method", cfg.spsa_init,
                    "probability design used as the SPSA starting point");
}

void print_run_report(const pbcast::RunOutput& out) {
    for (const auto& s : out.summaries) {
        std::cout << "realization " << s.realization << ": "
                  << (s.status == pbcast::TerminalStatus::converged ? "converged"
                                                                    : "iteration-cap")
                  << " after " << s.rounds << " rounds, " << s.consensus_slots
                  << " slots";
        if (s.cal_rounds > 0)
            std::cout << " (calibration: " << s.cal_rounds << " rounds, " << s.cal_slots
                      << " slots simulated, " << s.cal_slots * out.p.size()
                      << " slots as N unit-vector runs)";
        std::cout << ", terminal rmse " << pbcast::format_double(s.terminal_rmse) << '\n';
    }
    for (const auto& f : out.files) std::cout << "wrote " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator for average consensus with probabilistic broadcast scheduling"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    pbcast::ExperimentConfig cfg;
    std::string figure;
    std::string graph_out = "graph.txt";

    auto* generate = app.add_subcommand("generate", "write a connected random graph");
    add_graph_options(generate, cfg);
    generate->add_option("--out", graph_out, "output edge-list path");

    auto* run = app.add_subcommand("run", "consensus runs with a probability design");
    add_graph_options(run, cfg);
    add_design_options(run, cfg);
    add_run_options(run, cfg);
    add_spsa_options(run, cfg);
    run->add_option("--method", cfg.method,
                    "degree|pagerank|betweenness|uniform|full|spsa|file:<path>");

    auto* corrected = app.add_subcommand("corrected-run",
                                         "consensus with alpha pre-compensation");
    add_graph_options(corrected, cfg);
    add_design_options(corrected, cfg);
    add_run_options(corrected, cfg);
    add_spsa_options(corrected, cfg);
    corrected->add_option("--method", cfg.method,
                          "degree|pagerank|betweenness|uniform|full|spsa|file:<path>");
    corrected->add_option("--cal-tol", cfg.cal_tol, "calibration column-spread tolerance");
    corrected->add_option("--cal-max-rounds", cfg.cal_max_rounds, "calibration round cap");
    corrected->add_flag("--mismatch-schedule", cfg.mismatch_schedule,
                        "negative control: run under a stream other than the calibrated one");

    auto* optimize = app.add_subcommand("optimize-p", "SPSA broadcast-probability design");
    add_graph_options(optimize, cfg);
    add_design_options(optimize, cfg);
    add_spsa_options(optimize, cfg);
    optimize->add_option("--out-dir", cfg.out_dir, "output directory");
    optimize->add_option("--tag", cfg.tag, "file-name prefix for outputs");

    auto* repro = app.add_subcommand("reproduce", "standard figure pipelines");
    repro->add_option("figure", figure, "fig1|fig2|fig3")->required();
    add_graph_options(repro, cfg);
    add_design_options(repro, cfg);
    add_run_options(repro, cfg);
    add_spsa_options(repro, cfg);

    auto* verify = app.add_subcommand("verify", "convergence-condition report");
    add_graph_options(verify, cfg);
    verify->add_option("--epsilon", cfg.epsilon,
                       "mixing step size (default 1/(max_degree+1))");

    try {
        app.parse(argc, argv);

        if (generate->parsed()) {
            const pbcast::Graph g =
                pbcast::erdos_renyi(cfg.n, cfg.edge_prob, cfg.graph_seed, cfg.max_retries);
            pbcast::save_edge_list(g, graph_out);
            std::cout << "nodes=" << g.n() << " edges=" << g.num_edges()
                      << " max_degree=" << g.max_degree()
                      << " connected=" << (g.is_connected() ? "yes" : "no") << '\n';
            std::cout << "wrote " << graph_out << '\n';
        } else if (run->parsed()) {
            print_run_report(pbcast::run_experiment(cfg));
        } else if (corrected->parsed()) {
            print_run_report(pbcast::corrected_experiment(cfg));
        } else if (optimize->parsed()) {
            const pbcast::OptimizeOutput out = pbcast::optimize_experiment(cfg);
            std::cout << "initial objective " << pbcast::format_double(out.initial_objective)
                      << '\n'
                      << "best objective    " << pbcast::format_double(out.best_objective)
                      << '\n';
            for (const auto& f : out.files) std::cout << "wrote " << f << '\n';
        } else if (repro->parsed()) {
            for (const auto& f : pbcast::reproduce(figure, cfg))
                std::cout << "wrote " << f << '\n';
        } else if (verify->parsed()) {
            const pbcast::VerifyOutput out = pbcast::verify_experiment(cfg);
            std::cout << "n=" << out.n << " epsilon=" << pbcast::format_double(out.epsilon)
                      << '\n'
                      << pbcast::render_spectrum_report(out.report);
            if (!out.report.all_conditions()) return 1;
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: usage: " << e.what() << '\n';
        return 1;
    } catch (const pbcast::Error& e) {
        std::cerr << "error: " << e.error_class() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
