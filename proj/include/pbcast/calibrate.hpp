#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pbcast/engine.hpp"
#include "pbcast/error.hpp"
#include "pbcast/mixing.hpp"
#include "pbcast/schedule.hpp"

namespace pbcast {

// Limit weights of the random round-matrix product: prod_t roundmatrix(t)
// tends to u alpha^T, so the biased consensus value is alpha^T x(0).
// Carries the schedule stream identity it was estimated against; the
// weights are only valid under replay of that exact stream.
struct AlphaWeights {
    std::vector<double> alpha;
    std::uint64_t seed = 0;
    std::string label;
    std::uint64_t rounds = 0;         // J: rounds applied during estimation
    std::uint64_t slots_used = 0;     // actual transmission slots over those rounds
    double column_spread = 0.0;       // worst per-column spread at termination

    int size() const { return static_cast<int>(alpha.size()); }
};

struct CalibrationStop {
    double spread_tol = 1e-10;
    std::uint64_t max_rounds = 100000;
};

// Tracks the full product M(t) = roundmatrix(t-1) ... roundmatrix(0), column
// by column, applying the same per-round update the engine uses. Column i of
// M(t) is exactly the consensus run started from the i-th unit vector, so one
// matrix pass replaces N vector runs with identical arithmetic. At
// convergence every column is constant; alpha_i is the mean of column i.
inline AlphaWeights estimate_alpha(const MixingMatrix& base, const ProbabilityVector& p,
                                   const ScheduleStream& stream,
                                   const CalibrationStop& stop = {}) {
    const int n = base.n();
    if (p.size() != n)
        throw Error(errc::domain, "estimate_alpha: probability length does not match matrix");
    for (double pi : p.p)
        if (!(pi > 0.0))
            throw Error(errc::domain,
                        "estimate_alpha: every broadcast probability must be positive");

    const detail::SparseMixing sparse(base.w);
    std::vector<std::vector<double>> cols(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) cols[i][i] = 1.0;
    std::vector<double> scratch(n);

    auto worst_spread = [&]() {
        double w = 0.0;
        for (const auto& c : cols) w = std::max(w, spread(c));
        return w;
    };

    std::uint64_t t = 0;
    std::uint64_t used = 0;
    double worst = worst_spread();
    while (worst >= stop.spread_tol) {
        if (t >= stop.max_rounds)
            throw Error(errc::calibration_failure,
                        "calibration hit the round cap at " + std::to_string(t) +
                            " rounds with worst column spread " + format_double(worst));
        const ScheduleVector sched = schedule(stream, p, t);
        for (auto& col : cols) {
            sparse.apply_round(sched, col, scratch);
            col.swap(scratch);
        }
        used += slots(sched);
        ++t;
        worst = worst_spread();
    }

    AlphaWeights out;
    out.alpha.resize(n);
    for (int i = 0; i < n; ++i) out.alpha[i] = mean(cols[i]);
    out.seed = stream.seed();
    out.label = stream.label();
    out.rounds = t;
    out.slots_used = used;
    out.column_spread = worst;
    return out;
}

// x~_i(0) = x_i(0) / (alpha_i N). Under the replayed schedule stream the
// biased limit alpha^T x~(0) telescopes to the plain average of x(0).
inline std::vector<double> precompensate(const std::vector<double>& x0,
                                         const AlphaWeights& weights,
                                         double alpha_floor = 1e-12) {
    const int n = weights.size();
    if (static_cast<int>(x0.size()) != n)
        throw Error(errc::domain, "precompensate: state length does not match weights");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        if (!(weights.alpha[i] > alpha_floor))
            throw Error(errc::degenerate_alpha,
                        "alpha[" + std::to_string(i) + "] = " +
                            format_double(weights.alpha[i]) +
                            " is at or below the floor " + format_double(alpha_floor));
        out[i] = x0[i] / (weights.alpha[i] * n);
    }
    return out;
}

struct CorrectedRun {
    AlphaWeights weights;
    Trajectory trajectory;
};

// Estimate alpha, pre-compensate, and rerun consensus on the identical
// schedule stream, landing on the true average of x0.
inline CorrectedRun corrected_run(const MixingMatrix& base, const std::vector<double>& x0,
                                  const ProbabilityVector& p, const ScheduleStream& stream,
                                  const StopRule& stop = {},
                                  const CalibrationStop& cal_stop = {}) {
    CorrectedRun out;
    out.weights = estimate_alpha(base, p, stream, cal_stop);
    const std::vector<double> compensated = precompensate(x0, out.weights);
    out.trajectory = run_consensus(base, compensated, p, stream, stop);
    return out;
}

// Alpha file: one header line keying the weights to (graph, p, seed, label),
// then one "index alpha" pair per line at full precision.
inline void save_alpha(const AlphaWeights& weights, std::uint64_t graph_hash,
                       std::uint64_t p_hash, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    out << "# alpha graph=" << graph_hash << " p=" << p_hash << " seed=" << weights.seed
        << " rounds=" << weights.rounds << " slots=" << weights.slots_used
        << " spread=" << format_double(weights.column_spread) << " label=" << weights.label
        << '\n';
    for (int i = 0; i < weights.size(); ++i)
        out << i << ' ' << format_double(weights.alpha[i]) << '\n';
    if (!out) throw Error(errc::io, "write failed: " + path);
}

struct StoredAlpha {
    AlphaWeights weights;
    std::uint64_t graph_hash = 0;
    std::uint64_t p_hash = 0;
};

inline StoredAlpha load_alpha(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open alpha file: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("# alpha ", 0) != 0)
        throw Error(errc::io, "alpha file missing header: " + path);

    StoredAlpha out;
    std::istringstream hs(header.substr(8));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw Error(errc::io, "alpha header token without '=': " + tok);
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        try {
            if (key == "graph")
                out.graph_hash = std::stoull(val);
            else if (key == "p")
                out.p_hash = std::stoull(val);
            else if (key == "seed")
                out.weights.seed = std::stoull(val);
            else if (key == "rounds")
                out.weights.rounds = std::stoull(val);
            else if (key == "slots")
                out.weights.slots_used = std::stoull(val);
            else if (key == "spread")
                out.weights.column_spread = std::stod(val);
            else if (key == "label") {
                // label is last; it may contain anything up to end of line
                std::string rest;
                std::getline(hs, rest);
                out.weights.label = val + rest;
            }
        } catch (const std::exception&) {
            throw Error(errc::io, "alpha header: bad value for " + key);
        }
    }

    std::vector<std::pair<int, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int i;
        double v;
        if (!(ls >> i >> v)) continue;
        rows.emplace_back(i, v);
    }
    if (rows.empty()) throw Error(errc::io, "alpha file has no weights: " + path);
    std::sort(rows.begin(), rows.end());
    out.weights.alpha.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != static_cast<int>(i))
            throw Error(errc::io, "alpha file must cover indices 0..N-1 exactly");
        out.weights.alpha[i] = rows[i].second;
    }
    return out;
}

}  // namespace pbcast
