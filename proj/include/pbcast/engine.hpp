#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pbcast/centrality.hpp"
#include "pbcast/error.hpp"
#include "pbcast/matrix.hpp"
#include "pbcast/mixing.hpp"
#include "pbcast/schedule.hpp"

namespace pbcast {

struct StopRule {
    double spread_tol = 1e-8;        // converged once max(x)-min(x) < tol; <= 0 disables
    std::uint64_t max_rounds = 10000;
    std::uint64_t slot_budget = 0;   // stop once cumulative slots reach this; 0 disables
};

enum class TerminalStatus { converged, iteration_cap };

struct TrajectoryRow {
    std::uint64_t round = 0;
    std::vector<double> x;
    std::uint64_t slots_this_round = 0;
    std::uint64_t cumulative_slots = 0;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;  // rows[0] is the initial state, 0 slots
    TerminalStatus status = TerminalStatus::iteration_cap;

    const std::vector<double>& final_state() const { return rows.back().x; }
    std::uint64_t rounds() const { return rows.back().round; }
    std::uint64_t total_slots() const { return rows.back().cumulative_slots; }
};

inline double spread(const std::vector<double>& x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *hi - *lo;
}

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Population standard deviation around the current mean.
inline double stddev(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
}

inline double rmse(const std::vector<double>& x, double target) {
    double s = 0.0;
    for (double v : x) s += (v - target) * (v - target);
    return std::sqrt(s / static_cast<double>(x.size()));
}

namespace detail {

// Nonzero off-diagonal structure of the base matrix, one row per node.
// Round updates touch only broadcasting neighbors, so the per-round work is
// proportional to the realized traffic rather than N^2.
struct SparseMixing {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;

    explicit SparseMixing(const Matrix& w) : n(w.rows()), rows(w.rows()) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (j != i && w(i, j) != 0.0) rows[i].emplace_back(j, w(i, j));
    }

    // One application of the round matrix for schedule v:
    //   x_i <- (1 - sum_{k: v_k} w_ik) x_i + sum_{j: v_j} w_ij x_j
    void apply_round(const ScheduleVector& sched, const std::vector<double>& x,
                     std::vector<double>& out) const {
        for (int i = 0; i < n; ++i) {
            double diag = 1.0;
            double acc = 0.0;
            for (const auto& [j, wij] : rows[i]) {
                if (!sched.v[j]) continue;
                diag -= wij;
                acc += wij * x[j];
            }
            out[i] = diag * x[i] + acc;
        }
    }
};

}  // namespace detail

// Runs x(t+1) = round_matrix(W, v(t)) x(t) with v(t) drawn from the stream,
// recording every round. Terminates on spread tolerance, round cap, or slot
// budget, whichever is hit first.
inline Trajectory run_consensus(const MixingMatrix& base, const std::vector<double>& x0,
                                const ProbabilityVector& p, const ScheduleStream& stream,
                                const StopRule& stop = {}) {
    const int n = base.n();
    if (static_cast<int>(x0.size()) != n)
        throw Error(errc::domain, "run_consensus: initial state length does not match matrix");
    if (p.size() != n)
        throw Error(errc::domain, "run_consensus: probability length does not match matrix");
    for (double v : x0)
        if (!std::isfinite(v))
            throw Error(errc::domain, "run_consensus: initial state must be finite");

    const detail::SparseMixing sparse(base.w);
    Trajectory traj;
    std::vector<double> x = x0, next(n);
    std::uint64_t cumulative = 0;
    traj.rows.push_back({0, x, 0, 0});

    std::uint64_t t = 0;
    while (true) {
        if (stop.spread_tol > 0.0 && spread(x) < stop.spread_tol) {
            traj.status = TerminalStatus::converged;
            break;
        }
        if (t >= stop.max_rounds ||
            (stop.slot_budget > 0 && cumulative >= stop.slot_budget)) {
            traj.status = TerminalStatus::iteration_cap;
            break;
        }
        const ScheduleVector sched = schedule(stream, p, t);
        sparse.apply_round(sched, x, next);
        x.swap(next);
        for (double v : x)
            if (!std::isfinite(v))
                throw Error(errc::numerical_failure,
                            "non-finite node value at round " + std::to_string(t));
        const std::uint64_t s = slots(sched);
        cumulative += s;
        ++t;
        traj.rows.push_back({t, x, s, cumulative});
    }
    return traj;
}

struct MetricsRow {
    std::uint64_t cumulative_slots = 0;
    double stddev = 0.0;
    double rmse = 0.0;
};

inline std::vector<MetricsRow> metrics_series(const Trajectory& traj, double target) {
    std::vector<MetricsRow> rows;
    rows.reserve(traj.rows.size());
    for (const auto& r : traj.rows)
        rows.push_back({r.cumulative_slots, stddev(r.x), rmse(r.x, target)});
    return rows;
}

inline std::vector<std::uint64_t> make_slot_grid(std::uint64_t budget, std::uint64_t step) {
    if (step == 0) throw Error(errc::domain, "slot grid step must be positive");
    std::vector<std::uint64_t> grid;
    for (std::uint64_t s = 0; s <= budget; s += step) grid.push_back(s);
    return grid;
}

// Mean of each metric across realizations on a common slot grid. Cumulative
// slot counts differ per realization, so each series is aligned by carrying
// its last value at or before the checkpoint forward.
inline std::vector<MetricsRow> aggregate(const std::vector<std::vector<MetricsRow>>& runs,
                                         const std::vector<std::uint64_t>& grid) {
    if (runs.empty()) throw Error(errc::domain, "aggregate: no metric series given");
    for (const auto& series : runs)
        if (series.empty() || series.front().cumulative_slots != 0)
            throw Error(errc::domain, "aggregate: every series must start at slot 0");

    std::vector<MetricsRow> out;
    out.reserve(grid.size());
    std::vector<std::size_t> pos(runs.size(), 0);
    for (std::uint64_t checkpoint : grid) {
        double sd = 0.0, rm = 0.0;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const auto& series = runs[k];
            auto& i = pos[k];
            while (i + 1 < series.size() && series[i + 1].cumulative_slots <= checkpoint) ++i;
            sd += series[i].stddev;
            rm += series[i].rmse;
        }
        out.push_back({checkpoint, sd / static_cast<double>(runs.size()),
                       rm / static_cast<double>(runs.size())});
    }
    return out;
}

}  // namespace pbcast
