#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "pbcast/centrality.hpp"
#include "pbcast/error.hpp"
#include "pbcast/mixing.hpp"
#include "pbcast/rng.hpp"

namespace pbcast {

// Objective of the probability design problem: the projected spectral radius
// of the expected round matrix. Deterministic (exact eigensolve), but
// non-smooth in p, which is why a derivative-free method is used on it.
inline double objective(const MixingMatrix& base, const ProbabilityVector& p) {
    return projected_spectral_radius(expected_matrix(base, p));
}

// Euclidean projection onto the capped simplex {p : sum p = K, lo <= p_i <= hi}.
// The optimal point is p_i = clip(y_i - lambda, lo, hi) for the shift lambda
// that meets the budget; the shifted sum is monotone in lambda, so bisection
// pins it down to machine-level accuracy.
inline ProbabilityVector project_capped_simplex(const std::vector<double>& y, double k,
                                                double lo = 0.0, double hi = 1.0) {
    const int n = static_cast<int>(y.size());
    if (n < 1) throw Error(errc::domain, "project_capped_simplex: empty input");
    if (!(lo <= hi)) throw Error(errc::domain, "project_capped_simplex: lo > hi");
    const double slack = 1e-12;
    if (k < n * lo - slack || k > n * hi + slack)
        throw Error(errc::infeasible,
                    "budget K = " + format_double(k) + " outside [" +
                        format_double(n * lo) + ", " + format_double(n * hi) + "]");

    auto clip = [&](double v) { return std::min(hi, std::max(lo, v)); };
    auto shifted_sum = [&](double lambda) {
        double s = 0.0;
        for (double v : y) s += clip(v - lambda);
        return s;
    };

    double lambda_lo = y[0], lambda_hi = y[0];
    for (double v : y) {
        lambda_lo = std::min(lambda_lo, v);
        lambda_hi = std::max(lambda_hi, v);
    }
    lambda_lo -= hi;  // sum = n*hi here
    lambda_hi -= lo;  // sum = n*lo here
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lambda_lo + lambda_hi);
        if (shifted_sum(mid) > k)
            lambda_lo = mid;
        else
            lambda_hi = mid;
        if (lambda_hi - lambda_lo < 1e-15 * std::max(1.0, std::abs(lambda_hi))) break;
    }
    const double lambda = 0.5 * (lambda_lo + lambda_hi);

    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = clip(y[i] - lambda);
    return ProbabilityVector{std::move(p), k};
}

struct SpsaConfig {
    std::uint64_t iterations = 500;
    double a = 0.05;            // step-size scale
    double stability = -1.0;    // A; negative means 10% of the iteration count
    double c = 0.05;            // perturbation scale
    double alpha_gain = 0.602;  // step-size decay exponent
    double gamma_gain = 0.101;  // perturbation decay exponent
    double p_min = 0.01;        // probability floor, keeps every node broadcasting
    std::uint64_t seed = 0;

    double resolved_stability() const {
        return stability >= 0.0 ? stability
                                : 0.1 * static_cast<double>(iterations);
    }
};

struct TracePoint {
    std::uint64_t iteration = 0;
    double objective = 0.0;
};

struct OptimizationTrace {
    std::vector<TracePoint> evaluations;      // objective at each projected iterate
    std::vector<std::vector<double>> iterates;
    std::vector<double> best_p;
    double best_objective = 0.0;
};

// Simultaneous perturbation stochastic approximation over the capped simplex.
// Both probes and the iterate are projected before evaluation, so the
// eigensolver only ever sees feasible points; the returned vector is the best
// feasible point actually evaluated, which can never be worse than p_init.
inline std::pair<ProbabilityVector, OptimizationTrace> spsa_optimize(
    const MixingMatrix& base, double k, const ProbabilityVector& p_init,
    const SpsaConfig& cfg = {}) {
    const int n = base.n();
    if (p_init.size() != n)
        throw Error(errc::domain, "spsa_optimize: initial point length does not match matrix");
    if (!(cfg.p_min >= 0.0) || cfg.p_min * n >= k)
        throw Error(errc::domain, "spsa_optimize: need 0 <= p_min < K/N");
    if (!(cfg.c > 0.0)) throw Error(errc::domain, "spsa_optimize: c must be positive");
    double sum = 0.0;
    for (double pi : p_init.p) {
        if (pi < cfg.p_min - 1e-9 || pi > 1.0 + 1e-9)
            throw Error(errc::domain,
                        "spsa_optimize: initial point violates the probability box");
        sum += pi;
    }
    if (std::abs(sum - k) > 1e-9)
        throw Error(errc::domain, "spsa_optimize: initial point does not meet the budget");

    const CounterStream perturb(cfg.seed, "spsa");
    const double big_a = cfg.resolved_stability();

    OptimizationTrace trace;
    std::vector<double> p = p_init.p;
    auto evaluate = [&](const ProbabilityVector& cand) {
        const double f = objective(base, cand);
        if (trace.best_p.empty() || f < trace.best_objective) {
            trace.best_p = cand.p;
            trace.best_objective = f;
        }
        return f;
    };

    trace.iterates.push_back(p);
    trace.evaluations.push_back({0, evaluate(ProbabilityVector{p, k})});

    std::vector<double> probe(n), grad(n);
    for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
        const double ck = cfg.c / std::pow(static_cast<double>(it + 1), cfg.gamma_gain);
        const double ak =
            cfg.a / std::pow(static_cast<double>(it + 1) + big_a, cfg.alpha_gain);

        std::vector<int> delta(n);
        for (int i = 0; i < n; ++i) delta[i] = perturb.rademacher(it, i);

        for (int i = 0; i < n; ++i) probe[i] = p[i] + ck * delta[i];
        const double f_plus = evaluate(project_capped_simplex(probe, k, cfg.p_min, 1.0));
        for (int i = 0; i < n; ++i) probe[i] = p[i] - ck * delta[i];
        const double f_minus = evaluate(project_capped_simplex(probe, k, cfg.p_min, 1.0));

        const double diff = (f_plus - f_minus) / (2.0 * ck);
        for (int i = 0; i < n; ++i) grad[i] = diff / delta[i];

        for (int i = 0; i < n; ++i) probe[i] = p[i] - ak * grad[i];
        const ProbabilityVector next = project_capped_simplex(probe, k, cfg.p_min, 1.0);
        p = next.p;
        trace.iterates.push_back(p);
        trace.evaluations.push_back({it + 1, evaluate(next)});
    }

    return {ProbabilityVector{trace.best_p, k}, std::move(trace)};
}

inline void save_trace_csv(const OptimizationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    out << "iteration,objective\n";
    for (const auto& e : trace.evaluations)
        out << e.iteration << ',' << format_double(e.objective) << '\n';
    if (!out) throw Error(errc::io, "write failed: " + path);
}

}  // namespace pbcast
