#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pbcast/error.hpp"
#include "pbcast/graph.hpp"
#include "pbcast/matrix.hpp"

namespace pbcast {

using ScoreVector = std::vector<double>;

// Per-node broadcast probabilities with sum(p) = budget. K = n reproduces
// full communication; K < n is the partial-communication regime.
struct ProbabilityVector {
    std::vector<double> p;
    double budget = 0.0;

    int size() const { return static_cast<int>(p.size()); }

    static ProbabilityVector full(int n) {
        return ProbabilityVector{std::vector<double>(n, 1.0), static_cast<double>(n)};
    }

    static ProbabilityVector uniform(int n, double k) {
        if (!(k > 0.0) || k > n)
            throw Error(errc::domain, "uniform probabilities: need 0 < K <= N");
        return ProbabilityVector{std::vector<double>(n, k / n), k};
    }

    static ProbabilityVector from_values(std::vector<double> values) {
        double sum = 0.0;
        for (double x : values) {
            if (!(x >= 0.0) || x > 1.0 + 1e-12)
                throw Error(errc::domain, "probability entries must lie in [0, 1]");
            sum += x;
        }
        return ProbabilityVector{std::move(values), sum};
    }
};

inline ScoreVector degree_scores(const Graph& g) {
    ScoreVector s(g.n());
    for (int i = 0; i < g.n(); ++i) s[i] = static_cast<double>(g.degree(i));
    return s;
}

// Undirected PageRank fixed point
//   pr_i = (1-damping)/N + damping * sum_{j in N_i} pr_j / d_j,
// iterated from uniform until the max-norm change drops below tol.
// Scores sum to 1 (no dangling nodes in a connected graph).
inline ScoreVector pagerank_scores(const Graph& g, double damping = 0.85,
                                   double tol = 1e-10, int max_iter = 10000) {
    if (!(damping > 0.0) || !(damping < 1.0))
        throw Error(errc::domain, "pagerank: damping must be in (0, 1)");
    const int n = g.n();
    ScoreVector pr(n, 1.0 / n), next(n);
    double residual = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j : g.neighbors(i)) acc += pr[j] / g.degree(j);
            next[i] = (1.0 - damping) / n + damping * acc;
        }
        residual = 0.0;
        for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(next[i] - pr[i]));
        pr.swap(next);
        if (residual < tol) return pr;
    }
    throw Error(errc::non_convergence,
                "pagerank did not converge in " + std::to_string(max_iter) +
                    " iterations (last residual " + format_double(residual) + ")");
}

// Brandes' accumulation over BFS trees; pair-count convention, halved so each
// unordered pair contributes once. Degree-one nodes score exactly zero.
inline ScoreVector betweenness_scores(const Graph& g) {
    const int n = g.n();
    ScoreVector bc(n, 0.0);
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::vector<int>> pred(n);

    for (int s = 0; s < n; ++s) {
        order.clear();
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& pl : pred) pl.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        std::vector<int> frontier{s};
        std::size_t head = 0;
        while (head < frontier.size()) {
            int u = frontier[head++];
            order.push_back(u);
            for (int v : g.neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    frontier.push_back(v);
                }
                if (dist[v] == dist[u] + 1) {
                    sigma[v] += sigma[u];
                    pred[v].push_back(u);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) bc[w] += delta[w];
        }
    }
    for (double& x : bc) x *= 0.5;
    return bc;
}

inline ScoreVector shifted_scores(const ScoreVector& s, double beta) {
    if (!(beta > 0.0)) throw Error(errc::domain, "shifted_scores: beta must be positive");
    ScoreVector out(s);
    for (double& x : out) x += beta;
    return out;
}

// Default shift for betweenness: a hundredth of the score scale, so the
// ordering stays dominated by the raw scores.
inline double default_beta(const ScoreVector& s) {
    double m = 0.0;
    for (double x : s) m = std::max(m, x);
    return 1e-2 * (m > 0.0 ? m : 1.0);
}

// Solves p_i = min(1, gamma * s_i) with the unique gamma > 0 such that
// sum(p) = K. The sum is piecewise linear and increasing in gamma, so the
// exact gamma falls out of one pass over the sorted cap breakpoints 1/s_i.
inline ProbabilityVector probability_vector(const ScoreVector& scores, double k) {
    const int n = static_cast<int>(scores.size());
    if (n < 1) throw Error(errc::domain, "probability_vector: empty score vector");
    for (double s : scores)
        if (!(s > 0.0))
            throw Error(errc::domain,
                        "probability_vector: all scores must be positive "
                        "(apply shifted_scores to zero-valued centralities first)");
    if (!(k > 0.0)) throw Error(errc::domain, "probability_vector: K must be positive");
    if (k > n)
        throw Error(errc::domain, "probability_vector: K = " + format_double(k) +
                                      " exceeds the node count " + std::to_string(n));

    std::vector<double> p(n);
    if (k == static_cast<double>(n)) {  // every cap binds
        std::fill(p.begin(), p.end(), 1.0);
        return ProbabilityVector{std::move(p), k};
    }

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // ascending cap breakpoints <=> descending scores
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return scores[a] > scores[b]; });

    std::vector<double> suffix(n + 1, 0.0);
    for (int m = n - 1; m >= 0; --m) suffix[m] = suffix[m + 1] + scores[idx[m]];

    double gamma = -1.0;
    for (int m = 0; m < n; ++m) {
        // entries idx[0..m-1] capped at 1, remainder proportional
        const double cand = (k - m) / suffix[m];
        if (cand <= 1.0 / scores[idx[m]] * (1.0 + 1e-15)) {
            gamma = cand;
            break;
        }
    }
    if (gamma <= 0.0)
        throw Error(errc::numerical_failure, "probability_vector: no feasible gamma found");

    for (int i = 0; i < n; ++i) p[i] = std::min(1.0, gamma * scores[i]);
    return ProbabilityVector{std::move(p), k};
}

inline std::uint64_t probability_hash(const ProbabilityVector& p) {
    std::uint64_t h = detail::mix64(0x70726f6200ull ^ static_cast<std::uint64_t>(p.size()));
    for (double x : p.p) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(x));
        std::memcpy(&bits, &x, sizeof(bits));
        h = detail::mix64(h ^ bits);
    }
    return h;
}

// Serialized as one "index probability" pair per line.
inline void write_probability_vector(const ProbabilityVector& p, std::ostream& out) {
    for (int i = 0; i < p.size(); ++i)
        out << i << ' ' << format_double(p.p[i]) << '\n';
}

inline void save_probability_vector(const ProbabilityVector& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    write_probability_vector(p, out);
    if (!out) throw Error(errc::io, "write failed: " + path);
}

inline ProbabilityVector load_probability_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open probability file: " + path);
    std::vector<std::pair<int, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int i;
        double v;
        if (!(ls >> i)) continue;
        if (!(ls >> v))
            throw Error(errc::io, "probability file line " + std::to_string(lineno) +
                                      ": expected \"index value\"");
        rows.emplace_back(i, v);
    }
    if (rows.empty()) throw Error(errc::io, "probability file is empty: " + path);
    std::sort(rows.begin(), rows.end());
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != static_cast<int>(i))
            throw Error(errc::io, "probability file must cover indices 0..N-1 exactly");
        values[i] = rows[i].second;
    }
    try {
        return ProbabilityVector::from_values(std::move(values));
    } catch (const Error& e) {
        throw Error(errc::io, std::string("invalid probability file: ") + e.what());
    }
}

}  // namespace pbcast
