#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pbcast/error.hpp"
#include "pbcast/matrix.hpp"
#include "pbcast/rng.hpp"

namespace pbcast {

// Simple undirected graph on dense 0-based node indices. Immutable after
// construction: simulation code may share one instance across threads.
class Graph {
public:
    // Edges are unordered pairs; both orientations and repeated listings
    // collapse to one stored representative (i < j). Self-loops are rejected.
    Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
        if (n < 1) throw Error(errc::domain, "graph needs at least one node");
        for (auto& [i, j] : edges) {
            if (i < 0 || j < 0 || i >= n || j >= n)
                throw Error(errc::domain, "edge endpoint out of range");
            if (i == j) throw Error(errc::domain, "self-loops are not allowed");
            if (i > j) std::swap(i, j);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
        adj_.assign(n_, {});
        for (const auto& [i, j] : edges_) {
            adj_[i].push_back(j);
            adj_[j].push_back(i);
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    }

    int n() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    const std::vector<int>& neighbors(int i) const {
        if (i < 0 || i >= n_) throw Error(errc::domain, "node index out of range");
        return adj_[i];
    }

    int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

    std::vector<int> degrees() const {
        std::vector<int> d(n_);
        for (int i = 0; i < n_; ++i) d[i] = static_cast<int>(adj_[i].size());
        return d;
    }

    int max_degree() const {
        int m = 0;
        for (const auto& nb : adj_) m = std::max(m, static_cast<int>(nb.size()));
        return m;
    }

    bool has_edge(int i, int j) const {
        if (i == j) return false;
        const auto& nb = neighbors(i);
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    bool is_connected() const {
        std::vector<char> seen(n_, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++reached;
                    q.push(v);
                }
        }
        return reached == n_;
    }

    Matrix adjacency() const {
        Matrix a(n_, n_);
        for (const auto& [i, j] : edges_) {
            a(i, j) = 1.0;
            a(j, i) = 1.0;
        }
        return a;
    }

    // L = D - A: symmetric, zero row sums, -1 off-diagonal per edge.
    Matrix laplacian() const {
        Matrix l(n_, n_);
        for (int i = 0; i < n_; ++i) l(i, i) = static_cast<double>(adj_[i].size());
        for (const auto& [i, j] : edges_) {
            l(i, j) = -1.0;
            l(j, i) = -1.0;
        }
        return l;
    }

    std::uint64_t content_hash() const {
        std::uint64_t h = detail::mix64(0x67726170680000ull ^ static_cast<std::uint64_t>(n_));
        for (const auto& [i, j] : edges_) {
            h = detail::mix64(h ^ static_cast<std::uint64_t>(i));
            h = detail::mix64(h ^ static_cast<std::uint64_t>(j));
        }
        return h;
    }

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

// G(n, q): every unordered pair becomes an edge independently with
// probability edge_prob. Samples are redrawn until connected; draws are
// addressed by (attempt, pair) so the result is a pure function of
// (n, edge_prob, seed).
inline Graph erdos_renyi(int n, double edge_prob, std::uint64_t seed,
                         int max_retries = 1000) {
    if (n < 2) throw Error(errc::domain, "erdos_renyi: need n >= 2");
    if (!(edge_prob > 0.0) || edge_prob > 1.0)
        throw Error(errc::domain, "erdos_renyi: edge_prob must be in (0, 1]");
    if (max_retries < 1) throw Error(errc::domain, "erdos_renyi: max_retries must be >= 1");

    const CounterStream stream(seed, "graph");
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const auto pair_id =
                    static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) + j;
                if (stream.uniform(static_cast<std::uint64_t>(attempt), pair_id) < edge_prob)
                    edges.emplace_back(i, j);
            }
        Graph g(n, std::move(edges));
        if (g.is_connected()) return g;
    }
    throw Error(errc::generation_failure,
                "no connected Erdos-Renyi sample after " + std::to_string(max_retries) +
                    " attempts (n=" + std::to_string(n) +
                    ", edge_prob=" + format_double(edge_prob) + ")");
}

// Edge-list text format: one "i j" pair per line, '#' starts a comment,
// and an optional "nodes <n>" line fixes the node count explicitly.
// Without the header, labels may be arbitrary nonnegative integers and are
// remapped to 0..m-1 in sorted order. Connectivity is not enforced here;
// callers that need it ask the returned graph.
inline Graph parse_edge_list(std::istream& in) {
    long long declared_n = -1;
    std::vector<std::pair<long long, long long>> raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "nodes") {
            if (!(ls >> declared_n) || declared_n < 1)
                throw Error(errc::io, "edge list line " + std::to_string(lineno) +
                                          ": malformed nodes header");
            continue;
        }
        long long a = 0, b = 0;
        try {
            a = std::stoll(first);
        } catch (const std::exception&) {
            throw Error(errc::io,
                        "edge list line " + std::to_string(lineno) + ": expected integer");
        }
        if (!(ls >> b))
            throw Error(errc::io,
                        "edge list line " + std::to_string(lineno) + ": expected two labels");
        if (a < 0 || b < 0)
            throw Error(errc::io,
                        "edge list line " + std::to_string(lineno) + ": negative label");
        raw.emplace_back(a, b);
    }

    std::vector<std::pair<int, int>> edges;
    edges.reserve(raw.size());
    int n = 0;
    if (declared_n >= 1) {
        n = static_cast<int>(declared_n);
        for (const auto& [a, b] : raw) {
            if (a >= declared_n || b >= declared_n)
                throw Error(errc::io, "edge label exceeds declared node count");
            edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        }
    } else {
        std::vector<long long> labels;
        for (const auto& [a, b] : raw) {
            labels.push_back(a);
            labels.push_back(b);
        }
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        if (labels.empty()) throw Error(errc::io, "edge list contains no edges");
        std::map<long long, int> remap;
        for (std::size_t k = 0; k < labels.size(); ++k)
            remap[labels[k]] = static_cast<int>(k);
        n = static_cast<int>(labels.size());
        for (const auto& [a, b] : raw) edges.emplace_back(remap[a], remap[b]);
    }
    try {
        return Graph(n, std::move(edges));
    } catch (const Error& e) {
        throw Error(errc::io, std::string("invalid edge list: ") + e.what());
    }
}

inline Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open graph file: " + path);
    return parse_edge_list(in);
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
    out << "nodes " << g.n() << '\n';
    for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

inline void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    write_edge_list(g, out);
    if (!out) throw Error(errc::io, "write failed: " + path);
}

}  // namespace pbcast
