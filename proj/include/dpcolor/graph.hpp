#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dpcolor/errors.hpp"
#include "dpcolor/numeric.hpp"
#include "dpcolor/rng.hpp"

namespace dpcolor {

// Simple undirected graph over vertices 0..n-1. Adjacency is stored as one
// bit row per vertex, so adjacency queries are O(1) and neighborhood scans
// are word-parallel. Values are treated as immutable once built; builders
// construct and return by value.
class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : n_(n), words_((n + 63) / 64), bits_(static_cast<std::size_t>(n) * words_, 0) {
        if (n < 0) throw parameter_error("Graph: negative vertex count");
    }

    static Graph from_edges(int n, std::span<const std::pair<int, int>> edges) {
        Graph g(n);
        for (auto [u, v] : edges) g.add_edge(u, v);
        return g;
    }

    static Graph from_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
        return from_edges(n, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
    }

    void add_edge(int u, int v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw parameter_error("Graph: self-loop at vertex " + std::to_string(u));
        set_bit(u, v);
        set_bit(v, u);
    }

    int num_vertices() const { return n_; }

    bool adjacent(int u, int v) const {
        return (bits_[static_cast<std::size_t>(u) * words_ + v / 64] >> (v % 64)) & 1;
    }

    int degree(int v) const {
        int d = 0;
        const std::uint64_t* row = &bits_[static_cast<std::size_t>(v) * words_];
        for (int w = 0; w < words_; ++w) d += std::popcount(row[w]);
        return d;
    }

    int max_degree() const {
        int m = 0;
        for (int v = 0; v < n_; ++v) m = std::max(m, degree(v));
        return m;
    }

    std::int64_t edge_count() const {
        std::int64_t s = 0;
        for (int v = 0; v < n_; ++v) s += degree(v);
        return s / 2;
    }

    double average_degree() const {
        if (n_ == 0) return 0.0;
        return 2.0 * static_cast<double>(edge_count()) / n_;
    }

    // Open neighborhood, ascending.
    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        const std::uint64_t* row = &bits_[static_cast<std::size_t>(v) * words_];
        for (int w = 0; w < words_; ++w) {
            std::uint64_t bitsw = row[w];
            while (bitsw) {
                int b = std::countr_zero(bitsw);
                out.push_back(w * 64 + b);
                bitsw &= bitsw - 1;
            }
        }
        return out;
    }

    // Adjacency row as a single word; only valid for n <= 64.
    std::uint64_t neighbor_mask(int v) const {
        if (n_ > 64) throw parameter_error("neighbor_mask: graph has more than 64 vertices");
        return n_ == 0 ? 0 : bits_[static_cast<std::size_t>(v) * words_];
    }

    // Edges with u < v, lexicographic.
    std::vector<std::pair<int, int>> edge_list() const {
        std::vector<std::pair<int, int>> out;
        for (int u = 0; u < n_; ++u)
            for (int v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    bool operator==(const Graph& o) const { return n_ == o.n_ && bits_ == o.bits_; }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= n_) throw parameter_error("Graph: vertex " + std::to_string(v) + " out of range");
    }
    void set_bit(int u, int v) {
        bits_[static_cast<std::size_t>(u) * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
    }

    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Erdos-Renyi style generator with EDGE probability q. The random-graph
// literature this toolkit tracks often parametrizes by the NON-edge
// probability p; callers translating from that convention pass q = 1-p.
// Pairs are visited in lexicographic order on a single derived stream, so
// output is a pure function of (n, q, seed).
inline Graph random_graph(int n, double q, Seed seed) {
    if (!(q >= 0.0 && q <= 1.0)) throw parameter_error("random_graph: q must lie in [0,1]");
    Graph g(n);
    Rng rng(derive(seed, 0x6772617068ULL));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < q) g.add_edge(u, v);
    return g;
}

// Random bipartite graph on parts [0, n/2) and [n/2, n); cross edges appear
// independently with probability q. Triangle-free by construction.
inline Graph random_bipartite_graph(int n, double q, Seed seed) {
    if (!(q >= 0.0 && q <= 1.0)) throw parameter_error("random_bipartite_graph: q must lie in [0,1]");
    Graph g(n);
    Rng rng(derive(seed, 0x6269706172ULL));
    int half = n / 2;
    for (int u = 0; u < half; ++u)
        for (int v = half; v < n; ++v)
            if (rng.next_double() < q) g.add_edge(u, v);
    return g;
}

inline Graph complete_graph(int n) {
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

// Induced subgraph on X. Result vertex i corresponds to sorted(X)[i]; the
// sorted map is written to *vertex_map when given.
inline Graph induced_subgraph(const Graph& g, std::span<const int> X, std::vector<int>* vertex_map = nullptr) {
    std::vector<int> xs(X.begin(), X.end());
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
        throw parameter_error("induced_subgraph: duplicate vertex in X");
    for (int v : xs)
        if (v < 0 || v >= g.num_vertices())
            throw parameter_error("induced_subgraph: vertex " + std::to_string(v) + " out of range");
    Graph h(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (g.adjacent(xs[i], xs[j])) h.add_edge(static_cast<int>(i), static_cast<int>(j));
    if (vertex_map) *vertex_map = std::move(xs);
    return h;
}

// Turan bound on the independence number: alpha >= n/(d+1), exact rational.
inline BigRat turan_bound(std::int64_t n, const BigRat& d) {
    if (n < 0) throw parameter_error("turan_bound: negative n");
    if (d < 0) throw parameter_error("turan_bound: negative average degree");
    return BigRat(n) / (d + 1);
}

// --- file format: {"n": int, "edges": [[u,v],...]} with u<v, sorted ---

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.num_vertices();
    auto edges = nlohmann::json::array();
    for (auto [u, v] : g.edge_list()) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
        throw format_error("graph: expected object with \"n\" and \"edges\"");
    if (!j["n"].is_number_integer()) throw format_error("graph: \"n\" must be an integer");
    int n = j["n"].get<int>();
    if (n < 0) throw format_error("graph: negative \"n\"");
    Graph g(n);
    std::pair<int, int> prev{-1, -1};
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
        const auto& e = j["edges"][i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw format_error("graph: edge " + std::to_string(i) + " is not an integer pair");
        int u = e[0].get<int>(), v = e[1].get<int>();
        if (u >= v) throw format_error("graph: edge " + std::to_string(i) + " violates u < v");
        if (u < 0 || v >= n) throw format_error("graph: edge " + std::to_string(i) + " out of range");
        std::pair<int, int> cur{u, v};
        if (!(prev < cur)) throw format_error("graph: edges not sorted or duplicate at index " + std::to_string(i));
        prev = cur;
        g.add_edge(u, v);
    }
    return g;
}

inline void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw format_error("save_graph: cannot open " + path);
    out << graph_to_json(g).dump(2) << "\n";
}

inline Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("load_graph: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error("load_graph: " + path + ": " + e.what());
    }
    return graph_from_json(j);
}

}  // namespace dpcolor
