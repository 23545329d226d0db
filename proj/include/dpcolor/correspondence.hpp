#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dpcolor/errors.hpp"
#include "dpcolor/graph.hpp"
#include "dpcolor/rng.hpp"

namespace dpcolor {

// Partial matching between the color lists of an edge's endpoints. pairs are
// (c_u, c_v) sorted; the per-endpoint indexes answer "who does color c pair
// with" in O(1). A color may appear in at most one pair on each side.
struct Matching {
    std::vector<std::pair<int, int>> pairs;
    std::unordered_map<int, int> by_u;  // c_u -> c_v
    std::unordered_map<int, int> by_v;  // c_v -> c_u
};

inline Matching make_matching(std::vector<std::pair<int, int>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    Matching m;
    for (auto [cu, cv] : pairs) {
        if (!m.by_u.emplace(cu, cv).second)
            throw parameter_error("matching: color " + std::to_string(cu) + " paired twice on the u side");
        if (!m.by_v.emplace(cv, cu).second)
            throw parameter_error("matching: color " + std::to_string(cv) + " paired twice on the v side");
    }
    m.pairs = std::move(pairs);
    return m;
}

// Correspondence assignment (L, M): per-vertex color lists plus one partial
// matching per base edge. Lists are sorted sets of positive color ids; the
// matchings map is keyed by (u, v) with u < v.
struct CorrespondenceAssignment {
    Graph base;
    std::vector<std::vector<int>> lists;
    std::map<std::pair<int, int>, Matching> matchings;

    bool in_list(int v, int c) const {
        const auto& l = lists[v];
        return std::binary_search(l.begin(), l.end(), c);
    }

    // Color at v paired with (u, c) across edge uv; 0 when unpaired (color
    // ids are positive, so 0 is free as "none").
    int partner(int u, int c, int v) const {
        auto it = matchings.find(u < v ? std::make_pair(u, v) : std::make_pair(v, u));
        if (it == matchings.end()) return 0;
        const auto& side = u < v ? it->second.by_u : it->second.by_v;
        auto p = side.find(c);
        return p == side.end() ? 0 : p->second;
    }
};

inline int min_list_size(const CorrespondenceAssignment& ca) {
    std::size_t m = ca.lists.empty() ? 0 : ca.lists[0].size();
    for (const auto& l : ca.lists) m = std::min(m, l.size());
    return static_cast<int>(m);
}

inline bool is_ell_assignment(const CorrespondenceAssignment& ca, int ell) {
    return min_list_size(ca) >= ell;
}

// Structural problems of an assignment, empty when valid. The JSON loader
// turns any entry here into a format error; in-process constructors keep the
// invariants by construction.
inline std::vector<std::string> assignment_problems(const CorrespondenceAssignment& ca) {
    std::vector<std::string> out;
    int n = ca.base.num_vertices();
    if (static_cast<int>(ca.lists.size()) != n) {
        out.push_back("lists count differs from vertex count");
        return out;
    }
    for (int v = 0; v < n; ++v) {
        const auto& l = ca.lists[v];
        if (l.empty()) out.push_back("empty list at vertex " + std::to_string(v));
        if (!std::is_sorted(l.begin(), l.end()) || std::adjacent_find(l.begin(), l.end()) != l.end())
            out.push_back("list at vertex " + std::to_string(v) + " not a sorted set");
        for (int c : l)
            if (c <= 0) out.push_back("nonpositive color at vertex " + std::to_string(v));
    }
    for (const auto& [e, m] : ca.matchings) {
        auto [u, v] = e;
        std::string ename = "edge (" + std::to_string(u) + "," + std::to_string(v) + ")";
        if (u < 0 || v >= n || u >= v || !ca.base.adjacent(u, v)) {
            out.push_back("matching on non-" + ename);
            continue;
        }
        for (auto [cu, cv] : m.pairs) {
            if (!ca.in_list(u, cu) || !ca.in_list(v, cv))
                out.push_back("pair (" + std::to_string(cu) + "," + std::to_string(cv) + ") off-list on " + ename);
        }
    }
    return out;
}

// Uniform random perfect matchings on lists {1..ell}: each edge pairs color
// c at u with perm[c] at v where perm is a uniform permutation, independent
// across edges (single stream, edges in lexicographic order).
inline CorrespondenceAssignment random_assignment(const Graph& g, int ell, Seed seed) {
    if (ell < 1) throw parameter_error("random_assignment: ell must be >= 1");
    CorrespondenceAssignment ca;
    ca.base = g;
    std::vector<int> full(ell);
    for (int c = 1; c <= ell; ++c) full[c - 1] = c;
    ca.lists.assign(g.num_vertices(), full);
    Rng rng(derive(seed, 0x61736e6dULL));
    for (auto [u, v] : g.edge_list()) {
        std::vector<int> perm = full;
        rng.shuffle(perm);
        std::vector<std::pair<int, int>> pairs(ell);
        for (int c = 1; c <= ell; ++c) pairs[c - 1] = {c, perm[c - 1]};
        ca.matchings.emplace(std::make_pair(u, v), make_matching(std::move(pairs)));
    }
    return ca;
}

// List coloring embedded as correspondence: identity pairs on shared
// colors, so (L,M)-colorings are exactly the classic list colorings.
inline CorrespondenceAssignment from_lists(const Graph& g, std::vector<std::vector<int>> lists) {
    if (static_cast<int>(lists.size()) != g.num_vertices())
        throw parameter_error("from_lists: need one list per vertex");
    for (auto& l : lists) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        if (l.empty()) throw parameter_error("from_lists: empty list");
        if (l.front() <= 0) throw parameter_error("from_lists: colors must be positive");
    }
    CorrespondenceAssignment ca;
    ca.base = g;
    ca.lists = std::move(lists);
    for (auto [u, v] : g.edge_list()) {
        std::vector<std::pair<int, int>> pairs;
        for (int c : ca.lists[u])
            if (ca.in_list(v, c)) pairs.emplace_back(c, c);
        ca.matchings.emplace(std::make_pair(u, v), make_matching(std::move(pairs)));
    }
    return ca;
}

// Partial coloring: color 0 means uncolored, real colors are positive.
struct PartialColoring {
    std::vector<int> colors;

    PartialColoring() = default;
    explicit PartialColoring(int n) : colors(n, 0) {}

    bool is_colored(int v) const { return colors[v] != 0; }
    int num_colored() const {
        int k = 0;
        for (int c : colors) k += (c != 0);
        return k;
    }
    bool operator==(const PartialColoring& o) const { return colors == o.colors; }
    bool operator<(const PartialColoring& o) const { return colors < o.colors; }
};

// Colors usable at u given phi: c in L(u) whose matched partner at each
// colored neighbor differs from that neighbor's color.
inline std::vector<int> available_colors(const CorrespondenceAssignment& ca, const PartialColoring& phi, int u) {
    std::vector<int> nb;
    for (int v : ca.base.neighbors(u))
        if (phi.is_colored(v)) nb.push_back(v);
    std::vector<int> out;
    for (int c : ca.lists[u]) {
        bool ok = true;
        for (int v : nb) {
            if (ca.partner(u, c, v) == phi.colors[v]) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(c);
    }
    return out;
}

struct ValidationResult {
    bool ok = true;
    std::vector<std::string> violations;
};

inline ValidationResult validate(const CorrespondenceAssignment& ca, const PartialColoring& phi) {
    ValidationResult res;
    int n = ca.base.num_vertices();
    if (static_cast<int>(phi.colors.size()) != n) {
        res.violations.push_back("coloring size differs from vertex count");
        res.ok = false;
        return res;
    }
    for (int v = 0; v < n; ++v)
        if (phi.is_colored(v) && !ca.in_list(v, phi.colors[v]))
            res.violations.push_back("vertex " + std::to_string(v) + ": color " + std::to_string(phi.colors[v]) +
                                     " not in list");
    for (auto [u, v] : ca.base.edge_list()) {
        if (!phi.is_colored(u) || !phi.is_colored(v)) continue;
        if (ca.partner(u, phi.colors[u], v) == phi.colors[v])
            res.violations.push_back("edge (" + std::to_string(u) + "," + std::to_string(v) + "): colors (" +
                                     std::to_string(phi.colors[u]) + "," + std::to_string(phi.colors[v]) +
                                     ") are matched");
    }
    res.ok = res.violations.empty();
    return res;
}

// Cover graph: one node per (vertex, color), edges given by the matching
// pairs. Nodes are ordered lexicographically, so node ids are stable.
struct CoverGraph {
    Graph graph;
    std::vector<std::pair<int, int>> nodes;  // id -> (vertex, color)
    std::vector<int> base_of;                // id -> vertex
    std::vector<int> offset;                 // vertex -> first node id (size n+1)

    int index_of(int v, int c) const {
        auto lo = nodes.begin() + offset[v], hi = nodes.begin() + offset[v + 1];
        auto it = std::lower_bound(lo, hi, std::make_pair(v, c));
        if (it == hi || *it != std::make_pair(v, c)) return -1;
        return static_cast<int>(it - nodes.begin());
    }
};

inline CoverGraph build_cover_graph(const CorrespondenceAssignment& ca) {
    CoverGraph cg;
    int n = ca.base.num_vertices();
    cg.offset.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) {
        cg.offset[v] = static_cast<int>(cg.nodes.size());
        for (int c : ca.lists[v]) {
            cg.nodes.emplace_back(v, c);
            cg.base_of.push_back(v);
        }
    }
    cg.offset[n] = static_cast<int>(cg.nodes.size());
    cg.graph = Graph(static_cast<int>(cg.nodes.size()));
    for (const auto& [e, m] : ca.matchings) {
        auto [u, v] = e;
        for (auto [cu, cv] : m.pairs) cg.graph.add_edge(cg.index_of(u, cu), cg.index_of(v, cv));
    }
    return cg;
}

// A node set is plausible when it holds at most one node per base vertex.
inline bool is_plausible(const CoverGraph& cg, std::span<const int> X) {
    std::set<int> seen;
    for (int id : X) {
        if (id < 0 || id >= static_cast<int>(cg.nodes.size())) throw parameter_error("is_plausible: node out of range");
        if (!seen.insert(cg.base_of[id]).second) return false;
    }
    return true;
}

// Renaming colors so that every matching at u is diagonal: (u,c) pairs only
// with (v,c). Matched colors of each neighbor inherit u's label; colors
// unmatched toward u keep their label when it stays distinct, otherwise they
// take fresh labels above |L(u)|. The permutation record makes the renaming
// exactly invertible; being color permutations on every vertex, it preserves
// colorability and the kernel semantics downstream.
struct Relabeling {
    CorrespondenceAssignment ca;
    std::vector<std::map<int, int>> perms;  // per vertex: old color -> new color
};

inline CorrespondenceAssignment apply_color_permutations(const CorrespondenceAssignment& ca,
                                                         const std::vector<std::map<int, int>>& perms) {
    CorrespondenceAssignment out;
    out.base = ca.base;
    out.lists.resize(ca.lists.size());
    for (std::size_t v = 0; v < ca.lists.size(); ++v) {
        for (int c : ca.lists[v]) out.lists[v].push_back(perms[v].at(c));
        std::sort(out.lists[v].begin(), out.lists[v].end());
        if (std::adjacent_find(out.lists[v].begin(), out.lists[v].end()) != out.lists[v].end())
            throw parameter_error("apply_color_permutations: permutation not injective at vertex " +
                                  std::to_string(v));
    }
    for (const auto& [e, m] : ca.matchings) {
        auto [u, v] = e;
        std::vector<std::pair<int, int>> pairs;
        for (auto [cu, cv] : m.pairs) pairs.emplace_back(perms[u].at(cu), perms[v].at(cv));
        out.matchings.emplace(e, make_matching(std::move(pairs)));
    }
    return out;
}

inline std::vector<std::map<int, int>> invert_color_permutations(const std::vector<std::map<int, int>>& perms) {
    std::vector<std::map<int, int>> inv(perms.size());
    for (std::size_t v = 0; v < perms.size(); ++v)
        for (auto [from, to] : perms[v]) inv[v].emplace(to, from);
    return inv;
}

inline Relabeling relabel_towards(const CorrespondenceAssignment& ca, int u) {
    int n = ca.base.num_vertices();
    if (u < 0 || u >= n) throw parameter_error("relabel_towards: vertex out of range");
    Relabeling rel;
    rel.perms.resize(n);
    // identity everywhere by default
    for (int v = 0; v < n; ++v)
        for (int c : ca.lists[v]) rel.perms[v].emplace(c, c);
    // normalize L(u) to ranks {1..|L(u)|} (identity when it already is)
    int ell_u = static_cast<int>(ca.lists[u].size());
    {
        int rank = 1;
        for (int c : ca.lists[u]) rel.perms[u][c] = rank++;
    }
    for (int v : ca.base.neighbors(u)) {
        auto key = u < v ? std::make_pair(u, v) : std::make_pair(v, u);
        const Matching& m = ca.matchings.at(key);
        std::map<int, int>& sigma = rel.perms[v];
        sigma.clear();
        std::set<int> used;
        for (auto [ca_, cb_] : m.pairs) {
            int cu = u < v ? ca_ : cb_, cv = u < v ? cb_ : ca_;
            int img = rel.perms[u].at(cu);
            sigma.emplace(cv, img);
            used.insert(img);
        }
        int fresh = ell_u + 1;
        for (int c : ca.lists[v]) {
            if (sigma.count(c)) continue;  // matched, already mapped
            if (used.insert(c).second) {
                sigma.emplace(c, c);
            } else {
                while (!used.insert(fresh).second) ++fresh;
                sigma.emplace(c, fresh);
            }
        }
    }
    rel.ca = apply_color_permutations(ca, rel.perms);
    return rel;
}

// --- file format: {"lists": [[colors]...], "matchings": [{"u","v","pairs"}...]} ---

inline nlohmann::json assignment_to_json(const CorrespondenceAssignment& ca) {
    nlohmann::json j;
    j["lists"] = ca.lists;
    auto ms = nlohmann::json::array();
    for (auto [u, v] : ca.base.edge_list()) {
        nlohmann::json entry;
        entry["u"] = u;
        entry["v"] = v;
        auto pairs = nlohmann::json::array();
        auto it = ca.matchings.find({u, v});
        if (it != ca.matchings.end())
            for (auto [cu, cv] : it->second.pairs) pairs.push_back({cu, cv});
        entry["pairs"] = std::move(pairs);
        ms.push_back(std::move(entry));
    }
    j["matchings"] = std::move(ms);
    return j;
}

inline CorrespondenceAssignment assignment_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("lists") || !j.contains("matchings"))
        throw format_error("assignment: expected object with \"lists\" and \"matchings\"");
    if (!j["lists"].is_array() || j["lists"].empty()) throw format_error("assignment: lists must be a nonempty array");
    int n = static_cast<int>(j["lists"].size());

    CorrespondenceAssignment ca;
    ca.lists.resize(n);
    for (int v = 0; v < n; ++v) {
        const auto& l = j["lists"][v];
        if (!l.is_array() || l.empty()) throw format_error("assignment: list " + std::to_string(v) + " must be a nonempty array");
        for (const auto& c : l) {
            if (!c.is_number_integer() || c.get<int>() <= 0)
                throw format_error("assignment: list " + std::to_string(v) + " has a non-positive or non-integer color");
            ca.lists[v].push_back(c.get<int>());
        }
        std::sort(ca.lists[v].begin(), ca.lists[v].end());
        if (std::adjacent_find(ca.lists[v].begin(), ca.lists[v].end()) != ca.lists[v].end())
            throw format_error("assignment: duplicate color in list " + std::to_string(v));
    }

    ca.base = Graph(n);
    std::pair<int, int> prev{-1, -1};
    for (std::size_t i = 0; i < j["matchings"].size(); ++i) {
        const auto& entry = j["matchings"][i];
        if (!entry.is_object() || !entry.contains("u") || !entry.contains("v") || !entry.contains("pairs") ||
            !entry["u"].is_number_integer() || !entry["v"].is_number_integer() || !entry["pairs"].is_array())
            throw format_error("assignment: matching " + std::to_string(i) + " malformed");
        int u = entry["u"].get<int>(), v = entry["v"].get<int>();
        if (u < 0 || v >= n || u >= v)
            throw format_error("assignment: matching " + std::to_string(i) + " needs 0 <= u < v < n");
        std::pair<int, int> cur{u, v};
        if (!(prev < cur)) throw format_error("assignment: matchings not sorted or duplicate at index " + std::to_string(i));
        prev = cur;
        ca.base.add_edge(u, v);
        std::vector<std::pair<int, int>> pairs;
        for (const auto& pr : entry["pairs"]) {
            if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() || !pr[1].is_number_integer())
                throw format_error("assignment: matching " + std::to_string(i) + " has a malformed pair");
            int cu = pr[0].get<int>(), cv = pr[1].get<int>();
            if (!ca.in_list(u, cu) || !ca.in_list(v, cv))
                throw format_error("assignment: matching " + std::to_string(i) + " has off-list pair (" +
                                   std::to_string(cu) + "," + std::to_string(cv) + ")");
            pairs.emplace_back(cu, cv);
        }
        try {
            ca.matchings.emplace(cur, make_matching(std::move(pairs)));
        } catch (const parameter_error& e) {
            throw format_error("assignment: matching " + std::to_string(i) + ": " + e.what());
        }
    }
    return ca;
}

inline void save_assignment(const CorrespondenceAssignment& ca, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw format_error("save_assignment: cannot open " + path);
    out << assignment_to_json(ca).dump(2) << "\n";
}

inline CorrespondenceAssignment load_assignment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("load_assignment: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error("load_assignment: " + path + ": " + e.what());
    }
    return assignment_from_json(j);
}

}  // namespace dpcolor
