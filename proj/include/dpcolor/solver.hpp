#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dpcolor/correspondence.hpp"
#include "dpcolor/errors.hpp"
#include "dpcolor/graph.hpp"
#include "dpcolor/iscount.hpp"
#include "dpcolor/numeric.hpp"
#include "dpcolor/rng.hpp"

namespace dpcolor {

enum class SolveStatus { colored, unsat, budget_exceeded };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::colored: return "colored";
        case SolveStatus::unsat: return "unsat";
        default: return "budget-exceeded";
    }
}

struct SolveStats {
    std::int64_t nodes_expanded = 0;
    std::int64_t resample_rounds = 0;
    double wall_seconds = 0.0;  // informational only; never serialized (outputs must be seed-deterministic)
};

struct SolveResult {
    SolveStatus status = SolveStatus::budget_exceeded;
    // Full validated coloring when status == colored; the surviving partial
    // coloring when a budgeted method ran out.
    std::optional<PartialColoring> coloring;
    SolveStats stats;
};

// count < delta^{7/12}, decided exactly: count^12 < delta^7 over integers.
inline bool below_threshold_7_12(std::int64_t count, std::int64_t delta) {
    if (count < 0 || delta < 0) throw parameter_error("below_threshold_7_12: negative argument");
    using boost::multiprecision::pow;
    return pow(BigInt(count), 12) < pow(BigInt(delta), 7);
}

// Bad event A_u: u is uncolored and fewer than delta^{7/12} colors are
// available at it.
inline bool event_Au(const Graph& g, const CorrespondenceAssignment& ca, const PartialColoring& phi, int u,
                     std::int64_t delta) {
    (void)g;
    if (phi.is_colored(u)) return false;
    return below_threshold_7_12(static_cast<std::int64_t>(available_colors(ca, phi, u).size()), delta);
}

// Bad event B_S for an explicit vertex set S: no vertex of S is colored and
// A_x is false for every x in S.
inline bool event_BS(const Graph& g, const CorrespondenceAssignment& ca, const PartialColoring& phi,
                     std::span<const int> S, std::int64_t delta) {
    for (int x : S)
        if (phi.is_colored(x) || event_Au(g, ca, phi, x, delta)) return false;
    return true;
}

// Bad event B_u: at least delta^{7/12} neighbors x of u are uncolored with
// A_x false. At least one such neighbor is required, which only matters in
// the degenerate delta = 0 case where the threshold itself is zero (an
// isolated vertex never has B_u).
inline bool event_Bu(const Graph& g, const CorrespondenceAssignment& ca, const PartialColoring& phi, int u,
                     std::int64_t delta) {
    std::int64_t k = 0;
    for (int x : g.neighbors(u))
        if (!phi.is_colored(x) && !event_Au(g, ca, phi, x, delta)) ++k;
    return k >= 1 && !below_threshold_7_12(k, delta);
}

// Greedy extension: visit uncolored vertices in the given order, assign the
// smallest available color, skip silently when none is available. Never
// uncolors anything.
inline PartialColoring greedy_extend(const Graph& g, const CorrespondenceAssignment& ca, PartialColoring phi,
                                     std::span<const int> order, std::int64_t* nodes = nullptr) {
    (void)g;
    for (int v : order) {
        if (v < 0 || v >= static_cast<int>(phi.colors.size()))
            throw parameter_error("greedy_extend: vertex out of range in order");
        if (phi.is_colored(v)) continue;
        std::vector<int> avail = available_colors(ca, phi, v);
        if (!avail.empty()) {
            phi.colors[v] = avail.front();
            if (nodes) ++*nodes;
        }
    }
    return phi;
}

// Exact decision by backtracking with forward checking. Availability is
// maintained per vertex as flags over the (sorted) list; assigning u removes
// at most one color from each uncolored neighbor (its matched partner).
// Variable order: fewest available colors, ties by index. Value order:
// ascending color. Exhausting the tree without the budget tripping is a
// proof of non-colorability.
inline SolveResult decide_colorable(const Graph& g, const CorrespondenceAssignment& ca,
                                    std::int64_t budget = 10000000) {
    if (!(g == ca.base)) throw parameter_error("decide_colorable: graph differs from assignment base");
    if (budget < 1) throw parameter_error("decide_colorable: budget must be positive");
    auto t0 = std::chrono::steady_clock::now();
    int n = g.num_vertices();

    std::vector<std::vector<char>> avail(n);
    std::vector<int> avail_count(n);
    for (int v = 0; v < n; ++v) {
        avail[v].assign(ca.lists[v].size(), 1);
        avail_count[v] = static_cast<int>(ca.lists[v].size());
    }
    PartialColoring phi(n);
    SolveResult res;
    bool out_of_budget = false;

    // Removals caused by one assignment, for undo: (vertex, list position).
    std::vector<std::pair<int, int>> trail;

    auto dfs = [&](auto&& self, int colored) -> bool {
        if (colored == n) return true;
        int u = -1;
        for (int v = 0; v < n; ++v)
            if (!phi.is_colored(v) && (u == -1 || avail_count[v] < avail_count[u])) u = v;
        if (avail_count[u] == 0) return false;

        for (std::size_t pos = 0; pos < avail[u].size(); ++pos) {
            if (!avail[u][pos]) continue;
            if (++res.stats.nodes_expanded > budget) {
                out_of_budget = true;
                return false;
            }
            int c = ca.lists[u][pos];
            std::size_t trail_mark = trail.size();
            bool dead = false;
            phi.colors[u] = c;
            for (int v : g.neighbors(u)) {
                if (phi.is_colored(v)) continue;
                int pc = ca.partner(u, c, v);
                if (pc == 0) continue;
                auto& lv = ca.lists[v];
                auto it = std::lower_bound(lv.begin(), lv.end(), pc);
                if (it == lv.end() || *it != pc) continue;
                int p = static_cast<int>(it - lv.begin());
                if (!avail[v][p]) continue;
                avail[v][p] = 0;
                --avail_count[v];
                trail.emplace_back(v, p);
                if (avail_count[v] == 0) dead = true;
            }
            if (!dead && self(self, colored + 1)) return true;
            phi.colors[u] = 0;
            while (trail.size() > trail_mark) {
                auto [v, p] = trail.back();
                trail.pop_back();
                avail[v][p] = 1;
                ++avail_count[v];
            }
            if (out_of_budget) return false;
        }
        return false;
    };

    bool found = (n == 0) ? true : dfs(dfs, 0);
    res.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (found) {
        res.status = SolveStatus::colored;
        res.coloring = phi;
    } else if (out_of_budget) {
        res.status = SolveStatus::budget_exceeded;
    } else {
        res.status = SolveStatus::unsat;
    }
    return res;
}

// One pass of the neighborhood resampling kernel around an uncolored vertex
// u, with the independent-set draw abstracted so tests can enumerate the
// kernel exactly. chooser(F_c, c) must return an independent set of F_c
// (local indices); the stock entry point below draws it uniformly.
//
// Steps, after renaming colors so all matchings at u are diagonal:
// for each color c of u in ascending order,
//   R_c = neighbors v with (u,c)(v,c) matched;
//   uncolor the vertices of R_c currently colored c;
//   P_c = uncolored vertices of R_c where c is usable, i.e. (v,c) conflicts
//         with no currently-colored neighbor of v (checked against the whole
//         graph so the output is always a valid partial coloring);
//   F_c = cover subgraph on {(v,c) : v in P_c};
//   color a uniform independent set of F_c with c.
// u itself is never touched and stays uncolored.
template <class Chooser>
inline PartialColoring resample_neighborhood_with(const Graph& g, const CorrespondenceAssignment& ca,
                                                  const PartialColoring& phi, int u, Chooser&& chooser) {
    if (phi.is_colored(u)) throw parameter_error("resample_neighborhood: u must be uncolored");
    Relabeling rel = relabel_towards(ca, u);

    PartialColoring cur(static_cast<int>(phi.colors.size()));
    for (std::size_t v = 0; v < phi.colors.size(); ++v)
        if (phi.colors[v] != 0) cur.colors[v] = rel.perms[v].at(phi.colors[v]);

    int ell = static_cast<int>(rel.ca.lists[u].size());
    std::vector<int> nb = g.neighbors(u);
    for (int c = 1; c <= ell; ++c) {
        std::vector<int> Rc;
        for (int v : nb)
            if (rel.ca.partner(u, c, v) == c) Rc.push_back(v);
        for (int v : Rc)
            if (cur.colors[v] == c) cur.colors[v] = 0;
        std::vector<int> Pc;
        for (int v : Rc) {
            if (cur.is_colored(v)) continue;
            bool usable = true;
            for (int w : g.neighbors(v)) {
                if (cur.is_colored(w) && rel.ca.partner(v, c, w) == cur.colors[w]) {
                    usable = false;
                    break;
                }
            }
            if (usable) Pc.push_back(v);
        }
        Graph Fc(static_cast<int>(Pc.size()));
        for (std::size_t i = 0; i < Pc.size(); ++i)
            for (std::size_t j = i + 1; j < Pc.size(); ++j)
                if (g.adjacent(Pc[i], Pc[j]) && rel.ca.partner(Pc[i], c, Pc[j]) == c)
                    Fc.add_edge(static_cast<int>(i), static_cast<int>(j));
        for (int i : chooser(Fc, c)) cur.colors[Pc[i]] = c;
    }

    auto inv = invert_color_permutations(rel.perms);
    PartialColoring out(static_cast<int>(phi.colors.size()));
    for (std::size_t v = 0; v < cur.colors.size(); ++v)
        if (cur.colors[v] != 0) out.colors[v] = inv[v].at(cur.colors[v]);
    return out;
}

inline PartialColoring resample_neighborhood(const Graph& g, const CorrespondenceAssignment& ca,
                                             const PartialColoring& phi, int u, Seed seed) {
    Seed base = derive(seed, 0x72736d70ULL);
    return resample_neighborhood_with(g, ca, phi, u, [&](const Graph& Fc, int c) {
        return sample_independent_set(Fc, derive(base, static_cast<std::uint64_t>(c)));
    });
}

// Constructive coloring loop in the Moser-Tardos style: greedy start, then
// resample the neighborhood of the lowest-index vertex with a bad event
// until none remains, then greedy-extend by ascending availability. The
// sufficient condition behind this process is established nonconstructively
// (via a lopsided local-lemma argument over a uniform partial coloring), so
// termination of this loop is a heuristic, not a theorem: the cap and the
// exact solver are the safety net. Once no bad event remains the final
// extension cannot fail: every uncolored u has at least delta^{7/12}
// available colors (A_u false) and fewer than delta^{7/12} uncolored
// neighbors (B_u false, and no A_x holds), each of which removes at most
// one color.
inline SolveResult lll_color(const Graph& g, const CorrespondenceAssignment& ca, std::int64_t delta, Seed seed,
                             std::int64_t cap = -1) {
    if (!(g == ca.base)) throw parameter_error("lll_color: graph differs from assignment base");
    if (delta < 0) throw parameter_error("lll_color: negative delta");
    auto t0 = std::chrono::steady_clock::now();
    int n = g.num_vertices();
    if (cap < 0) cap = 2 * static_cast<std::int64_t>(n) * delta * delta * delta;  // mirrors the d = 2*delta^3 dependency bound
    Seed master = derive(seed, 0x6c6c6cULL);

    SolveResult res;
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    Rng init_rng(derive(master, 0));
    init_rng.shuffle(order);
    PartialColoring phi = greedy_extend(g, ca, PartialColoring(n), order, &res.stats.nodes_expanded);

    auto finish = [&](SolveStatus status, PartialColoring final_phi) {
        res.status = status;
        res.coloring = std::move(final_phi);
        res.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    };

    while (true) {
        int bad = -1;
        for (int v = 0; v < n && bad == -1; ++v)
            if (event_Au(g, ca, phi, v, delta) || event_Bu(g, ca, phi, v, delta)) bad = v;
        if (bad == -1) {
            std::vector<int> ext;
            for (int v = 0; v < n; ++v)
                if (!phi.is_colored(v)) ext.push_back(v);
            std::sort(ext.begin(), ext.end(), [&](int a, int b) {
                std::size_t ca_ = available_colors(ca, phi, a).size(), cb_ = available_colors(ca, phi, b).size();
                return ca_ != cb_ ? ca_ < cb_ : a < b;
            });
            PartialColoring full = greedy_extend(g, ca, phi, ext, &res.stats.nodes_expanded);
            if (full.num_colored() == n && validate(ca, full).ok) return finish(SolveStatus::colored, full);
            // no bad event and still stuck should be impossible; treat as a
            // failed round rather than looping on a frozen state
            phi = full;
        }
        if (res.stats.resample_rounds >= cap) return finish(SolveStatus::budget_exceeded, phi);
        if (bad != -1) {
            ++res.stats.resample_rounds;
            phi.colors[bad] = 0;  // B_bad can fire with bad colored; the kernel needs it uncolored
            phi = resample_neighborhood(g, ca, phi, bad, derive(master, 1 + res.stats.resample_rounds));
        } else {
            ++res.stats.resample_rounds;
        }
    }
}

// ell(delta) = max(delta0, 2*ceil((5/2) delta / b)), exact in integers.
inline std::int64_t ell_for(std::int64_t delta, std::int64_t b, std::int64_t delta0) {
    if (b <= 0) throw parameter_error("ell_for: b must be positive");
    if (delta < 0 || delta0 < 1) throw parameter_error("ell_for: need delta >= 0 and delta0 >= 1");
    std::int64_t ceil_term = (5 * delta + 2 * b - 1) / (2 * b);
    return std::max(delta0, 2 * ceil_term);
}

// Real-b variant (plug-in formulas produce irrational b). The ceiling gets
// a hair of downward slack so values that are integers analytically do not
// round up from the last bits.
inline std::int64_t ell_for(std::int64_t delta, double b, std::int64_t delta0) {
    if (!(b > 0)) throw parameter_error("ell_for: b must be positive");
    if (delta < 0 || delta0 < 1) throw parameter_error("ell_for: need delta >= 0 and delta0 >= 1");
    double x = 2.5 * static_cast<double>(delta) / b;
    auto ceil_term = static_cast<std::int64_t>(std::ceil(x - 1e-9 * (std::fabs(x) + 1)));
    return std::max(delta0, 2 * ceil_term);
}

// Complete-graph instantiation with b(n) = ln(n)/21 and delta = n-1.
inline std::int64_t ell_for_order(int n, std::int64_t delta0 = 1) {
    if (n < 2) throw parameter_error("ell_for_order: n must be >= 2");
    return ell_for(static_cast<std::int64_t>(n) - 1, std::log(static_cast<double>(n)) / 21.0, delta0);
}

// --- serialization (wall time deliberately omitted; outputs are pure
// functions of inputs and seed) ---

inline nlohmann::json solve_result_to_json(const SolveResult& r) {
    nlohmann::json j;
    j["status"] = to_string(r.status);
    if (r.coloring) {
        auto arr = nlohmann::json::array();
        for (int c : r.coloring->colors) arr.push_back(c);
        j["coloring"] = std::move(arr);
    } else {
        j["coloring"] = nullptr;
    }
    j["stats"] = {{"nodes_expanded", r.stats.nodes_expanded}, {"resample_rounds", r.stats.resample_rounds}};
    return j;
}

}  // namespace dpcolor
