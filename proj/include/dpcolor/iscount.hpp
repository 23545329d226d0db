#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dpcolor/errors.hpp"
#include "dpcolor/graph.hpp"
#include "dpcolor/numeric.hpp"
#include "dpcolor/rng.hpp"

namespace dpcolor {

// Size-stratified independent-set census. counts[k] = number of independent
// sets with exactly k vertices; the vector is trimmed so its last entry is
// positive, hence alpha = counts.size()-1. The median statistic is the
// largest m such that sets of size >= m make up at least half of the total.
struct ISProfile {
    std::vector<BigInt> counts;
    BigInt total = 0;
    int alpha = 0;
    int median = 0;
};

inline int median_from_counts(const std::vector<BigInt>& counts) {
    BigInt total = 0;
    for (const auto& c : counts) total += c;
    BigInt acc = 0;
    for (int m = static_cast<int>(counts.size()) - 1; m >= 0; --m) {
        acc += counts[m];
        if (2 * acc >= total) return m;
    }
    return 0;
}

inline int median_alpha(const ISProfile& p) { return median_from_counts(p.counts); }

namespace detail {

inline ISProfile finalize_profile(std::vector<BigInt> counts) {
    while (counts.size() > 1 && counts.back() == 0) counts.pop_back();
    ISProfile p;
    p.total = 0;
    for (const auto& c : counts) p.total += c;
    p.alpha = static_cast<int>(counts.size()) - 1;
    p.median = median_from_counts(counts);
    p.counts = std::move(counts);
    return p;
}

// Pivot for the deletion recursion: maximum degree inside the residual mask,
// ties to the lowest index. Any pivot is correct; high degree shrinks the
// closed-neighborhood branch fastest. The sampler below must walk the exact
// same tree, so keep this rule in sync with it.
inline int pivot_in_mask(const std::vector<std::uint64_t>& adj, std::uint64_t mask) {
    int best = -1, best_deg = -1;
    std::uint64_t rest = mask;
    while (rest) {
        int v = std::countr_zero(rest);
        rest &= rest - 1;
        int d = std::popcount(adj[v] & mask);
        if (d > best_deg) {
            best_deg = d;
            best = v;
        }
    }
    return best;
}

// I(G) = I(G-v) + I(G-N[v]), per size stratum: the second branch commits the
// pivot, so its strata shift up by one.
inline const std::vector<BigInt>& profile_rec(const std::vector<std::uint64_t>& adj, std::uint64_t mask,
                                              std::unordered_map<std::uint64_t, std::vector<BigInt>>& memo) {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    std::vector<BigInt> out;
    if (mask == 0) {
        out = {BigInt(1)};
    } else {
        int v = pivot_in_mask(adj, mask);
        std::uint64_t bit = std::uint64_t{1} << v;
        const auto& without = profile_rec(adj, mask & ~bit, memo);
        const auto& closed = profile_rec(adj, mask & ~bit & ~adj[v], memo);
        out.assign(std::max(without.size(), closed.size() + 1), BigInt(0));
        for (std::size_t k = 0; k < without.size(); ++k) out[k] = without[k];
        for (std::size_t k = 0; k < closed.size(); ++k) out[k + 1] += closed[k];
    }
    return memo.emplace(mask, std::move(out)).first->second;
}

inline std::vector<std::uint64_t> adjacency_words(const Graph& g) {
    std::vector<std::uint64_t> adj(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) adj[v] = g.neighbor_mask(v);
    return adj;
}

}  // namespace detail

// Exact census by memoized deletion recursion; feasible well past the reach
// of brute enumeration. The memo is per call so concurrent counts on
// different graphs never share state.
inline ISProfile count_profile(const Graph& g) {
    int n = g.num_vertices();
    if (n > 60)
        throw resource_error("count_profile: " + std::to_string(n) + " vertices exceeds the 60-vertex budget");
    if (n == 0) return detail::finalize_profile({BigInt(1)});
    auto adj = detail::adjacency_words(g);
    std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    std::unordered_map<std::uint64_t, std::vector<BigInt>> memo;
    return detail::finalize_profile(detail::profile_rec(adj, full, memo));
}

// Ground truth by full subset enumeration; the oracle count_profile is
// tested against.
inline ISProfile brute_profile(const Graph& g) {
    int n = g.num_vertices();
    if (n > 20)
        throw resource_error("brute_profile: " + std::to_string(n) + " vertices exceeds the 20-vertex budget");
    auto adj = detail::adjacency_words(g);
    std::vector<BigInt> counts(static_cast<std::size_t>(n) + 1, BigInt(0));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        bool ok = true;
        for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
            if (adj[std::countr_zero(rest)] & mask) {
                ok = false;
                break;
            }
        }
        if (ok) counts[static_cast<std::size_t>(std::popcount(mask))] += 1;
    }
    return detail::finalize_profile(std::move(counts));
}

// Count of independent sets inside every induced subgraph at once:
// out[mask] = I(G[mask]). Used where a caller needs the whole table (one
// dynamic program instead of 2^n recursions). Counts fit in 64 bits since
// I <= 2^n <= 2^22.
inline std::vector<std::uint64_t> all_subset_counts(const Graph& g) {
    int n = g.num_vertices();
    if (n > 22)
        throw resource_error("all_subset_counts: " + std::to_string(n) + " vertices exceeds the 22-vertex budget");
    auto adj = detail::adjacency_words(g);
    std::vector<std::uint64_t> table(std::size_t{1} << n);
    table[0] = 1;
    for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
        int v = std::countr_zero(mask);
        table[mask] = table[mask & (mask - 1)] + table[mask & ~(adj[v] | (std::uint64_t{1} << v))];
    }
    return table;
}

// Exactly uniform over all independent sets of g, empty set included. Walks
// the counting recursion: at each pivot v, include it with probability
// I(G-N[v]) / I(G). The branch probabilities telescope to 1/I(G) for every
// leaf, so uniformity is exact, and the walk is a deterministic function of
// the seed.
inline std::vector<int> sample_independent_set(const Graph& g, Seed seed) {
    int n = g.num_vertices();
    if (n > 60)
        throw resource_error("sample_independent_set: " + std::to_string(n) +
                             " vertices exceeds the 60-vertex budget");
    auto adj = detail::adjacency_words(g);
    std::unordered_map<std::uint64_t, BigInt> totals;
    auto total_rec = [&](auto&& self, std::uint64_t mask) -> const BigInt& {
        auto it = totals.find(mask);
        if (it != totals.end()) return it->second;
        BigInt t;
        if (mask == 0) {
            t = 1;
        } else {
            int v = detail::pivot_in_mask(adj, mask);
            std::uint64_t bit = std::uint64_t{1} << v;
            t = self(self, mask & ~bit) + self(self, mask & ~bit & ~adj[v]);
        }
        return totals.emplace(mask, std::move(t)).first->second;
    };

    Rng rng(derive(seed, 0x69736574ULL));
    std::vector<int> picked;
    std::uint64_t mask = (n == 0) ? 0 : (n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
    while (mask) {
        int v = detail::pivot_in_mask(adj, mask);
        std::uint64_t bit = std::uint64_t{1} << v;
        const BigInt& here = total_rec(total_rec, mask);
        const BigInt& with_v = total_rec(total_rec, mask & ~bit & ~adj[v]);
        if (rng.next_below_big(here) < with_v) {
            picked.push_back(v);
            mask &= ~bit & ~adj[v];
        } else {
            mask &= ~bit;
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

// --- serialization: counts and total as decimal strings ---

inline nlohmann::json profile_to_json(const ISProfile& p) {
    nlohmann::json j;
    auto counts = nlohmann::json::array();
    for (const auto& c : p.counts) counts.push_back(c.str());
    j["counts"] = std::move(counts);
    j["total"] = p.total.str();
    j["alpha"] = p.alpha;
    j["median"] = p.median;
    return j;
}

namespace detail {
inline BigInt parse_big(const nlohmann::json& v, const char* what) {
    if (!v.is_string()) throw format_error(std::string("profile: ") + what + " must be a decimal string");
    const std::string& s = v.get_ref<const std::string&>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw format_error(std::string("profile: ") + what + " is not a nonnegative decimal integer: " + s);
    return BigInt(s);
}
}  // namespace detail

inline ISProfile profile_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("counts") || !j.contains("total") || !j.contains("alpha") ||
        !j.contains("median"))
        throw format_error("profile: expected object with counts/total/alpha/median");
    if (!j["counts"].is_array() || j["counts"].empty()) throw format_error("profile: counts must be a nonempty array");
    std::vector<BigInt> counts;
    for (const auto& v : j["counts"]) counts.push_back(detail::parse_big(v, "count"));
    ISProfile p = detail::finalize_profile(std::move(counts));
    if (p.total != detail::parse_big(j["total"], "total")) throw format_error("profile: total does not match counts");
    if (!j["alpha"].is_number_integer() || j["alpha"].get<int>() != p.alpha)
        throw format_error("profile: alpha does not match counts");
    if (!j["median"].is_number_integer() || j["median"].get<int>() != p.median)
        throw format_error("profile: median does not match counts");
    return p;
}

}  // namespace dpcolor
