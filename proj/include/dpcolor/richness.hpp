#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpcolor/errors.hpp"
#include "dpcolor/graph.hpp"
#include "dpcolor/iscount.hpp"
#include "dpcolor/numeric.hpp"

namespace dpcolor {

// Number of subsets of size at most b: sum_{i=0..floor(b)} C(n,i), exact.
// b is real because several plug-in formulas produce fractional values; only
// its floor matters.
inline BigInt binom_le(std::int64_t n, double b) {
    if (n < 0) throw parameter_error("binom_le: negative n");
    if (!(b >= 0)) throw parameter_error("binom_le: negative b");
    std::int64_t top = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor(b)));
    BigInt sum = 0;
    for (std::int64_t i = 0; i <= top; ++i) sum += binom(n, i);
    return sum;
}

// b-largeness of an s-vertex subgraph under maximum degree delta:
// binom_le(s,b) > delta^{1/3}. Cube both sides so the comparison is exact.
inline bool is_b_large(std::int64_t s, double b, const BigInt& delta) {
    if (s < 0 || delta < 0) throw parameter_error("is_b_large: negative argument");
    BigInt lhs = binom_le(s, b);
    return lhs * lhs * lhs > delta;
}

struct RichnessViolation {
    int center = 0;
    std::vector<int> subset;  // vertices of X, ascending (global indices)
    BigInt is_count;
    BigInt required;
};

struct RichnessReport {
    bool rich = true;
    std::vector<RichnessViolation> violations;
    std::int64_t checked_subsets = 0;  // b-large subsets actually tested
};

// Exhaustive richness check: for every vertex v and every b-large subset X
// of its OPEN neighborhood, require I(G[X]) >= 2 * binom_le(|X|, b).
// Induced subgraphs suffice: adding edges only destroys independent sets, so
// among all subgraphs on a vertex set X the induced one minimizes I. Open
// neighborhoods are the right reading here — they make neighborhoods of
// triangle-free graphs edgeless, which the b = (1/6) log2(delta) route
// relies on.
inline RichnessReport check_is_rich_exact(const Graph& g, double b,
                                          std::optional<std::int64_t> delta = std::nullopt) {
    BigInt dlt = delta ? BigInt(*delta) : BigInt(g.max_degree());
    if (dlt < 0) throw parameter_error("check_is_rich_exact: negative delta");

    RichnessReport report;
    for (int v = 0; v < g.num_vertices(); ++v) {
        std::vector<int> nb = g.neighbors(v);
        int m = static_cast<int>(nb.size());
        if (m > 22)
            throw resource_error("check_is_rich_exact: neighborhood of vertex " + std::to_string(v) +
                                 " has " + std::to_string(m) + " vertices, budget is 22");
        // Size-dependent data once per center: which sizes are b-large, and
        // the richness threshold for each. The empty subset is never tested:
        // for delta >= 1 it is never b-large anyway, and at delta = 0 (no
        // edges, so nothing to be rich about) testing it would fail every
        // graph vacuously.
        std::vector<bool> large(m + 1, false);
        std::vector<std::uint64_t> threshold(m + 1, 0);
        bool any_large = false;
        for (int s = 1; s <= m; ++s) {
            large[s] = is_b_large(s, b, dlt);
            if (large[s]) {
                any_large = true;
                threshold[s] = static_cast<std::uint64_t>(2 * binom_le(s, b));  // <= 2^{m+1}, fits
            }
        }
        if (!any_large) continue;

        std::vector<std::uint64_t> table = all_subset_counts(induced_subgraph(g, nb));
        for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
            int s = std::popcount(mask);
            if (!large[s]) continue;
            ++report.checked_subsets;
            if (table[mask] >= threshold[s]) continue;
            RichnessViolation viol;
            viol.center = v;
            for (std::uint64_t rest = mask; rest; rest &= rest - 1) viol.subset.push_back(nb[std::countr_zero(rest)]);
            viol.is_count = table[mask];
            viol.required = threshold[s];
            report.violations.push_back(std::move(viol));
        }
    }
    report.rich = report.violations.empty();
    return report;
}

// Growth profile: an increasing unbounded g with g(0)=0, its logarithmic
// derivative statistic psi(s) = s * (log g)'(s), and a plug-in b(delta).
// Evaluators work on log g directly so delta up to 10^100 stays in range.
// The stock profiles below all have g(0) != 0 as literally written; they are
// only ever evaluated at s >= 1, and the evaluators pin log_g(0) = -inf
// (g(0) = 0) so the stated shape holds everywhere.
struct GrowthProfile {
    std::string name;
    int r = 0;       // colorable / clique parameter
    double p = 0.0;  // randomgraph parameter
    std::function<Quad(Quad)> log_g;  // natural log of g(s)
    std::function<Quad(Quad)> psi;    // s * d/ds log g(s)
    bool psi_nondecreasing = false;
    std::function<int(const BigInt&)> b_formula;
    std::function<int(Quad)> b_formula_log;  // same formula, delta given as ln(delta)
};

struct ObsVerReport {
    std::int64_t s_delta = 0;
    bool cond_main = false;  // C(s_delta, b) <= delta^{1/3} / 4
    bool cond_tub = false;   // b <= s_delta / 3
    bool cond_der = false;   // psi(s) >= 2b for all s >= s_delta
    // log-space values backing each verdict (tub/der are not logs; they are
    // the raw comparands)
    Quad main_lhs = 0, main_rhs = 0;
    Quad tub_lhs = 0, tub_rhs = 0;
    Quad der_lhs = 0, der_rhs = 0;
    bool main_exact = false;   // cond_main decided by exact integer arithmetic
    bool grid_checked = false; // cond_der checked on a grid (psi not monotone)

    bool all() const { return cond_main && cond_tub && cond_der; }
};

namespace detail {

// Comparisons against log-space targets get a tiny relative slack so exact
// boundary cases (e.g. g(s) equal to delta^{1/3} in exact arithmetic) are
// not flipped by the last few bits of a 113-bit evaluation.
inline Quad log_slack(Quad x) {
    Quad tol("1e-25");
    return tol * fabs(x) + tol;
}

// floor with the same philosophy: plug-in formulas sometimes land on exact
// integers analytically (sqrt(324)/6 = 3); a relative nudge keeps the last
// bits of the inputs from pushing the floor down by one.
inline int floor_with_slack(Quad x) {
    Quad nudged = x + Quad("1e-12") * (fabs(x) + 1);
    return static_cast<int>(std::floor(static_cast<double>(nudged)));
}

// Smallest integer s >= 1 with g(s) >= target, target given as a natural
// log. Doubles a bracket then bisects; g is only trusted to be monotone, so
// a non-increasing bracket is reported as a profile error.
inline std::int64_t s_delta_core(const std::function<Quad(Quad)>& log_g, Quad log_target) {
    Quad cutoff = log_target - log_slack(log_target);
    auto ok = [&](std::int64_t s) { return log_g(Quad(s)) >= cutoff; };
    if (ok(1)) return 1;
    std::int64_t lo = 1, hi = 2;
    while (!ok(hi)) {
        if (log_g(Quad(hi)) < log_g(Quad(lo)))
            throw parameter_error("s_delta: g is not increasing on [" + std::to_string(lo) + "," +
                                  std::to_string(hi) + "]");
        lo = hi;
        if (hi > (std::int64_t{1} << 60)) throw parameter_error("s_delta: g failed to reach delta^{1/3}");
        hi *= 2;
    }
    while (lo + 1 < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

inline ObsVerReport verify_core(const GrowthProfile& pr, Quad log_delta, const BigInt* delta_exact, int b) {
    if (b < 0) throw parameter_error("verify_obsver: negative b");
    ObsVerReport rep;
    rep.s_delta = s_delta_core(pr.log_g, log_delta / 3);

    // (main) C(s_delta, b) <= delta^{1/3} / 4. Prefer the exact integer form
    // 64 C^3 <= delta when delta is available as an integer and the binomial
    // is cheap; always record the log-space comparands.
    rep.main_lhs = lchoose(Quad(rep.s_delta), Quad(b));
    rep.main_rhs = log_delta / 3 - log(Quad(4));
    if (delta_exact && rep.s_delta <= 10000) {
        BigInt c = binom(rep.s_delta, b);
        rep.cond_main = 64 * c * c * c <= *delta_exact;
        rep.main_exact = true;
    } else {
        rep.cond_main = rep.main_lhs <= rep.main_rhs + log_slack(rep.main_rhs);
    }

    // (tub) b <= s_delta / 3, exact.
    rep.tub_lhs = Quad(b);
    rep.tub_rhs = Quad(rep.s_delta) / 3;
    rep.cond_tub = 3 * static_cast<std::int64_t>(b) <= rep.s_delta;

    // (der) psi(s) >= 2b for s >= s_delta. With nondecreasing psi the value
    // at s_delta settles it; otherwise sample a geometric grid up to
    // 10^6 * s_delta and say so in the report.
    rep.der_rhs = Quad(2 * b);
    if (pr.psi_nondecreasing) {
        rep.der_lhs = pr.psi(Quad(rep.s_delta));
        rep.cond_der = rep.der_lhs >= rep.der_rhs - log_slack(rep.der_rhs);
    } else {
        rep.grid_checked = true;
        Quad worst = std::numeric_limits<Quad>::infinity();
        Quad s = Quad(rep.s_delta), stop = s * 1000000;
        while (s <= stop) {
            worst = std::min(worst, pr.psi(s));
            s *= Quad("1.05");
        }
        rep.der_lhs = worst;
        rep.cond_der = worst >= rep.der_rhs - log_slack(rep.der_rhs);
    }
    return rep;
}

}  // namespace detail

inline std::int64_t s_delta(const GrowthProfile& pr, const BigInt& delta) {
    if (delta < 1) throw parameter_error("s_delta: delta must be >= 1");
    return detail::s_delta_core(pr.log_g, ln_big(delta) / 3);
}

// Entry point for delta specified by its natural log (delta need not be an
// integer, e.g. e^9).
inline std::int64_t s_delta_from_log(const GrowthProfile& pr, Quad log_delta) {
    if (log_delta < 0) throw parameter_error("s_delta_from_log: delta must be >= 1");
    return detail::s_delta_core(pr.log_g, log_delta / 3);
}

inline ObsVerReport verify_obsver(const GrowthProfile& pr, const BigInt& delta, int b) {
    if (delta < 1) throw parameter_error("verify_obsver: delta must be >= 1");
    return detail::verify_core(pr, ln_big(delta), &delta, b);
}

inline ObsVerReport verify_obsver_from_log(const GrowthProfile& pr, Quad log_delta, int b) {
    if (log_delta < 0) throw parameter_error("verify_obsver_from_log: delta must be >= 1");
    return detail::verify_core(pr, log_delta, nullptr, b);
}

namespace detail {
template <class Verify>
inline int max_verified_b_impl(Verify&& verify) {
    // Largest b with all three conditions true, scanning upward from 0; the
    // main condition's left side grows in b throughout the admissible range
    // b <= s_delta/3, so stopping at the first failure is sound. b = 0 is
    // the universal fallback: richness at b = 0 claims nothing.
    int best = 0;
    for (int b = 0;; ++b) {
        if (!verify(b).all()) break;
        best = b;
    }
    return best;
}
}  // namespace detail

inline int max_verified_b(const GrowthProfile& pr, const BigInt& delta) {
    return detail::max_verified_b_impl([&](int b) { return verify_obsver(pr, delta, b); });
}

inline int max_verified_b_from_log(const GrowthProfile& pr, Quad log_delta) {
    return detail::max_verified_b_impl([&](int b) { return verify_obsver_from_log(pr, log_delta, b); });
}

// gamma for the colorable profile: smallest integer with
// (e*gamma)^{1/gamma} <= 2^{1/(2r)} and gamma >= 2r/ln 2. The first
// condition reads (1 + ln gamma)/gamma <= ln2/(2r) and its left side is
// strictly decreasing for gamma >= 1, so the scan is monotone.
inline int colorable_gamma(int r) {
    if (r < 2) throw parameter_error("colorable_gamma: r must be >= 2");
    double bound = std::log(2.0) / (2.0 * r);
    for (int gamma = 1;; ++gamma) {
        if (gamma > 100000000) throw parameter_error("colorable_gamma: scan failed");
        if ((1.0 + std::log(static_cast<double>(gamma))) / gamma <= bound &&
            gamma >= 2.0 * r / std::log(2.0))
            return gamma;
    }
}

// r-colorable neighborhoods: g(s) = 2^{s/r}, b(delta) = floor(s_delta / gamma).
inline GrowthProfile colorable_profile(int r) {
    if (r < 2) throw parameter_error("colorable_profile: r must be >= 2");
    GrowthProfile pr;
    pr.name = "colorable";
    pr.r = r;
    Quad ln2 = log(Quad(2));
    pr.log_g = [r, ln2](Quad s) {
        if (s <= 0) return -std::numeric_limits<Quad>::infinity();
        return s * ln2 / r;
    };
    pr.psi = [r, ln2](Quad s) { return s * ln2 / r; };
    pr.psi_nondecreasing = true;
    int gamma = colorable_gamma(r);
    auto lg = pr.log_g;
    pr.b_formula_log = [lg, gamma](Quad log_delta) {
        return static_cast<int>(detail::s_delta_core(lg, log_delta / 3) / gamma);
    };
    pr.b_formula = [f = pr.b_formula_log](const BigInt& delta) { return f(ln_big(delta)); };
    return pr;
}

// Constant choice for the clique profile's b(delta): start from c = 1/4 on
// the ln(delta)/(r ln ln delta) scale and halve until the resulting b passes
// the verifier (b = 0 if nothing does). The chosen c is part of the result
// so callers can see which constant was in force.
struct CliqueBChoice {
    int b = 0;
    double c = 0.0;
};

inline GrowthProfile clique_profile(int r);

inline CliqueBChoice clique_b_choice(int r, Quad log_delta) {
    GrowthProfile pr = clique_profile(r);
    Quad loglog = log_delta > 1 ? log(log_delta) : Quad(0);
    CliqueBChoice choice;
    if (loglog <= 0) return choice;  // delta too small for the scale; b = 0
    for (double c = 0.25; c > 1e-9; c /= 2) {
        int b = detail::floor_with_slack(c * log_delta / (r * loglog));
        if (b <= 0) break;
        if (detail::verify_core(pr, log_delta, nullptr, b).all()) {
            choice.b = b;
            choice.c = c;
            return choice;
        }
    }
    return choice;
}

// K_r-free neighborhoods: g(s) = 2^{s^{1/r} - 1}.
inline GrowthProfile clique_profile(int r) {
    if (r < 2) throw parameter_error("clique_profile: r must be >= 2");
    GrowthProfile pr;
    pr.name = "clique";
    pr.r = r;
    Quad ln2 = log(Quad(2));
    pr.log_g = [r, ln2](Quad s) {
        if (s <= 0) return -std::numeric_limits<Quad>::infinity();
        return (pow(s, Quad(1) / r) - 1) * ln2;
    };
    pr.psi = [r, ln2](Quad s) { return ln2 * pow(s, Quad(1) / r) / r; };
    pr.psi_nondecreasing = true;
    pr.b_formula_log = [r](Quad log_delta) { return clique_b_choice(r, log_delta).b; };
    pr.b_formula = [f = pr.b_formula_log](const BigInt& delta) { return f(ln_big(delta)); };
    return pr;
}

// Neighborhoods looking like G(s, p): g_p(s) = exp(ln^2 s / (3 ln(1/p))),
// b(delta) = floor((1/6) sqrt(ln delta / ln(1/p))) - 1, clamped at 0.
inline GrowthProfile randomgraph_profile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("randomgraph_profile: p must lie in (0,1)");
    GrowthProfile pr;
    pr.name = "randomgraph";
    pr.p = p;
    Quad lninv = -log(Quad(p));  // ln(1/p) > 0
    pr.log_g = [lninv](Quad s) {
        if (s <= 0) return -std::numeric_limits<Quad>::infinity();
        Quad l = log(s);
        return l * l / (3 * lninv);
    };
    pr.psi = [lninv](Quad s) { return 2 * log(s) / (3 * lninv); };
    pr.psi_nondecreasing = true;
    pr.b_formula_log = [lninv](Quad log_delta) {
        if (log_delta < 0) return 0;
        int b = detail::floor_with_slack(sqrt(log_delta / lninv) / 6) - 1;
        return std::max(b, 0);
    };
    pr.b_formula = [f = pr.b_formula_log](const BigInt& delta) { return f(ln_big(delta)); };
    return pr;
}

// Triangle-free graphs do not route through the verifier at all: open
// neighborhoods are edgeless, so I(G[X]) = 2^{|X|} and richness holds
// directly with b(delta) = (1/6) log2(delta). Exactness note: when delta is
// a power of two the log2 is computed from the exponent, so e.g. b(64) is
// exactly 1 and floor(b) in downstream binomial sums cannot be off by one.
inline double trianglefree_b(const BigInt& delta) {
    if (delta < 1) throw parameter_error("trianglefree_b: delta must be >= 1");
    if ((delta & (delta - 1)) == 0) {
        unsigned k = boost::multiprecision::msb(delta);  // delta = 2^k
        return static_cast<double>(k) / 6.0;
    }
    return static_cast<double>(ln_big(delta) / log(Quad(2))) / 6.0;
}

// Factory over the named profiles; trianglefree is deliberately absent
// because it is a direct formula, not a GrowthProfile (see trianglefree_b).
inline GrowthProfile make_profile(const std::string& name, int r, double p) {
    if (name == "colorable") return colorable_profile(r);
    if (name == "clique") return clique_profile(r);
    if (name == "randomgraph") return randomgraph_profile(p);
    if (name == "trianglefree")
        throw parameter_error("make_profile: trianglefree is a direct formula (trianglefree_b), not a growth profile");
    throw parameter_error("make_profile: unknown profile " + name);
}

// --- serialization ---

inline nlohmann::json richness_report_to_json(const RichnessReport& r) {
    nlohmann::json j;
    j["rich"] = r.rich;
    j["checked_subsets"] = r.checked_subsets;
    auto viols = nlohmann::json::array();
    for (const auto& v : r.violations) {
        viols.push_back({{"center", v.center},
                         {"subset", v.subset},
                         {"is_count", v.is_count.str()},
                         {"required", v.required.str()}});
    }
    j["violations"] = std::move(viols);
    return j;
}

inline nlohmann::json obsver_report_to_json(const ObsVerReport& r) {
    nlohmann::json j;
    j["s_delta"] = r.s_delta;
    j["cond_main"] = r.cond_main;
    j["cond_tub"] = r.cond_tub;
    j["cond_der"] = r.cond_der;
    j["main_lhs"] = static_cast<double>(r.main_lhs);
    j["main_rhs"] = static_cast<double>(r.main_rhs);
    j["tub_lhs"] = static_cast<double>(r.tub_lhs);
    j["tub_rhs"] = static_cast<double>(r.tub_rhs);
    j["der_lhs"] = static_cast<double>(r.der_lhs);
    j["der_rhs"] = static_cast<double>(r.der_rhs);
    j["main_exact"] = r.main_exact;
    j["grid_checked"] = r.grid_checked;
    j["verified"] = r.all();
    return j;
}

}  // namespace dpcolor
