#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dpcolor/errors.hpp"
#include "dpcolor/graph.hpp"
#include "dpcolor/iscount.hpp"
#include "dpcolor/numeric.hpp"
#include "dpcolor/rng.hpp"

namespace dpcolor {

// I_p(s,t) = C(s,t) p^{C(t,2)}: expected number of independent t-sets in a
// graph whose NON-edges appear with probability p, i.e. in G(s, 1-p).
// Log-space evaluation; the exact-rational twin below cross-checks it.
inline Quad expected_is_count(std::int64_t s, std::int64_t t, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw parameter_error("expected_is_count: p must lie in (0,1]");
    if (t < 0 || t > s) throw parameter_error("expected_is_count: need 0 <= t <= s");
    return exp(lchoose(Quad(s), Quad(t)) + Quad(binom(t, 2)) * log(Quad(p)));
}

inline BigRat expected_is_count_exact(std::int64_t s, std::int64_t t, const BigRat& p) {
    if (!(p > 0 && p <= 1)) throw parameter_error("expected_is_count_exact: p must lie in (0,1]");
    if (t < 0 || t > s) throw parameter_error("expected_is_count_exact: need 0 <= t <= s");
    BigInt e = binom(t, 2);
    BigRat power = 1;
    for (BigInt i = 0; i < e; ++i) power *= p;
    return BigRat(binom(s, t)) * power;
}

// Integer argmax of I_p(s,.) over t in [1,s], ties to the smaller t; the
// continuous estimate log(s)/log(1/p) is a separate report-only value.
inline std::int64_t optimal_t(std::int64_t s, double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("optimal_t: p must lie in (0,1)");
    if (s < 1) throw parameter_error("optimal_t: s must be >= 1");
    std::int64_t best = 1;
    Quad best_log = lchoose(Quad(s), Quad(1));
    for (std::int64_t t = 2; t <= s; ++t) {
        Quad lg = lchoose(Quad(s), Quad(t)) + Quad(binom(t, 2)) * log(Quad(p));
        if (lg > best_log) {
            best_log = lg;
            best = t;
        }
    }
    return best;
}

inline double optimal_t_continuous(std::int64_t s, double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("optimal_t_continuous: p must lie in (0,1)");
    if (s < 1) throw parameter_error("optimal_t_continuous: s must be >= 1");
    return std::log(static_cast<double>(s)) / std::log(1.0 / p);
}

struct DependencyQuantities {
    Quad mu = 0;
    Quad d = 0;
    Quad D = 0;
    bool edgeless = false;  // t <= 2: no two distinct t-sets share >= 2 vertices
    // the looser closed forms the exact sums are bounded by, for comparison
    Quad d_relaxed = 0;
    Quad D_relaxed = 0;
};

// Lower-tail bound exp(-min(mu^2/(32D + 8mu), mu/(12d))).
inline Quad suen_bound(const DependencyQuantities& q) {
    if (!(q.mu > 0)) throw parameter_error("suen_bound: mu must be positive");
    if (!(q.d > 0)) throw parameter_error("suen_bound: d must be positive");
    if (q.D < 0) throw parameter_error("suen_bound: D must be nonnegative");
    Quad e1 = q.mu * q.mu / (32 * q.D + 8 * q.mu);
    Quad e2 = q.mu / (12 * q.d);
    Quad e = std::min(e1, e2);
    return e <= 0 ? Quad(1) : exp(-e);
}

// mu, d, D for the dependency graph on t-subsets (adjacent when the
// intersection has >= 2 vertices), with the sums taken exactly:
//   d = p^{C(t,2)} * sum_{i=2}^{t-1} C(t,i) C(s-t, t-i)
//   D = (1/2) C(s,t) p^{2C(t,2)} * sum_{i=2}^{t-1} C(t,i) C(s-t, t-i) p^{-C(i,2)}
// For t <= 2 distinct sets cannot intersect in >= 2 vertices, so d = D = 0
// with the edgeless flag set rather than an error.
inline DependencyQuantities dependency_quantities(std::int64_t s, std::int64_t t, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw parameter_error("dependency_quantities: p must lie in (0,1]");
    if (t < 0 || t > s) throw parameter_error("dependency_quantities: need 0 <= t <= s");
    DependencyQuantities q;
    q.mu = expected_is_count(s, t, p);
    if (t <= 2) {
        q.edgeless = true;
        return q;
    }
    Quad lp = log(Quad(p));
    Quad pct2 = exp(Quad(binom(t, 2)) * lp);
    Quad sum_plain = 0, sum_weighted = 0;
    for (std::int64_t i = 2; i <= t - 1; ++i) {
        Quad term = to_quad(binom(t, i) * binom(s - t, t - i));
        sum_plain += term;
        sum_weighted += term * exp(-Quad(binom(i, 2)) * lp);
    }
    q.d = pct2 * sum_plain;
    q.D = to_quad(binom(s, t)) / 2 * pct2 * pct2 * sum_weighted;
    q.d_relaxed = 2 * pct2 * to_quad(binom(t, 2) * binom(s, t - 2));
    q.D_relaxed = to_quad(binom(s, t)) * exp(Quad(2 * binom(t, 2) - 1) * lp) * to_quad(binom(t, 2) * binom(s, t - 2));
    return q;
}

// Tail bound exp(-s^2 p / (80 t^4)) for the probability that G(s,1-p) has
// at most I_p(s,t)/2 independent t-sets; only valid under the stated
// hypotheses, which are checked.
inline Quad lemma6_bound(std::int64_t s, std::int64_t t, double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("lemma6_bound: p must lie in (0,1)");
    if (t < 1) throw parameter_error("lemma6_bound: t must be >= 1");
    if (s < 2 * t * t + t)
        throw parameter_error("lemma6_bound: hypothesis s >= 2t^2 + t fails (s = " + std::to_string(s) +
                              ", need >= " + std::to_string(2 * t * t + t) + ")");
    Quad ip = expected_is_count(s, t, p);
    Quad floor_req = Quad(s) * Quad(s) / (Quad(t) * Quad(t) * Quad(t) * Quad(t));
    if (ip < floor_req)
        throw parameter_error("lemma6_bound: hypothesis I_p(s,t) >= s^2/t^4 fails");
    Quad expo = Quad(s) * Quad(s) * Quad(p) / (80 * Quad(t) * Quad(t) * Quad(t) * Quad(t));
    return exp(-expo);
}

// g_p(s) = exp(ln^2(s) / (3 ln(1/p))).
inline Quad g_p_value(Quad s, double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("g_p_value: p must lie in (0,1)");
    if (s < 1) throw parameter_error("g_p_value: s must be >= 1");
    Quad l = log(s);
    return exp(l * l / (3 * (-log(Quad(p)))));
}

// Chernoff lower-tail form e^{-t/8}, asserted only in its regime t >= 2 mu.
inline Quad chernoff_tail(double mu, double t) {
    if (mu < 0 || t < 0) throw parameter_error("chernoff_tail: negative argument");
    if (t < 2 * mu) throw parameter_error("chernoff_tail: requires t >= 2*mu");
    return exp(-Quad(t) / 8);
}

// A(s,n) = min(s/15, ln^2 n), natural log.
inline double a_threshold(double s, double n) {
    if (s < 0 || n < 1) throw parameter_error("a_threshold: need s >= 0 and n >= 1");
    double l = std::log(n);
    return std::min(s / 15.0, l * l);
}

// Number of independent sets of exactly t vertices, by ordered DFS over the
// candidate mask (n <= 64). The caller keeps C(s,t) within 64-bit range.
inline std::uint64_t count_is_of_size(const Graph& g, int t) {
    int n = g.num_vertices();
    if (n > 64) throw resource_error("count_is_of_size: more than 64 vertices");
    if (t == 0) return 1;
    std::vector<std::uint64_t> adj(n);
    for (int v = 0; v < n; ++v) adj[v] = g.neighbor_mask(v);
    std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    auto rec = [&](auto&& self, std::uint64_t cand, int need) -> std::uint64_t {
        std::uint64_t total = 0;
        while (cand) {
            if (std::popcount(cand) < need) break;
            int v = std::countr_zero(cand);
            cand &= cand - 1;
            if (need == 1)
                ++total;
            else
                total += self(self, cand & ~adj[v], need - 1);
        }
        return total;
    };
    return rec(rec, full, t);
}

struct ConcReport {
    std::int64_t s = 0, t = 0;
    double p = 0;  // NON-edge probability; graphs are drawn as G(s, 1-p)
    int trials = 0;
    double empirical_mean = 0;
    double empirical_tail_freq = 0;  // fraction of trials with count <= mu/2
    Quad analytic_suen = 1;
    Quad analytic_lemma6 = 1;
    bool preconditions_ok = false;  // lemma6_bound hypotheses hold at (s,t,p)
    bool suen_applicable = false;   // t >= 3, so the dependency graph has edges
    BigRat mu_exact = 0;
    std::vector<BigInt> counts;            // one per trial
    std::vector<std::uint64_t> trial_seeds;
};

namespace detail {
template <class Work>
inline void run_trials(int trials, int threads, Work&& work) {
    threads = std::max(1, threads);
    if (threads == 1 || trials <= 1) {
        for (int i = 0; i < trials; ++i) work(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < trials; i += threads) work(i);
        });
    for (auto& th : pool) th.join();
}
}  // namespace detail

// Monte Carlo counterpart of the tail bound: draw G(s, 1-p), count
// independent t-sets, compare the lower-tail frequency against the analytic
// bounds. Trials write to disjoint slots, so the result does not depend on
// the thread count.
inline ConcReport run_concentration_experiment(std::int64_t s, std::int64_t t, double p, int trials, Seed seed,
                                               int threads = 1) {
    if (trials < 1) throw parameter_error("run_concentration_experiment: trials must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("run_concentration_experiment: p must lie in (0,1)");
    if (t < 0 || t > s) throw parameter_error("run_concentration_experiment: need 0 <= t <= s");
    if (s > 64) throw resource_error("run_concentration_experiment: s > 64");

    bool dfs_ok = binom(s, t) * trials <= BigInt(10000000000LL);
    if (!dfs_ok && s > 40)
        throw resource_error("run_concentration_experiment: C(s,t)*trials over budget and s > 40");

    ConcReport rep;
    rep.s = s;
    rep.t = t;
    rep.p = p;
    rep.trials = trials;
    rep.mu_exact = expected_is_count_exact(s, t, BigRat(p));
    rep.counts.assign(trials, 0);
    rep.trial_seeds.assign(trials, 0);

    detail::run_trials(trials, threads, [&](int i) {
        Seed trial_seed = derive(seed, static_cast<std::uint64_t>(i));
        rep.trial_seeds[i] = trial_seed.value;
        Graph g = random_graph(static_cast<int>(s), 1.0 - p, trial_seed);  // G(s, 1-p): p is the NON-edge probability
        if (dfs_ok) {
            rep.counts[i] = count_is_of_size(g, static_cast<int>(t));
        } else {
            ISProfile prof = count_profile(g);
            rep.counts[i] = t <= prof.alpha ? prof.counts[t] : BigInt(0);
        }
    });

    BigInt sum = 0;
    int tail = 0;
    for (const auto& c : rep.counts) {
        sum += c;
        if (BigRat(2 * c) <= rep.mu_exact) ++tail;
    }
    rep.empirical_mean = static_cast<double>(to_quad(sum) / trials);
    rep.empirical_tail_freq = static_cast<double>(tail) / trials;

    if (t >= 3) {
        rep.suen_applicable = true;
        rep.analytic_suen = suen_bound(dependency_quantities(s, t, p));
    }
    rep.preconditions_ok = s >= 2 * t * t + t && t >= 1 &&
                           expected_is_count(s, t, p) >= Quad(s) * Quad(s) / (Quad(t) * Quad(t) * Quad(t) * Quad(t));
    if (rep.preconditions_ok) rep.analytic_lemma6 = lemma6_bound(s, t, p);
    return rep;
}

struct AlphaReport {
    std::int64_t s = 0;
    double n = 0;
    double p = 0;  // EDGE probability; graphs are drawn as G(s, p)
    int trials = 0;
    double threshold = 0;       // A(s,n)
    double empirical_freq = 0;  // fraction of trials with alpha <= A(s,n)
    Quad analytic_bound = 0;    // n^{-3s}
    bool precondition_ok = false;  // p <= n^{-13/14}
    std::vector<int> alphas;
    std::vector<std::uint64_t> trial_seeds;
};

// Empirical counterpart of the small-independence-number tail: sample
// G(s, p) -- here p IS the edge probability -- and compare the frequency of
// alpha <= A(s,n) against n^{-3s}.
inline AlphaReport run_alpha_experiment(std::int64_t s, double n, double p, int trials, Seed seed, int threads = 1,
                                        bool allow_large_p = false) {
    if (trials < 1) throw parameter_error("run_alpha_experiment: trials must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("run_alpha_experiment: p must lie in [0,1]");
    if (n < 1) throw parameter_error("run_alpha_experiment: n must be >= 1");
    if (s < 0 || s > 60) throw resource_error("run_alpha_experiment: s must lie in [0,60]");

    AlphaReport rep;
    rep.s = s;
    rep.n = n;
    rep.p = p;
    rep.trials = trials;
    rep.threshold = a_threshold(static_cast<double>(s), n);
    rep.analytic_bound = exp(-3 * Quad(s) * log(Quad(n)));
    rep.precondition_ok = p <= std::pow(n, -13.0 / 14.0) * (1 + 1e-12);
    if (!rep.precondition_ok && !allow_large_p)
        throw parameter_error("run_alpha_experiment: p exceeds n^{-13/14}; pass allow_large_p to explore anyway");

    rep.alphas.assign(trials, 0);
    rep.trial_seeds.assign(trials, 0);
    detail::run_trials(trials, threads, [&](int i) {
        Seed trial_seed = derive(seed, static_cast<std::uint64_t>(i));
        rep.trial_seeds[i] = trial_seed.value;
        rep.alphas[i] = count_profile(random_graph(static_cast<int>(s), p, trial_seed)).alpha;
    });

    int hits = 0;
    for (int a : rep.alphas)
        if (a <= rep.threshold) ++hits;
    rep.empirical_freq = static_cast<double>(hits) / trials;
    return rep;
}

// --- serialization ---

inline nlohmann::json conc_report_to_json(const ConcReport& r) {
    nlohmann::json j;
    j["s"] = r.s;
    j["t"] = r.t;
    j["nonedge_p"] = r.p;
    j["trials"] = r.trials;
    j["empirical_mean"] = r.empirical_mean;
    j["empirical_tail_freq"] = r.empirical_tail_freq;
    j["analytic_suen"] = static_cast<double>(r.analytic_suen);
    j["analytic_lemma6"] = static_cast<double>(r.analytic_lemma6);
    j["preconditions_ok"] = r.preconditions_ok;
    j["suen_applicable"] = r.suen_applicable;
    j["mu_exact"] = static_cast<double>(to_quad(boost::multiprecision::numerator(r.mu_exact)) /
                                        to_quad(boost::multiprecision::denominator(r.mu_exact)));
    return j;
}

inline nlohmann::json alpha_report_to_json(const AlphaReport& r) {
    nlohmann::json j;
    j["s"] = r.s;
    j["n"] = r.n;
    j["edge_p"] = r.p;
    j["trials"] = r.trials;
    j["threshold"] = r.threshold;
    j["empirical_freq"] = r.empirical_freq;
    j["analytic_bound_log10"] = static_cast<double>(log(r.analytic_bound) / log(Quad(10)));
    j["precondition_ok"] = r.precondition_ok;
    return j;
}

}  // namespace dpcolor
