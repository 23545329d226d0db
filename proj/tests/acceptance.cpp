// Acceptance gate: one check per release criterion, each printing a single
// [PASS]/[FAIL] line with its wall time. Exit status is nonzero if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dpcolor/harness.hpp"
#include "exact_helpers.hpp"

using namespace dpcolor;
namespace fs = std::filesystem;

namespace {

struct Check {
    std::string name;
    std::function<bool(std::string&)> run;
};

int default_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return std::clamp<int>(static_cast<int>(hw ? hw : 1), 1, 8);
}

Graph five_vertex_graph(int mask) {
    Graph g(5);
    int bit = 0;
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v, ++bit)
            if (mask >> bit & 1) g.add_edge(u, v);
    return g;
}

// --- 1. counting oracle ------------------------------------------------

bool crit_count_oracle(std::string& detail) {
    for (int mask = 0; mask < 1024; ++mask) {
        Graph g = five_vertex_graph(mask);
        ISProfile a = count_profile(g), b = brute_profile(g);
        if (a.counts != b.counts || a.total != b.total || a.alpha != b.alpha || a.median != b.median) {
            detail = "mismatch on 5-vertex mask " + std::to_string(mask);
            return false;
        }
    }
    Rng rng(Seed{101});
    for (int i = 0; i < 500; ++i) {
        int n = 1 + static_cast<int>(rng.next_below(14));
        double q = 0.1 + 0.8 * rng.next_double();
        Graph g = random_graph(n, q, Seed{rng.next_u64()});
        ISProfile a = count_profile(g), b = brute_profile(g);
        if (a.counts != b.counts || a.total != b.total) {
            detail = "mismatch on random instance " + std::to_string(i);
            return false;
        }
    }
    detail = "1024 five-vertex + 500 random graphs, exact equality";
    return true;
}

// --- 2. binomial-tail sandwich -----------------------------------------

bool crit_sandwich(std::string& detail) {
    Rng rng(Seed{202});
    for (int i = 0; i < 1000; ++i) {
        std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_below(60));
        double b = rng.next_double() * (static_cast<double>(n) / 3.0);
        BigInt lo = binom(n, static_cast<std::int64_t>(std::floor(b)));
        BigInt mid = binom_le(n, b);
        if (!(lo <= mid && mid <= 2 * lo)) {
            detail = "violated at n=" + std::to_string(n) + " b=" + std::to_string(b);
            return false;
        }
    }
    detail = "1000 random (n, b) with n >= 3b";
    return true;
}

// --- 3. richness end-to-end --------------------------------------------

bool crit_richness(std::string& detail) {
    int done = 0;
    std::uint64_t seed = 0;
    while (done < 50) {
        Graph g = random_bipartite_graph(16 + static_cast<int>(seed % 9), 0.4, Seed{seed});
        ++seed;
        int delta = g.max_degree();
        if (delta < 1 || delta > 22) continue;
        double b = std::log2(static_cast<double>(delta)) / 6.0;
        RichnessReport rep = check_is_rich_exact(g, b);
        if (!rep.rich) {
            detail = "bipartite graph unexpectedly not rich (seed " + std::to_string(seed - 1) + ")";
            return false;
        }
        ++done;
    }
    RichnessReport k4 = check_is_rich_exact(complete_graph(4), 1.0);
    if (k4.rich || k4.violations.empty()) {
        detail = "K_4 at b=1 should fail";
        return false;
    }
    const RichnessViolation& v = k4.violations.front();
    if (v.subset.size() != 1 || v.is_count != 2 || v.required != 4) {
        detail = "K_4 first violation should be a single vertex with I=2 < 4";
        return false;
    }
    detail = "50 bipartite graphs rich at b = (1/6)log2(max degree); K_4 fails at b=1 on a single vertex";
    return true;
}

// --- 4. growth-condition verifier --------------------------------------

bool crit_obsver(std::string& detail) {
    GrowthProfile pr = colorable_profile(2);
    BigInt delta = BigInt(1) << 60;
    int got = max_verified_b(pr, delta);
    if (got != 4) {
        detail = "max_verified_b = " + std::to_string(got) + ", want 4";
        return false;
    }
    ObsVerReport ok = verify_obsver(pr, delta, 4);
    ObsVerReport bad = verify_obsver(pr, delta, 5);
    BigInt third = BigInt(1) << 18;  // delta^{1/3}/4 = 2^20/4
    if (!(ok.all() && ok.main_exact && ok.s_delta == 40)) {
        detail = "b=4 verification should pass exactly at s_delta=40";
        return false;
    }
    if (!(binom(40, 4) == 91390 && binom(40, 4) <= third && binom(40, 5) == 658008 && binom(40, 5) > third)) {
        detail = "exact binomial comparisons off";
        return false;
    }
    if (bad.cond_main || !bad.main_exact) {
        detail = "b=5 must fail the main condition via the exact path";
        return false;
    }
    // log-space values agree with the integers they mirror
    double lhs4 = static_cast<double>(ok.main_lhs);
    if (std::abs(lhs4 - std::log(91390.0)) > 1e-9) {
        detail = "log-space lhs disagrees with exact C(40,4)";
        return false;
    }
    detail = "r=2 profile at 2^60: max_verified_b=4; C(40,4)=91390 <= 2^18 < C(40,5)=658008";
    return true;
}

// --- 5. solver vs enumeration ------------------------------------------

bool crit_solver(std::string& detail) {
    Rng rng(Seed{505});
    int agree = 0;
    for (int i = 0; i < 250; ++i) {
        int n = 1 + static_cast<int>(rng.next_below(6));
        int ell = 1 + static_cast<int>(rng.next_below(3));
        double q = 0.2 + 0.6 * rng.next_double();
        Graph g = random_graph(n, q, Seed{rng.next_u64()});
        CorrespondenceAssignment ca = random_assignment(g, ell, Seed{rng.next_u64()});
        SolveResult r = decide_colorable(g, ca);
        bool oracle = testhelp::brute_colorable(ca);
        if ((r.status == SolveStatus::colored) != oracle || r.status == SolveStatus::budget_exceeded) {
            detail = "disagreement on instance " + std::to_string(i);
            return false;
        }
        if (r.status == SolveStatus::colored && !validate(ca, *r.coloring).ok) {
            detail = "returned coloring fails validation on instance " + std::to_string(i);
            return false;
        }
        ++agree;
    }
    detail = std::to_string(agree) + " seeded instances (n <= 6, ell <= 3) agree with full enumeration";
    return true;
}

// --- 6. resampling kernel stationarity ---------------------------------

bool crit_stationarity(std::string& detail) {
    struct Fixture {
        std::string name;
        Graph g;
        CorrespondenceAssignment ca;
    };
    std::vector<Fixture> fixtures;
    {
        Graph k3 = complete_graph(3);
        CorrespondenceAssignment diag = from_lists(k3, {{1, 2}, {1, 2}, {1, 2}});
        fixtures.push_back({"K_3 diagonal", k3, diag});
        Graph p3(3);
        p3.add_edge(0, 1);
        p3.add_edge(1, 2);
        CorrespondenceAssignment pd = from_lists(p3, {{1, 2}, {1, 2}, {1, 2}});
        fixtures.push_back({"P_3 diagonal", p3, pd});
    }
    for (const Fixture& fx : fixtures) {
        for (int u = 0; u < fx.g.num_vertices(); ++u) {
            std::vector<PartialColoring> states = testhelp::states_with_u_uncolored(fx.ca, u);
            std::map<PartialColoring, BigRat> mass;
            for (const PartialColoring& phi : states) {
                auto dist = testhelp::kernel_distribution(fx.g, fx.ca, phi, u);
                BigRat row = 0;
                for (auto& [out, pr] : dist) {
                    row += pr;
                    mass[out] += pr;
                }
                if (row != BigRat(1)) {
                    detail = fx.name + ": kernel row does not sum to 1";
                    return false;
                }
            }
            if (mass.size() != states.size()) {
                detail = fx.name + ": kernel leaves the valid-state space";
                return false;
            }
            for (auto& [out, m] : mass)
                if (m != BigRat(1)) {
                    detail = fx.name + ": uniform distribution not fixed at u=" + std::to_string(u);
                    return false;
                }
        }
    }
    detail = "uniform over valid states is fixed exactly on K_3 and P_3 at ell=2, every u";
    return true;
}

// --- 7. concentration experiment ---------------------------------------

bool crit_concentration(std::string& detail) {
    ConcReport rep = run_concentration_experiment(55, 5, 0.5, 200, Seed{7707}, default_threads());
    double mu = 3478761.0 / 1024.0;
    if (std::abs(rep.empirical_mean - mu) > 0.05 * mu) {
        detail = "empirical mean " + std::to_string(rep.empirical_mean) + " not within 5% of " + std::to_string(mu);
        return false;
    }
    double tail_cap = 0.9703 + 3 * std::sqrt(0.97 * 0.03 / 200);
    if (rep.empirical_tail_freq > tail_cap) {
        detail = "tail frequency " + std::to_string(rep.empirical_tail_freq) + " above cap";
        return false;
    }
    double l6 = static_cast<double>(lemma6_bound(55, 5, 0.5));
    if (std::abs(l6 - std::exp(-0.03025)) > 1e-6 * std::exp(-0.03025)) {
        detail = "lemma6_bound(55,5,0.5) = " + std::to_string(l6) + " off exp(-0.03025)";
        return false;
    }
    std::ostringstream os;
    os << "mean " << rep.empirical_mean << " vs mu " << mu << "; tail " << rep.empirical_tail_freq << " <= "
       << tail_cap;
    detail = os.str();
    return true;
}

// --- 8. independence-number tail experiment -----------------------------

bool crit_alpha(std::string& detail) {
    double n = 1e4;
    AlphaReport rep = run_alpha_experiment(20, n, std::pow(n, -13.0 / 14.0), 200, Seed{8808}, default_threads());
    if (rep.threshold != 4.0 / 3) {
        detail = "threshold A(20,10^4) should be 4/3";
        return false;
    }
    if (rep.empirical_freq != 0.0) {
        detail = "observed alpha <= 4/3 in some trial";
        return false;
    }
    double log10bound = static_cast<double>(log(rep.analytic_bound) / log(Quad(10)));
    if (std::abs(log10bound - (-240.0)) > 1e-6) {
        detail = "analytic bound should be n^{-60} = 10^{-240}";
        return false;
    }
    detail = "200 trials, frequency 0 of alpha <= 4/3; reported bound 10^{-240}";
    return true;
}

// --- 9. complete-graph sweep -------------------------------------------

bool crit_lbcom(std::string& detail) {
    LbcomConfig cfg;
    cfg.n = 16;
    cfg.ells = {1, 2, 3, 4, 6, 8, 12, 16};
    cfg.trials = 100;
    cfg.seed = 99;
    cfg.threads = default_threads();
    LbcomReport rep = run_lbcom(cfg);
    auto frac = [&](std::size_t i) { return rep.cells[i].success_fraction; };
    for (const LbcomCell& c : rep.cells)
        if (c.inconclusive != 0) {
            detail = "inconclusive trials at ell=" + std::to_string(c.ell);
            return false;
        }
    if (frac(0) != 0.0) {
        detail = "success fraction at ell=1 is " + std::to_string(frac(0));
        return false;
    }
    if (frac(rep.cells.size() - 1) != 1.0) {
        detail = "success fraction at ell=16 is " + std::to_string(frac(rep.cells.size() - 1));
        return false;
    }
    std::ostringstream os;
    os << "fractions:";
    for (const LbcomCell& c : rep.cells) os << ' ' << c.success_fraction;
    for (std::size_t i = 2; i < rep.cells.size(); ++i) {  // across {2,3,4,6,8,12,16}
        double fa = frac(i - 1), fb = frac(i);
        double sigma = std::sqrt(fa * (1 - fa) / cfg.trials + fb * (1 - fb) / cfg.trials);
        if (fb < fa - 2 * sigma) {
            detail = "decrease beyond 2 sigma between ell=" + std::to_string(rep.cells[i - 1].ell) + " and ell=" +
                     std::to_string(rep.cells[i].ell) + " (" + os.str() + ")";
            return false;
        }
    }
    detail = os.str();
    return true;
}

// --- 10. sampler uniformity --------------------------------------------

bool crit_sampler(std::string& detail) {
    Graph c5(5);
    for (int i = 0; i < 5; ++i) c5.add_edge(i, (i + 1) % 5);
    std::map<std::vector<int>, int> freq;
    const int draws = 100000;
    Seed master{1010};
    for (int i = 0; i < draws; ++i) freq[sample_independent_set(c5, derive(master, static_cast<std::uint64_t>(i)))]++;
    if (freq.size() != 11) {
        detail = "C_5 has 11 independent sets; sampler hit " + std::to_string(freq.size());
        return false;
    }
    double expect = 1.0 / 11, sigma = std::sqrt(expect * (1 - expect) / draws);
    for (auto& [set, count] : freq) {
        double f = static_cast<double>(count) / draws;
        if (std::abs(f - expect) > 5 * sigma) {
            detail = "a set's frequency " + std::to_string(f) + " is over 5 sigma from 1/11";
            return false;
        }
    }
    detail = "all 11 sets within 5 sigma of 1/11 over 10^5 draws";
    return true;
}

// --- 11. CLI reproducibility -------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<missing " + p.string() + ">";
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool crit_cli_repro(std::string& detail) {
    fs::path root = fs::temp_directory_path() / "dpcolor_accept_cli";
    fs::remove_all(root);
    std::vector<std::string> commands = {
        "gen --n 12 --edge-prob 0.5 --seed 3 --out {d}/g.json",
        "gen --n 10 --nonedge-p 0.6 --bipartite --seed 4 --out {d}/bip.json",
        "count --in {d}/g.json --out {d}/profile.json",
        "richness --in {d}/bip.json --b 0.5 --out {d}/rich.json",
        "assign --in {d}/g.json --ell 3 --seed 5 --out {d}/a.json",
        "solve --graph {d}/g.json --assignment {d}/a.json --method backtrack --out {d}/solve_bt.json",
        "solve --graph {d}/g.json --assignment {d}/a.json --method lll --seed 6 --out {d}/solve_lll.json",
        "solve --graph {d}/g.json --assignment {d}/a.json --method greedy --seed 6 --out {d}/solve_greedy.json",
        "exp conc --s 16 --t 3 --nonedge-p 0.5 --trials 20 --seed 7 --out {d}/conc",
        "exp alpha --s 12 --n 1000 --trials 20 --seed 8 --out {d}/alpha",
        "exp lbcom --n 6 --ell 2 --ell 4 --ell 6 --trials 10 --seed 9 --out {d}/lbcom",
        "exp ren --n 12 --nonedge-p 0.5 --seed 10 --checks 5 --out {d}/ren",
        "count --in {d}/g.json --threads 2 --out {d}/profile2.json",
    };
    for (const fs::path& dir : {root / "a", root / "b"}) {
        fs::create_directories(dir);
        for (std::size_t i = 0; i < commands.size(); ++i) {
            std::string cmd = commands[i];
            std::string marker = "{d}";
            for (std::size_t at = cmd.find(marker); at != std::string::npos; at = cmd.find(marker))
                cmd.replace(at, marker.size(), dir.string());
            std::string full = std::string(DPCOLOR_BIN) + " " + cmd + " > " + (dir / ("stdout" + std::to_string(i) + ".txt")).string();
            if (std::system(full.c_str()) != 0) {
                detail = "command failed: " + cmd;
                return false;
            }
        }
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(root / "a")) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) {
        detail = "no outputs produced";
        return false;
    }
    for (const std::string& name : names) {
        if (slurp(root / "a" / name) != slurp(root / "b" / name)) {
            detail = "rerun differs in " + name;
            return false;
        }
    }
    detail = std::to_string(names.size()) + " output files byte-identical across reruns";
    return true;
}

}  // namespace

int main() {
    std::vector<Check> checks = {
        {"counting oracle", crit_count_oracle},
        {"binomial-tail sandwich", crit_sandwich},
        {"richness end-to-end", crit_richness},
        {"growth-condition verifier", crit_obsver},
        {"solver vs enumeration", crit_solver},
        {"resampling kernel stationarity", crit_stationarity},
        {"concentration experiment", crit_concentration},
        {"independence-number tail", crit_alpha},
        {"complete-graph sweep", crit_lbcom},
        {"sampler uniformity", crit_sampler},
        {"CLI reproducibility", crit_cli_repro},
    };
    bool all_ok = true;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = checks[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream line;
        line << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << checks[i].name << " (" << std::fixed
             << std::setprecision(1) << secs << "s)";
        if (!detail.empty()) line << " — " << detail;
        std::cout << line.str() << std::endl;
        all_ok &= ok;
    }
    std::cout << (all_ok ? "acceptance: all criteria passed" : "acceptance: FAILURES present") << std::endl;
    return all_ok ? 0 : 1;
}
