#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpcolor/concentration.hpp"
#include "dpcolor/correspondence.hpp"
#include "dpcolor/errors.hpp"
#include "dpcolor/graph.hpp"
#include "dpcolor/iscount.hpp"
#include "dpcolor/richness.hpp"
#include "dpcolor/rng.hpp"
#include "dpcolor/solver.hpp"

namespace dpcolor {

// Single-writer atomic file output: write a sibling temp file, rename over
// the target on success.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw resource_error("write_text_atomic: cannot open " + tmp.string());
        out << content;
        if (!out) throw resource_error("write_text_atomic: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline void write_json_atomic(const std::string& path, const nlohmann::json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

inline std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

// Doubles in CSV/JSON reports are printed with enough digits to round-trip,
// so identical runs produce identical bytes.
inline std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// Complete-graph colorability sweep

struct LbcomConfig {
    int n = 16;
    std::vector<int> ells;    // explicit list-size sweep; takes precedence
    std::vector<double> cs;   // otherwise ell = max(1, ceil(c * n / ln n))
    int trials = 100;
    std::uint64_t seed = 0;
    std::int64_t budget = 10000000;
    int threads = 1;
};

struct LbcomTrial {
    int ell = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    SolveStatus status = SolveStatus::budget_exceeded;
    std::int64_t nodes = 0;
    int plausible_alpha = 0;  // alpha of the cover graph induced on a random plausible set
};

struct LbcomCell {
    int ell = 0;
    double c = std::numeric_limits<double>::quiet_NaN();  // NaN when ell was given directly
    int successes = 0, unsats = 0, inconclusive = 0;
    double success_fraction = 0;  // over conclusive trials
    double mean_plausible_alpha = 0;
};

struct LbcomReport {
    LbcomConfig config;
    std::vector<LbcomCell> cells;
    std::vector<LbcomTrial> trial_rows;
};

// One trial: a uniform random assignment on K_n decided exactly, plus the
// independence number of the cover graph induced on a uniformly chosen
// plausible set (one random color per vertex) — that induced graph is
// distributed like G(n, 1/ell).
inline LbcomTrial lbcom_trial(const Graph& kn, int ell, int trial, Seed cell_seed, std::int64_t budget) {
    LbcomTrial row;
    row.ell = ell;
    row.trial = trial;
    Seed ts = derive(cell_seed, static_cast<std::uint64_t>(trial));
    row.seed = ts.value;
    CorrespondenceAssignment ca = random_assignment(kn, ell, ts);
    SolveResult sr = decide_colorable(kn, ca, budget);
    row.status = sr.status;
    row.nodes = sr.stats.nodes_expanded;

    CoverGraph cg = build_cover_graph(ca);
    Rng prng(derive(ts, 0x706c6175ULL));
    std::vector<int> X;
    for (int v = 0; v < kn.num_vertices(); ++v)
        X.push_back(cg.offset[v] + static_cast<int>(prng.next_below(static_cast<std::uint64_t>(ell))));
    row.plausible_alpha = count_profile(induced_subgraph(cg.graph, X)).alpha;
    return row;
}

inline LbcomReport run_lbcom(const LbcomConfig& cfg) {
    if (cfg.n < 2 || cfg.n > 24) throw parameter_error("run_lbcom: n must lie in [2,24] (exact solver per trial)");
    if (cfg.trials < 1) throw parameter_error("run_lbcom: trials must be >= 1");

    std::vector<std::pair<int, double>> sweep;  // (ell, c-or-NaN)
    if (!cfg.ells.empty()) {
        for (int ell : cfg.ells) sweep.emplace_back(ell, std::numeric_limits<double>::quiet_NaN());
    } else {
        std::vector<double> cs = cfg.cs.empty() ? std::vector<double>{0.5, 1.0, 2.0, 3.0} : cfg.cs;
        for (double c : cs) {
            double x = c * cfg.n / std::log(static_cast<double>(cfg.n));
            int ell = std::max<int>(1, static_cast<int>(std::ceil(x - 1e-9 * (std::fabs(x) + 1))));
            sweep.emplace_back(ell, c);
        }
    }
    for (auto [ell, c] : sweep)
        if (ell < 1) throw parameter_error("run_lbcom: ell must be >= 1");

    Graph kn = complete_graph(cfg.n);
    LbcomReport rep;
    rep.config = cfg;
    rep.trial_rows.resize(sweep.size() * cfg.trials);

    for (std::size_t ci = 0; ci < sweep.size(); ++ci) {
        auto [ell, c] = sweep[ci];
        // per-cell seed depends only on (master seed, ell): the same ell
        // yields the same trials no matter what else is in the sweep
        Seed cell_seed = derive(Seed{cfg.seed}, static_cast<std::uint64_t>(ell));
        detail::run_trials(cfg.trials, cfg.threads, [&, ell = ell, ci = ci](int t) {
            rep.trial_rows[ci * cfg.trials + t] = lbcom_trial(kn, ell, t, cell_seed, cfg.budget);
        });
        LbcomCell cell;
        cell.ell = ell;
        cell.c = c;
        std::int64_t alpha_sum = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            const LbcomTrial& row = rep.trial_rows[ci * cfg.trials + t];
            if (row.status == SolveStatus::colored)
                ++cell.successes;
            else if (row.status == SolveStatus::unsat)
                ++cell.unsats;
            else
                ++cell.inconclusive;
            alpha_sum += row.plausible_alpha;
        }
        int conclusive = cell.successes + cell.unsats;
        cell.success_fraction = conclusive ? static_cast<double>(cell.successes) / conclusive : 0.0;
        cell.mean_plausible_alpha = static_cast<double>(alpha_sum) / cfg.trials;
        rep.cells.push_back(cell);
    }
    return rep;
}

inline std::string lbcom_csv(const LbcomReport& rep) {
    std::string csv = csv_line({"ell", "trial", "seed", "status", "nodes", "plausible_alpha"});
    for (const auto& row : rep.trial_rows)
        csv += csv_line({std::to_string(row.ell), std::to_string(row.trial), std::to_string(row.seed),
                         to_string(row.status), std::to_string(row.nodes), std::to_string(row.plausible_alpha)});
    return csv;
}

inline nlohmann::json lbcom_summary_json(const LbcomReport& rep) {
    nlohmann::json j;
    j["config"] = {{"experiment", "lbcom"}, {"n", rep.config.n},      {"ells", rep.config.ells},
                   {"cs", rep.config.cs},   {"trials", rep.config.trials}, {"seed", rep.config.seed},
                   {"budget", rep.config.budget}};
    auto cells = nlohmann::json::array();
    for (const auto& c : rep.cells) {
        nlohmann::json jc;
        jc["ell"] = c.ell;
        if (!std::isnan(c.c)) jc["c"] = c.c;
        jc["successes"] = c.successes;
        jc["unsats"] = c.unsats;
        jc["inconclusive"] = c.inconclusive;
        jc["success_fraction"] = c.success_fraction;
        jc["mean_plausible_alpha"] = c.mean_plausible_alpha;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j;
}

// ---------------------------------------------------------------------------
// Random-graph pipeline: degree/threshold formulas, richness-flavored subset
// spot checks, then a solve attempt at the derived list size

struct RenConfig {
    int n = 40;
    double nonedge_p = 0.5;  // graph is G(n, 1 - nonedge_p)
    std::uint64_t seed = 0;
    std::int64_t delta0 = 1;
    int subset_checks = 20;
    std::int64_t budget = 10000000;
    std::int64_t resample_cap = -1;  // -1: default 2 n delta^3
};

struct RenSubsetCheck {
    int size = 0;
    BigInt total;  // I of the induced subgraph
    double g_p = 0;
    bool exceeds = false;
};

struct RenReport {
    RenConfig config;
    int delta = 0;
    std::int64_t s_delta = 0;  // 0 when delta = 0 (degenerate, no verifier run)
    int b = 0;
    ObsVerReport obsver;
    std::vector<RenSubsetCheck> subset_checks;
    std::int64_t ell = 0;
    SolveStatus lll_status = SolveStatus::budget_exceeded;
    std::int64_t lll_rounds = 0;
    SolveStatus final_status = SolveStatus::budget_exceeded;  // after exact fallback
    SolveStatus ceiling_status = SolveStatus::budget_exceeded;  // sanity run at ell = n
};

inline RenReport run_ren(const RenConfig& cfg) {
    if (cfg.n < 1 || cfg.n > 64) throw parameter_error("run_ren: n must lie in [1,64]");
    if (!(cfg.nonedge_p > 0.0 && cfg.nonedge_p < 1.0)) throw parameter_error("run_ren: nonedge_p must lie in (0,1)");

    RenReport rep;
    rep.config = cfg;
    Seed master{cfg.seed};
    // G(n, 1-p) convention: cfg.nonedge_p is the probability of a NON-edge
    Graph g = random_graph(cfg.n, 1.0 - cfg.nonedge_p, derive(master, 0x67656eULL));
    rep.delta = g.max_degree();

    GrowthProfile profile = randomgraph_profile(cfg.nonedge_p);
    if (rep.delta >= 1) {
        BigInt delta_big(rep.delta);
        rep.s_delta = s_delta(profile, delta_big);
        rep.b = profile.b_formula(delta_big);
        rep.obsver = verify_obsver(profile, delta_big, rep.b);
    }

    // Spot-check the premise that moderately large subsets carry more than
    // g_p(size) independent sets.
    if (rep.delta >= 1 && rep.s_delta <= cfg.n) {
        Rng rng(derive(master, 0x737562ULL));
        std::vector<int> verts(cfg.n);
        for (int v = 0; v < cfg.n; ++v) verts[v] = v;
        for (int k = 0; k < cfg.subset_checks; ++k) {
            int size = static_cast<int>(rep.s_delta +
                                        static_cast<std::int64_t>(rng.next_below(
                                            static_cast<std::uint64_t>(cfg.n - rep.s_delta + 1))));
            rng.shuffle(verts);
            std::vector<int> X(verts.begin(), verts.begin() + size);
            RenSubsetCheck chk;
            chk.size = size;
            chk.total = count_profile(induced_subgraph(g, X)).total;
            chk.g_p = static_cast<double>(g_p_value(Quad(size), cfg.nonedge_p));
            chk.exceeds = to_quad(chk.total) > Quad(chk.g_p);
            rep.subset_checks.push_back(std::move(chk));
        }
    }

    rep.ell = ell_for(static_cast<std::int64_t>(rep.delta), static_cast<std::int64_t>(std::max(rep.b, 1)),
                      cfg.delta0);
    CorrespondenceAssignment ca = random_assignment(g, static_cast<int>(rep.ell), derive(master, 0x61736eULL));
    SolveResult lll = lll_color(g, ca, rep.delta, derive(master, 0x6c6c31ULL), cfg.resample_cap);
    rep.lll_status = lll.status;
    rep.lll_rounds = lll.stats.resample_rounds;
    rep.final_status = lll.status == SolveStatus::colored ? lll.status : decide_colorable(g, ca, cfg.budget).status;

    CorrespondenceAssignment ceiling = random_assignment(g, cfg.n, derive(master, 0x61736332ULL));
    rep.ceiling_status = lll_color(g, ceiling, rep.delta, derive(master, 0x6c6c32ULL), cfg.resample_cap).status;
    return rep;
}

inline std::string ren_csv(const RenReport& rep) {
    std::string csv = csv_line({"check", "size", "total", "g_p", "exceeds"});
    for (std::size_t i = 0; i < rep.subset_checks.size(); ++i) {
        const auto& c = rep.subset_checks[i];
        csv += csv_line({std::to_string(i), std::to_string(c.size), c.total.str(), fmt_double(c.g_p),
                         c.exceeds ? "1" : "0"});
    }
    return csv;
}

inline nlohmann::json ren_summary_json(const RenReport& rep) {
    nlohmann::json j;
    j["config"] = {{"experiment", "ren"},
                   {"n", rep.config.n},
                   {"nonedge_p", rep.config.nonedge_p},
                   {"seed", rep.config.seed},
                   {"delta0", rep.config.delta0},
                   {"subset_checks", rep.config.subset_checks},
                   {"budget", rep.config.budget},
                   {"resample_cap", rep.config.resample_cap}};
    j["delta"] = rep.delta;
    j["s_delta"] = rep.s_delta;
    j["b"] = rep.b;
    j["obsver"] = obsver_report_to_json(rep.obsver);
    j["subset_checks_passed"] = [&] {
        int k = 0;
        for (const auto& c : rep.subset_checks) k += c.exceeds;
        return k;
    }();
    j["subset_checks_total"] = rep.subset_checks.size();
    j["ell"] = rep.ell;
    j["lll_status"] = to_string(rep.lll_status);
    j["lll_rounds"] = rep.lll_rounds;
    j["final_status"] = to_string(rep.final_status);
    j["ceiling_status"] = to_string(rep.ceiling_status);
    return j;
}

// CSV views of the concentration reports (rows per trial).

inline std::string conc_csv(const ConcReport& rep) {
    std::string csv = csv_line({"trial", "seed", "count"});
    for (std::size_t i = 0; i < rep.counts.size(); ++i)
        csv += csv_line({std::to_string(i), std::to_string(rep.trial_seeds[i]), rep.counts[i].str()});
    return csv;
}

inline std::string alpha_csv(const AlphaReport& rep) {
    std::string csv = csv_line({"trial", "seed", "alpha"});
    for (std::size_t i = 0; i < rep.alphas.size(); ++i)
        csv += csv_line({std::to_string(i), std::to_string(rep.trial_seeds[i]), std::to_string(rep.alphas[i])});
    return csv;
}

}  // namespace dpcolor
