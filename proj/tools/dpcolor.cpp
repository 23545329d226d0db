// Command-line front end. Every command is a pure function of its flags and
// --seed; reruns produce byte-identical files (no timestamps in outputs).
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dpcolor/harness.hpp"

using namespace dpcolor;

namespace {

int env_threads() {
    if (const char* s = std::getenv("DPCOLOR_THREADS")) {
        int t = std::atoi(s);
        if (t >= 1) return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void emit(const std::string& path, const nlohmann::json& j) {
    if (!path.empty()) write_json_atomic(path, j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correspondence-coloring toolkit"};
    app.require_subcommand(1);
    int threads = env_threads();
    app.add_option("--threads", threads, "worker threads (env DPCOLOR_THREADS)");

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "generate a random graph file");
    int gen_n = 10;
    double gen_q = -1, gen_nonedge = -1;
    bool gen_bip = false;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_option("--edge-prob", gen_q, "edge probability q");
    gen->add_option("--nonedge-p", gen_nonedge, "NON-edge probability p (q = 1-p)");
    gen->add_flag("--bipartite", gen_bip, "random bipartite graph on halves of [0,n)");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--out", gen_out, "output graph JSON")->required();

    // --- count ---
    auto* count = app.add_subcommand("count", "independent-set census of a graph file");
    std::string count_in, count_out;
    count->add_option("--in", count_in, "graph JSON")->required();
    count->add_option("--out", count_out, "profile JSON output");

    // --- richness ---
    auto* rich = app.add_subcommand("richness", "exhaustive neighborhood-subset richness check");
    std::string rich_in, rich_out;
    double rich_b = 0;
    std::int64_t rich_delta = -1;
    rich->add_option("--in", rich_in, "graph JSON")->required();
    rich->add_option("--b", rich_b, "richness parameter b (real)")->required();
    rich->add_option("--delta", rich_delta, "max-degree override (default: graph's)");
    rich->add_option("--out", rich_out, "report JSON output");

    // --- assign ---
    auto* assign = app.add_subcommand("assign", "draw a uniform random correspondence assignment");
    std::string assign_in, assign_out;
    int assign_ell = 1;
    std::uint64_t assign_seed = 0;
    assign->add_option("--in", assign_in, "graph JSON")->required();
    assign->add_option("--ell", assign_ell, "list size")->required();
    assign->add_option("--seed", assign_seed, "seed");
    assign->add_option("--out", assign_out, "assignment JSON output")->required();

    // --- solve ---
    auto* solve = app.add_subcommand("solve", "decide or search for an (L,M)-coloring");
    std::string solve_graph, solve_assignment, solve_method = "backtrack", solve_out;
    std::int64_t solve_budget = 10000000, solve_cap = -1, solve_delta = -1;
    std::uint64_t solve_seed = 0;
    solve->add_option("--graph", solve_graph, "graph JSON")->required();
    solve->add_option("--assignment", solve_assignment, "assignment JSON")->required();
    solve->add_option("--method", solve_method, "backtrack | lll | greedy")
        ->check(CLI::IsMember({"backtrack", "lll", "greedy"}));
    solve->add_option("--budget", solve_budget, "node budget for backtrack");
    solve->add_option("--cap", solve_cap, "resample cap for lll (-1: 2 n delta^3)");
    solve->add_option("--delta", solve_delta, "delta for the lll events (default: max degree)");
    solve->add_option("--seed", solve_seed, "seed (lll)");
    solve->add_option("--out", solve_out, "result JSON output");

    // --- exp ---
    auto* exp = app.add_subcommand("exp", "seeded experiment pipelines");
    exp->require_subcommand(1);

    auto* ren = exp->add_subcommand("ren", "random-graph formula + solve pipeline");
    RenConfig ren_cfg;
    std::string ren_out;
    ren->add_option("--n", ren_cfg.n, "vertex count");
    ren->add_option("--nonedge-p", ren_cfg.nonedge_p, "NON-edge probability p; graph is G(n, 1-p)");
    ren->add_option("--seed", ren_cfg.seed, "seed");
    ren->add_option("--delta0", ren_cfg.delta0, "lower clamp for ell");
    ren->add_option("--checks", ren_cfg.subset_checks, "number of subset spot checks");
    ren->add_option("--budget", ren_cfg.budget, "exact-solver node budget");
    ren->add_option("--cap", ren_cfg.resample_cap, "lll resample cap");
    ren->add_option("--out", ren_out, "output prefix (.csv/.json)")->required();

    auto* lbcom = exp->add_subcommand("lbcom", "complete-graph colorability sweep");
    LbcomConfig lb_cfg;
    std::string lb_out;
    lbcom->add_option("--n", lb_cfg.n, "K_n");
    lbcom->add_option("--ell", lb_cfg.ells, "explicit list sizes (repeatable)");
    lbcom->add_option("--c", lb_cfg.cs, "c values; ell = max(1, ceil(c n / ln n))");
    lbcom->add_option("--trials", lb_cfg.trials, "trials per list size");
    lbcom->add_option("--seed", lb_cfg.seed, "seed");
    lbcom->add_option("--budget", lb_cfg.budget, "exact-solver node budget");
    lbcom->add_option("--out", lb_out, "output prefix (.csv/.json)")->required();

    auto* conc = exp->add_subcommand("conc", "independent-set count concentration trials");
    std::int64_t conc_s = 55, conc_t = 5;
    double conc_p = 0.5;
    int conc_trials = 200;
    std::uint64_t conc_seed = 0;
    std::string conc_out;
    conc->add_option("--s", conc_s, "graph size");
    conc->add_option("--t", conc_t, "independent-set size");
    conc->add_option("--nonedge-p", conc_p, "NON-edge probability p; graphs are G(s, 1-p)");
    conc->add_option("--trials", conc_trials, "trials");
    conc->add_option("--seed", conc_seed, "seed");
    conc->add_option("--out", conc_out, "output prefix (.csv/.json)")->required();

    auto* alpha = exp->add_subcommand("alpha", "independence-number tail trials");
    std::int64_t alpha_s = 20;
    double alpha_n = 10000, alpha_p = -1;
    int alpha_trials = 200;
    std::uint64_t alpha_seed = 0;
    bool alpha_force = false;
    std::string alpha_out;
    alpha->add_option("--s", alpha_s, "graph size");
    alpha->add_option("--n", alpha_n, "tail-scale parameter n");
    alpha->add_option("--edge-prob", alpha_p, "EDGE probability (default n^{-13/14})");
    alpha->add_option("--trials", alpha_trials, "trials");
    alpha->add_option("--seed", alpha_seed, "seed");
    alpha->add_flag("--allow-large-p", alpha_force, "skip the p <= n^{-13/14} check");
    alpha->add_option("--out", alpha_out, "output prefix (.csv/.json)")->required();

    // Let --threads (declared on the root) be given after any subcommand.
    for (auto* sub : {gen, count, rich, assign, solve, exp, ren, lbcom, conc, alpha}) sub->fallthrough();

    try {
        app.parse(argc, argv);

        if (*gen) {
            if ((gen_q < 0) == (gen_nonedge < 0))
                throw parameter_error("gen: give exactly one of --edge-prob / --nonedge-p");
            double q = gen_q >= 0 ? gen_q : 1.0 - gen_nonedge;
            Graph g = gen_bip ? random_bipartite_graph(gen_n, q, Seed{gen_seed}) : random_graph(gen_n, q, Seed{gen_seed});
            write_text_atomic(gen_out, graph_to_json(g).dump(2) + "\n");
            std::cout << "n " << g.num_vertices() << "\nedges " << g.edge_count() << "\nmax_degree " << g.max_degree()
                      << "\n";
        } else if (*count) {
            ISProfile p = count_profile(load_graph(count_in));
            std::cout << "total " << p.total << "\nalpha " << p.alpha << "\nmedian " << p.median << "\n";
            if (!count_out.empty()) write_text_atomic(count_out, profile_to_json(p).dump(2) + "\n");
        } else if (*rich) {
            Graph g = load_graph(rich_in);
            RichnessReport rep = check_is_rich_exact(
                g, rich_b, rich_delta >= 0 ? std::optional<std::int64_t>(rich_delta) : std::nullopt);
            std::cout << (rep.rich ? "rich" : "not rich") << "\nchecked_subsets " << rep.checked_subsets
                      << "\nviolations " << rep.violations.size() << "\n";
            emit(rich_out, richness_report_to_json(rep));
        } else if (*assign) {
            Graph g = load_graph(assign_in);
            CorrespondenceAssignment ca = random_assignment(g, assign_ell, Seed{assign_seed});
            write_text_atomic(assign_out, assignment_to_json(ca).dump(2) + "\n");
            std::cout << "n " << g.num_vertices() << "\nell " << assign_ell << "\n";
        } else if (*solve) {
            Graph g = load_graph(solve_graph);
            CorrespondenceAssignment ca = load_assignment(solve_assignment);
            if (!(g == ca.base)) throw parameter_error("solve: assignment base differs from the graph");
            SolveResult res;
            if (solve_method == "backtrack") {
                res = decide_colorable(g, ca, solve_budget);
            } else if (solve_method == "lll") {
                std::int64_t d = solve_delta >= 0 ? solve_delta : g.max_degree();
                res = lll_color(g, ca, d, Seed{solve_seed}, solve_cap);
            } else {
                std::vector<int> order(g.num_vertices());
                for (int v = 0; v < g.num_vertices(); ++v) order[v] = v;
                res.coloring = greedy_extend(g, ca, PartialColoring(g.num_vertices()), order,
                                             &res.stats.nodes_expanded);
                res.status = res.coloring->num_colored() == g.num_vertices() ? SolveStatus::colored
                                                                            : SolveStatus::budget_exceeded;
            }
            std::cout << to_string(res.status) << "\n";
            emit(solve_out, solve_result_to_json(res));
        } else if (*ren) {
            RenReport rep = run_ren(ren_cfg);
            write_text_atomic(ren_out + ".csv", ren_csv(rep));
            write_json_atomic(ren_out + ".json", ren_summary_json(rep));
            std::cout << "delta " << rep.delta << "\ns_delta " << rep.s_delta << "\nb " << rep.b << "\nell " << rep.ell
                      << "\nfinal " << to_string(rep.final_status) << "\nceiling " << to_string(rep.ceiling_status)
                      << "\n";
        } else if (*lbcom) {
            lb_cfg.threads = threads;
            LbcomReport rep = run_lbcom(lb_cfg);
            write_text_atomic(lb_out + ".csv", lbcom_csv(rep));
            write_json_atomic(lb_out + ".json", lbcom_summary_json(rep));
            for (const auto& c : rep.cells)
                std::cout << "ell " << c.ell << " success_fraction " << fmt_double(c.success_fraction)
                          << " inconclusive " << c.inconclusive << "\n";
        } else if (*conc) {
            ConcReport rep = run_concentration_experiment(conc_s, conc_t, conc_p, conc_trials, Seed{conc_seed},
                                                          threads);
            write_text_atomic(conc_out + ".csv", conc_csv(rep));
            nlohmann::json j = conc_report_to_json(rep);
            j["config"] = {{"experiment", "conc"}, {"s", conc_s},          {"t", conc_t},
                           {"nonedge_p", conc_p},  {"trials", conc_trials}, {"seed", conc_seed}};
            write_json_atomic(conc_out + ".json", j);
            std::cout << "empirical_mean " << fmt_double(rep.empirical_mean) << "\ntail_freq "
                      << fmt_double(rep.empirical_tail_freq) << "\n";
        } else if (*alpha) {
            if (alpha_p < 0) alpha_p = std::pow(alpha_n, -13.0 / 14.0);
            AlphaReport rep = run_alpha_experiment(alpha_s, alpha_n, alpha_p, alpha_trials, Seed{alpha_seed}, threads,
                                                   alpha_force);
            write_text_atomic(alpha_out + ".csv", alpha_csv(rep));
            nlohmann::json j = alpha_report_to_json(rep);
            j["config"] = {{"experiment", "alpha"}, {"s", alpha_s},          {"n", alpha_n}, {"edge_p", alpha_p},
                           {"trials", alpha_trials}, {"seed", alpha_seed}};
            write_json_atomic(alpha_out + ".json", j);
            std::cout << "threshold " << fmt_double(rep.threshold) << "\nempirical_freq "
                      << fmt_double(rep.empirical_freq) << "\n";
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
