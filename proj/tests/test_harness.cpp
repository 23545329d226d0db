#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpcolor/harness.hpp"

using namespace dpcolor;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("write_text_atomic round trip and parent creation") {
    fs::path dir = fresh_dir("dpcolor_harness_io");
    fs::path target = dir / "sub" / "out.txt";
    write_text_atomic(target.string(), "hello\nworld\n");
    REQUIRE(slurp(target) == "hello\nworld\n");
    REQUIRE_FALSE(fs::exists(target.string() + ".tmp"));
    write_text_atomic(target.string(), "second");
    REQUIRE(slurp(target) == "second");

    nlohmann::json j = {{"a", 1}, {"b", "x"}};
    fs::path jt = dir / "out.json";
    write_json_atomic(jt.string(), j);
    REQUIRE(nlohmann::json::parse(slurp(jt)) == j);
    REQUIRE(slurp(jt).back() == '\n');
}

TEST_CASE("fmt_double round-trips") {
    for (double x : {0.1, 1.0 / 3, 3.141592653589793, 1e-240, 123456789.123456789, -0.0}) {
        REQUIRE(std::stod(fmt_double(x)) == x);
    }
    REQUIRE(fmt_double(0.5) == "0.5");
}

TEST_CASE("csv_line joins cells") {
    REQUIRE(csv_line({"a", "b", "c"}) == "a,b,c\n");
    REQUIRE(csv_line({}) == "\n");
    REQUIRE(csv_line({"only"}) == "only\n");
}

TEST_CASE("lbcom sweep endpoints on K6") {
    LbcomConfig cfg;
    cfg.n = 6;
    cfg.ells = {1, 6};
    cfg.trials = 10;
    cfg.seed = 2024;
    LbcomReport rep = run_lbcom(cfg);
    REQUIRE(rep.cells.size() == 2);
    REQUIRE(rep.cells[0].ell == 1);
    REQUIRE(rep.cells[0].success_fraction == 0.0);
    REQUIRE(rep.cells[0].inconclusive == 0);
    // ell = n colors always suffice on K_n, whatever the matchings do
    REQUIRE(rep.cells[1].success_fraction == 1.0);
    REQUIRE(rep.trial_rows.size() == 20);
    for (const auto& row : rep.trial_rows) REQUIRE(row.plausible_alpha >= 1);
}

TEST_CASE("lbcom cells depend only on master seed and ell") {
    LbcomConfig wide;
    wide.n = 5;
    wide.ells = {2, 5};
    wide.trials = 8;
    wide.seed = 7;
    LbcomConfig narrow = wide;
    narrow.ells = {5};
    LbcomReport w = run_lbcom(wide);
    LbcomReport n = run_lbcom(narrow);
    for (int t = 0; t < 8; ++t) {
        const LbcomTrial& a = w.trial_rows[8 + t];  // second cell of the wide sweep
        const LbcomTrial& b = n.trial_rows[t];
        REQUIRE(a.ell == 5);
        REQUIRE(a.seed == b.seed);
        REQUIRE(a.status == b.status);
        REQUIRE(a.plausible_alpha == b.plausible_alpha);
    }
}

TEST_CASE("lbcom is thread-count independent") {
    LbcomConfig cfg;
    cfg.n = 5;
    cfg.ells = {2, 3};
    cfg.trials = 9;
    cfg.seed = 77;
    LbcomConfig threaded = cfg;
    threaded.threads = 3;
    LbcomReport a = run_lbcom(cfg);
    LbcomReport b = run_lbcom(threaded);
    REQUIRE(lbcom_csv(a) == lbcom_csv(b));
    REQUIRE(lbcom_summary_json(a) == lbcom_summary_json(b));
}

TEST_CASE("lbcom c-mode derives ell from c n / ln n") {
    LbcomConfig cfg;
    cfg.n = 6;
    cfg.cs = {1.0};
    cfg.trials = 2;
    LbcomReport rep = run_lbcom(cfg);
    REQUIRE(rep.cells.size() == 1);
    REQUIRE(rep.cells[0].ell == 4);  // ceil(6 / ln 6)
    REQUIRE(rep.cells[0].c == 1.0);
    nlohmann::json j = lbcom_summary_json(rep);
    REQUIRE(j["cells"][0]["c"] == 1.0);
}

TEST_CASE("lbcom csv layout") {
    LbcomConfig cfg;
    cfg.n = 4;
    cfg.ells = {2};
    cfg.trials = 3;
    LbcomReport rep = run_lbcom(cfg);
    std::string csv = lbcom_csv(rep);
    REQUIRE(csv.rfind("ell,trial,seed,status,nodes,plausible_alpha\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);
    nlohmann::json j = lbcom_summary_json(rep);
    REQUIRE(j["config"]["n"] == 4);
    REQUIRE(j["config"]["trials"] == 3);
    REQUIRE(j["cells"].size() == 1);
}

TEST_CASE("lbcom parameter guards") {
    LbcomConfig cfg;
    cfg.n = 1;
    REQUIRE_THROWS_AS(run_lbcom(cfg), parameter_error);
    cfg.n = 25;
    REQUIRE_THROWS_AS(run_lbcom(cfg), parameter_error);
    cfg.n = 6;
    cfg.trials = 0;
    REQUIRE_THROWS_AS(run_lbcom(cfg), parameter_error);
    cfg.trials = 1;
    cfg.ells = {0};
    REQUIRE_THROWS_AS(run_lbcom(cfg), parameter_error);
}

TEST_CASE("ren pipeline matches direct computation") {
    RenConfig cfg;
    cfg.n = 14;
    cfg.nonedge_p = 0.5;
    cfg.seed = 1;
    cfg.subset_checks = 8;
    RenReport rep = run_ren(cfg);

    Graph g = random_graph(14, 0.5, derive(Seed{1}, 0x67656eULL));
    REQUIRE(rep.delta == g.max_degree());
    GrowthProfile prof = randomgraph_profile(0.5);
    BigInt delta_big(rep.delta);
    REQUIRE(rep.s_delta == s_delta(prof, delta_big));
    REQUIRE(rep.b == prof.b_formula(delta_big));
    REQUIRE(rep.ell == ell_for(rep.delta, std::max<std::int64_t>(rep.b, 1), 1));
    REQUIRE(rep.ell % 2 == 0);

    // with ell far above delta both solve attempts land
    REQUIRE(rep.final_status == SolveStatus::colored);
    REQUIRE(rep.ceiling_status == SolveStatus::colored);
    REQUIRE(rep.subset_checks.size() == 8);
    for (const auto& c : rep.subset_checks) {
        REQUIRE(c.size >= rep.s_delta);
        REQUIRE(c.size <= cfg.n);
        REQUIRE(c.exceeds);  // frozen for this seed; I(F) clears g_p comfortably at n = 14
    }

    RenReport again = run_ren(cfg);
    REQUIRE(ren_summary_json(rep) == ren_summary_json(again));
    REQUIRE(ren_csv(rep) == ren_csv(again));
    REQUIRE(ren_csv(rep).rfind("check,size,total,g_p,exceeds\n", 0) == 0);
}

TEST_CASE("ren parameter guards") {
    RenConfig cfg;
    cfg.n = 0;
    REQUIRE_THROWS_AS(run_ren(cfg), parameter_error);
    cfg.n = 65;
    REQUIRE_THROWS_AS(run_ren(cfg), parameter_error);
    cfg.n = 10;
    cfg.nonedge_p = 1.0;
    REQUIRE_THROWS_AS(run_ren(cfg), parameter_error);
    cfg.nonedge_p = 0.0;
    REQUIRE_THROWS_AS(run_ren(cfg), parameter_error);
}

TEST_CASE("concentration and alpha csv views") {
    ConcReport c = run_concentration_experiment(8, 2, 0.5, 4, Seed{6});
    std::string ccsv = conc_csv(c);
    REQUIRE(ccsv.rfind("trial,seed,count\n", 0) == 0);
    REQUIRE(std::count(ccsv.begin(), ccsv.end(), '\n') == 5);

    AlphaReport a = run_alpha_experiment(8, 50, 0.01, 4, Seed{6});
    std::string acsv = alpha_csv(a);
    REQUIRE(acsv.rfind("trial,seed,alpha\n", 0) == 0);
    REQUIRE(std::count(acsv.begin(), acsv.end(), '\n') == 5);
}

TEST_CASE("graph save/load/save is byte-stable through files") {
    fs::path dir = fresh_dir("dpcolor_harness_roundtrip");
    Graph g = random_graph(12, 0.4, Seed{31});
    fs::path p1 = dir / "g1.json", p2 = dir / "g2.json";
    write_json_atomic(p1.string(), graph_to_json(g));
    Graph h = graph_from_json(nlohmann::json::parse(slurp(p1)));
    write_json_atomic(p2.string(), graph_to_json(h));
    REQUIRE(slurp(p1) == slurp(p2));
}
