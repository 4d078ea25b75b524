// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 11 drives the installed CLI binary (path in argv[1]);
// argv[2] optionally overrides the scratch directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "minary/affine.hpp"
#include "minary/closed_forms.hpp"
#include "minary/io.hpp"
#include "minary/model.hpp"
#include "minary/montecarlo.hpp"
#include "minary/rng.hpp"
#include "minary/scenarios.hpp"
#include "minary/verify.hpp"

namespace fs = std::filesystem;
using namespace minary;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", num,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 14695981039346656037ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// -------------------------------------------------------------------------

void criterion_1_main_golden() {
    const auto start = Clock::now();
    const ScenarioVerdict verdict = run_scenario("main");
    const double elapsed = seconds_since(start);

    std::size_t mismatches = 0;
    for (const auto& c : verdict.golden)
        if (!c.pass) ++mismatches;
    const bool pass = verdict.pass && elapsed < 1.0;
    report(1, "main worked example golden reproduction", pass,
           std::to_string(verdict.golden.size() - mismatches) + "/" +
               std::to_string(verdict.golden.size()) + " values at print tolerance, " +
               fmt(elapsed) + " s");
}

void criterion_2_generalist_halo_golden() {
    const auto start = Clock::now();
    const ScenarioVerdict gen = run_scenario("generalist");
    const ScenarioVerdict halo = run_scenario("halo");
    const double elapsed = seconds_since(start);

    std::size_t printed = 0, exact = 0, bad = 0;
    for (const auto* verdict : {&gen, &halo})
        for (const auto& c : verdict->golden) {
            if (!c.pass) ++bad;
            (c.source == ValueSource::Exact ? exact : printed) += 1;
        }
    const bool pass = gen.pass && halo.pass && elapsed < 1.0;
    report(2, "generalist + halo golden reproduction", pass,
           std::to_string(printed) + " printed-value and " + std::to_string(exact) +
               " exact-rational checks, " + std::to_string(bad) + " mismatches, " +
               fmt(elapsed) + " s");
}

void criterion_3_conservation() {
    const auto start = Clock::now();
    const SuiteResult res = conservation_suite(0xC0115E47, 100, 100000);
    const double elapsed = seconds_since(start);
    const bool pass = res.passed() && elapsed < 30.0;
    std::string detail;
    for (const auto& c : res.checks)
        if (c.name.find("learning") != std::string::npos)
            detail = "max |sum d| = " + fmt(c.observed);
        else if (c.name.find("column mean") != std::string::npos)
            detail += ", max |col mean| = " + fmt(c.observed);
    report(3, "conservation over 1e5 random steps / 100 configs", pass,
           detail + ", " + fmt(elapsed) + " s");
}

void criterion_4_cancellation() {
    const SuiteResult res = cancellation_suite(0x5160A1, 10000);
    double worst = 0.0;
    for (const auto& c : res.checks) worst = std::max(worst, c.observed);
    report(4, "signal cancellation on 1e4 paired steps", res.passed(),
           "max deviation = " + fmt(worst) + " (bound 1e-12)");
}

void criterion_5_affine_equivalence() {
    const SuiteResult res = affine_equivalence_suite(0xAFF1E1, 10000);
    report(5, "affine-map equivalence on 1e4 random tuples", res.passed(),
           "max Frobenius gap = " + fmt(res.checks.front().observed) +
               " (bound 1e-12)");
}

void criterion_6_operator_bounds() {
    const SuiteResult res = lipschitz_suite(0x11905, 1000, 100);
    std::string detail;
    for (const auto& c : res.checks) {
        if (c.name.find("single") != std::string::npos)
            detail = "max single-piece norm = " + fmt(c.observed);
        if (c.name.find("compositions") != std::string::npos)
            detail += ", max covering-composition norm = " + fmt(c.observed);
        if (c.name.find("SVD") != std::string::npos)
            detail += ", max svd gap = " + fmt(c.observed);
    }
    report(6, "operator bounds (1e3 pieces, 100 covering compositions)",
           res.passed(), detail);
}

void criterion_7_identities() {
    const SuiteResult res = identities_suite(0x1DE47, 100);
    double worst = 0.0;
    bool pass = true;
    for (const auto& c : res.checks) {
        if (c.name.find("linear-solve") != std::string::npos) continue;  // criterion 8
        worst = std::max(worst, c.observed);
        pass = pass && c.pass;
    }
    report(7, "algebraic identities on 100 random configs", pass,
           "max residual = " + fmt(worst) + " (bound 1e-12)");
}

void criterion_8_closed_form_vs_solve() {
    Rng rng(0x501BE1);
    double worst = 0.0;
    std::string worst_cell = "none";
    for (int trial = 0; trial < 100; ++trial) {
        const RandomSystem sys = random_system(rng, 8, 8, false);
        const Matrix U = stationary_mean_formula(sys.C, sys.cfg.m, sys.cfg.k);
        const Matrix solved = stationary_mean_by_solve(sys.C, sys.cfg);
        for (int i = 0; i < sys.cfg.n; ++i)
            for (int j = 0; j < sys.cfg.m; ++j) {
                const double gap = std::abs(U(i, j) - solved(i, j));
                if (gap > worst) {
                    worst = gap;
                    worst_cell = "config " + std::to_string(trial) + " cell (" +
                                 std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
                }
            }
    }
    report(8, "stationary-mean closed form vs linear-solve oracle (100 configs)",
           worst <= 1e-10, "max cellwise gap = " + fmt(worst) + " at " + worst_cell);
}

void criterion_9_limit_monte_carlo() {
    const auto start = Clock::now();
    const Scenario gen = scenario("generalist");
    const SuiteResult res =
        limit_suite(gen.config, gen.competency, 400, 2000, 1000, 0x11117);
    const double elapsed = seconds_since(start);
    std::string detail;
    for (const auto& c : res.checks)
        if (c.name.find("fraction") != std::string::npos)
            detail = c.note + " (need >= 95%)";
    const bool pass = res.passed() && elapsed < 120.0;
    report(9, "Monte Carlo stationary mean, 400 replicas x 3000 steps", pass,
           detail + ", " + fmt(elapsed) + " s");
}

void criterion_10_consensus_moments() {
    const SuiteResult res = consensus_moments_suite(0xC0135);
    std::string enumeration = "?", mc = "?", paper = "?";
    for (const auto& c : res.checks) {
        if (c.name.find("mean vs enumeration") != std::string::npos)
            enumeration = fmt(c.observed);
        if (c.name.find("Monte Carlo conditional mean |z| (derived") != std::string::npos)
            mc = fmt(c.observed);
        if (c.name.find("paper-sign") != std::string::npos)
            paper = fmt(c.observed) + (c.pass ? " (pass)" : " (rejected)");
    }

    // The published long-run matrices have no seeds or schedules; they are
    // covered by report-only structure summaries.
    const ScenarioVerdict g = run_scenario("generalist");
    const ScenarioVerdict h = run_scenario("halo");
    const bool structure_reported =
        !g.structure_note.empty() && !h.structure_note.empty();

    report(10, "conditional consensus moments (enumeration + Monte Carlo)",
           res.passed() && structure_reported,
           "enumeration gap " + enumeration + ", derived-sign |z| " + mc +
               ", paper-sign |z| " + paper + ", long-run structure report-only");
}

void criterion_11_determinism(const std::string& cli, const fs::path& scratch) {
    if (cli.empty()) {
        report(11, "determinism (bit-identical outputs)", false,
               "CLI path not provided to the acceptance binary");
        return;
    }
    fs::create_directories(scratch);

    // a config to drive the CLI with
    const Scenario gen = scenario("generalist");
    SystemConfig config;
    config.sim = gen.config;
    config.sim.steps = 500;
    config.competency = gen.competency;
    const fs::path cfg_path = scratch / "generalist.json";
    save_config(config, cfg_path);

    const auto run_cli = [&](const std::string& args) {
        const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    bool pass = true;
    std::string detail;

    for (int round = 1; round <= 2; ++round) {
        const fs::path out = scratch / ("sim" + std::to_string(round));
        if (run_cli("simulate --config " + cfg_path.string() + " --steps 500 --seed 42 --out " +
                    out.string()) != 0) {
            pass = false;
            detail = "simulate invocation failed";
        }
    }
    if (pass) {
        for (const char* file : {"series.csv", "delta_final.json", "config.json"}) {
            const auto h1 = fnv1a64_file(scratch / "sim1" / file);
            const auto h2 = fnv1a64_file(scratch / "sim2" / file);
            if (h1 != h2) {
                pass = false;
                detail = std::string(file) + " differs between identical runs";
            }
        }
    }

    if (pass) {
        for (int round = 1; round <= 2; ++round) {
            const fs::path out = scratch / ("verify" + std::to_string(round) + ".json");
            if (run_cli("verify --suite identities --trials 20 --seed 7 --out " +
                        out.string()) != 0) {
                pass = false;
                detail = "verify invocation failed";
            }
        }
        if (pass && fnv1a64_file(scratch / "verify1.json") !=
                        fnv1a64_file(scratch / "verify2.json")) {
            pass = false;
            detail = "verify.json differs between identical runs";
        }
    }

    if (pass) detail = "simulate and verify outputs hash-identical across reruns";
    report(11, "determinism (bit-identical outputs)", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::path("acceptance_scratch");

    criterion_1_main_golden();
    criterion_2_generalist_halo_golden();
    criterion_3_conservation();
    criterion_4_cancellation();
    criterion_5_affine_equivalence();
    criterion_6_operator_bounds();
    criterion_7_identities();
    criterion_8_closed_form_vs_solve();
    criterion_9_limit_monte_carlo();
    criterion_10_consensus_moments();
    criterion_11_determinism(cli, scratch);

    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
