// Command-line surface for the consensus-dynamics simulator:
//   simulate   seeded run -> series.csv + delta_final.json + config echo
//   verify     numerical verification suites -> verify.json, exit 3 on failure
//   reproduce  built-in worked examples, golden-checked step tables
//   theory     closed-form quantities for a configured system

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "minary/affine.hpp"
#include "minary/closed_forms.hpp"
#include "minary/io.hpp"
#include "minary/model.hpp"
#include "minary/montecarlo.hpp"
#include "minary/scenarios.hpp"
#include "minary/verify.hpp"

namespace fs = std::filesystem;
using namespace minary;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;

SystemConfig load_or_random(const std::string& config_arg, std::uint64_t seed) {
    if (config_arg == "random") {
        Rng rng(seed);
        RandomSystem sys = random_system(rng);
        SystemConfig config;
        config.sim = sys.cfg;
        config.sim.seed = seed;
        config.competency = sys.C;
        return config;
    }
    return load_config(config_arg);
}

void print_matrix(const Matrix& M, const std::string& indent = "  ") {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        std::string line = indent;
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "% .6f", M(i, j));
            line += buf;
            if (j + 1 < M.cols()) line += "  ";
        }
        std::cout << line << "\n";
    }
}

int cmd_simulate(const std::string& config_path, std::int64_t steps_override,
                 std::int64_t seed_override, const std::string& out_dir,
                 bool relax_alpha) {
    SystemConfig config = load_config(config_path);
    if (steps_override >= 0) config.sim.steps = static_cast<std::uint64_t>(steps_override);
    if (seed_override >= 0) config.sim.seed = static_cast<std::uint64_t>(seed_override);
    if (relax_alpha) config.sim.relax_alpha = true;
    validate(config.sim);
    validate_competency(config.competency, config.sim);

    const RunArtifact artifact = simulate_to_files(config, out_dir);
    std::cout << "wrote " << artifact.series_csv.string() << " (" << artifact.rows
              << " rows), " << artifact.delta_json.string() << "\n";
    std::cout << "seed " << config.sim.seed << ", steps " << config.sim.steps
              << ", final normalized consensus " << format_double(artifact.final_gbar)
              << ", " << artifact.elapsed_seconds << " s\n";
    if (config.sim.relax_alpha)
        std::cout << "note: alpha bound relaxed to (0,1)\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& config_arg,
               int trials, int replicas, std::uint64_t seed,
               const std::string& out_path, bool relax_alpha) {
    std::vector<SuiteResult> results;

    const bool all = suite == "all";
    if (all || suite == "conservation")
        results.push_back(conservation_suite(seed, trials, 1000ull * trials));
    if (all || suite == "affine") {
        results.push_back(cancellation_suite(seed, 100 * trials));
        results.push_back(affine_equivalence_suite(seed, 100 * trials));
    }
    if (all || suite == "lipschitz")
        results.push_back(lipschitz_suite(seed, 10 * trials, trials));
    if (all || suite == "identities")
        results.push_back(identities_suite(seed, trials));
    if (all || suite == "limit") {
        SystemConfig config = load_or_random(config_arg, seed);
        if (relax_alpha) config.sim.relax_alpha = true;
        validate(config.sim);
        validate_competency(config.competency, config.sim);
        results.push_back(limit_suite(config.sim, config.competency, replicas,
                                      2000, 1000, seed));
    }
    if (all || suite == "consensus-moments")
        results.push_back(consensus_moments_suite(seed));

    if (results.empty()) {
        std::cerr << "unknown suite '" << suite
                  << "' (expected conservation, affine, lipschitz, limit, "
                     "consensus-moments, identities, or all)\n";
        return kExitConfig;
    }

    bool pass = true;
    for (const SuiteResult& res : results) {
        std::cout << "suite " << res.suite << ": "
                  << (res.passed() ? "pass" : "FAIL") << "\n";
        for (const VerifyCheck& check : res.checks) {
            std::cout << "  [" << (check.pass ? "ok" : "FAIL") << "] " << check.name
                      << ": observed " << format_double(check.observed) << " vs bound "
                      << format_double(check.bound);
            if (check.informational) std::cout << " (informational)";
            if (!check.note.empty()) std::cout << " -- " << check.note;
            std::cout << "\n";
        }
        if (!res.passed()) pass = false;
    }

    write_verify_json(out_path, results);
    std::cout << "wrote " << out_path << "\n";
    return pass ? kExitOk : kExitVerification;
}

int cmd_reproduce(const std::string& name, const std::string& out_dir) {
    const ScenarioVerdict verdict = run_scenario(name);
    const Scenario fixture = scenario(name);

    std::cout << "scenario " << verdict.name << " (n=" << fixture.config.n
              << ", m=" << fixture.config.m << ", k=" << fixture.config.k
              << ", alpha=" << fixture.config.alpha << ")\n";
    std::cout << "forced active set:";
    for (int j : fixture.forced.front().active) std::cout << " " << j + 1;
    std::cout << "\nforced signals:";
    for (double x : fixture.forced.front().signals)
        std::cout << " " << format_double(x);
    std::cout << "\n\nraw responses (rows = perspectives, cols = active dims):\n";
    print_matrix(verdict.first_trace.raw);
    std::cout << "\naveraged responses:\n";
    print_matrix(verdict.first_trace.averaged.transpose());
    std::cout << "\nconsensus " << format_double(verdict.first_trace.consensus)
              << ", normalized " << format_double(verdict.first_trace.normalized)
              << "\n\nlearning signals:\n";
    print_matrix(verdict.first_trace.learning.transpose());
    std::cout << "\nmemory update on active columns (per perspective):\n";
    Vector delta_active(fixture.config.n);
    for (int i = 0; i < fixture.config.n; ++i)
        delta_active[i] =
            verdict.first_trace.delta_after(i, fixture.forced.front().active.front());
    print_matrix(delta_active.transpose());

    std::cout << "\ngolden checks:\n";
    for (const CheckOutcome& check : verdict.golden) {
        std::cout << "  [" << (check.pass ? "ok" : "MISMATCH") << "] " << check.name
                  << ": got " << format_double(check.got) << ", want "
                  << format_double(check.want) << " +/- " << format_double(check.tol)
                  << "\n";
    }
    std::cout << "free run: max |memory| = " << format_double(verdict.max_abs_delta)
              << (verdict.bounded ? " (bounded)" : " (UNBOUNDED)")
              << ", max |learning sum| = "
              << format_double(verdict.max_abs_learning_sum)
              << (verdict.conservation_ok ? " (conserved)" : " (VIOLATED)") << "\n";
    if (!verdict.structure_note.empty())
        std::cout << verdict.structure_note << "\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        SystemConfig config;
        config.sim = fixture.config;
        config.competency = fixture.competency;
        const fs::path path = fs::path(out_dir) / (name + ".json");
        save_config(config, path);
        std::cout << "wrote " << path.string() << "\n";
    }

    std::cout << (verdict.pass ? "PASS" : "FAIL") << "\n";
    return verdict.pass ? kExitOk : kExitVerification;
}

int cmd_theory(const std::string& config_path, const std::string& sign_variant,
               bool relax_alpha) {
    SystemConfig config = load_config(config_path);
    if (relax_alpha) config.sim.relax_alpha = true;
    validate(config.sim);
    validate_competency(config.competency, config.sim);

    const int m = config.sim.m;
    const int k = config.sim.k;
    std::cout << "mixing coefficient eta(" << m << "," << k
              << ") = " << format_double(mixing_coefficient(m, k)) << "\n\n";
    std::cout << "stationary mean of the memory state:\n";
    print_matrix(stationary_mean_formula(config.competency, m, k));

    const SignVariant variant = sign_variant == "paper" ? SignVariant::PaperSign
                                                        : SignVariant::Derived;
    std::cout << "\nconditional consensus moments given an active dimension ("
              << (variant == SignVariant::Derived ? "derived" : "paper")
              << "-sign mean shown first, other variant in brackets):\n";
    for (int j = 0; j < m; ++j) {
        const double mean_main =
            conditional_consensus_mean(config.competency, config.sim.mu, k, j, variant);
        const double mean_other = conditional_consensus_mean(
            config.competency, config.sim.mu, k, j,
            variant == SignVariant::Derived ? SignVariant::PaperSign
                                            : SignVariant::Derived);
        const double var =
            conditional_consensus_variance(config.competency, config.sim.mu, k, j);
        std::cout << "  dim " << j + 1 << ": mean " << format_double(mean_main)
                  << " [" << format_double(mean_other) << "], variance "
                  << format_double(var) << "\n";
    }
    if (config.sim.relax_alpha)
        std::cout << "\nnote: alpha bound relaxed to (0,1)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic consensus-dynamics simulator and verification suite"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a configured simulation");
    std::string sim_config;
    std::int64_t sim_steps = -1, sim_seed = -1;
    std::string sim_out = "out";
    bool sim_relax = false;
    simulate->add_option("--config", sim_config, "config JSON path")->required();
    simulate->add_option("--steps", sim_steps, "override step count");
    simulate->add_option("--seed", sim_seed, "override seed");
    simulate->add_option("--out", sim_out, "output directory");
    simulate->add_flag("--allow-alpha-above-two-thirds", sim_relax,
                       "relax the alpha bound to (0,1)");

    // verify
    auto* verify = app.add_subcommand("verify", "run verification suites");
    std::string ver_suite, ver_config = "random", ver_out = "verify.json";
    std::string ver_sign = "derived";
    int ver_trials = 100, ver_replicas = 400;
    std::uint64_t ver_seed = 1;
    bool ver_relax = false;
    verify->add_option("--suite", ver_suite, "conservation | affine | lipschitz | limit | consensus-moments | identities | all")
        ->required();
    verify->add_option("--config", ver_config, "config path or 'random'");
    verify->add_option("--trials", ver_trials, "base trial count");
    verify->add_option("--replicas", ver_replicas, "ensemble replicas for the limit suite");
    verify->add_option("--seed", ver_seed, "suite seed");
    verify->add_option("--out", ver_out, "report path");
    verify->add_option("--sign-variant", ver_sign, "derived | paper");
    verify->add_flag("--allow-alpha-above-two-thirds", ver_relax,
                     "relax the alpha bound to (0,1)");

    // reproduce
    auto* reproduce = app.add_subcommand("reproduce", "golden-check a built-in scenario");
    std::string rep_name, rep_out;
    reproduce->add_option("scenario,--scenario", rep_name, "main | generalist | halo")
        ->required();
    reproduce->add_option("--out", rep_out, "also write the scenario config here");

    // theory
    auto* theory = app.add_subcommand("theory", "print closed-form quantities");
    std::string th_config, th_sign = "derived";
    bool th_relax = false;
    theory->add_option("--config", th_config, "config JSON path")->required();
    theory->add_option("--sign-variant", th_sign, "derived | paper");
    theory->add_flag("--allow-alpha-above-two-thirds", th_relax,
                     "relax the alpha bound to (0,1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(sim_config, sim_steps, sim_seed, sim_out, sim_relax);
        if (verify->parsed())
            return cmd_verify(ver_suite, ver_config, ver_trials, ver_replicas,
                              ver_seed, ver_out, ver_relax);
        if (reproduce->parsed()) return cmd_reproduce(rep_name, rep_out);
        if (theory->parsed()) return cmd_theory(th_config, th_sign, th_relax);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownScenario& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
