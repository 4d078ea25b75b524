#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "minary/io.hpp"
#include "minary/rng.hpp"

using namespace minary;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "minary_io_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

SystemConfig sample_config() {
    SystemConfig config;
    config.sim.n = 3;
    config.sim.m = 6;
    config.sim.k = 3;
    config.sim.alpha = 0.02;
    config.sim.mu = SignalDistribution::uniform01();
    config.sim.seed = 42;
    config.sim.steps = 25;
    config.competency = Matrix(3, 6);
    config.competency << 0.95, 0.90, 0.85, 0.15, 0.10, 0.05,  //
        0.50, 0.50, 0.50, 0.50, 0.50, 0.50,                   //
        0.05, 0.10, 0.15, 0.85, 0.90, 0.95;
    return config;
}

}  // namespace

TEST_CASE("config round-trips through JSON for every distribution kind") {
    SystemConfig base = sample_config();
    for (int variant = 0; variant < 3; ++variant) {
        SystemConfig config = base;
        if (variant == 1) config.sim.mu = SignalDistribution::point(0.3);
        if (variant == 2) config.sim.mu = SignalDistribution::beta(2.0, 5.0);

        const std::string text = config_to_json_string(config);
        const SystemConfig parsed = config_from_json_string(text);
        CHECK(parsed.sim.n == config.sim.n);
        CHECK(parsed.sim.m == config.sim.m);
        CHECK(parsed.sim.k == config.sim.k);
        CHECK(parsed.sim.alpha == config.sim.alpha);
        CHECK(parsed.sim.seed == config.sim.seed);
        CHECK(parsed.sim.steps == config.sim.steps);
        CHECK(parsed.sim.mu.kind == config.sim.mu.kind);
        CHECK(parsed.sim.mu.mean == config.sim.mu.mean);
        CHECK(parsed.competency == config.competency);
        CHECK(config_to_json_string(parsed) == text);
    }
}

TEST_CASE("rule-based competency round-trips and expands correctly") {
    SystemConfig config;
    config.sim.n = 5;
    config.sim.m = 19;
    config.sim.k = 3;
    config.sim.alpha = 0.02;
    config.sim.seed = 9;
    config.sim.steps = 10;
    config.rule = HaloRule{1, 14, 0.9, 0.5};
    config.competency = competency_from_rule(*config.rule, 5, 19);

    CHECK(config.competency(0, 13) == 0.9);
    CHECK(config.competency(0, 12) == 0.5);
    CHECK(config.competency(4, 13) == 0.5);

    const std::string text = config_to_json_string(config);
    CHECK(text.find("\"rule\"") != std::string::npos);
    const SystemConfig parsed = config_from_json_string(text);
    REQUIRE(parsed.rule.has_value());
    CHECK(parsed.rule->expert_col == 14);
    CHECK(parsed.competency == config.competency);
}

TEST_CASE("malformed configs name the offending field") {
    CHECK_THROWS_WITH_AS(config_from_json_string("{\"n\": 3}"),
                         doctest::Contains("'m'"), ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json_string("not json at all"),
                         doctest::Contains("JSON"), ConfigError);

    SystemConfig config = sample_config();
    config.sim.k = 9;  // > m
    const std::string text = config_to_json_string(config);
    try {
        config_from_json_string(text);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.code() == ConfigErrorCode::KOutOfRange);
    }

    config = sample_config();
    config.competency(1, 2) = 1.5;
    try {
        config_from_json_string(config_to_json_string(config));
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.code() == ConfigErrorCode::BadCompetency);
    }
}

TEST_CASE("missing files raise io errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), IoError);
    CHECK_THROWS_AS(read_delta_snapshot("/nonexistent/nowhere.json"), IoError);
}

TEST_CASE("snapshots round-trip bit-exactly") {
    Rng rng(77);
    Matrix delta(4, 7);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 7; ++j) delta(i, j) = 2.0 * rng.u01() - 1.0;
    delta(0, 0) = 0.1 + 0.2;  // classic non-representable value
    delta(1, 1) = 1e-300;
    delta(2, 2) = 0.0;

    const fs::path path = scratch_dir() / "snap.json";
    write_delta_snapshot(path, delta, 123, 42, "0.1.0");
    const Matrix back = read_delta_snapshot(path);
    CHECK(back == delta);
}

TEST_CASE("series csv: header, row shape, locale-independent numbers") {
    const fs::path dir = scratch_dir() / "run";
    SystemConfig config = sample_config();
    config.sim.steps = 10;
    const RunArtifact artifact = simulate_to_files(config, dir);
    CHECK(artifact.rows == 10);

    const std::string text = slurp(artifact.series_csv);
    CHECK(text.find("\r") == std::string::npos);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "step,gbar,active,d_1,d_2,d_3");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto commas = std::count(line.begin(), line.end(), ',');
        CHECK(commas == 5);  // step, gbar, active, d_1..d_3
        CHECK(line.find('|') != std::string::npos);
    }
    CHECK(rows == 10);
}

TEST_CASE("steps = 0 gives a header-only series and the initial snapshot") {
    const fs::path dir = scratch_dir() / "zero";
    SystemConfig config = sample_config();
    config.sim.steps = 0;
    const RunArtifact artifact = simulate_to_files(config, dir);
    CHECK(artifact.rows == 0);

    const std::string text = slurp(artifact.series_csv);
    CHECK(text == "step,gbar,active,d_1,d_2,d_3\n");

    const Matrix snap = read_delta_snapshot(artifact.delta_json);
    CHECK(snap == Matrix::Zero(3, 6));
}

TEST_CASE("repeated runs produce byte-identical artifacts") {
    SystemConfig config = sample_config();
    config.sim.steps = 50;
    const fs::path dir1 = scratch_dir() / "rep1";
    const fs::path dir2 = scratch_dir() / "rep2";
    const RunArtifact a = simulate_to_files(config, dir1);
    const RunArtifact b = simulate_to_files(config, dir2);
    CHECK(slurp(a.series_csv) == slurp(b.series_csv));
    CHECK(slurp(a.delta_json) == slurp(b.delta_json));
    CHECK(slurp(a.config_echo) == slurp(b.config_echo));
}

TEST_CASE("the config echo reproduces the run") {
    SystemConfig config = sample_config();
    config.sim.steps = 30;
    const fs::path dir1 = scratch_dir() / "echo1";
    const fs::path dir2 = scratch_dir() / "echo2";
    const RunArtifact a = simulate_to_files(config, dir1);
    const SystemConfig echoed = load_config(a.config_echo);
    const RunArtifact b = simulate_to_files(echoed, dir2);
    CHECK(slurp(a.series_csv) == slurp(b.series_csv));
    CHECK(slurp(a.delta_json) == slurp(b.delta_json));
}

TEST_CASE("verify reports serialize with pass flags") {
    SuiteResult suite;
    suite.suite = "demo";
    VerifyCheck ok;
    ok.name = "fine";
    ok.pass = true;
    ok.observed = 1e-15;
    ok.bound = 1e-12;
    VerifyCheck info;
    info.name = "fyi";
    info.pass = false;
    info.informational = true;
    suite.checks = {ok, info};
    CHECK(suite.passed());  // informational failures do not gate

    const fs::path path = scratch_dir() / "verify.json";
    write_verify_json(path, {suite});
    const std::string text = slurp(path);
    CHECK(text.find("\"pass\": true") != std::string::npos);
    CHECK(text.find("\"informational\": true") != std::string::npos);
}
