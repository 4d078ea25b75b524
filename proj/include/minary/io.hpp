#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "minary/config.hpp"
#include "minary/numerics.hpp"
#include "minary/verify.hpp"

namespace minary {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generated competency rule: hi at one expert cell, lo everywhere else.
// Indices are 1-based, matching the human-facing dimension numbering.
struct HaloRule {
    int expert_row = 1;
    int expert_col = 1;
    double hi = 0.9;
    double lo = 0.5;
};

// A full simulation document: run parameters plus the competency matrix
// (either given explicitly or generated from a rule, which is preserved so
// configs round-trip).
struct SystemConfig {
    SimConfig sim;
    Matrix competency;
    std::optional<HaloRule> rule;
};

Matrix competency_from_rule(const HaloRule& rule, int n, int m);

// JSON document with keys {n, m, k, alpha, mu:{kind,...}, competency, seed,
// steps}; `competency` is a row-major 2D array or a rule object. Validation
// failures throw ConfigError naming the offending field; file-system and
// JSON-syntax failures throw IoError.
SystemConfig config_from_json_string(const std::string& text);
std::string config_to_json_string(const SystemConfig& config);

SystemConfig load_config(const std::filesystem::path& path);
void save_config(const SystemConfig& config, const std::filesystem::path& path);

// series.csv: header "step,gbar,active,d_1..d_n"; one row per step; numbers
// are shortest round-trip decimal; active sets are 1-based, '|'-separated.
// All output is locale-independent (std::to_chars).
class SeriesWriter {
public:
    SeriesWriter(const std::filesystem::path& path, int n);
    ~SeriesWriter();
    void row(std::uint64_t step, double gbar, const std::vector<int>& active,
             const Vector& learning);
    void close();

private:
    std::string buffer_;
    std::filesystem::path path_;
    void* file_ = nullptr;
};

// Memory-state snapshot with 17-significant-digit decimal entries, which
// round-trip to the exact binary64 values.
void write_delta_snapshot(const std::filesystem::path& path, const Matrix& delta,
                          std::uint64_t t, std::uint64_t seed,
                          const std::string& version);
Matrix read_delta_snapshot(const std::filesystem::path& path);

void write_verify_json(const std::filesystem::path& path,
                       const std::vector<SuiteResult>& suites);

struct RunArtifact {
    std::filesystem::path series_csv;
    std::filesystem::path delta_json;
    std::filesystem::path config_echo;
    std::uint64_t rows = 0;
    double final_gbar = 0.0;
    double elapsed_seconds = 0.0;
};

// Runs the configured simulation and writes series.csv, delta_final.json and
// config.json (the effective config echo) into out_dir.
RunArtifact simulate_to_files(const SystemConfig& config,
                              const std::filesystem::path& out_dir);

// Locale-independent shortest-round-trip and fixed-precision formatting.
std::string format_double(double value);
std::string format_double_17(double value);

}  // namespace minary
