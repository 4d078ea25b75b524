#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "minary/config.hpp"
#include "minary/model.hpp"
#include "minary/numerics.hpp"

namespace minary {

struct TooFewSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Seeded ensemble description. Replica r runs burn_in + measure_steps
// iterations from the zero state with seed derive_replica_seed(master_seed, r).
struct EnsembleSpec {
    SimConfig base;
    int replicas = 1;
    std::uint64_t burn_in = 0;
    std::uint64_t measure_steps = 1;
    std::uint64_t master_seed = 0;
    int workers = 0;              // 0 = hardware concurrency
    std::vector<int> track_dims;  // 0-based dims whose conditional consensus is sampled
};

struct EstimateReport {
    std::string quantity;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double z_score = 0.0;
    bool pass = false;
};

struct EnsembleOutput {
    std::vector<Matrix> terminal_deltas;                    // one per replica
    std::map<int, std::vector<double>> conditional_samples; // per tracked dim, replica order
    // Per-replica time averages of the state over the two halves of the
    // measurement window (burn-in drift diagnostic).
    std::vector<Matrix> half1_avg;
    std::vector<Matrix> half2_avg;
    std::vector<std::uint64_t> active_counts;  // per dim, measure window only
    std::uint64_t measured_steps_total = 0;
};

// Deterministic for a fixed master seed at any worker count: replicas own
// their streams and aggregation runs in replica order.
EnsembleOutput run_ensemble(const EnsembleSpec& spec, const Matrix& C);

struct DeltaMeanEstimate {
    std::vector<EstimateReport> cells;  // row-major (i,j) order
    bool insufficient_burn_in = false;  // advisory: systematic drift detected
    double max_drift = 0.0;
    double max_std_error = 0.0;
};

// Cross-replica mean of the terminal state per cell, z-scored against the
// target matrix (normally the closed-form stationary mean). Degenerate cells
// (zero spread, e.g. a perspective whose deviations vanish identically) pass
// via an absolute 1e-12 floor instead of the z-test.
DeltaMeanEstimate estimate_stationary_mean(const EnsembleSpec& spec,
                                           const EnsembleOutput& out,
                                           const Matrix& target,
                                           double z_threshold = 4.0);

struct ConditionalMomentsEstimate {
    EstimateReport mean;
    EstimateReport variance;
    std::uint64_t samples = 0;
};

// Sample mean/variance of the normalized consensus over steps where dim j was
// active, z-scored against closed-form targets. Variance standard error uses
// the fourth-moment formula. Throws TooFewSamples below min_samples.
ConditionalMomentsEstimate estimate_conditional_moments(
    const EnsembleOutput& out, int j, double target_mean, double target_var,
    double z_threshold = 4.0, std::uint64_t min_samples = 1000);

struct ReportSummary {
    bool pass = true;
    double max_abs_z = 0.0;
    std::size_t total = 0;
    std::size_t passed = 0;
    std::vector<std::string> failed_quantities;
    std::string warning;
};

ReportSummary summarize_reports(const std::vector<EstimateReport>& reports);

}  // namespace minary
