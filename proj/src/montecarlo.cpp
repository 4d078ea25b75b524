#include "minary/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "minary/rng.hpp"

namespace minary {

namespace {

struct ReplicaResult {
    Matrix terminal;
    std::map<int, std::vector<double>> samples;
    Matrix half1_sum;
    Matrix half2_sum;
    std::vector<std::uint64_t> active_counts;
};

ReplicaResult run_replica(const EnsembleSpec& spec, const Matrix& C, int replica) {
    SimConfig cfg = spec.base;
    cfg.seed = derive_replica_seed(spec.master_seed, static_cast<std::uint64_t>(replica));
    cfg.steps = spec.burn_in + spec.measure_steps;

    ReplicaResult res;
    res.half1_sum = Matrix::Zero(cfg.n, cfg.m);
    res.half2_sum = Matrix::Zero(cfg.n, cfg.m);
    res.active_counts.assign(static_cast<std::size_t>(cfg.m), 0);
    for (int j : spec.track_dims) res.samples[j] = {};

    const std::uint64_t half = spec.measure_steps / 2;
    const std::uint64_t rest = spec.measure_steps - half;
    res.terminal = run(cfg, C, Matrix::Zero(cfg.n, cfg.m), [&](const StepTrace& trace) {
        if (trace.t <= spec.burn_in) return;
        const std::uint64_t w = trace.t - spec.burn_in;  // 1-based within window
        if (w <= half)
            res.half1_sum += trace.delta_after;
        else
            res.half2_sum += trace.delta_after;
        for (int j : trace.active) {
            ++res.active_counts[static_cast<std::size_t>(j)];
            auto it = res.samples.find(j);
            if (it != res.samples.end()) it->second.push_back(trace.normalized);
        }
    });
    if (half > 0) res.half1_sum /= static_cast<double>(half);
    if (rest > 0) res.half2_sum /= static_cast<double>(rest);
    return res;
}

// Exact-arithmetic floor for degenerate quantities whose spread is pure
// floating-point noise.
constexpr double kDegenerateFloor = 1e-12;

double safe_z(double estimate, double target, double se) {
    // Agreement at exact-arithmetic precision: the z-test is inapplicable
    // (the spread is floating-point noise), not borderline.
    if (std::abs(estimate - target) <= kDegenerateFloor) return 0.0;
    if (se > 0.0) return (estimate - target) / se;
    return std::numeric_limits<double>::infinity();
}

bool z_or_floor_pass(double estimate, double target, double z, double z_threshold) {
    return std::abs(z) <= z_threshold ||
           std::abs(estimate - target) <= kDegenerateFloor;
}

}  // namespace

EnsembleOutput run_ensemble(const EnsembleSpec& spec, const Matrix& C) {
    validate(spec.base);
    const int replicas = spec.replicas;
    std::vector<ReplicaResult> results(static_cast<std::size_t>(replicas));

    int workers = spec.workers > 0
                      ? spec.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, replicas));

    if (workers == 1) {
        for (int r = 0; r < replicas; ++r)
            results[static_cast<std::size_t>(r)] = run_replica(spec, C, r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int tid = 0; tid < workers; ++tid) {
            pool.emplace_back([&, tid] {
                for (int r = tid; r < replicas; r += workers)
                    results[static_cast<std::size_t>(r)] = run_replica(spec, C, r);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Merge strictly in replica order so the output is identical at any
    // worker count.
    EnsembleOutput out;
    out.terminal_deltas.reserve(static_cast<std::size_t>(replicas));
    out.half1_avg.reserve(static_cast<std::size_t>(replicas));
    out.half2_avg.reserve(static_cast<std::size_t>(replicas));
    out.active_counts.assign(static_cast<std::size_t>(spec.base.m), 0);
    for (int j : spec.track_dims) out.conditional_samples[j] = {};

    for (int r = 0; r < replicas; ++r) {
        ReplicaResult& res = results[static_cast<std::size_t>(r)];
        out.terminal_deltas.push_back(std::move(res.terminal));
        out.half1_avg.push_back(std::move(res.half1_sum));
        out.half2_avg.push_back(std::move(res.half2_sum));
        for (std::size_t j = 0; j < res.active_counts.size(); ++j)
            out.active_counts[j] += res.active_counts[j];
        for (auto& [j, samples] : res.samples) {
            auto& sink = out.conditional_samples[j];
            sink.insert(sink.end(), samples.begin(), samples.end());
        }
    }

    out.measured_steps_total =
        spec.measure_steps * static_cast<std::uint64_t>(replicas);
    return out;
}

DeltaMeanEstimate estimate_stationary_mean(const EnsembleSpec& spec,
                                           const EnsembleOutput& out,
                                           const Matrix& target,
                                           double z_threshold) {
    const int n = spec.base.n;
    const int m = spec.base.m;
    const std::size_t replicas = out.terminal_deltas.size();

    DeltaMeanEstimate est;
    est.cells.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            CompensatedSum sum;
            for (const Matrix& d : out.terminal_deltas) sum.add(d(i, j));
            const double mean = sum.value() / static_cast<double>(replicas);

            double se = 0.0;
            if (replicas > 1) {
                CompensatedSum sq;
                for (const Matrix& d : out.terminal_deltas) {
                    const double dev = d(i, j) - mean;
                    sq.add(dev * dev);
                }
                const double var = sq.value() / static_cast<double>(replicas - 1);
                se = std::sqrt(var / static_cast<double>(replicas));
            }

            EstimateReport rep;
            rep.quantity = "delta[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
            rep.estimate = mean;
            rep.std_error = se;
            rep.target = target(i, j);
            rep.z_score = safe_z(mean, target(i, j), se);
            rep.pass = z_or_floor_pass(mean, target(i, j), rep.z_score, z_threshold);
            est.max_std_error = std::max(est.max_std_error, se);

            // Burn-in drift: cross-replica mean of (second-half avg minus
            // first-half avg). Flag only when the drift is statistically
            // resolved AND exceeds the estimate's own standard error.
            if (replicas > 1 && !out.half1_avg.empty()) {
                CompensatedSum dsum;
                for (std::size_t r = 0; r < replicas; ++r)
                    dsum.add(out.half2_avg[r](i, j) - out.half1_avg[r](i, j));
                const double drift = dsum.value() / static_cast<double>(replicas);
                CompensatedSum dsq;
                for (std::size_t r = 0; r < replicas; ++r) {
                    const double dev =
                        (out.half2_avg[r](i, j) - out.half1_avg[r](i, j)) - drift;
                    dsq.add(dev * dev);
                }
                const double drift_se = std::sqrt(
                    dsq.value() / static_cast<double>(replicas - 1) /
                    static_cast<double>(replicas));
                est.max_drift = std::max(est.max_drift, std::abs(drift));
                if (std::abs(drift) > kDegenerateFloor &&
                    std::abs(drift) > 4.0 * drift_se && std::abs(drift) > se)
                    est.insufficient_burn_in = true;
            }

            est.cells.push_back(std::move(rep));
        }
    }
    return est;
}

ConditionalMomentsEstimate estimate_conditional_moments(
    const EnsembleOutput& out, int j, double target_mean, double target_var,
    double z_threshold, std::uint64_t min_samples) {
    const auto it = out.conditional_samples.find(j);
    const std::uint64_t count = it == out.conditional_samples.end()
                                    ? 0
                                    : static_cast<std::uint64_t>(it->second.size());
    if (count < min_samples)
        throw TooFewSamples("dimension " + std::to_string(j + 1) + ": " +
                            std::to_string(count) + " conditioned samples, need " +
                            std::to_string(min_samples));
    const std::vector<double>& xs = it->second;
    const double N = static_cast<double>(count);

    CompensatedSum s1;
    for (double x : xs) s1.add(x);
    const double mean = s1.value() / N;

    CompensatedSum s2, s4;
    for (double x : xs) {
        const double d = x - mean;
        s2.add(d * d);
        s4.add(d * d * d * d);
    }
    const double var = s2.value() / (N - 1.0);  // unbiased
    const double m4 = s4.value() / N;
    const double se_mean = std::sqrt(var / N);
    // Var(s^2) ~ (m4 - s^4 (N-3)/(N-1)) / N
    const double var_of_var = std::max(0.0, (m4 - var * var * (N - 3.0) / (N - 1.0)) / N);
    const double se_var = std::sqrt(var_of_var);

    ConditionalMomentsEstimate est;
    est.samples = count;
    est.mean.quantity = "cond_mean[j=" + std::to_string(j + 1) + "]";
    est.mean.estimate = mean;
    est.mean.std_error = se_mean;
    est.mean.target = target_mean;
    est.mean.z_score = safe_z(mean, target_mean, se_mean);
    est.mean.pass = z_or_floor_pass(mean, target_mean, est.mean.z_score, z_threshold);

    est.variance.quantity = "cond_var[j=" + std::to_string(j + 1) + "]";
    est.variance.estimate = var;
    est.variance.std_error = se_var;
    est.variance.target = target_var;
    est.variance.z_score = safe_z(var, target_var, se_var);
    est.variance.pass =
        z_or_floor_pass(var, target_var, est.variance.z_score, z_threshold);
    return est;
}

ReportSummary summarize_reports(const std::vector<EstimateReport>& reports) {
    ReportSummary summary;
    summary.total = reports.size();
    if (reports.empty()) {
        summary.warning = "no reports to aggregate";
        return summary;
    }
    for (const EstimateReport& r : reports) {
        if (std::isfinite(r.z_score))
            summary.max_abs_z = std::max(summary.max_abs_z, std::abs(r.z_score));
        if (r.pass)
            ++summary.passed;
        else {
            summary.pass = false;
            summary.failed_quantities.push_back(r.quantity);
        }
    }
    return summary;
}

}  // namespace minary
