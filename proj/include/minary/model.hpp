#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "minary/config.hpp"
#include "minary/numerics.hpp"
#include "minary/rng.hpp"

namespace minary {

// Sorted k-element subset of {0,...,m-1} (0-based internally; user-facing
// output is 1-based).
using ActiveSet = std::vector<int>;

// Full record of one iteration. `signals` is aligned with `active`.
struct StepTrace {
    std::uint64_t t = 0;        // step index of the state produced
    ActiveSet active;
    std::vector<double> signals;
    Matrix raw;                 // n x k
    Matrix adjusted;            // n x k
    Vector averaged;            // n
    double consensus = 0.0;
    double normalized = 0.0;    // consensus / n
    Vector learning;            // n, sums to zero
    Matrix delta_after;         // n x m
};

ActiveSet sample_active_set(Rng& rng, int m, int k);

// One independent draw per active dimension, ascending dimension order.
std::vector<double> sample_signals(Rng& rng, const ActiveSet& active,
                                   const SignalDistribution& mu);

// raw(i,c) = signal[c] - C(i, active[c])
Matrix raw_responses(const Matrix& C, const ActiveSet& active,
                     const std::vector<double>& signals);

// adjusted(i,c) = raw(i,c) + delta_prev(i, active[c])
Matrix adjusted_responses(const Matrix& raw, const Matrix& delta_prev,
                          const ActiveSet& active);

// averaged(i) = (1/k) * sum_c adjusted(i,c)
Vector average_adjusted(const Matrix& adjusted);

// Plain superposition of the averaged responses. Compensated so the result is
// permutation- and reassociation-invariant to well below 1e-12.
double consensus(const Vector& averaged);

// learning(i) = consensus/n - averaged(i); sums to zero.
Vector learning_signals(double consensus_value, const Vector& averaged);

// EMA update on active columns; inactive columns are copied bit-identically.
Matrix update_delta(const Matrix& delta_prev, const Vector& learning,
                    const ActiveSet& active, double alpha);

// One full iteration with a forced schedule (bypasses the rng entirely).
void step_forced(StepTrace& out, const Matrix& delta_prev, const Matrix& C,
                 const SimConfig& cfg, const ActiveSet& active,
                 const std::vector<double>& signals);

// One full iteration: draw the active set, draw the signals, run the pipeline.
void step(StepTrace& out, const Matrix& delta_prev, const Matrix& C,
          const SimConfig& cfg, Rng& rng);

StepTrace step(const Matrix& delta_prev, const Matrix& C, const SimConfig& cfg,
               Rng& rng);

// Runs cfg.steps iterations from delta0, streaming each trace to `sink` (the
// trace object is reused, so memory stays O(nm) when history is discarded).
// Returns the final state.
Matrix run(const SimConfig& cfg, const Matrix& C, const Matrix& delta0,
           const std::function<void(const StepTrace&)>& sink = {});

}  // namespace minary
