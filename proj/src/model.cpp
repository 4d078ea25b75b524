#include "minary/model.hpp"

#include <cassert>

namespace minary {

ActiveSet sample_active_set(Rng& rng, int m, int k) {
    return sample_k_subset(rng, m, k);
}

std::vector<double> sample_signals(Rng& rng, const ActiveSet& active,
                                   const SignalDistribution& mu) {
    std::vector<double> signals;
    signals.reserve(active.size());
    for (std::size_t c = 0; c < active.size(); ++c) signals.push_back(mu.sample(rng));
    return signals;
}

Matrix raw_responses(const Matrix& C, const ActiveSet& active,
                     const std::vector<double>& signals) {
    assert(active.size() == signals.size());
    const Eigen::Index n = C.rows();
    const Eigen::Index k = static_cast<Eigen::Index>(active.size());
    Matrix raw(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const int j = active[static_cast<std::size_t>(c)];
        for (Eigen::Index i = 0; i < n; ++i)
            raw(i, c) = signals[static_cast<std::size_t>(c)] - C(i, j);
    }
    return raw;
}

Matrix adjusted_responses(const Matrix& raw, const Matrix& delta_prev,
                          const ActiveSet& active) {
    assert(raw.cols() == static_cast<Eigen::Index>(active.size()));
    Matrix adjusted(raw.rows(), raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        const int j = active[static_cast<std::size_t>(c)];
        for (Eigen::Index i = 0; i < raw.rows(); ++i)
            adjusted(i, c) = raw(i, c) + delta_prev(i, j);
    }
    return adjusted;
}

Vector average_adjusted(const Matrix& adjusted) {
    const double k = static_cast<double>(adjusted.cols());
    Vector averaged(adjusted.rows());
    for (Eigen::Index i = 0; i < adjusted.rows(); ++i) {
        CompensatedSum acc;
        for (Eigen::Index c = 0; c < adjusted.cols(); ++c) acc.add(adjusted(i, c));
        averaged[i] = acc.value() / k;
    }
    return averaged;
}

double consensus(const Vector& averaged) {
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < averaged.size(); ++i) acc.add(averaged[i]);
    return acc.value();
}

Vector learning_signals(double consensus_value, const Vector& averaged) {
    const double gbar = consensus_value / static_cast<double>(averaged.size());
    Vector learning(averaged.size());
    for (Eigen::Index i = 0; i < averaged.size(); ++i)
        learning[i] = gbar - averaged[i];
    return learning;
}

Matrix update_delta(const Matrix& delta_prev, const Vector& learning,
                    const ActiveSet& active, double alpha) {
    Matrix next = delta_prev;
    for (int j : active)
        for (Eigen::Index i = 0; i < next.rows(); ++i)
            next(i, j) = alpha * learning[i] + (1.0 - alpha) * delta_prev(i, j);
    return next;
}

void step_forced(StepTrace& out, const Matrix& delta_prev, const Matrix& C,
                 const SimConfig& cfg, const ActiveSet& active,
                 const std::vector<double>& signals) {
    out.active = active;
    out.signals = signals;
    out.raw = raw_responses(C, active, signals);
    out.adjusted = adjusted_responses(out.raw, delta_prev, active);
    out.averaged = average_adjusted(out.adjusted);
    out.consensus = consensus(out.averaged);
    out.normalized = out.consensus / static_cast<double>(cfg.n);
    out.learning = learning_signals(out.consensus, out.averaged);
    out.delta_after = update_delta(delta_prev, out.learning, active, cfg.alpha);
}

void step(StepTrace& out, const Matrix& delta_prev, const Matrix& C,
          const SimConfig& cfg, Rng& rng) {
    const ActiveSet active = sample_active_set(rng, cfg.m, cfg.k);
    const std::vector<double> signals = sample_signals(rng, active, cfg.mu);
    step_forced(out, delta_prev, C, cfg, active, signals);
}

StepTrace step(const Matrix& delta_prev, const Matrix& C, const SimConfig& cfg,
               Rng& rng) {
    StepTrace out;
    step(out, delta_prev, C, cfg, rng);
    return out;
}

Matrix run(const SimConfig& cfg, const Matrix& C, const Matrix& delta0,
           const std::function<void(const StepTrace&)>& sink) {
    Rng rng(cfg.seed);
    Matrix delta = delta0;
    StepTrace trace;
    for (std::uint64_t t = 1; t <= cfg.steps; ++t) {
        step(trace, delta, C, cfg, rng);
        trace.t = t;
        delta.swap(trace.delta_after);
        if (sink) {
            trace.delta_after = delta;  // keep the trace self-consistent
            sink(trace);
        }
    }
    return delta;
}

}  // namespace minary
