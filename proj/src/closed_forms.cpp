#include "minary/closed_forms.hpp"

namespace minary {

CompetencyAverages competency_averages(const Matrix& C) {
    CompetencyAverages avg;
    avg.col_means = col_means(C);
    avg.row_means = row_means(C);
    avg.global_mean = mean_of(avg.col_means);

    const Eigen::Index m = C.cols();
    avg.hat_c = Vector::Zero(m);
    if (m > 1) {
        CompensatedSum total;
        for (Eigen::Index j = 0; j < m; ++j) total.add(avg.col_means[j]);
        const double sum_cols = total.value();
        for (Eigen::Index j = 0; j < m; ++j)
            avg.hat_c[j] = (sum_cols - avg.col_means[j]) / static_cast<double>(m - 1);
    }
    return avg;
}

double mixing_coefficient(int m, int k) {
    if (k == m) return 0.0;
    return static_cast<double>(m - k) /
           (static_cast<double>(k) * (m - 1) + static_cast<double>(m - k));
}

Matrix stationary_mean_formula(const Matrix& C, int m, int k) {
    const CompetencyAverages avg = competency_averages(C);
    const double eta = mixing_coefficient(m, k);
    Matrix U(C.rows(), C.cols());
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
        const double row_dev = avg.row_means[i] - avg.global_mean;
        for (Eigen::Index j = 0; j < C.cols(); ++j)
            U(i, j) = (0.5 - eta) * row_dev + eta * (C(i, j) - avg.col_means[j]);
    }
    return U;
}

double conditional_consensus_mean(const Matrix& C, const SignalDistribution& mu,
                                  int k, int j, SignVariant variant) {
    const CompetencyAverages avg = competency_averages(C);
    const double cj = avg.col_means[j];
    const double hat = avg.hat_c[j];
    const double kk = static_cast<double>(k);
    if (variant == SignVariant::PaperSign)
        return mu.mean - (cj - (kk - 1.0) * hat) / kk;
    return mu.mean - (cj + (kk - 1.0) * hat) / kk;
}

double conditional_consensus_variance(const Matrix& C,
                                      const SignalDistribution& mu, int k,
                                      int j) {
    const int m = static_cast<int>(C.cols());
    const double sigma2 = mu.stddev * mu.stddev;
    const double base = sigma2 / static_cast<double>(k);
    if (k == 1 || k == m) return base;  // correction vanishes via (k-1) or (m-k)
    if (m < 3)
        throw DegenerateVariance("correction term undefined for 1 < k < m with m < 3");

    const CompetencyAverages avg = competency_averages(C);
    const double hat = avg.hat_c[j];
    CompensatedSum spread;
    for (Eigen::Index r = 0; r < C.cols(); ++r) {
        if (r == j) continue;
        const double dev = avg.col_means[r] - hat;
        spread.add(dev * dev);
    }
    const double kk = static_cast<double>(k);
    const double coeff = (kk - 1.0) * static_cast<double>(m - k) /
                         (kk * kk * static_cast<double>(m - 1) * static_cast<double>(m - 2));
    return base + coeff * spread.value();
}

ConsensusMoments conditional_consensus_moments(const Matrix& C,
                                               const SignalDistribution& mu,
                                               int k, int j, SignVariant variant) {
    ConsensusMoments out;
    out.j = j;
    out.variant = variant;
    out.cond_mean = conditional_consensus_mean(C, mu, k, j, variant);
    out.cond_var = conditional_consensus_variance(C, mu, k, j);
    return out;
}

}  // namespace minary
