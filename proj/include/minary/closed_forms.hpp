#pragma once

#include <stdexcept>

#include "minary/config.hpp"
#include "minary/numerics.hpp"

namespace minary {

struct DegenerateVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Row, column, and global averages of a competency matrix, plus the
// leave-one-out column-mean averages hat_c[j] = mean of the other columns'
// means. Compensated summation throughout.
struct CompetencyAverages {
    Vector col_means;    // m
    Vector row_means;    // n
    double global_mean = 0.0;
    Vector hat_c;        // m; 0 by convention when m == 1
};

CompetencyAverages competency_averages(const Matrix& C);

// (m-k) / (k(m-1) + m-k); 0 when k == m. Lies in [0,1].
double mixing_coefficient(int m, int k);

// Stationary mean of the memory state:
//   U(i,j) = (1/2 - eta) * (row_mean_i - global_mean) + eta * cdev(i,j).
// Every column mean of U is zero.
Matrix stationary_mean_formula(const Matrix& C, int m, int k);

// The conditional consensus mean has two published sign conventions; the
// derivation forces a plus sign before (k-1)*hat_c, so that variant is the
// default. PaperSign evaluates the minus-sign form verbatim and is kept so
// the discrepancy stays visible in reports instead of being silently patched.
enum class SignVariant { Derived, PaperSign };

// E[ normalized consensus | dimension j active ], zero-initialized memory.
// j is 0-based.
double conditional_consensus_mean(const Matrix& C, const SignalDistribution& mu,
                                  int k, int j,
                                  SignVariant variant = SignVariant::Derived);

// Var( normalized consensus | dimension j active ), zero-initialized memory:
// sigma^2/k plus a competency-spread correction. The correction is exactly 0
// when k == 1 or k == m; throws DegenerateVariance if 1 < k < m with m < 3.
double conditional_consensus_variance(const Matrix& C,
                                      const SignalDistribution& mu, int k,
                                      int j);

struct ConsensusMoments {
    double cond_mean = 0.0;
    double cond_var = 0.0;
    int j = 0;
    SignVariant variant = SignVariant::Derived;
};

ConsensusMoments conditional_consensus_moments(
    const Matrix& C, const SignalDistribution& mu, int k, int j,
    SignVariant variant = SignVariant::Derived);

}  // namespace minary
