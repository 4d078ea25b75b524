#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace minary {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Neumaier-compensated accumulator. The verification suites assert identities
// down to 1e-12..1e-14 with matrices up to m ~ 1e3 columns, which plain
// left-to-right summation does not reliably reach.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

// Column means of an n x m matrix, compensated per column.
inline Vector col_means(const Matrix& M) {
    Vector out(M.cols());
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        CompensatedSum acc;
        for (Eigen::Index i = 0; i < M.rows(); ++i) acc.add(M(i, j));
        out[j] = acc.value() / static_cast<double>(M.rows());
    }
    return out;
}

inline Vector row_means(const Matrix& M) {
    Vector out(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        CompensatedSum acc;
        for (Eigen::Index j = 0; j < M.cols(); ++j) acc.add(M(i, j));
        out[i] = acc.value() / static_cast<double>(M.cols());
    }
    return out;
}

inline double mean_of(const Vector& v) {
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(v[i]);
    return acc.value() / static_cast<double>(v.size());
}

}  // namespace minary
