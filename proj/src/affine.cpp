#include "minary/affine.hpp"

#include <cmath>
#include <utility>

#include "minary/combinatorics.hpp"

namespace minary {

namespace {

Eigen::Map<const Vector> as_vec(const Matrix& M) {
    return Eigen::Map<const Vector>(M.data(), M.size());
}

}  // namespace

Matrix column_deviations(const Matrix& C) {
    const Vector means = col_means(C);
    Matrix dev(C.rows(), C.cols());
    for (Eigen::Index j = 0; j < C.cols(); ++j)
        dev.col(j) = C.col(j).array() - means[j];
    return dev;
}

StepMap::StepMap(ActiveSet active, double alpha, int k, Matrix cdev)
    : active_(std::move(active)), alpha_(alpha), k_(k), cdev_(std::move(cdev)) {}

Matrix StepMap::linear(const Matrix& M) const {
    const double n = static_cast<double>(M.rows());
    Matrix out = M;
    Vector active_sum = Vector::Zero(M.rows());
    for (int j : active_) active_sum += M.col(j);
    // (row-mean broadcast - identity) applied to the active-column sum
    const Vector redistributed =
        (alpha_ / k_) * (Vector::Constant(M.rows(), active_sum.sum() / n) - active_sum);
    for (int j : active_) {
        out.col(j) *= (1.0 - alpha_);
        out.col(j) += redistributed;
    }
    return out;
}

Matrix StepMap::offset() const {
    Matrix B = Matrix::Zero(cdev_.rows(), cdev_.cols());
    Vector active_sum = Vector::Zero(cdev_.rows());
    for (int j : active_) active_sum += cdev_.col(j);
    active_sum *= alpha_ / k_;
    for (int j : active_) B.col(j) = active_sum;
    return B;
}

Matrix StepMap::apply(const Matrix& M) const { return linear(M) + offset(); }

Matrix zero_sum_factor(const ActiveSet& active, double alpha, int k, int m) {
    Matrix Q = Matrix::Identity(m, m);
    for (int j : active) Q(j, j) -= alpha;
    for (int r : active)
        for (int c : active) Q(r, c) -= alpha / k;
    return Q;
}

Matrix zero_sum_factor_square(const ActiveSet& active, double alpha, int k, int m) {
    Matrix Q2 = Matrix::Identity(m, m);
    for (int j : active) Q2(j, j) -= alpha * (2.0 - alpha);
    const double outer = (alpha / k) * (3.0 * alpha - 2.0);
    for (int r : active)
        for (int c : active) Q2(r, c) += outer;
    return Q2;
}

double composition_lipschitz(const std::vector<StepMap>& maps, double rel_tol,
                             int max_iters) {
    if (maps.empty()) return 1.0;
    const int n = maps.front().rows();
    const int m = maps.front().cols();

    // Fixed-seed start vector: results are reproducible and the checks that
    // compare against the SVD route stay meaningful.
    Rng rng(0x6f70206e6f726dULL);
    Matrix v(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) v(i, j) = rng.u01() - 0.5;
    double vnorm = v.norm();
    if (vnorm == 0.0) v(0, 0) = 1.0, vnorm = 1.0;
    v /= vnorm;

    // Power iteration on G^T G. Each linear part is self-adjoint, so the
    // adjoint of the composition is the same maps applied in reverse order.
    double lambda_prev = -1.0;
    for (int it = 0; it < max_iters; ++it) {
        Matrix w = v;
        for (const StepMap& map : maps) w = map.linear(w);
        Matrix u = w;
        for (auto rit = maps.rbegin(); rit != maps.rend(); ++rit)
            u = rit->linear(u);

        const double lambda = as_vec(v).dot(as_vec(u));
        const double unorm = u.norm();
        if (unorm == 0.0) return 0.0;
        v = u / unorm;

        if (lambda_prev >= 0.0 &&
            std::abs(lambda - lambda_prev) <= rel_tol * std::max(lambda, 1e-300))
            return std::sqrt(std::max(lambda, 0.0));
        lambda_prev = lambda;
    }
    throw NoConvergence("power iteration did not converge in " +
                        std::to_string(max_iters) + " iterations");
}

double composition_norm_svd(const std::vector<StepMap>& maps) {
    if (maps.empty()) return 1.0;
    const int n = maps.front().rows();
    const int m = maps.front().cols();
    const Eigen::Index dim = static_cast<Eigen::Index>(n) * m;
    if (dim > 400)
        throw TooLarge("dense SVD cross-check limited to nm <= 400, got " +
                       std::to_string(dim));

    Matrix op(dim, dim);
    Matrix basis = Matrix::Zero(n, m);
    for (Eigen::Index b = 0; b < dim; ++b) {
        basis.data()[b] = 1.0;
        Matrix img = basis;
        for (const StepMap& map : maps) img = map.linear(img);
        op.col(b) = as_vec(img);
        basis.data()[b] = 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(op);
    return svd.singularValues()(0);
}

Matrix expected_indicator_outer(int m, int k) {
    const double p1 = static_cast<double>(k) / m;
    const double p2 = (m > 1) ? static_cast<double>(k) * (k - 1) /
                                    (static_cast<double>(m) * (m - 1))
                              : 0.0;
    return p2 * Matrix::Ones(m, m) + (p1 - p2) * Matrix::Identity(m, m);
}

Matrix apply_expected_linear(const Matrix& M, const SimConfig& cfg) {
    const int m = cfg.m;
    const int k = cfg.k;
    const double p1 = static_cast<double>(k) / m;
    const double p2 = (m > 1) ? static_cast<double>(k) * (k - 1) /
                                    (static_cast<double>(m) * (m - 1))
                              : 0.0;
    // M*W with W = p2*J + (p1-p2)*I: every column of M*J is the row-sum vector.
    const Vector row_sums = M.rowwise().sum();
    Matrix MW = (p1 - p2) * M;
    MW.colwise() += p2 * row_sums;
    // (row-mean broadcast - identity) on the left
    const Eigen::RowVectorXd col_mean_mw = MW.colwise().mean();
    Matrix redistributed = -MW;
    redistributed.rowwise() += col_mean_mw;
    return (1.0 - cfg.alpha * p1) * M + (cfg.alpha / k) * redistributed;
}

Matrix expected_offset(const Matrix& C, const SimConfig& cfg) {
    const Matrix cdev = column_deviations(C);
    const int m = cfg.m;
    const int k = cfg.k;
    const double p1 = static_cast<double>(k) / m;
    const double p2 = (m > 1) ? static_cast<double>(k) * (k - 1) /
                                    (static_cast<double>(m) * (m - 1))
                              : 0.0;
    const Vector row_sums = cdev.rowwise().sum();
    Matrix CW = (p1 - p2) * cdev;
    CW.colwise() += p2 * row_sums;
    return (cfg.alpha / k) * CW;
}

namespace {

ExpectedStep assemble_dense(const Matrix& C, const SimConfig& cfg, bool enumerate) {
    const Eigen::Index dim = static_cast<Eigen::Index>(cfg.n) * cfg.m;
    if (dim > 10000)
        throw TooLarge("dense expected-operator assembly guarded to nm <= 10000, got " +
                       std::to_string(dim));

    ExpectedStep out;
    out.A = Matrix::Zero(dim, dim);

    if (enumerate) {
        const Matrix cdev = column_deviations(C);
        Matrix b_sum = Matrix::Zero(cfg.n, cfg.m);
        std::uint64_t count = 0;
        Matrix basis = Matrix::Zero(cfg.n, cfg.m);
        for_each_k_subset(cfg.m, cfg.k, [&](const std::vector<int>& subset) {
            StepMap map(subset, cfg.alpha, cfg.k, cdev);
            for (Eigen::Index b = 0; b < dim; ++b) {
                basis.data()[b] = 1.0;
                const Matrix img = map.linear(basis);
                out.A.col(b) += as_vec(img);
                basis.data()[b] = 0.0;
            }
            b_sum += map.offset();
            ++count;
        });
        out.A /= static_cast<double>(count);
        out.b = b_sum / static_cast<double>(count);
    } else {
        Matrix basis = Matrix::Zero(cfg.n, cfg.m);
        for (Eigen::Index b = 0; b < dim; ++b) {
            basis.data()[b] = 1.0;
            const Matrix img = apply_expected_linear(basis, cfg);
            out.A.col(b) = as_vec(img);
            basis.data()[b] = 0.0;
        }
        out.b = expected_offset(C, cfg);
    }
    return out;
}

}  // namespace

ExpectedStep expected_step_enumerated(const Matrix& C, const SimConfig& cfg) {
    return assemble_dense(C, cfg, true);
}

ExpectedStep expected_step_closed_form(const Matrix& C, const SimConfig& cfg) {
    return assemble_dense(C, cfg, false);
}

ExpectedStep expected_step(const Matrix& C, const SimConfig& cfg,
                           std::uint64_t enumeration_cap) {
    const bool enumerate =
        binomial_capped(cfg.m, cfg.k, enumeration_cap) <= enumeration_cap;
    return assemble_dense(C, cfg, enumerate);
}

Matrix stationary_mean_by_solve(const Matrix& C, const SimConfig& cfg) {
    const ExpectedStep exp_step = expected_step(C, cfg);
    const Eigen::Index dim = exp_step.A.rows();
    const Matrix system = Matrix::Identity(dim, dim) - exp_step.A;
    const Vector rhs = as_vec(exp_step.b);

    Eigen::PartialPivLU<Matrix> lu(system);
    const Vector x = lu.solve(rhs);
    const double residual = (system * x - rhs).norm();
    if (!std::isfinite(residual) || residual > 1e-8 * (1.0 + rhs.norm()))
        throw SingularSystem("expected-step fixed-point system is numerically singular");
    return Eigen::Map<const Matrix>(x.data(), cfg.n, cfg.m);
}

}  // namespace minary
