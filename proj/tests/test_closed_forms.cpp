#include <doctest.h>

#include <cmath>

#include "minary/affine.hpp"
#include "minary/closed_forms.hpp"
#include "minary/rng.hpp"
#include "minary/verify.hpp"
#include "oracles.hpp"

using namespace minary;

namespace {

Matrix generalist_matrix() {
    Matrix C(3, 6);
    C << 0.95, 0.90, 0.85, 0.15, 0.10, 0.05,  //
        0.50, 0.50, 0.50, 0.50, 0.50, 0.50,   //
        0.05, 0.10, 0.15, 0.85, 0.90, 0.95;
    return C;
}

Matrix random01(Rng& rng, int n, int m) {
    Matrix M(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) M(i, j) = rng.u01();
    return M;
}

}  // namespace

TEST_CASE("averages of a constant matrix collapse to the constant") {
    const Matrix C = Matrix::Constant(4, 5, 0.37);
    const auto avg = competency_averages(C);
    for (int j = 0; j < 5; ++j) {
        CHECK(avg.col_means[j] == doctest::Approx(0.37).epsilon(1e-15));
        CHECK(avg.hat_c[j] == doctest::Approx(0.37).epsilon(1e-15));
    }
    for (int i = 0; i < 4; ++i)
        CHECK(avg.row_means[i] == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(avg.global_mean == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("generalist matrix: every row mean is 0.5") {
    const auto avg = competency_averages(generalist_matrix());
    for (int i = 0; i < 3; ++i)
        CHECK(avg.row_means[i] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(avg.global_mean == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("expert matrix: only the expert column mean shifts") {
    Matrix C = Matrix::Constant(5, 19, 0.5);
    C(0, 13) = 0.9;
    const auto avg = competency_averages(C);
    for (int j = 0; j < 19; ++j) {
        if (j == 13)
            CHECK(avg.col_means[j] == doctest::Approx(0.58).epsilon(1e-15));
        else
            CHECK(avg.col_means[j] == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("average identities hold on random matrices") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.bounded(8));
        const int m = 1 + static_cast<int>(rng.bounded(10));
        const Matrix C = random01(rng, n, m);
        const auto avg = competency_averages(C);
        CHECK(std::abs(mean_of(avg.col_means) - avg.global_mean) <= 1e-14);
        CHECK(std::abs(mean_of(avg.row_means) - avg.global_mean) <= 1e-14);
        for (int j = 0; j < m; ++j)
            CHECK(std::abs(avg.hat_c[j] * (m - 1) + avg.col_means[j] -
                           m * avg.global_mean) <= 1e-12);
    }
}

TEST_CASE("mixing coefficient") {
    CHECK(mixing_coefficient(6, 6) == 0.0);
    CHECK(mixing_coefficient(1, 1) == 0.0);
    CHECK(mixing_coefficient(2, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mixing_coefficient(19, 3) == doctest::Approx(16.0 / 70.0).epsilon(1e-15));
    CHECK(mixing_coefficient(6, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    for (int m = 1; m <= 12; ++m)
        for (int k = 1; k <= m; ++k) {
            const double eta = mixing_coefficient(m, k);
            CHECK(eta >= 0.0);
            CHECK(eta <= 1.0);
        }
}

TEST_CASE("stationary mean formula: trivial and worked cases") {
    CHECK(stationary_mean_formula(Matrix::Constant(3, 4, 0.6), 4, 2)
              .cwiseAbs()
              .maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));

    // generalist: row deviations vanish, so the mean is eta * deviations
    const Matrix C = generalist_matrix();
    const Matrix U = stationary_mean_formula(C, 6, 3);
    CHECK(U(0, 0) == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(U(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(U(2, 0) == doctest::Approx(-0.075).epsilon(1e-12));
    const Matrix eta_cdev = mixing_coefficient(6, 3) * column_deviations(C);
    CHECK((U - eta_cdev).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("stationary mean has zero column means and the row-average identity") {
    Rng rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.bounded(8));
        const int m = 1 + static_cast<int>(rng.bounded(10));
        const int k = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(m)));
        const Matrix C = random01(rng, n, m);
        const Matrix U = stationary_mean_formula(C, m, k);
        CHECK(col_means(U).cwiseAbs().maxCoeff() <= 1e-12);

        // Row-average identity: the deviation term contributes its own row
        // average, so (1/m) sum_j U(i,j) = (1/2) * (row_mean_i - global_mean)
        // independently of k.
        const auto avg = competency_averages(C);
        for (int i = 0; i < n; ++i) {
            const double row_avg = U.row(i).sum() / m;
            const double want = 0.5 * (avg.row_means[i] - avg.global_mean);
            CHECK(std::abs(row_avg - want) <= 1e-12);
        }
    }
}

TEST_CASE("stationary mean formula matches the linear-solve oracle") {
    Rng rng(303);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.bounded(8));
        const int m = 1 + static_cast<int>(rng.bounded(8));
        const int k = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(m)));
        SimConfig cfg;
        cfg.n = n;
        cfg.m = m;
        cfg.k = k;
        cfg.alpha = 0.01 + 0.64 * rng.u01();
        const Matrix C = random01(rng, n, m);
        const Matrix U = stationary_mean_formula(C, m, k);
        const Matrix solved = stationary_mean_by_solve(C, cfg);
        CHECK((U - solved).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("conditional mean: variants and hand-checked case") {
    const SignalDistribution mu = SignalDistribution::uniform01();

    // k = 1: both variants reduce to mu_mean - col_mean
    Matrix C(2, 3);
    C << 0.1, 0.4, 0.9, 0.3, 0.2, 0.5;
    const auto avg = competency_averages(C);
    for (int j = 0; j < 3; ++j) {
        const double derived = conditional_consensus_mean(C, mu, 1, j);
        const double paper =
            conditional_consensus_mean(C, mu, 1, j, SignVariant::PaperSign);
        CHECK(derived == doctest::Approx(0.5 - avg.col_means[j]).epsilon(1e-14));
        CHECK(derived == doctest::Approx(paper).epsilon(1e-14));
    }

    // constant competencies
    const Matrix K = Matrix::Constant(3, 4, 0.2);
    CHECK(conditional_consensus_mean(K, mu, 2, 1) ==
          doctest::Approx(0.3).epsilon(1e-14));

    // column means (0.2, 0.4, 0.6), k=2, j=1: brute force over {1,2},{1,3}
    // gives 0.5 - (0.2 + 0.5)/2 = 0.15
    Matrix M(1, 3);
    M << 0.2, 0.4, 0.6;
    CHECK(conditional_consensus_mean(M, mu, 2, 0) ==
          doctest::Approx(0.15).epsilon(1e-14));
}

TEST_CASE("conditional variance: degenerate and hand-checked cases") {
    const SignalDistribution mu = SignalDistribution::uniform01();
    const double sigma2 = mu.stddev * mu.stddev;

    Matrix C(2, 5);
    C << 0.1, 0.9, 0.4, 0.6, 0.3, 0.2, 0.8, 0.5, 0.7, 0.1;
    CHECK(conditional_consensus_variance(C, mu, 1, 2) ==
          doctest::Approx(sigma2).epsilon(1e-14));
    CHECK(conditional_consensus_variance(C, mu, 5, 2) ==
          doctest::Approx(sigma2 / 5.0).epsilon(1e-14));

    // column means (0.1, 0.3, 0.5, 0.7), k=2, j=1: correction enumerated by
    // hand over the three conditioned subsets is 1/150
    Matrix M(1, 4);
    M << 0.1, 0.3, 0.5, 0.7;
    CHECK(conditional_consensus_variance(M, mu, 2, 0) ==
          doctest::Approx(sigma2 / 2.0 + 1.0 / 150.0).epsilon(1e-12));
    CHECK(conditional_consensus_variance(M, mu, 2, 0) ==
          doctest::Approx(29.0 / 600.0).epsilon(1e-12));
}

TEST_CASE("closed forms match the exhaustive enumeration oracle") {
    Rng rng(404);
    for (int m = 2; m <= 7; ++m) {
        for (int k = 1; k <= m; ++k) {
            const int n = 1 + static_cast<int>(rng.bounded(4));
            const Matrix C = random01(rng, n, m);
            const SignalDistribution mu = SignalDistribution::uniform01();
            for (int j = 0; j < m; ++j) {
                const auto oracle = oracles::enumerate_conditional(
                    C, mu.mean, mu.stddev * mu.stddev, k, j);
                CHECK(std::abs(conditional_consensus_mean(C, mu, k, j) -
                               oracle.mean) <= 1e-12);
                CHECK(std::abs(conditional_consensus_variance(C, mu, k, j) -
                               oracle.var) <= 1e-12);
            }
        }
    }
}

TEST_CASE("variance is bounded below by the signal term") {
    Rng rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + static_cast<int>(rng.bounded(8));
        const int k = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(m)));
        const Matrix C = random01(rng, 3, m);
        const SignalDistribution mu = SignalDistribution::uniform01();
        const int j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(m)));
        const double var = conditional_consensus_variance(C, mu, k, j);
        CHECK(var >= mu.stddev * mu.stddev / k - 1e-14);
    }
}

TEST_CASE("sign variants differ by exactly 2(k-1)/k times the leave-one-out mean") {
    // The variants coincide iff k = 1 or the other columns' mean is zero;
    // for k > 1 and nonzero competencies they must not agree.
    const SignalDistribution mu = SignalDistribution::uniform01();

    const Matrix Z = Matrix::Zero(2, 6);
    for (int k = 1; k <= 6; ++k)
        for (int j = 0; j < 6; ++j)
            CHECK(conditional_consensus_mean(Z, mu, k, j) ==
                  doctest::Approx(conditional_consensus_mean(
                                      Z, mu, k, j, SignVariant::PaperSign))
                      .epsilon(1e-14));

    const Matrix K = Matrix::Constant(2, 6, 0.42);
    for (int k = 1; k <= 6; ++k)
        for (int j = 0; j < 6; ++j) {
            const double derived = conditional_consensus_mean(K, mu, k, j);
            const double paper =
                conditional_consensus_mean(K, mu, k, j, SignVariant::PaperSign);
            const double want_gap = 2.0 * (k - 1.0) / k * 0.42;
            CHECK(paper - derived == doctest::Approx(want_gap).epsilon(1e-12));
        }
}
