#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "minary/config.hpp"
#include "minary/model.hpp"
#include "minary/numerics.hpp"

namespace minary {

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// cdev(i,j) = C(i,j) - column_mean_j(C); every column of the result has mean 0.
Matrix column_deviations(const Matrix& C);

// One iteration, rewritten as the affine map M -> linear(M) + offset() on
// n x m states. Independent route used to cross-check the step pipeline.
class StepMap {
public:
    StepMap(ActiveSet active, double alpha, int k, Matrix cdev);

    const ActiveSet& active() const { return active_; }
    double alpha() const { return alpha_; }
    int k() const { return k_; }
    const Matrix& cdev() const { return cdev_; }
    int rows() const { return static_cast<int>(cdev_.rows()); }
    int cols() const { return static_cast<int>(cdev_.cols()); }

    // Linear part: scales active columns by (1-alpha) and redistributes the
    // active-column row deviations. Self-adjoint under the Frobenius inner
    // product. Inactive columns pass through unchanged.
    Matrix linear(const Matrix& M) const;

    // Constant part: nonzero only on active columns, where every column
    // equals (alpha/k) * (sum of the active cdev columns).
    Matrix offset() const;

    // Full affine step: linear(M) + offset().
    Matrix apply(const Matrix& M) const;

private:
    ActiveSet active_;
    double alpha_;
    int k_;
    Matrix cdev_;
};

// The m x m symmetric factor governing the linear part on zero-column-sum
// states: I - alpha*D - (alpha/k) * indicator outer product.
Matrix zero_sum_factor(const ActiveSet& active, double alpha, int k, int m);

// Closed form for the square of that factor:
//   I - alpha(2-alpha)*D + (alpha/k)(3alpha-2) * indicator outer product.
Matrix zero_sum_factor_square(const ActiveSet& active, double alpha, int k, int m);

// Lipschitz constant of the composition maps.back() o ... o maps.front(),
// i.e. the operator norm of the composed linear parts under the Frobenius
// metric. Power iteration on G^T G from a seeded start vector; throws
// NoConvergence past the iteration cap.
double composition_lipschitz(const std::vector<StepMap>& maps,
                             double rel_tol = 1e-12, int max_iters = 200000);

inline double lipschitz(const StepMap& map, double rel_tol = 1e-12,
                        int max_iters = 200000) {
    return composition_lipschitz({map}, rel_tol, max_iters);
}

// Exact largest singular value of the composed linear parts via dense
// assembly + SVD. Cross-check route; guarded to nm <= 400.
double composition_norm_svd(const std::vector<StepMap>& maps);

// Expectation of the indicator outer product over uniform k-subsets:
//   p2 * ones(m,m) + (p1 - p2) * I, p1 = k/m, p2 = k(k-1)/(m(m-1)).
Matrix expected_indicator_outer(int m, int k);

// Dense (nm x nm) expectation of the linear part plus the expected offset.
// Assembled by exhaustive enumeration when C(m,k) <= enumeration_cap, else
// via the closed form above. vec() ordering is column-major.
struct ExpectedStep {
    Matrix A;   // nm x nm
    Matrix b;   // n x m, the expected offset
};

ExpectedStep expected_step(const Matrix& C, const SimConfig& cfg,
                           std::uint64_t enumeration_cap = 100000);

// Forces one assembly route; used to cross-check the two against each other.
ExpectedStep expected_step_enumerated(const Matrix& C, const SimConfig& cfg);
ExpectedStep expected_step_closed_form(const Matrix& C, const SimConfig& cfg);

// Applies the expected linear part to M without dense assembly.
Matrix apply_expected_linear(const Matrix& M, const SimConfig& cfg);

// Expected offset (alpha/k) * cdev * W without dense assembly.
Matrix expected_offset(const Matrix& C, const SimConfig& cfg);

// Solves (I - E[linear]) X = E[offset] for the stationary mean of the memory
// state. This linear solve is the independent oracle for the closed-form
// limit; throws SingularSystem if the system degenerates (it cannot for
// alpha in (0, 2/3)).
Matrix stationary_mean_by_solve(const Matrix& C, const SimConfig& cfg);

}  // namespace minary
