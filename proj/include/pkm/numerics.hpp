#ifndef PKM_NUMERICS_HPP
#define PKM_NUMERICS_HPP

#include <Eigen/Dense>

#include "pkm/errors.hpp"

namespace pkm {

/// Default L2 regularizer for the least-squares address solve.
inline constexpr double kDefaultLambda = 0.35;

/// Dense symmetric matrix. The constructor symmetrizes its argument by
/// averaging with the transpose, so posterior covariance updates cannot
/// accumulate asymmetric round-off.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
      throw DimensionMismatch("SymMatrix: matrix is not square");
    }
    m_ = 0.5 * (a + a.transpose());
  }

  static SymMatrix Identity(Eigen::Index n, double scale = 1.0) {
    SymMatrix s;
    s.m_ = scale * Eigen::MatrixXd::Identity(n, n);
    return s;
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }

  bool operator==(const SymMatrix& other) const { return m_ == other.m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Smallest eigenvalue of a symmetric matrix (test and validation helper).
double min_eigenvalue(const SymMatrix& a);

/// Lower-triangular Cholesky factor L with A = L·Lᵀ.
/// Throws NotPositiveDefinite on a nonpositive pivot; the caller is
/// expected to regularize and retry.
Eigen::MatrixXd cholesky_spd(const SymMatrix& a);

/// Log-determinant of an SPD matrix via its Cholesky factor.
double logdet_spd(const SymMatrix& a);

/// Solve A·x = b for SPD A through one Cholesky factorization.
Eigen::MatrixXd solve_spd(const SymMatrix& a, const Eigen::MatrixXd& b);

/// argmin over w of ‖M·w − z‖² + lambda·‖w‖², i.e. the solution of the
/// regularized normal equations (MᵀM + lambda·I)·w = Mᵀz.
/// Throws SingularSystem when lambda = 0 and MᵀM is rank deficient.
Eigen::VectorXd solve_regularized_ls(const Eigen::MatrixXd& m,
                                     const Eigen::VectorXd& z, double lambda);

/// KL divergence between diagonal Gaussians N(mu1, diag var1) and
/// N(mu2, diag var2), summed over dimensions.
double kl_diag_gaussian(const Eigen::VectorXd& mu1, const Eigen::VectorXd& var1,
                        const Eigen::VectorXd& mu2, const Eigen::VectorXd& var2);

/// KL divergence between matrix normals N(vec R1, V1 ⊗ I_c) and
/// N(vec R2, V2 ⊗ I_c), where c = R1.rows(). Determinants go through
/// Cholesky log-determinants.
double kl_matrix_normal(const Eigen::MatrixXd& r1, const SymMatrix& v1,
                        const Eigen::MatrixXd& r2, const SymMatrix& v2);

}  // namespace pkm

#endif  // PKM_NUMERICS_HPP
