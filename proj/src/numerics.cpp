#include "pkm/numerics.hpp"

#include <cmath>

namespace pkm {

namespace {

// Unblocked Cholesky. A pivot at or below `pivot_floor` counts as a
// failure; the default of exactly zero matches the SPD contract, while
// the regularized-LS path passes a small relative floor to flag rank
// deficiency that round-off would otherwise hide.
Eigen::MatrixXd cholesky_impl(const Eigen::MatrixXd& a, double pivot_floor) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (pivot <= pivot_floor) {
      throw NotPositiveDefinite("cholesky: nonpositive pivot at index " +
                                std::to_string(j));
    }
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Eigen::MatrixXd solve_with_factor(const Eigen::MatrixXd& l,
                                  const Eigen::MatrixXd& b) {
  Eigen::MatrixXd y = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

}  // namespace

double min_eigenvalue(const SymMatrix& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat());
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd cholesky_spd(const SymMatrix& a) {
  return cholesky_impl(a.mat(), 0.0);
}

double logdet_spd(const SymMatrix& a) {
  Eigen::MatrixXd l = cholesky_spd(a);
  return 2.0 * l.diagonal().array().log().sum();
}

Eigen::MatrixXd solve_spd(const SymMatrix& a, const Eigen::MatrixXd& b) {
  if (a.dim() != b.rows()) {
    throw DimensionMismatch("solve_spd: shape mismatch");
  }
  return solve_with_factor(cholesky_spd(a), b);
}

Eigen::VectorXd solve_regularized_ls(const Eigen::MatrixXd& m,
                                     const Eigen::VectorXd& z, double lambda) {
  if (m.rows() != z.size()) {
    throw DimensionMismatch("solve_regularized_ls: M rows != z length");
  }
  if (lambda < 0.0) {
    throw ConfigError("solve_regularized_ls: negative lambda");
  }
  const Eigen::Index cols = m.cols();
  Eigen::MatrixXd normal = m.transpose() * m;
  normal.diagonal().array() += lambda;
  Eigen::MatrixXd sym = 0.5 * (normal + normal.transpose());

  // With lambda = 0 a rank-deficient MᵀM may carry positive pivots of pure
  // round-off; a relative floor turns those into a SingularSystem report.
  double floor = 0.0;
  if (lambda == 0.0 && cols > 0) {
    floor = 1e-13 * sym.diagonal().maxCoeff();
    if (floor < 0.0) floor = 0.0;
  }
  Eigen::MatrixXd l;
  try {
    l = cholesky_impl(sym, floor);
  } catch (const NotPositiveDefinite&) {
    if (lambda == 0.0) {
      throw SingularSystem(
          "solve_regularized_ls: normal equations are rank deficient and "
          "lambda = 0");
    }
    throw;
  }
  return solve_with_factor(l, m.transpose() * z);
}

double kl_diag_gaussian(const Eigen::VectorXd& mu1, const Eigen::VectorXd& var1,
                        const Eigen::VectorXd& mu2,
                        const Eigen::VectorXd& var2) {
  const Eigen::Index n = mu1.size();
  if (var1.size() != n || mu2.size() != n || var2.size() != n) {
    throw DimensionMismatch("kl_diag_gaussian: length mismatch");
  }
  if ((var1.array() <= 0.0).any() || (var2.array() <= 0.0).any()) {
    throw NonPositiveVariance("kl_diag_gaussian: variances must be positive");
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double ratio = var1(i) / var2(i);
    double diff = mu1(i) - mu2(i);
    kl += 0.5 * (std::log(var2(i) / var1(i)) + ratio + diff * diff / var2(i) -
                 1.0);
  }
  return std::max(kl, 0.0);
}

double kl_matrix_normal(const Eigen::MatrixXd& r1, const SymMatrix& v1,
                        const Eigen::MatrixXd& r2, const SymMatrix& v2) {
  const Eigen::Index c = r1.rows();
  const Eigen::Index m = r1.cols();
  if (r2.rows() != c || r2.cols() != m || v1.dim() != m || v2.dim() != m) {
    throw DimensionMismatch("kl_matrix_normal: shape mismatch");
  }
  Eigen::MatrixXd l2 = cholesky_spd(v2);
  double logdet2 = 2.0 * l2.diagonal().array().log().sum();
  double logdet1 = logdet_spd(v1);

  Eigen::MatrixXd v2inv_v1 = solve_with_factor(l2, v1.mat());
  Eigen::MatrixXd diff = r1 - r2;
  Eigen::MatrixXd v2inv_difft = solve_with_factor(l2, diff.transpose());

  double kl = 0.5 * (static_cast<double>(c) * v2inv_v1.trace() +
                     (diff * v2inv_difft).trace() -
                     static_cast<double>(c) * static_cast<double>(m) +
                     static_cast<double>(c) * (logdet2 - logdet1));
  return std::max(kl, 0.0);
}

}  // namespace pkm
