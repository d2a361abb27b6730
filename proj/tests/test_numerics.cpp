#include "pkm/numerics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace pkm {
namespace {

Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  }
  return g * g.transpose() + Eigen::MatrixXd::Identity(n, n);
}

TEST(SymMatrix, SymmetrizesOnConstruction) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 4.0, 3.0;
  SymMatrix s(a);
  EXPECT_DOUBLE_EQ(s.mat()(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(s.mat()(1, 0), 3.0);
}

TEST(SymMatrix, RejectsNonSquare) {
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
}

TEST(Cholesky, Identity) {
  Eigen::MatrixXd l = cholesky_spd(SymMatrix::Identity(2));
  EXPECT_TRUE(l.isApprox(Eigen::MatrixXd::Identity(2, 2), 0.0));
}

TEST(Cholesky, DiagonalSquareRoots) {
  Eigen::MatrixXd a(2, 2);
  a << 4.0, 0.0, 0.0, 9.0;
  Eigen::MatrixXd l = cholesky_spd(SymMatrix(a));
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 0.0);
}

TEST(Cholesky, RandomSpdRoundTrip) {
  std::mt19937_64 rng(42);
  for (Eigen::Index n : {2, 3, 5, 8, 13}) {
    SymMatrix a(random_spd(n, rng));
    Eigen::MatrixXd l = cholesky_spd(a);
    double rel = (l * l.transpose() - a.mat()).norm() / a.mat().norm();
    EXPECT_LT(rel, 1e-10) << "n = " << n;
  }
}

TEST(Cholesky, RejectsIndefinite) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(cholesky_spd(SymMatrix(a)), NotPositiveDefinite);
}

TEST(RegularizedLs, IdentityNoRidge) {
  Eigen::VectorXd z(2);
  z << 1.0, 2.0;
  Eigen::VectorXd w =
      solve_regularized_ls(Eigen::MatrixXd::Identity(2, 2), z, 0.0);
  EXPECT_TRUE(w.isApprox(z, 1e-14));
}

TEST(RegularizedLs, IdentityWithRidge) {
  Eigen::VectorXd z(2);
  z << 1.0, 2.0;
  Eigen::VectorXd w =
      solve_regularized_ls(Eigen::MatrixXd::Identity(2, 2), z, 1.0);
  EXPECT_NEAR(w(0), 0.5, 1e-14);
  EXPECT_NEAR(w(1), 1.0, 1e-14);
}

TEST(RegularizedLs, OverdeterminedColumn) {
  Eigen::MatrixXd m(2, 1);
  m << 1.0, 1.0;
  Eigen::VectorXd z(2);
  z << 1.0, 3.0;
  Eigen::VectorXd w = solve_regularized_ls(m, z, 0.0);
  ASSERT_EQ(w.size(), 1);
  EXPECT_NEAR(w(0), 2.0, 1e-13);
}

TEST(RegularizedLs, RankDeficientWithoutRidgeThrows) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd z(2);
  z << 1.0, 2.0;
  EXPECT_THROW(solve_regularized_ls(m, z, 0.0), SingularSystem);
  EXPECT_NO_THROW(solve_regularized_ls(m, z, 0.1));
}

TEST(RegularizedLs, SolutionIsOptimal) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(6, 4);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) m(i, j) = normal(rng);
  }
  Eigen::VectorXd z(6);
  for (Eigen::Index i = 0; i < 6; ++i) z(i) = normal(rng);
  const double lambda = 0.35;
  Eigen::VectorXd w = solve_regularized_ls(m, z, lambda);

  auto objective = [&](const Eigen::VectorXd& cand) {
    return (m * cand - z).squaredNorm() + lambda * cand.squaredNorm();
  };
  const double best = objective(w);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd dir(4);
    for (Eigen::Index j = 0; j < 4; ++j) dir(j) = normal(rng);
    dir.normalize();
    EXPECT_GE(objective(w + 1e-3 * dir), best);
  }
}

TEST(KlDiagGaussian, IdenticalIsZero) {
  Eigen::VectorXd mu(3), var(3);
  mu << 0.3, -1.0, 2.0;
  var << 1.0, 0.5, 2.0;
  EXPECT_DOUBLE_EQ(kl_diag_gaussian(mu, var, mu, var), 0.0);
}

TEST(KlDiagGaussian, UnitMeanShift) {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  EXPECT_NEAR(kl_diag_gaussian(zero, one, one, one), 0.5, 1e-14);
}

TEST(KlDiagGaussian, VarianceRatio) {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd two = 2.0 * one;
  const double expected = 0.5 * (std::log(2.0) + 0.5 - 1.0);
  EXPECT_NEAR(kl_diag_gaussian(zero, one, zero, two), expected, 1e-14);
}

TEST(KlDiagGaussian, Errors) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd var = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  EXPECT_THROW(kl_diag_gaussian(mu, bad, mu, var), NonPositiveVariance);
  EXPECT_THROW(kl_diag_gaussian(mu, var, Eigen::VectorXd::Zero(3), var),
               DimensionMismatch);
}

TEST(KlMatrixNormal, IdenticalIsZero) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd r(2, 3);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) r(i, j) = normal(rng);
  }
  SymMatrix v(random_spd(3, rng));
  EXPECT_NEAR(kl_matrix_normal(r, v, r, v), 0.0, 1e-12);
}

TEST(KlMatrixNormal, DiagonalReducesToUnivariates) {
  Eigen::MatrixXd r1(1, 3), r2(1, 3);
  r1 << 0.5, -1.0, 2.0;
  r2 << 0.0, 1.0, 2.5;
  Eigen::VectorXd d1(3), d2(3);
  d1 << 0.7, 1.3, 2.0;
  d2 << 1.1, 0.6, 3.0;
  SymMatrix v1(d1.asDiagonal().toDenseMatrix());
  SymMatrix v2(d2.asDiagonal().toDenseMatrix());

  double expected = 0.0;
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd m1(1), s1(1), m2(1), s2(1);
    m1 << r1(0, j);
    s1 << d1(j);
    m2 << r2(0, j);
    s2 << d2(j);
    expected += kl_diag_gaussian(m1, s1, m2, s2);
  }
  EXPECT_NEAR(kl_matrix_normal(r1, v1, r2, v2), expected, 1e-10);
}

TEST(KlMatrixNormal, CovarianceTermsScaleWithCodeRows) {
  std::mt19937_64 rng(11);
  SymMatrix v1(random_spd(3, rng));
  SymMatrix v2(random_spd(3, rng));
  Eigen::MatrixXd r_one = Eigen::MatrixXd::Zero(1, 3);
  Eigen::MatrixXd r_two = Eigen::MatrixXd::Zero(2, 3);
  const double kl_one = kl_matrix_normal(r_one, v1, r_one, v2);
  const double kl_two = kl_matrix_normal(r_two, v1, r_two, v2);
  EXPECT_NEAR(kl_two, 2.0 * kl_one, 1e-10 * std::max(1.0, kl_one));
}

TEST(KlMatrixNormal, Errors) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, 3);
  SymMatrix v = SymMatrix::Identity(3);
  EXPECT_THROW(kl_matrix_normal(r, v, Eigen::MatrixXd::Zero(2, 2), v),
               DimensionMismatch);
  Eigen::MatrixXd indef(3, 3);
  indef << 1, 2, 0, 2, 1, 0, 0, 0, 1;
  EXPECT_THROW(kl_matrix_normal(r, v, r, SymMatrix(indef)),
               NotPositiveDefinite);
}

// Nonnegativity over random instances; zero only when parameters coincide.
TEST(KlDivergences, NonNegativeOnRandomInputs) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd mu1(4), mu2(4), var1(4), var2(4);
    for (int i = 0; i < 4; ++i) {
      mu1(i) = normal(rng);
      mu2(i) = normal(rng);
      var1(i) = unif(rng);
      var2(i) = unif(rng);
    }
    const double kl = kl_diag_gaussian(mu1, var1, mu2, var2);
    EXPECT_GE(kl, 0.0);
    if ((mu1 - mu2).cwiseAbs().maxCoeff() > 1e-3) {
      EXPECT_GT(kl, 0.0);
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd r1(2, 3), r2(2, 3);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        r1(i, j) = normal(rng);
        r2(i, j) = normal(rng);
      }
    }
    SymMatrix v1(random_spd(3, rng));
    SymMatrix v2(random_spd(3, rng));
    EXPECT_GE(kl_matrix_normal(r1, v1, r2, v2), 0.0);
    EXPECT_LE(kl_matrix_normal(r1, v1, r1, v1), 1e-12);
  }
}

}  // namespace
}  // namespace pkm
