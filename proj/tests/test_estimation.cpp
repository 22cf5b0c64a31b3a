#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "simple/dcmm.hpp"
#include "simple/errors.hpp"
#include "simple/estimation.hpp"
#include "support.hpp"

using namespace simple;

namespace {

SymmetricBinaryMatrix cliques(Index size) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2 * size, 2 * size);
  x.topLeftCorner(size, size).setOnes();
  x.bottomRightCorner(size, size).setOnes();
  x.diagonal().setZero();
  return SymmetricBinaryMatrix(x, false);
}

}  // namespace

TEST(Estimation, ExaminedCount) {
  EXPECT_EQ(examined_eigenvalue_count(8), 8);
  EXPECT_EQ(examined_eigenvalue_count(3000), 50);
}

TEST(Estimation, ZeroGraphGivesZeroK) {
  const SymmetricBinaryMatrix x(Eigen::MatrixXd::Zero(10, 10), false);
  const KEstimate e = estimate_k(x, top_eigenpairs(x, 10));
  EXPECT_EQ(e.k_hat, 0);
  EXPECT_EQ(e.threshold, 0.0);
  EXPECT_EQ(e.k_for_t(), 1);
  EXPECT_EQ(e.k_for_g(), 2);
}

TEST(Estimation, TwoFourCliquesStayBelowThreshold) {
  const auto x = cliques(4);
  const KEstimate e = estimate_k(x, top_eigenpairs(x, 8));
  EXPECT_NEAR(e.examined(0), 3.0, 1e-12);
  EXPECT_NEAR(e.threshold, 2.01 * std::log(8.0) * 3.0, 1e-12);
  EXPECT_EQ(e.max_degree, 3);
  EXPECT_EQ(e.k_hat, 0);
}

TEST(Estimation, CensoredCountIsAnError) {
  // Dense blocks push every examined eigenvalue above the threshold.
  Eigen::VectorXd values = Eigen::VectorXd::Constant(2, 1e6);
  const auto x = cliques(4);
  EXPECT_THROW(estimate_k(x, values), NumericalError);
}

TEST(Estimation, PlantedBlocksAreCounted) {
  const MeanMatrix h = build_mean_matrix(model1_params(1500, 300, 0.2, 0.9));
  const auto x = sample_adjacency(h, 3, false);
  const KEstimate e = estimate_k(x, top_eigenvalues(x.dense(), 50));
  EXPECT_EQ(e.k_hat, 3);
  EXPECT_LE(e.k_hat, e.examined.size());
}

TEST(Estimation, ResidualMatrix) {
  const auto x = fixtures::random_graph(4, 0.6, 0.4, 2);
  const Spectrum full = top_eigenpairs(x, 4, EigenRoute::full);
  EXPECT_EQ(residual_matrix(x, full, 0), x.dense());
  Eigen::MatrixXd brute = x.dense();
  for (Index k = 0; k < 2; ++k) brute -= full.values(k) * full.vectors.col(k) * full.vectors.col(k).transpose();
  EXPECT_LT(fixtures::max_abs(residual_matrix(x, full, 2) - brute), 1e-12);
  EXPECT_LT(fixtures::max_abs(residual_matrix(x, full, 4)), 1e-10);
}

TEST(Estimation, RefinementFormula) {
  const auto x = fixtures::random_graph(6, 0.7, 0.3, 9);
  const Spectrum s = top_eigenpairs(x, 2);
  const Eigen::MatrixXd w0 = residual_matrix(x, s, 2);
  const Eigen::VectorXd dt = refine_eigenvalues(s, w0, 2);
  for (Index k = 0; k < 2; ++k) {
    double quad = 0.0;
    for (Index a = 0; a < 6; ++a) {
      double row = 0.0;
      for (Index b = 0; b < 6; ++b) row += w0(a, b) * w0(a, b);
      quad += s.vectors(a, k) * s.vectors(a, k) * row;
    }
    const double d = s.values(k);
    EXPECT_NEAR(dt(k), 1.0 / (1.0 / d + quad / (d * d * d)), 1e-12);
  }
  EXPECT_EQ(refine_eigenvalues(s, Eigen::MatrixXd::Zero(6, 6), 2), s.values.head(2));
}

TEST(Estimation, RefinementRejectsZeroEigenvalue) {
  const SymmetricBinaryMatrix x(Eigen::MatrixXd::Zero(4, 4), false);
  const Spectrum s = top_eigenpairs(x, 1);
  EXPECT_THROW(refine_eigenvalues(s, x.dense(), 1), NumericalError);
}

TEST(Estimation, ShrinkageIsExact) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = fixtures::random_graph(40, 0.5, 0.1, seed, 3);
    const Spectrum s = top_eigenpairs(x, 5);
    const RefinedResidual rr = one_step_refinement(x, s, 5);
    for (Index k = 0; k < 5; ++k) EXPECT_LE(std::abs(rr.d_tilde(k)), std::abs(s.values(k)));
    EXPECT_EQ(rr.w_hat, rr.w_hat.transpose());
    EXPECT_GE(rr.sigma2.minCoeff(), 0.0);
  }
}

TEST(Estimation, RefinedResidualAgainstKnownNoise) {
  const MeanMatrix h = build_mean_matrix(model1_params(500, 100, 0.2, 0.9));
  const auto x = sample_adjacency(h, 17, false);
  const RefinedResidual rr = one_step_refinement(x, top_eigenpairs(x, 3), 3);
  const Eigen::MatrixXd w = x.dense() - h.matrix();
  Eigen::MatrixXd off = rr.w_hat - w;
  off.diagonal().setZero();
  Eigen::MatrixXd noise = w;
  noise.diagonal().setZero();
  EXPECT_LT(off.norm(), 0.2 * noise.norm());
  EXPECT_LT(fixtures::max_abs(off), 0.5 * fixtures::max_abs(noise));
}

TEST(Estimation, UnchangedEigenvaluesReproduceFirstResidual) {
  const auto x = fixtures::random_graph(30, 0.5, 0.2, 5);
  const Spectrum s = top_eigenpairs(x, 2);
  const RefinedResidual rr = refined_residual(x, s, s.values.head(2), 2);
  EXPECT_LT(fixtures::max_abs(rr.w_hat - residual_matrix(x, s, 2)), 1e-12);
}

class CovarianceFixture : public ::testing::TestWithParam<int> {};

TEST_P(CovarianceFixture, KernelsMatchBruteForce) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()));
  const Index n = 4 + GetParam() % 5;  // 4..8
  const Index k = 2 + GetParam() % 2;
  const Eigen::MatrixXd v = fixtures::random_orthonormal(n, k, gen);
  Eigen::VectorXd d(k);
  for (Index c = 0; c < k; ++c) d(c) = (c % 2 ? -1.0 : 1.0) * (5.0 - c);
  const Eigen::MatrixXd var = fixtures::random_variances(n, gen, GetParam() % 2 == 0);
  const Index i = 1, j = n - 1;
  const auto s1 = eigenvector_difference_covariance(d, v, var, i, j, k);
  const Eigen::MatrixXd n1 = fixtures::naive_sigma1(d, v, var, i, j, k);
  EXPECT_LT(fixtures::max_abs(s1.matrix - n1), 1e-12 * std::max(1.0, fixtures::max_abs(n1)));
  const auto s2 = ratio_difference_covariance(d, v, var, i, j, k);
  const Eigen::MatrixXd n2 = fixtures::naive_sigma2(d, v, var, i, j, k);
  EXPECT_LT(fixtures::max_abs(s2.matrix - n2), 1e-12 * std::max(1.0, fixtures::max_abs(n2)));
  EXPECT_EQ(s1.matrix, s1.matrix.transpose());
  EXPECT_EQ(s2.matrix, s2.matrix.transpose());
}

INSTANTIATE_TEST_SUITE_P(SmallNetworks, CovarianceFixture, ::testing::Range(1, 13));

TEST(Estimation, EqualVarianceClosedForm) {
  std::mt19937_64 gen(3);
  const Index n = 7, k = 3, i = 2, j = 5;
  const Eigen::MatrixXd v = fixtures::random_orthonormal(n, k, gen);
  const Eigen::VectorXd d = Eigen::Vector3d(4.0, -3.0, 2.0);
  const double s = 0.2;
  const Eigen::MatrixXd var = Eigen::MatrixXd::Constant(n, n, s);
  const auto cov = eigenvector_difference_covariance(d, v, var, i, j, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) {
      const double expected =
          (2 * s * (a == b) - s * (v(j, a) * v(i, b) + v(i, a) * v(j, b))) / (d(a) * d(b));
      EXPECT_NEAR(cov.matrix(a, b), expected, 1e-14);
    }
}

TEST(Estimation, ZeroVariancesGiveZeroMatrices) {
  std::mt19937_64 gen(5);
  const Eigen::MatrixXd v = fixtures::random_orthonormal(6, 3, gen);
  const Eigen::VectorXd d = Eigen::Vector3d(4.0, 3.0, 2.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(6, 6);
  EXPECT_EQ(ratio_difference_covariance(d, v, zero, 0, 1, 3).matrix, Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(eigenvector_difference_covariance(d, v, zero, 0, 1, 3).matrix, Eigen::MatrixXd::Zero(3, 3));
  EXPECT_TRUE(std::isinf(condition_estimate(Eigen::MatrixXd::Zero(2, 2))));
}

TEST(Estimation, SignFlipCovariance) {
  const auto x = fixtures::random_graph(60, 0.5, 0.1, 12, 3);
  Spectrum s = top_eigenpairs(x, 3);
  const RefinedResidual rr = one_step_refinement(x, s, 3);
  const Eigen::MatrixXd s1 = estimate_sigma1(s, rr, 3, 10, 3).matrix;
  const Eigen::MatrixXd s2 = estimate_sigma2(s, rr, 3, 10, 3).matrix;
  const Eigen::Vector3d flips(-1.0, 1.0, -1.0);
  Spectrum f = s;
  f.vectors = s.vectors * flips.asDiagonal();
  const RefinedResidual rf = one_step_refinement(x, f, 3);
  const Eigen::MatrixXd f1 = estimate_sigma1(f, rf, 3, 10, 3).matrix;
  const Eigen::MatrixXd f2 = estimate_sigma2(f, rf, 3, 10, 3).matrix;
  EXPECT_LT(fixtures::max_abs(f1 - flips.asDiagonal() * s1 * flips.asDiagonal()), 1e-12 * fixtures::max_abs(s1));
  // Ratio k scales by s_k s_1.
  const Eigen::Vector2d r(flips(1) * flips(0), flips(2) * flips(0));
  EXPECT_LT(fixtures::max_abs(f2 - r.asDiagonal() * s2 * r.asDiagonal()), 1e-12 * fixtures::max_abs(s2));
}
