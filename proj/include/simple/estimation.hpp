#pragma once

#include <Eigen/Dense>

#include "simple/graph_io.hpp"
#include "simple/spectra.hpp"

namespace simple {

// Eigenvalues examined by the K threshold rule: min(n, 50).
Index examined_eigenvalue_count(Index n);

struct KEstimate {
  Index k_hat = 0;
  double threshold = 0.0;  // 2.01 log(n) * max degree
  Index max_degree = 0;
  Eigen::VectorXd examined;  // eigenvalues compared against the threshold

  Index k_for_t() const { return std::max<Index>(k_hat, 1); }
  Index k_for_g() const { return std::max<Index>(k_hat, 2); }
};

// Counts eigenvalues with d_hat^2 above the threshold. Throws NumericalError
// when every examined eigenvalue exceeds it, since the count would then be
// censored by the number examined.
KEstimate estimate_k(const SymmetricBinaryMatrix& x, const Eigen::VectorXd& values);
KEstimate estimate_k(const SymmetricBinaryMatrix& x, const Spectrum& spec);

// W0 = X - sum_{k' < k} d_hat_k' v_hat_k' v_hat_k'^T.
Eigen::MatrixXd residual_matrix(const SymmetricBinaryMatrix& x, const Spectrum& spec, Index k);

// d_tilde_k = [1/d_hat_k + v_hat_k^T diag(W0^2) v_hat_k / d_hat_k^3]^-1, with
// diag(W0^2) holding the row sums of squared residuals.
Eigen::VectorXd refine_eigenvalues(const Spectrum& spec, const Eigen::MatrixXd& w0, Index k);

struct RefinedResidual {
  Eigen::MatrixXd w_hat;
  Eigen::VectorXd d_tilde;
  Eigen::MatrixXd sigma2;  // entrywise w_hat^2
};

RefinedResidual refined_residual(const SymmetricBinaryMatrix& x, const Spectrum& spec,
                                 const Eigen::VectorXd& d_tilde, Index k);

// Residual, eigenvalue shrinkage and refit in one call.
RefinedResidual one_step_refinement(const SymmetricBinaryMatrix& x, const Spectrum& spec,
                                    Index k);

struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  // Reciprocal of the LDL^T reciprocal-condition estimate; +inf if singular.
  double condition_estimate = 0.0;

  Index dim() const { return matrix.rows(); }
};

double condition_estimate(const Eigen::MatrixXd& symmetric);

// Covariance of V(i) - V(j) built from eigenvalues, eigenvectors and entry
// variances. Shared by the plug-in estimator and the simulation oracle.
CovarianceEstimate eigenvector_difference_covariance(const Eigen::VectorXd& values,
                                                     const Eigen::MatrixXd& vectors,
                                                     const Eigen::MatrixXd& variances, Index i,
                                                     Index j, Index k);

// Covariance of Y_i - Y_j for the eigenvector ratios. `scales` plays the role
// of the eigenvalue means (true t_k, or d_hat_k for the plug-in).
CovarianceEstimate ratio_difference_covariance(const Eigen::VectorXd& scales,
                                               const Eigen::MatrixXd& vectors,
                                               const Eigen::MatrixXd& variances, Index i,
                                               Index j, Index k);

CovarianceEstimate estimate_sigma1(const Spectrum& spec, const RefinedResidual& rr, Index i,
                                   Index j, Index k);
CovarianceEstimate estimate_sigma2(const Spectrum& spec, const RefinedResidual& rr, Index i,
                                   Index j, Index k);

}  // namespace simple
