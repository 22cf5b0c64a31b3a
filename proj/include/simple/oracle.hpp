#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simple/dcmm.hpp"
#include "simple/estimation.hpp"
#include "simple/graph_io.hpp"

namespace simple {

// Settings for the eigenvalue-mean computation. Moments E[W^l] are
// estimated by averaging matrix powers over independent noise draws.
struct TkOptions {
  Index moment_samples = 200;
  std::uint64_t seed = 1;
  Index max_order = 12;       // cap on the series length L
  std::optional<double> c0;   // eigen-ratio gap; derived from d when absent
};

struct TkSolution {
  double t = 0.0;
  double lower = 0.0;  // bracket [a_k, b_k]
  double upper = 0.0;
  double c0 = 0.0;
  Index order = 1;     // L actually used
  bool order_capped = false;
};

// Population quantities available only in simulation, where H is known.
struct GroundTruth {
  Eigen::MatrixXd h;
  Eigen::MatrixXd v;      // n x K, orthonormal, same sign convention as Spectrum
  Eigen::VectorXd d;      // |d_1| >= ... >= |d_K| > 0
  Eigen::MatrixXd var_w;  // Var(w_ab); zero diagonal without self loops
  Eigen::VectorXd t;      // empty unless computed
  std::vector<TkSolution> t_details;
  bool self_loops = false;
  double alpha_n = 0.0;   // sqrt(max column sum of var_w)

  Index n() const { return h.rows(); }
  Index k() const { return d.size(); }
};

// Exact eigendecomposition of H through the K x K reduction H = B P B^T with
// B = diag(theta) Pi. Throws DataError if H has rank below K. When `tk` is
// set the eigenvalue means t_k are computed as well.
GroundTruth ground_truth(const DcmmParams& params, bool self_loops,
                         std::optional<TkOptions> tk = TkOptions{});

// min |d_a| / |d_b| - 1 over a < b with d_a != -d_b; 1 when K = 1.
double eigen_gap_constant(const Eigen::VectorXd& d);

// V^T E[W^l] V for l = 0..max_order (entries 0 and 1 are left zero).
std::vector<Eigen::MatrixXd> estimate_noise_moments(const GroundTruth& gt, Index samples,
                                                    Index max_order, std::uint64_t seed);

// Smallest L with (alpha_n / |z|)^L <= min(n^-4, |z|^-4) over every bracket.
// Returns {L, capped}.
std::pair<Index, bool> series_order(const GroundTruth& gt, double c0, Index max_order);

// Root of the eigenvalue-mean equation on [a_k, b_k] for eigenvalue k
// (0-based) given precomputed moments. Throws NumericalError when the bracket
// holds no sign change.
TkSolution solve_tk(const GroundTruth& gt, const std::vector<Eigen::MatrixXd>& moments,
                    Index order, bool capped, Index k, double c0);

TkSolution compute_tk(const GroundTruth& gt, Index k, const TkOptions& options = {});

// d_k + v_k^T E[W^2] v_k / d_k with the second moment evaluated exactly.
double tk_two_term(const GroundTruth& gt, Index k);

CovarianceEstimate true_sigma1(const GroundTruth& gt, Index i, Index j);
CovarianceEstimate true_sigma2(const GroundTruth& gt, Index i, Index j);

// Noise matrix W = X - H of a sample drawn from gt's model.
Eigen::MatrixXd noise_matrix(const GroundTruth& gt, const SymmetricBinaryMatrix& x);

// First-order noise terms whose covariances are Sigma_1 and Sigma_2:
// (e_i - e_j)^T W V D^-1, and the vector f of ratio perturbations.
Eigen::VectorXd eigenvector_linearization(const GroundTruth& gt, const Eigen::MatrixXd& w,
                                          Index i, Index j);
Eigen::VectorXd ratio_linearization(const GroundTruth& gt, const Eigen::MatrixXd& w, Index i,
                                    Index j);

struct ResidualStats {
  std::vector<double> residuals;  // r per sample, unscaled
  double median_abs_scaled = 0.0;  // median |r| sqrt(n)
  double p95_abs_scaled = 0.0;     // 95th percentile |r| sqrt(n)
  double median_scaled = 0.0;      // signed median r sqrt(n)
};

// r = t_k (v_hat_k(i) - v_k(i)) - e_i^T W v_k per sample, with v_hat_k
// sign-aligned to v_k. Requires gt.t.
ResidualStats expansion_residual(const GroundTruth& gt,
                                 std::span<const SymmetricBinaryMatrix> samples, Index k,
                                 Index i);

// Spectral-norm errors of the plug-in covariances against the truth, with the
// sample eigenvectors aligned to the population ones first.
double sigma1_error(const GroundTruth& gt, const SymmetricBinaryMatrix& x, Index i, Index j);
double sigma2_error(const GroundTruth& gt, const SymmetricBinaryMatrix& x, Index i, Index j);

// n^2 theta for the mixed membership scaling (theta = mean theta_i^2) and
// n theta_min^2 for the degree-corrected one.
double sigma1_scale(const DcmmParams& params);
double sigma2_scale(const DcmmParams& params);

}  // namespace simple
