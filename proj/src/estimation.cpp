#include "simple/estimation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "simple/errors.hpp"

namespace simple {

namespace {

constexpr double kThresholdConstant = 2.01;

void check_k(const Spectrum& spec, Index k) {
  if (k < 0 || k > spec.m()) {
    throw UsageError("k = " + std::to_string(k) + " exceeds the " + std::to_string(spec.m()) +
                     " retained eigenpairs");
  }
}

void check_pair(Index n, Index i, Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n) throw UsageError("node index out of range");
  if (i == j) throw UsageError("covariance needs two distinct nodes");
}

Eigen::MatrixXd deflate(const SymmetricBinaryMatrix& x, const Spectrum& spec,
                        const Eigen::VectorXd& values, Index k) {
  Eigen::MatrixXd w = x.dense();
  if (k == 0) return w;
  const auto v = spec.vectors.leftCols(k);
  const Eigen::MatrixXd low_rank = v * values.head(k).asDiagonal() * v.transpose();
  const Index n = x.n();
  // Exact symmetry: take the lower triangle and mirror it.
  for (Index c = 0; c < n; ++c) {
    for (Index r = c; r < n; ++r) {
      const double value = w(r, c) - low_rank(r, c);
      w(r, c) = value;
      w(c, r) = value;
    }
  }
  return w;
}

void symmetrize_from_upper(Eigen::MatrixXd& m) {
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = c + 1; r < m.rows(); ++r) m(r, c) = m(c, r);
}

}  // namespace

Index examined_eigenvalue_count(Index n) { return std::min<Index>(n, 50); }

KEstimate estimate_k(const SymmetricBinaryMatrix& x, const Eigen::VectorXd& values) {
  KEstimate est;
  est.max_degree = max_degree(x);
  const double n = static_cast<double>(x.n());
  est.threshold = kThresholdConstant * std::log(n) * static_cast<double>(est.max_degree);
  est.examined = values;
  for (Index k = 0; k < values.size(); ++k) {
    if (values(k) * values(k) > est.threshold) ++est.k_hat;
  }
  if (est.k_hat == values.size() && values.size() < x.n()) {
    throw NumericalError("all " + std::to_string(values.size()) +
                         " examined eigenvalues exceed the K threshold; examine more");
  }
  return est;
}

KEstimate estimate_k(const SymmetricBinaryMatrix& x, const Spectrum& spec) {
  return estimate_k(x, spec.values);
}

Eigen::MatrixXd residual_matrix(const SymmetricBinaryMatrix& x, const Spectrum& spec, Index k) {
  check_k(spec, k);
  return deflate(x, spec, spec.values, k);
}

Eigen::VectorXd refine_eigenvalues(const Spectrum& spec, const Eigen::MatrixXd& w0, Index k) {
  check_k(spec, k);
  const Eigen::VectorXd row_energy = w0.array().square().colwise().sum().transpose();
  Eigen::VectorXd refined(k);
  for (Index c = 0; c < k; ++c) {
    const double d = spec.values(c);
    if (d == 0.0) throw NumericalError("cannot refine a zero eigenvalue");
    const double quad = (spec.vectors.col(c).array().square() * row_energy.array()).sum();
    refined(c) = 1.0 / (1.0 / d + quad / (d * d * d));
  }
  return refined;
}

RefinedResidual refined_residual(const SymmetricBinaryMatrix& x, const Spectrum& spec,
                                 const Eigen::VectorXd& d_tilde, Index k) {
  check_k(spec, k);
  if (d_tilde.size() < k) throw UsageError("refined eigenvalue vector shorter than k");
  RefinedResidual rr;
  rr.w_hat = deflate(x, spec, d_tilde, k);
  rr.d_tilde = d_tilde.head(k);
  rr.sigma2 = rr.w_hat.array().square();
  return rr;
}

RefinedResidual one_step_refinement(const SymmetricBinaryMatrix& x, const Spectrum& spec,
                                    Index k) {
  const Eigen::MatrixXd w0 = residual_matrix(x, spec, k);
  return refined_residual(x, spec, refine_eigenvalues(spec, w0, k), k);
}

double condition_estimate(const Eigen::MatrixXd& symmetric) {
  if (!symmetric.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetric);
  if (ldlt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double rcond = ldlt.rcond();
  return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

CovarianceEstimate eigenvector_difference_covariance(const Eigen::VectorXd& values,
                                                     const Eigen::MatrixXd& vectors,
                                                     const Eigen::MatrixXd& variances, Index i,
                                                     Index j, Index k) {
  const Index n = vectors.rows();
  check_pair(n, i, j);
  if (k < 1 || k > vectors.cols() || k > values.size()) throw UsageError("bad k for covariance");
  const Eigen::VectorXd weight = variances.row(i).transpose() + variances.row(j).transpose();
  const double s_ij = variances(i, j);
  Eigen::MatrixXd m(k, k);
  for (Index a = 0; a < k; ++a) {
    if (values(a) == 0.0) throw NumericalError("zero eigenvalue in covariance");
    for (Index b = a; b < k; ++b) {
      double sum = 0.0;
      for (Index l = 0; l < n; ++l) sum += weight(l) * vectors(l, a) * vectors(l, b);
      sum -= s_ij * (vectors(j, a) * vectors(i, b) + vectors(i, a) * vectors(j, b));
      m(a, b) = sum / (values(a) * values(b));
    }
  }
  symmetrize_from_upper(m);
  return {m, condition_estimate(m)};
}

CovarianceEstimate ratio_difference_covariance(const Eigen::VectorXd& scales,
                                               const Eigen::MatrixXd& vectors,
                                               const Eigen::MatrixXd& variances, Index i,
                                               Index j, Index k) {
  const Index n = vectors.rows();
  check_pair(n, i, j);
  if (k < 2 || k > vectors.cols() || k > scales.size()) throw UsageError("bad k for ratio covariance");
  for (Index c = 0; c < k; ++c)
    if (scales(c) == 0.0) throw NumericalError("zero eigenvalue in ratio covariance");
  const double vi = vectors(i, 0), vj = vectors(j, 0);
  if (vi == 0.0 || vj == 0.0) throw NumericalError("zero leading-eigenvector entry");

  // coef(t, a, l) = t_1 v_{a+1}(l) / (t_{a+1} v_1(t)) - v_{a+1}(t) v_1(l) / v_1(t)^2
  const Index dim = k - 1;
  auto coef = [&](Index t, Index a, Index l) {
    const double vt = vectors(t, 0);
    return scales(0) * vectors(l, a + 1) / (scales(a + 1) * vt) -
           vectors(t, a + 1) * vectors(l, 0) / (vt * vt);
  };
  Eigen::MatrixXd ci(n, dim), cj(n, dim);
  Eigen::VectorXd cross(dim);
  for (Index a = 0; a < dim; ++a) {
    for (Index l = 0; l < n; ++l) {
      ci(l, a) = coef(i, a, l);
      cj(l, a) = coef(j, a, l);
    }
    cross(a) = coef(i, a, j) - coef(j, a, i);
  }
  Eigen::VectorXd wi = variances.row(i).transpose();
  Eigen::VectorXd wj = variances.row(j).transpose();
  wi(j) = 0.0;  // the i-row sum runs over l != j
  wj(i) = 0.0;  // the j-row sum runs over l != i
  const double s_ij = variances(i, j);
  const double scale = 1.0 / (scales(0) * scales(0));
  Eigen::MatrixXd m(dim, dim);
  for (Index a = 0; a < dim; ++a) {
    for (Index b = a; b < dim; ++b) {
      double sum = 0.0;
      for (Index l = 0; l < n; ++l) sum += wi(l) * ci(l, a) * ci(l, b) + wj(l) * cj(l, a) * cj(l, b);
      sum += s_ij * cross(a) * cross(b);
      m(a, b) = scale * sum;
    }
  }
  symmetrize_from_upper(m);
  return {m, condition_estimate(m)};
}

CovarianceEstimate estimate_sigma1(const Spectrum& spec, const RefinedResidual& rr, Index i,
                                   Index j, Index k) {
  check_k(spec, k);
  return eigenvector_difference_covariance(spec.values, spec.vectors, rr.sigma2, i, j, k);
}

CovarianceEstimate estimate_sigma2(const Spectrum& spec, const RefinedResidual& rr, Index i,
                                   Index j, Index k) {
  check_k(spec, k);
  const double eps = degeneracy_threshold(spec);
  if (std::abs(spec.vectors(i, 0)) <= eps || std::abs(spec.vectors(j, 0)) <= eps) {
    throw NumericalError("degenerate leading-eigenvector entry at node " +
                         std::to_string(std::abs(spec.vectors(i, 0)) <= eps ? i : j));
  }
  return ratio_difference_covariance(spec.values, spec.vectors, rr.sigma2, i, j, k);
}

}  // namespace simple
