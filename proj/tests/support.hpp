#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "simple/graph_io.hpp"

namespace simple::fixtures {

inline std::string data_path(const std::string& name) { return std::string(SIMPLE_DATA_DIR) + "/" + name; }

inline SymmetricBinaryMatrix karate() {
  LoadOptions opts;
  opts.indexing = Indexing::one_based;
  return adjacency(load_edge_list(data_path("karate.txt"), opts));
}

inline Eigen::MatrixXd random_orthonormal(Index n, Index k, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(n, k);
  for (Index c = 0; c < k; ++c)
    for (Index r = 0; r < n; ++r) a(r, c) = z(gen);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(n, k);
}

inline Eigen::MatrixXd random_variances(Index n, std::mt19937_64& gen, bool zero_diagonal) {
  std::uniform_real_distribution<double> u(0.05, 0.25);
  Eigen::MatrixXd s(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = a; b < n; ++b) s(a, b) = s(b, a) = u(gen);
  if (zero_diagonal) s.diagonal().setZero();
  return s;
}

// Erdos-Renyi style graph with a planted block structure.
inline SymmetricBinaryMatrix random_graph(Index n, double p_in, double p_out, std::uint64_t seed,
                                          Index blocks = 2) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b) {
      const double p = (a % blocks == b % blocks) ? p_in : p_out;
      if (u(gen) < p) x(a, b) = x(b, a) = 1.0;
    }
  return SymmetricBinaryMatrix(x, false);
}

// Covariance of a linear functional L(W) = sum_{r,l} coef(r, l) w_rl of a
// symmetric noise matrix with independent entries on and above the diagonal,
// by summing var(w_ab) g g^T over unordered pairs.
template <typename Coef>
Eigen::MatrixXd linear_form_covariance(Index n, Index dim, const Eigen::MatrixXd& var,
                                       Coef coef) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd g(dim);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) {
      for (Index c = 0; c < dim; ++c) g(c) = a == b ? coef(c, a, a) : coef(c, a, b) + coef(c, b, a);
      s += var(a, b) * g * g.transpose();
    }
  }
  return s;
}

// Covariance of (e_i - e_j)^T W V D^-1.
inline Eigen::MatrixXd naive_sigma1(const Eigen::VectorXd& d, const Eigen::MatrixXd& v,
                                    const Eigen::MatrixXd& var, Index i, Index j, Index k) {
  return linear_form_covariance(v.rows(), k, var, [&](Index c, Index r, Index l) {
    const double side = (r == i ? 1.0 : 0.0) - (r == j ? 1.0 : 0.0);
    return side * v(l, c) / d(c);
  });
}

// Covariance of the first-order ratio perturbation f, component c referring
// to eigenvector c + 1.
inline Eigen::MatrixXd naive_sigma2(const Eigen::VectorXd& t, const Eigen::MatrixXd& v,
                                    const Eigen::MatrixXd& var, Index i, Index j, Index k) {
  return linear_form_covariance(v.rows(), k - 1, var, [&](Index c, Index r, Index l) {
    auto part = [&](Index node) {
      const double v1 = v(node, 0);
      return v(l, c + 1) / (t(c + 1) * v1) - v(node, c + 1) * v(l, 0) / (t(0) * v1 * v1);
    };
    double g = 0.0;
    if (r == i) g += part(i);
    if (r == j) g -= part(j);
    return g;
  });
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace simple::fixtures
