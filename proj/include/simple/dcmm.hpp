#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>

#include "simple/graph_io.hpp"

namespace simple {

// Degree-corrected mixed membership parameters. H = diag(theta) Pi P Pi^T
// diag(theta); the mixed membership model is theta_i = sqrt(theta) for all i.
struct DcmmParams {
  Eigen::VectorXd theta;  // n, entries in (0, 1]
  Eigen::MatrixXd pi;     // n x K, rows on the simplex
  Eigen::MatrixXd p;      // K x K symmetric, nonsingular, entries in [0, 1]

  Index n() const { return pi.rows(); }
  Index k() const { return pi.cols(); }

  // Throws DataError on the first violated invariant.
  void validate() const;
};

// Symmetric n x n matrix with entries in [0, 1].
class MeanMatrix {
 public:
  explicit MeanMatrix(Eigen::MatrixXd h);

  Index n() const { return h_.rows(); }
  const Eigen::MatrixXd& matrix() const { return h_; }
  double operator()(Index i, Index j) const { return h_(i, j); }

 private:
  Eigen::MatrixXd h_;
};

MeanMatrix build_mean_matrix(const DcmmParams& params);

// Independent Bernoulli(h_ij) draws on and above the diagonal, mirrored.
// Without self loops the diagonal is exactly zero and no draws are spent on
// it, so the same seed yields the same off-diagonal pattern either way.
SymmetricBinaryMatrix sample_adjacency(const MeanMatrix& h, std::uint64_t seed,
                                       bool self_loops);

// Node layout shared by both simulation designs: three pure blocks of n0
// nodes (communities 1..3), then four mixed groups a1..a4 of (n - 3 n0) / 4
// nodes each.
struct SimulationLayout {
  Index n = 0;
  Index n0 = 0;
  Index group_size = 0;

  Index pure_start(Index community) const { return community * n0; }
  Index mixed_start(Index group) const { return 3 * n0 + group * group_size; }

  // Two nodes with profile a1 = (0.2, 0.6, 0.2).
  std::pair<Index, Index> size_pair() const {
    return {mixed_start(0), mixed_start(0) + 1};
  }
  // An a1 node and a pure community-2 node.
  std::pair<Index, Index> power_pair() const {
    return {mixed_start(0), pure_start(1)};
  }
};

// Throws DataError unless n - 3 n0 is positive and divisible by 4.
SimulationLayout simulation_layout(Index n, Index n0);

// Unit diagonal, off-diagonal rho / |k - l|.
Eigen::MatrixXd decay_mixing_matrix(Index k, double rho);

DcmmParams model1_params(Index n, Index n0, double rho, double theta);

// Same Pi and P as model 1; 1/theta_i drawn i.i.d. Uniform[1/r, 2/r].
DcmmParams model2_params(Index n, Index n0, double rho, double r,
                         std::uint64_t seed);

// Flat key-value description of a simulated design, as written next to a
// simulated edge list. `signal` is theta for model 1 and r^2 for model 2.
struct ModelSpec {
  int model = 1;
  Index n = 0;
  Index n0 = 0;
  double rho = 0.2;
  double signal = 0.9;
  std::uint64_t seed = 0;
  bool self_loops = false;

  bool operator==(const ModelSpec&) const = default;
};

void write_model_spec(std::ostream& out, const ModelSpec& spec);
ModelSpec read_model_spec(std::istream& in);

// Model 2 degree parameters come from the params stream of spec.seed.
DcmmParams params_from_spec(const ModelSpec& spec);
std::uint64_t adjacency_seed(const ModelSpec& spec);

}  // namespace simple
