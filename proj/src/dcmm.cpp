#include "simple/dcmm.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "simple/errors.hpp"
#include "simple/rng.hpp"

namespace simple {

void DcmmParams::validate() const {
  const Index n = pi.rows();
  const Index k = pi.cols();
  if (n <= 0 || k <= 0) throw DataError("DCMM needs n >= 1 and K >= 1");
  if (theta.size() != n) throw DataError("theta length must equal n");
  if (p.rows() != k || p.cols() != k) throw DataError("P must be K x K");
  for (Index i = 0; i < n; ++i) {
    if (!(theta(i) > 0.0 && theta(i) <= 1.0)) {
      throw DataError("theta_" + std::to_string(i) + " outside (0, 1]");
    }
    if ((pi.row(i).array() < 0.0).any()) {
      throw DataError("membership row " + std::to_string(i) + " has a negative entry");
    }
    if (std::abs(pi.row(i).sum() - 1.0) > 1e-12) {
      throw DataError("membership row " + std::to_string(i) + " does not sum to 1");
    }
  }
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      if (p(a, b) < 0.0 || p(a, b) > 1.0) throw DataError("P entries must lie in [0, 1]");
      if (p(a, b) != p(b, a)) throw DataError("P must be symmetric");
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(p);
  if (lu.rank() < k) throw DataError("P must be nonsingular");
}

MeanMatrix::MeanMatrix(Eigen::MatrixXd h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols() || h_.rows() == 0) throw DataError("mean matrix must be square");
  const Index n = h_.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const double v = h_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("mean matrix entry (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") = " + std::to_string(v) +
                        " outside [0, 1]");
      }
      if (v != h_(j, i)) throw DataError("mean matrix is not symmetric");
    }
  }
}

MeanMatrix build_mean_matrix(const DcmmParams& params) {
  params.validate();
  const Eigen::MatrixXd b = params.theta.asDiagonal() * params.pi;
  const Eigen::MatrixXd bp = b * params.p;
  const Index n = params.n();
  Eigen::MatrixXd h(n, n);
  // Fill the lower triangle and mirror so the result is exactly symmetric.
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const double v = bp.row(i).dot(b.row(j));
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return MeanMatrix(std::move(h));
}

SymmetricBinaryMatrix sample_adjacency(const MeanMatrix& h, std::uint64_t seed,
                                       bool self_loops) {
  const Index n = h.n();
  Rng rng(seed);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (rng.bernoulli(h(i, j))) {
        x(i, j) = 1.0;
        x(j, i) = 1.0;
      }
    }
  }
  if (self_loops) {
    for (Index i = 0; i < n; ++i) x(i, i) = rng.bernoulli(h(i, i)) ? 1.0 : 0.0;
  }
  return SymmetricBinaryMatrix(std::move(x), self_loops);
}

SimulationLayout simulation_layout(Index n, Index n0) {
  if (n0 < 0 || n - 3 * n0 <= 0 || (n - 3 * n0) % 4 != 0) {
    throw DataError("n - 3 n0 must be positive and divisible by 4 (n = " +
                    std::to_string(n) + ", n0 = " + std::to_string(n0) + ")");
  }
  return SimulationLayout{n, n0, (n - 3 * n0) / 4};
}

Eigen::MatrixXd decay_mixing_matrix(Index k, double rho) {
  Eigen::MatrixXd p(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b)
      p(a, b) = a == b ? 1.0 : rho / static_cast<double>(std::abs(a - b));
  return p;
}

namespace {

Eigen::MatrixXd simulation_memberships(const SimulationLayout& layout) {
  constexpr double third = 1.0 / 3.0;
  const double mixed[4][3] = {
      {0.2, 0.6, 0.2}, {0.6, 0.2, 0.2}, {0.2, 0.2, 0.6}, {third, third, third}};
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(layout.n, 3);
  for (Index c = 0; c < 3; ++c)
    for (Index r = 0; r < layout.n0; ++r) pi(layout.pure_start(c) + r, c) = 1.0;
  for (Index g = 0; g < 4; ++g)
    for (Index r = 0; r < layout.group_size; ++r)
      for (Index c = 0; c < 3; ++c) pi(layout.mixed_start(g) + r, c) = mixed[g][c];
  return pi;
}

}  // namespace

DcmmParams model1_params(Index n, Index n0, double rho, double theta) {
  const auto layout = simulation_layout(n, n0);
  if (!(theta > 0.0 && theta <= 1.0)) throw DataError("theta must lie in (0, 1]");
  DcmmParams params{Eigen::VectorXd::Constant(n, std::sqrt(theta)),
                    simulation_memberships(layout), decay_mixing_matrix(3, rho)};
  params.validate();
  return params;
}

DcmmParams model2_params(Index n, Index n0, double rho, double r,
                         std::uint64_t seed) {
  const auto layout = simulation_layout(n, n0);
  if (!(r > 0.0 && r <= 1.0)) throw DataError("r must lie in (0, 1]");
  Rng rng(seed);
  Eigen::VectorXd theta(n);
  for (Index i = 0; i < n; ++i) theta(i) = 1.0 / rng.uniform(1.0 / r, 2.0 / r);
  DcmmParams params{std::move(theta), simulation_memberships(layout),
                    decay_mixing_matrix(3, rho)};
  params.validate();
  return params;
}

void write_model_spec(std::ostream& out, const ModelSpec& spec) {
  out << std::setprecision(17);
  out << "model " << spec.model << '\n';
  out << "n " << spec.n << '\n';
  out << "n0 " << spec.n0 << '\n';
  out << "rho " << spec.rho << '\n';
  out << (spec.model == 1 ? "theta " : "r2 ") << spec.signal << '\n';
  out << "seed " << spec.seed << '\n';
  out << "self_loops " << (spec.self_loops ? 1 : 0) << '\n';
}

ModelSpec read_model_spec(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream fields(line);
    std::string key, value, extra;
    if (!(fields >> key >> value) || (fields >> extra)) {
      throw DataError("parameter file line " + std::to_string(line_no) +
                      ": expected 'key value'");
    }
    kv[key] = value;
  }
  auto take = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError("parameter file lacks key '" + key + "'");
    return it->second;
  };
  try {
    ModelSpec spec;
    spec.model = std::stoi(take("model"));
    spec.n = std::stoll(take("n"));
    spec.n0 = std::stoll(take("n0"));
    spec.rho = std::stod(take("rho"));
    spec.signal = std::stod(take(spec.model == 1 ? "theta" : "r2"));
    spec.seed = std::stoull(take("seed"));
    if (kv.count("self_loops")) spec.self_loops = std::stoi(kv["self_loops"]) != 0;
    return spec;
  } catch (const std::logic_error&) {
    throw DataError("parameter file has a non-numeric value");
  }
}

DcmmParams params_from_spec(const ModelSpec& spec) {
  switch (spec.model) {
    case 1:
      return model1_params(spec.n, spec.n0, spec.rho, spec.signal);
    case 2:
      if (!(spec.signal > 0.0 && spec.signal <= 1.0)) throw DataError("r2 must lie in (0, 1]");
      return model2_params(spec.n, spec.n0, spec.rho, std::sqrt(spec.signal),
                           derive_seed(spec.seed, SeedStream::model_params, 0));
    default:
      throw DataError("model must be 1 or 2");
  }
}

std::uint64_t adjacency_seed(const ModelSpec& spec) {
  return derive_seed(spec.seed, SeedStream::adjacency, 0);
}

}  // namespace simple
