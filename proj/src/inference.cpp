#include "simple/inference.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include "simple/chi_square.hpp"
#include "simple/errors.hpp"
#include "simple/parallel.hpp"

namespace simple {

std::string_view method_name(Method method) { return method == Method::t ? "T" : "G"; }

Method parse_method(std::string_view text) {
  if (text == "t" || text == "T") return Method::t;
  if (text == "g" || text == "G") return Method::g;
  throw UsageError("method must be 't' or 'g', got '" + std::string(text) + "'");
}

std::string_view status_name(TestStatus status) {
  switch (status) {
    case TestStatus::ok:
      return "ok";
    case TestStatus::singular_covariance:
      return "singular_covariance";
    case TestStatus::degenerate_node:
      return "degenerate_node";
  }
  return "unknown";
}

PreparedNetwork prepare_network(const SymmetricBinaryMatrix& x, Method method,
                                std::optional<Index> k_override) {
  const Index n = x.n();
  const Index k_min = method == Method::t ? 1 : 2;
  PreparedNetwork prepared;
  prepared.method = method;
  if (k_override) {
    if (*k_override < k_min || *k_override > n) {
      throw UsageError("K override " + std::to_string(*k_override) + " outside [" +
                       std::to_string(k_min) + ", n] for method " +
                       std::string(method_name(method)));
    }
    prepared.k_used = *k_override;
    prepared.spectrum = top_eigenpairs(x, prepared.k_used);
  } else {
    const Index m = std::max(examined_eigenvalue_count(n), std::min(k_min, n));
    prepared.spectrum = top_eigenpairs(x, m);
    prepared.k_estimate = estimate_k(x, prepared.spectrum);
    prepared.k_used = method == Method::t ? prepared.k_estimate->k_for_t()
                                          : prepared.k_estimate->k_for_g();
    if (prepared.k_used > prepared.spectrum.m()) {
      throw UsageError("network too small for K = " + std::to_string(prepared.k_used));
    }
  }
  prepared.residual = one_step_refinement(x, prepared.spectrum, prepared.k_used);
  return prepared;
}

namespace {

TestResult flagged(Method method, Index k, Index df, TestStatus status, double cond) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  return TestResult{method, nan, df, nan, k, cond, status};
}

TestResult finish(Method method, Index k, Index df, const Eigen::VectorXd& diff,
                  const CovarianceEstimate& cov) {
  if (!(cov.condition_estimate <= kMaxCovarianceCondition)) {
    return flagged(method, k, df, TestStatus::singular_covariance, cov.condition_estimate);
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov.matrix);
  const double statistic = diff.dot(ldlt.solve(diff));
  return TestResult{method,     statistic, df, chi2_sf(statistic, static_cast<int>(df)),
                    k,          cov.condition_estimate, TestStatus::ok};
}

}  // namespace

TestResult test_pair(const PreparedNetwork& prepared, Index i, Index j) {
  const Spectrum& spec = prepared.spectrum;
  const Index n = spec.n();
  if (i < 0 || j < 0 || i >= n || j >= n) throw UsageError("node index out of range");
  if (i == j) throw UsageError("a pair test needs two distinct nodes");
  const Index k = prepared.k_used;

  if (prepared.method == Method::t) {
    const Eigen::VectorXd diff =
        (spec.vectors.row(i).head(k) - spec.vectors.row(j).head(k)).transpose();
    return finish(Method::t, k, k, diff, estimate_sigma1(spec, prepared.residual, i, j, k));
  }

  const double eps = degeneracy_threshold(spec);
  if (std::abs(spec.vectors(i, 0)) <= eps || std::abs(spec.vectors(j, 0)) <= eps) {
    return flagged(Method::g, k, k - 1, TestStatus::degenerate_node,
                   std::numeric_limits<double>::quiet_NaN());
  }
  const Eigen::VectorXd diff = ratio_rows(spec, i, k) - ratio_rows(spec, j, k);
  return finish(Method::g, k, k - 1, diff, estimate_sigma2(spec, prepared.residual, i, j, k));
}

TestResult test_t(const SymmetricBinaryMatrix& x, Index i, Index j,
                  std::optional<Index> k_override) {
  return test_pair(prepare_network(x, Method::t, k_override), i, j);
}

TestResult test_g(const SymmetricBinaryMatrix& x, Index i, Index j,
                  std::optional<Index> k_override) {
  return test_pair(prepare_network(x, Method::g, k_override), i, j);
}

bool reject(const TestResult& result, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (!result.ok()) return false;
  return result.statistic > chi2_upper_quantile(alpha, static_cast<int>(result.df));
}

PValueMatrix pvalue_matrix(const SymmetricBinaryMatrix& x, std::span<const Index> nodes,
                           Method method, std::optional<Index> k_override, unsigned threads) {
  if (nodes.size() < 2) throw UsageError("a p-value matrix needs at least two nodes");
  if (std::set<Index>(nodes.begin(), nodes.end()).size() != nodes.size()) {
    throw UsageError("p-value matrix nodes must be distinct");
  }
  for (Index v : nodes)
    if (v < 0 || v >= x.n()) throw UsageError("node " + std::to_string(v) + " out of range");

  const PreparedNetwork prepared = prepare_network(x, method, k_override);
  const auto s = static_cast<Index>(nodes.size());
  PValueMatrix pm;
  pm.nodes.assign(nodes.begin(), nodes.end());
  pm.p = Eigen::MatrixXd::Identity(s, s);
  pm.status.assign(static_cast<std::size_t>(s * s), TestStatus::ok);
  pm.method = method;
  pm.k_used = prepared.k_used;

  std::vector<std::pair<Index, Index>> pairs;
  for (Index a = 0; a < s; ++a)
    for (Index b = a + 1; b < s; ++b) pairs.emplace_back(a, b);
  std::vector<TestResult> results(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t q) {
    results[q] = test_pair(prepared, pm.nodes[static_cast<std::size_t>(pairs[q].first)],
                           pm.nodes[static_cast<std::size_t>(pairs[q].second)]);
  });
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto [a, b] = pairs[q];
    pm.p(a, b) = pm.p(b, a) = results[q].p_value;
    pm.status[static_cast<std::size_t>(a * s + b)] = results[q].status;
    pm.status[static_cast<std::size_t>(b * s + a)] = results[q].status;
  }
  return pm;
}

void write_pvalue_csv(std::ostream& out, const PValueMatrix& pm,
                      std::span<const std::string> labels, int precision) {
  const auto s = static_cast<Index>(pm.nodes.size());
  if (static_cast<Index>(labels.size()) != s) throw UsageError("one label per node required");
  for (Index a = 0; a < s; ++a) out << ',' << labels[static_cast<std::size_t>(a)];
  out << '\n';
  if (precision < 0) {
    out << std::setprecision(17) << std::defaultfloat;
  } else {
    out << std::fixed << std::setprecision(precision);
  }
  for (Index a = 0; a < s; ++a) {
    out << labels[static_cast<std::size_t>(a)];
    for (Index b = 0; b < s; ++b) {
      out << ',';
      if (std::isnan(pm.p(a, b))) {
        out << "NA";
      } else {
        out << pm.p(a, b);
      }
    }
    out << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace simple
