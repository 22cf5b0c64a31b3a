#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simple/estimation.hpp"
#include "simple/graph_io.hpp"
#include "simple/spectra.hpp"

namespace simple {

// T: eigenvector rows, chi-square with K df under the null.
// G: eigenvector ratios (degree corrected), chi-square with K - 1 df.
enum class Method { t, g };

std::string_view method_name(Method method);
Method parse_method(std::string_view text);

enum class TestStatus { ok, singular_covariance, degenerate_node };

std::string_view status_name(TestStatus status);

// Covariance estimates with a larger condition estimate are rejected as
// singular rather than regularized.
inline constexpr double kMaxCovarianceCondition = 1e12;

struct TestResult {
  Method method = Method::t;
  double statistic = 0.0;
  Index df = 0;
  double p_value = 1.0;
  Index k_used = 0;
  double condition_estimate = 0.0;
  TestStatus status = TestStatus::ok;

  bool ok() const { return status == TestStatus::ok; }
};

// Everything a pairwise test needs that does not depend on the pair: the
// spectrum, the chosen K and the refined noise variances. Immutable once
// built, so many pairs can be tested concurrently against one instance.
struct PreparedNetwork {
  Method method = Method::t;
  Index k_used = 0;
  std::optional<KEstimate> k_estimate;  // set when K was estimated
  Spectrum spectrum;
  RefinedResidual residual;
};

// K = *k_override when given, else max(K_hat, 1) for T and max(K_hat, 2) for G.
PreparedNetwork prepare_network(const SymmetricBinaryMatrix& x, Method method,
                                std::optional<Index> k_override = std::nullopt);

// Throws UsageError for i == j or out-of-range nodes. Numerical trouble with
// the pair is reported through TestResult::status with NaN statistic/p-value.
TestResult test_pair(const PreparedNetwork& prepared, Index i, Index j);

TestResult test_t(const SymmetricBinaryMatrix& x, Index i, Index j,
                  std::optional<Index> k_override = std::nullopt);
TestResult test_g(const SymmetricBinaryMatrix& x, Index i, Index j,
                  std::optional<Index> k_override = std::nullopt);

// statistic > upper (1 - alpha) quantile of chi-square(df).
bool reject(const TestResult& result, double alpha);

struct PValueMatrix {
  std::vector<Index> nodes;
  Eigen::MatrixXd p;                 // symmetric, unit diagonal, NaN where flagged
  std::vector<TestStatus> status;    // row-major |nodes| x |nodes|
  Method method = Method::t;
  Index k_used = 0;

  TestStatus status_at(Index s, Index t) const {
    return status[static_cast<std::size_t>(s * static_cast<Index>(nodes.size()) + t)];
  }
};

PValueMatrix pvalue_matrix(const SymmetricBinaryMatrix& x, std::span<const Index> nodes,
                           Method method, std::optional<Index> k_override = std::nullopt,
                           unsigned threads = 1);

// Header row of labels, then one row per node. `precision` < 0 writes full
// round-trip precision; otherwise fixed with that many decimals.
void write_pvalue_csv(std::ostream& out, const PValueMatrix& pm,
                      std::span<const std::string> labels, int precision);

}  // namespace simple
