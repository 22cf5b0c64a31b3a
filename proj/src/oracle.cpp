#include "simple/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "simple/errors.hpp"
#include "simple/rng.hpp"
#include "simple/spectra.hpp"

namespace simple {

namespace {

double spectral_norm(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Nearest-rank percentile of an already sorted sample.
double percentile_sorted(const std::vector<double>& sorted, double q) {
  const auto m = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * m));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double median_sorted(const std::vector<double>& sorted) {
  const std::size_t m = sorted.size();
  return m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
}

std::pair<double, double> bracket(double d, double c0) {
  const double f = 1.0 + 0.5 * c0;
  return d > 0.0 ? std::pair{d / f, d * f} : std::pair{d * f, d / f};
}

}  // namespace

double eigen_gap_constant(const Eigen::VectorXd& d) {
  double ratio = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < d.size(); ++a)
    for (Index b = a + 1; b < d.size(); ++b)
      if (d(a) != -d(b)) ratio = std::min(ratio, std::abs(d(a)) / std::abs(d(b)));
  return std::isinf(ratio) ? 1.0 : ratio - 1.0;
}

GroundTruth ground_truth(const DcmmParams& params, bool self_loops,
                         std::optional<TkOptions> tk) {
  const MeanMatrix mean = build_mean_matrix(params);
  const Index n = params.n();
  const Index k = params.k();
  GroundTruth gt;
  gt.h = mean.matrix();
  gt.self_loops = self_loops;

  const Eigen::MatrixXd b = params.theta.asDiagonal() * params.pi;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd r = q.transpose() * b;
  Eigen::MatrixXd core = r * params.p * r.transpose();
  core = 0.5 * (core + core.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(core);
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& lambda = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    if (std::abs(lambda(x)) != std::abs(lambda(y))) return std::abs(lambda(x)) > std::abs(lambda(y));
    return lambda(x) > lambda(y);
  });
  Spectrum spec;
  spec.values.resize(k);
  spec.vectors.resize(n, k);
  for (Index c = 0; c < k; ++c) {
    spec.values(c) = lambda(order[static_cast<std::size_t>(c)]);
    spec.vectors.col(c) = q * es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
  }
  if (std::abs(spec.values(k - 1)) <= 1e-8 * std::abs(spec.values(0))) {
    throw DataError("mean matrix has rank below K = " + std::to_string(k));
  }
  spec = orient_signs(std::move(spec));
  gt.d = spec.values;
  gt.v = spec.vectors;

  gt.var_w = (gt.h.array() * (1.0 - gt.h.array())).matrix();
  if (!self_loops) gt.var_w.diagonal().setZero();
  gt.alpha_n = std::sqrt(gt.var_w.colwise().sum().maxCoeff());

  if (tk) {
    const double c0 = tk->c0.value_or(eigen_gap_constant(gt.d));
    const auto [order_used, capped] = series_order(gt, c0, tk->max_order);
    const auto moments = estimate_noise_moments(gt, tk->moment_samples, order_used, tk->seed);
    gt.t.resize(k);
    for (Index c = 0; c < k; ++c) {
      gt.t_details.push_back(solve_tk(gt, moments, order_used, capped, c, c0));
      gt.t(c) = gt.t_details.back().t;
    }
  }
  return gt;
}

Eigen::MatrixXd noise_matrix(const GroundTruth& gt, const SymmetricBinaryMatrix& x) {
  if (x.n() != gt.n()) throw UsageError("sample size does not match the ground truth");
  return x.dense() - gt.h;
}

std::vector<Eigen::MatrixXd> estimate_noise_moments(const GroundTruth& gt, Index samples,
                                                    Index max_order, std::uint64_t seed) {
  const Index k = gt.k();
  std::vector<Eigen::MatrixXd> moments(static_cast<std::size_t>(max_order + 1),
                                       Eigen::MatrixXd::Zero(k, k));
  if (max_order < 2) return moments;
  if (samples < 1) throw UsageError("moment estimation needs at least one sample");
  const MeanMatrix mean(gt.h);
  for (Index s = 0; s < samples; ++s) {
    const auto x = sample_adjacency(mean, derive_seed(seed, SeedStream::moments,
                                                      static_cast<std::uint64_t>(s)),
                                    gt.self_loops);
    const Eigen::MatrixXd w = noise_matrix(gt, x);
    Eigen::MatrixXd y = gt.v;
    for (Index l = 1; l <= max_order; ++l) {
      y = w * y;
      if (l >= 2) moments[static_cast<std::size_t>(l)] += gt.v.transpose() * y;
    }
  }
  for (auto& m : moments) m /= static_cast<double>(samples);
  return moments;
}

std::pair<Index, bool> series_order(const GroundTruth& gt, double c0, Index max_order) {
  if (gt.alpha_n == 0.0) return {1, false};
  const double n = static_cast<double>(gt.n());
  Index order = 1;
  bool capped = false;
  constexpr int kGrid = 64;
  for (Index c = 0; c < gt.k(); ++c) {
    const auto [lo, hi] = bracket(gt.d(c), c0);
    for (int g = 0; g <= kGrid; ++g) {
      const double z = std::abs(lo + (hi - lo) * g / kGrid);
      const double ratio = gt.alpha_n / z;
      if (ratio >= 1.0) {
        capped = true;
        continue;
      }
      const double bound = std::min(std::pow(n, -4.0), std::pow(z, -4.0));
      const double needed = std::ceil(std::log(bound) / std::log(ratio) - 1e-12);
      order = std::max(order, static_cast<Index>(std::max(1.0, needed)));
    }
  }
  if (order > max_order || capped) return {max_order, true};
  return {order, false};
}

TkSolution solve_tk(const GroundTruth& gt, const std::vector<Eigen::MatrixXd>& moments,
                    Index order, bool capped, Index k, double c0) {
  const Index kk = gt.k();
  if (k < 0 || k >= kk) throw UsageError("eigenvalue index out of range");
  if (!(c0 > 0.0)) throw DataError("eigen-gap constant must be positive (tied eigenvalues?)");
  if (static_cast<Index>(moments.size()) <= order) throw UsageError("too few moments for order");
  const double dk = gt.d(k);

  auto resolvent = [&](double z) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(kk, kk) * (-1.0 / z);
    double zp = z * z;
    for (Index l = 2; l <= order; ++l) {
      zp *= z;  // z^(l+1)
      r -= moments[static_cast<std::size_t>(l)] / zp;
    }
    return r;
  };
  auto g = [&](double z) {
    const Eigen::MatrixXd r = resolvent(z);
    double inner = r(k, k);
    if (kk > 1) {
      std::vector<Index> rest;
      for (Index c = 0; c < kk; ++c)
        if (c != k) rest.push_back(c);
      const auto m = static_cast<Index>(rest.size());
      Eigen::MatrixXd a(m, m);
      Eigen::VectorXd u(m), w(m);
      for (Index p = 0; p < m; ++p) {
        u(p) = r(k, rest[static_cast<std::size_t>(p)]);
        w(p) = r(rest[static_cast<std::size_t>(p)], k);
        for (Index q = 0; q < m; ++q)
          a(p, q) = r(rest[static_cast<std::size_t>(p)], rest[static_cast<std::size_t>(q)]);
        a(p, p) += 1.0 / gt.d(rest[static_cast<std::size_t>(p)]);
      }
      inner -= u.dot(a.partialPivLu().solve(w));
    }
    return 1.0 + dk * inner;
  };

  auto [lo, hi] = bracket(dk, c0);
  TkSolution sol{0.0, lo, hi, c0, order, capped};
  double g_lo = g(lo), g_hi = g(hi);
  if (g_lo == 0.0) return sol.t = lo, sol;
  if (g_hi == 0.0) return sol.t = hi, sol;
  if ((g_lo > 0.0) == (g_hi > 0.0)) {
    throw NumericalError("no sign change of the eigenvalue-mean equation on [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  sol.t = 0.5 * (lo + hi);
  return sol;
}

TkSolution compute_tk(const GroundTruth& gt, Index k, const TkOptions& options) {
  const double c0 = options.c0.value_or(eigen_gap_constant(gt.d));
  const auto [order, capped] = series_order(gt, c0, options.max_order);
  const auto moments = estimate_noise_moments(gt, options.moment_samples, order, options.seed);
  return solve_tk(gt, moments, order, capped, k, c0);
}

double tk_two_term(const GroundTruth& gt, Index k) {
  Eigen::VectorXd second = gt.var_w.colwise().sum().transpose();
  if (!gt.self_loops) second += gt.h.diagonal().array().square().matrix();
  const double dk = gt.d(k);
  return dk + (gt.v.col(k).array().square() * second.array()).sum() / dk;
}

CovarianceEstimate true_sigma1(const GroundTruth& gt, Index i, Index j) {
  return eigenvector_difference_covariance(gt.d, gt.v, gt.var_w, i, j, gt.k());
}

CovarianceEstimate true_sigma2(const GroundTruth& gt, Index i, Index j) {
  if (gt.t.size() != gt.k()) throw UsageError("true Sigma_2 needs the eigenvalue means t_k");
  if (gt.k() < 2) throw UsageError("Sigma_2 needs K >= 2");
  if (gt.v(i, 0) == 0.0 || gt.v(j, 0) == 0.0) {
    throw NumericalError("zero leading-eigenvector entry");
  }
  return ratio_difference_covariance(gt.t, gt.v, gt.var_w, i, j, gt.k());
}

Eigen::VectorXd eigenvector_linearization(const GroundTruth& gt, const Eigen::MatrixXd& w,
                                          Index i, Index j) {
  const Eigen::VectorXd proj = ((w.row(i) - w.row(j)) * gt.v).transpose();
  return proj.cwiseQuotient(gt.d);
}

Eigen::VectorXd ratio_linearization(const GroundTruth& gt, const Eigen::MatrixXd& w, Index i,
                                    Index j) {
  if (gt.t.size() != gt.k()) throw UsageError("ratio linearization needs t_k");
  const Eigen::RowVectorXd wi = w.row(i) * gt.v;
  const Eigen::RowVectorXd wj = w.row(j) * gt.v;
  const double v1i = gt.v(i, 0), v1j = gt.v(j, 0);
  const double t1 = gt.t(0);
  Eigen::VectorXd f(gt.k() - 1);
  for (Index c = 1; c < gt.k(); ++c) {
    const double tc = gt.t(c);
    f(c - 1) = wi(c) / (tc * v1i) - wj(c) / (tc * v1j) - gt.v(i, c) * wi(0) / (t1 * v1i * v1i) +
               gt.v(j, c) * wj(0) / (t1 * v1j * v1j);
  }
  return f;
}

ResidualStats expansion_residual(const GroundTruth& gt,
                                 std::span<const SymmetricBinaryMatrix> samples, Index k,
                                 Index i) {
  if (gt.t.size() != gt.k()) throw UsageError("expansion residual needs t_k");
  if (k < 0 || k >= gt.k()) throw UsageError("eigenvalue index out of range");
  if (samples.empty()) throw UsageError("expansion residual needs samples");
  ResidualStats stats;
  for (const auto& x : samples) {
    const Spectrum spec = align_signs(top_eigenpairs(x, gt.k()), gt.v);
    const double wv = (x.dense().row(i) - gt.h.row(i)).dot(gt.v.col(k));
    stats.residuals.push_back(gt.t(k) * (spec.vectors(i, k) - gt.v(i, k)) - wv);
  }
  const double root_n = std::sqrt(static_cast<double>(gt.n()));
  std::vector<double> signed_sorted = stats.residuals;
  std::sort(signed_sorted.begin(), signed_sorted.end());
  std::vector<double> abs_sorted;
  for (double r : stats.residuals) abs_sorted.push_back(std::abs(r));
  std::sort(abs_sorted.begin(), abs_sorted.end());
  stats.median_abs_scaled = median_sorted(abs_sorted) * root_n;
  stats.p95_abs_scaled = percentile_sorted(abs_sorted, 0.95) * root_n;
  stats.median_scaled = median_sorted(signed_sorted) * root_n;
  return stats;
}

double sigma1_error(const GroundTruth& gt, const SymmetricBinaryMatrix& x, Index i, Index j) {
  const Index k = gt.k();
  const Spectrum spec = align_signs(top_eigenpairs(x, k), gt.v);
  const RefinedResidual rr = one_step_refinement(x, spec, k);
  return spectral_norm(estimate_sigma1(spec, rr, i, j, k).matrix - true_sigma1(gt, i, j).matrix);
}

double sigma2_error(const GroundTruth& gt, const SymmetricBinaryMatrix& x, Index i, Index j) {
  const Index k = gt.k();
  const Spectrum spec = align_signs(top_eigenpairs(x, k), gt.v);
  const RefinedResidual rr = one_step_refinement(x, spec, k);
  return spectral_norm(estimate_sigma2(spec, rr, i, j, k).matrix - true_sigma2(gt, i, j).matrix);
}

double sigma1_scale(const DcmmParams& params) {
  const double n = static_cast<double>(params.n());
  return n * n * params.theta.array().square().mean();
}

double sigma2_scale(const DcmmParams& params) {
  const double tmin = params.theta.minCoeff();
  return static_cast<double>(params.n()) * tmin * tmin;
}

}  // namespace simple
