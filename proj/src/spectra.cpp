#include "simple/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "simple/errors.hpp"

namespace simple {
namespace {

// Below this size the full decomposition is cheaper than the bookkeeping of
// the partial route.
constexpr Index kFullRouteMaxN = 256;

struct Candidate {
  double value;
  lapack_int block;
  Index order;  // position in LAPACK's ascending output, for tie breaks
};

// Strict weak order: larger |value| first, then larger signed value, then
// earlier LAPACK position.
bool magnitude_before(const Candidate& a, const Candidate& b) {
  const double ma = std::abs(a.value), mb = std::abs(b.value);
  if (ma != mb) return ma > mb;
  if (a.value != b.value) return a.value > b.value;
  return a.order < b.order;
}

void check_square(const Eigen::MatrixXd& a, Index m) {
  if (a.rows() != a.cols() || a.rows() == 0) throw UsageError("eigensolver needs a nonempty square matrix");
  if (m < 1 || m > a.rows()) {
    throw UsageError("requested " + std::to_string(m) + " eigenpairs of a " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.rows()) + " matrix");
  }
}

Spectrum full_route(const Eigen::MatrixXd& a, Index m) {
  const Index n = a.rows();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed to converge");
  const Eigen::VectorXd& w = solver.eigenvalues();
  const Eigen::MatrixXd& z = solver.eigenvectors();
  std::vector<Candidate> all(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) all[static_cast<std::size_t>(k)] = {w(k), 1, k};
  std::stable_sort(all.begin(), all.end(), magnitude_before);
  Spectrum spec;
  spec.values.resize(m);
  spec.vectors.resize(n, m);
  for (Index k = 0; k < m; ++k) {
    spec.values(k) = all[static_cast<std::size_t>(k)].value;
    spec.vectors.col(k) = z.col(all[static_cast<std::size_t>(k)].order);
  }
  return spec;
}

// Householder tridiagonalization plus bisection for the m smallest and m
// largest eigenvalues; the top-m by magnitude lie among those 2m candidates.
struct Tridiagonal {
  Eigen::MatrixXd reflectors;
  std::vector<double> diag, offdiag, tau;
  std::vector<lapack_int> isplit;
  lapack_int nsplit = 0;
};

Tridiagonal tridiagonalize(const Eigen::MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  Tridiagonal t;
  t.reflectors = a;
  t.diag.resize(n);
  t.offdiag.resize(std::max<lapack_int>(n - 1, 1));
  t.tau.resize(std::max<lapack_int>(n - 1, 1));
  t.isplit.resize(n);
  const lapack_int info = LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, t.reflectors.data(), n,
                                         t.diag.data(), t.offdiag.data(), t.tau.data());
  if (info != 0) throw NumericalError("dsytrd failed (info = " + std::to_string(info) + ")");
  return t;
}

std::vector<Candidate> extreme_candidates(Tridiagonal& t, Index m) {
  const auto n = static_cast<lapack_int>(t.diag.size());
  const auto mm = static_cast<lapack_int>(m);
  std::vector<double> w(2 * m);
  std::vector<lapack_int> block(2 * m);
  lapack_int found_low = 0, found_high = 0;
  if (2 * m >= n) {
    // The two index ranges would overlap; take the whole spectrum instead.
    w.resize(n);
    block.resize(n);
    const lapack_int info = LAPACKE_dstebz('A', 'B', n, 0.0, 0.0, 0, 0, 0.0, t.diag.data(),
                                           t.offdiag.data(), &found_low, &t.nsplit, w.data(),
                                           block.data(), t.isplit.data());
    if (info != 0) throw NumericalError("dstebz failed (info = " + std::to_string(info) + ")");
    std::vector<Candidate> c;
    for (lapack_int k = 0; k < found_low; ++k)
      c.push_back({w[static_cast<std::size_t>(k)], block[static_cast<std::size_t>(k)], k});
    return c;
  }
  lapack_int info = LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, 1, mm, 0.0, t.diag.data(),
                                   t.offdiag.data(), &found_low, &t.nsplit, w.data(),
                                   block.data(), t.isplit.data());
  if (info != 0) throw NumericalError("dstebz failed on the lower end (info = " + std::to_string(info) + ")");
  info = LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, n - mm + 1, n, 0.0, t.diag.data(), t.offdiag.data(),
                        &found_high, &t.nsplit, w.data() + found_low, block.data() + found_low,
                        t.isplit.data());
  if (info != 0) throw NumericalError("dstebz failed on the upper end (info = " + std::to_string(info) + ")");
  std::vector<Candidate> c;
  c.reserve(static_cast<std::size_t>(found_low + found_high));
  for (lapack_int k = 0; k < found_low + found_high; ++k) {
    c.push_back({w[static_cast<std::size_t>(k)], block[static_cast<std::size_t>(k)], k});
  }
  return c;
}

Spectrum partial_route(const Eigen::MatrixXd& a, Index m, bool with_vectors) {
  const Index n = a.rows();
  // Inverse iteration loses orthogonality once most of the bulk is requested.
  if (with_vectors && 2 * m >= n) return full_route(a, m);
  Tridiagonal t = tridiagonalize(a);
  std::vector<Candidate> c = extreme_candidates(t, m);
  std::stable_sort(c.begin(), c.end(), magnitude_before);
  if (static_cast<Index>(c.size()) < m) throw NumericalError("bisection returned too few eigenvalues");
  c.resize(static_cast<std::size_t>(m));

  Spectrum spec;
  spec.values.resize(m);
  for (Index k = 0; k < m; ++k) spec.values(k) = c[static_cast<std::size_t>(k)].value;
  if (!with_vectors) return spec;

  // dstein wants eigenvalues grouped by split block, ascending within each.
  std::vector<Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(), [&](Index x, Index y) {
    const auto& cx = c[static_cast<std::size_t>(x)];
    const auto& cy = c[static_cast<std::size_t>(y)];
    if (cx.block != cy.block) return cx.block < cy.block;
    return cx.value < cy.value;
  });
  // The LAPACKE wrapper scans n entries of w for NaN, so pad it.
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::vector<lapack_int> block(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    w[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])].value;
    block[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])].block;
  }
  const auto ln = static_cast<lapack_int>(n);
  const auto lm = static_cast<lapack_int>(m);
  Eigen::MatrixXd z(n, m);
  std::vector<lapack_int> ifail(static_cast<std::size_t>(m));
  lapack_int info = LAPACKE_dstein(LAPACK_COL_MAJOR, ln, t.diag.data(), t.offdiag.data(), lm,
                                   w.data(), block.data(), t.isplit.data(), z.data(), ln,
                                   ifail.data());
  if (info != 0) {
    throw NumericalError("inverse iteration failed for " + std::to_string(info) +
                         " eigenvector(s); first failure at position " + std::to_string(ifail[0]));
  }
  info = LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', ln, lm, t.reflectors.data(), ln,
                        t.tau.data(), z.data(), ln);
  if (info != 0) throw NumericalError("dormtr failed (info = " + std::to_string(info) + ")");
  spec.vectors.resize(n, m);
  for (Index k = 0; k < m; ++k) spec.vectors.col(perm[static_cast<std::size_t>(k)]) = z.col(k);
  return spec;
}

bool use_full(EigenRoute route, Index n, Index m) {
  switch (route) {
    case EigenRoute::full:
      return true;
    case EigenRoute::partial:
      return false;
    case EigenRoute::automatic:
      break;
  }
  return n <= kFullRouteMaxN || 2 * m >= n;
}

}  // namespace

Spectrum top_eigenpairs(const Eigen::MatrixXd& a, Index m, EigenRoute route) {
  check_square(a, m);
  const Index n = a.rows();
  Spectrum spec = use_full(route, n, m) ? full_route(a, m) : partial_route(a, m, true);
  spec.residuals.resize(m);
  const Eigen::MatrixXd av = a.selfadjointView<Eigen::Lower>() * spec.vectors;
  for (Index k = 0; k < m; ++k) {
    spec.residuals(k) = (av.col(k) - spec.values(k) * spec.vectors.col(k)).norm();
  }
  return orient_signs(std::move(spec));
}

Spectrum top_eigenpairs(const SymmetricBinaryMatrix& x, Index m, EigenRoute route) {
  return top_eigenpairs(x.dense(), m, route);
}

Eigen::VectorXd top_eigenvalues(const Eigen::MatrixXd& a, Index m) {
  check_square(a, m);
  if (use_full(EigenRoute::automatic, a.rows(), m)) return full_route(a, m).values;
  return partial_route(a, m, false).values;
}

Spectrum orient_signs(Spectrum spec) {
  for (Index k = 0; k < spec.vectors.cols(); ++k) {
    auto col = spec.vectors.col(k);
    Index best = 0;
    for (Index r = 1; r < col.size(); ++r) {
      if (std::abs(col(r)) > std::abs(col(best))) best = r;
    }
    if (col(best) < 0.0) col = -col;
  }
  return spec;
}

Spectrum align_signs(Spectrum spec, const Eigen::MatrixXd& reference) {
  const Index k = std::min(spec.vectors.cols(), reference.cols());
  for (Index c = 0; c < k; ++c) {
    if (spec.vectors.col(c).dot(reference.col(c)) < 0.0) spec.vectors.col(c) *= -1.0;
  }
  return spec;
}

double degeneracy_threshold(const Spectrum& spec) {
  return 1e-10 * spec.vectors.col(0).cwiseAbs().maxCoeff();
}

Eigen::VectorXd ratio_rows(const Spectrum& spec, Index i, Index k) {
  if (k < 2) throw UsageError("ratio rows need K >= 2");
  if (k > spec.m()) throw UsageError("ratio rows need K <= retained eigenpairs");
  if (i < 0 || i >= spec.n()) throw UsageError("node index out of range");
  const double denom = spec.vectors(i, 0);
  const bool degenerate = std::abs(denom) <= degeneracy_threshold(spec);
  Eigen::VectorXd y(k - 1);
  for (Index c = 1; c < k; ++c) {
    const double num = spec.vectors(i, c);
    if (num == 0.0 && denom == 0.0) {
      y(c - 1) = 1.0;
    } else if (degenerate) {
      throw NumericalError("node " + std::to_string(i) +
                           " has a degenerate leading-eigenvector entry");
    } else {
      y(c - 1) = num / denom;
    }
  }
  return y;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spec, Index k) {
  k = std::min(k, spec.m());
  out << "k,d_k";
  for (Index r = 0; r < spec.n(); ++r) out << ",v_k(" << r + 1 << ')';
  out << '\n' << std::setprecision(17);
  for (Index c = 0; c < k; ++c) {
    out << c + 1 << ',' << spec.values(c);
    for (Index r = 0; r < spec.n(); ++r) out << ',' << spec.vectors(r, c);
    out << '\n';
  }
}

}  // namespace simple
