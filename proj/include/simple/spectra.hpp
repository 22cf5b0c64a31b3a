#pragma once

#include <Eigen/Dense>

#include <iosfwd>

#include "simple/graph_io.hpp"

namespace simple {

// Leading eigenpairs of a symmetric matrix, ordered by decreasing |value|.
// Each eigenvector column has its largest-magnitude entry positive (ties go
// to the smallest row index).
struct Spectrum {
  Eigen::VectorXd values;     // m
  Eigen::MatrixXd vectors;    // n x m, orthonormal columns
  Eigen::VectorXd residuals;  // ||A v_k - d_k v_k||

  Index m() const { return values.size(); }
  Index n() const { return vectors.rows(); }
};

enum class EigenRoute {
  automatic,  // full for small problems, partial otherwise
  full,       // complete divide-and-conquer decomposition
  partial,    // tridiagonalize once, bisect for extreme values, inverse iterate
};

// The m eigenpairs of largest |value|. Magnitude ties are ordered by larger
// signed value first. Throws UsageError unless 1 <= m <= n and NumericalError
// if LAPACK reports non-convergence.
Spectrum top_eigenpairs(const Eigen::MatrixXd& a, Index m,
                        EigenRoute route = EigenRoute::automatic);
Spectrum top_eigenpairs(const SymmetricBinaryMatrix& x, Index m,
                        EigenRoute route = EigenRoute::automatic);

// Values only, same ordering as top_eigenpairs, skipping the eigenvectors.
Eigen::VectorXd top_eigenvalues(const Eigen::MatrixXd& a, Index m);

// Idempotent.
Spectrum orient_signs(Spectrum spec);

// Flips columns so that v_hat_k . reference_k >= 0. Only meaningful when the
// reference eigenvectors are known, as in simulation.
Spectrum align_signs(Spectrum spec, const Eigen::MatrixXd& reference);

// Gate for the ratio statistic: leading-eigenvector entries at or below this
// magnitude are treated as degenerate.
double degeneracy_threshold(const Spectrum& spec);

// (v_2(i)/v_1(i), ..., v_k(i)/v_1(i)) with 0/0 := 1. Throws NumericalError if
// |v_1(i)| is at or below the degeneracy threshold while a numerator is not
// exactly zero.
Eigen::VectorXd ratio_rows(const Spectrum& spec, Index i, Index k);

// Debug dump: one row per retained pair, columns k, d_k, v_k(1..n).
void write_spectrum_csv(std::ostream& out, const Spectrum& spec, Index k);

}  // namespace simple
