#pragma once

#include <Eigen/Dense>

namespace kernelrmt {

/// Eigen-decomposition of a real symmetric matrix: eigenvalues ascending,
/// eigenvectors (if requested) in the matching columns.
struct SymEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Householder reduction to tridiagonal form followed by implicit-shift QL.
/// Only the lower triangle of `a` is read. Throws NumericalError when an
/// eigenvalue fails to converge within 50 QL sweeps, ParameterError on
/// non-square or non-finite input.
SymEigen sym_eigen(const Eigen::MatrixXd& a, bool want_vectors = false);

}  // namespace kernelrmt
