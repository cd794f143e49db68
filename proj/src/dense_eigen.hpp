#pragma once

#include <Eigen/Dense>

#include "fiwalk/errors.hpp"

namespace fiwalk::detail {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // empty unless requested
};

// Symmetric matrix with spectrum in [-1, 1]. Eigen's tridiagonal QR can stall
// on highly degenerate spectra; a diagonal shift changes the iteration but
// not the eigenvectors.
inline SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& sym, bool with_vectors) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(sym.rows(), sym.cols());
  const int options = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  for (double shift : {0.0, 2.0, 1.0, 3.0, 0.5}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym + shift * id, options);
    if (solver.info() != Eigen::Success) continue;
    SymmetricEigen out;
    out.values = solver.eigenvalues() - Eigen::VectorXd::Constant(sym.rows(), shift);
    if (with_vectors) out.vectors = solver.eigenvectors();
    return out;
  }
  throw InvariantViolation("eigensolver did not converge");
}

}  // namespace fiwalk::detail
