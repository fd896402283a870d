#pragma once

#include "sesync/data_matrix.hpp"

namespace sesync {

/// Basis of the d smallest-eigenvalue eigenvectors of Omega, columns in
/// ascending eigenvalue order, scaled so Phi^T Phi = n I_d, sign-canonical
/// (largest-magnitude entry of each column positive).
struct SpectralBasis {
  int n = 0;
  int d = 0;
  Matrix phi;          // nd x d
  Vector eigenvalues;  // d, ascending
  bool degenerate_gap = false;

  Eigen::Block<const Matrix> block(int i) const { return phi.block(i * d, 0, d, d); }
};

SpectralBasis smallest_eigvecs(const DataMatrix& omega);

/// Same decomposition applied to an arbitrary symmetric nd x nd matrix
/// (used for the rotation-only two-stage matrix).
SpectralBasis smallest_eigvecs(const Matrix& sym, int n, int d);

}  // namespace sesync
