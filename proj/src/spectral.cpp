#include "sesync/spectral.hpp"

#include <cmath>
#include <stdexcept>

#ifdef EIGEN_USE_LAPACKE
#include <lapacke.h>
#endif

namespace sesync {

namespace {

// Full ascending eigendecomposition of a symmetric matrix. The
// divide-and-conquer LAPACK path is an order of magnitude faster than
// Eigen's built-in solver at the nd ~ 1500 sizes the experiments use.
void sym_eig(const Matrix& sym, Vector& values, Matrix& vectors) {
#ifdef EIGEN_USE_LAPACKE
  vectors = sym;
  values.resize(sym.rows());
  const lapack_int dim = static_cast<lapack_int>(sym.rows());
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', dim, vectors.data(), dim, values.data());
  if (info != 0) throw std::runtime_error("smallest_eigvecs: dsyevd failed to converge");
#else
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("smallest_eigvecs: eigensolver did not converge");
  values = es.eigenvalues();
  vectors = es.eigenvectors();
#endif
}

}  // namespace

SpectralBasis smallest_eigvecs(const Matrix& sym, int n, int d) {
  if (sym.rows() != n * d || sym.cols() != n * d)
    throw std::invalid_argument("smallest_eigvecs: matrix is not nd x nd");

  Vector values;
  Matrix vectors;
  sym_eig(sym, values, vectors);

  SpectralBasis basis;
  basis.n = n;
  basis.d = d;
  basis.eigenvalues = values.head(d);
  basis.phi = std::sqrt(static_cast<double>(n)) * vectors.leftCols(d);

  // Canonical column signs: largest-magnitude entry positive (first on ties).
  for (int c = 0; c < d; ++c) {
    int arg = 0;
    double best = -1.0;
    for (int r = 0; r < n * d; ++r) {
      const double mag = std::abs(basis.phi(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (basis.phi(arg, c) < 0) basis.phi.col(c) *= -1.0;
  }

  const double scale = std::max(std::abs(values(0)), std::abs(values(n * d - 1)));
  basis.degenerate_gap = (values(d) - values(d - 1)) < 1e-10 * scale;
  return basis;
}

SpectralBasis smallest_eigvecs(const DataMatrix& omega) {
  return smallest_eigvecs(omega.omega, omega.n, omega.d);
}

}  // namespace sesync
