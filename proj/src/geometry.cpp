#include "sesync/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sesync {

bool is_rotation(const Matrix& M, double tol) {
  if (M.rows() != M.cols() || M.rows() < 2) return false;
  const int d = static_cast<int>(M.rows());
  if ((M.transpose() * M - Matrix::Identity(d, d)).norm() > tol) return false;
  return std::abs(M.determinant() - 1.0) <= tol;
}

RigidMotion RigidMotion::identity(int d) {
  return {Matrix::Identity(d, d), Vector::Zero(d)};
}

Matrix RigidMotion::hom() const {
  const int d = dim();
  Matrix H = Matrix::Zero(d + 1, d + 1);
  H.topLeftCorner(d, d) = R.transpose();
  H.topRightCorner(d, 1) = t;
  H(d, d) = 1.0;
  return H;
}

RigidMotion RigidMotion::from_hom(const Matrix& H) {
  const int d = static_cast<int>(H.rows()) - 1;
  RigidMotion g;
  g.R = H.topLeftCorner(d, d).transpose();
  g.t = H.topRightCorner(d, 1);
  return g;
}

Vector RigidMotion::apply(const Vector& x) const {
  return R.transpose() * x + t;
}

RigidMotion compose(const RigidMotion& g1, const RigidMotion& g2) {
  if (g1.dim() != g2.dim()) throw std::invalid_argument("compose: dimension mismatch");
  RigidMotion g;
  g.R = g2.R * g1.R;
  g.t = g1.R.transpose() * g2.t + g1.t;
  return g;
}

RigidMotion invert(const RigidMotion& g) {
  RigidMotion inv;
  inv.R = g.R.transpose();
  inv.t = -g.R * g.t;
  return inv;
}

RigidMotion relative(const RigidMotion& gi, const RigidMotion& gj) {
  if (gi.dim() != gj.dim()) throw std::invalid_argument("relative: dimension mismatch");
  return compose(invert(gi), gj);
}

Matrix project_so(const Matrix& M, bool* degenerate) {
  if (M.rows() != M.cols() || M.rows() < 2)
    throw std::invalid_argument("project_so: need a square matrix, d >= 2");
  if (!M.allFinite())
    throw std::invalid_argument("project_so: non-finite entries");
  const int d = static_cast<int>(M.rows());

  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix U = svd.matrixU();
  const Matrix& V = svd.matrixV();
  const double det_uv = (U * V.transpose()).determinant();
  if (det_uv < 0) {
    const Vector& sv = svd.singularValues();
    if (degenerate && sv(d - 1) >= sv(d - 2) - 1e-12 * std::max(1.0, sv(0)))
      *degenerate = true;  // tied smallest singular values: nearest rotation not unique
    U.col(d - 1) *= -1.0;
  }
  return U * V.transpose();
}

Matrix project_so_blockwise(const Matrix& Y, int d, bool* degenerate) {
  if (d < 2 || Y.rows() % d != 0 || Y.cols() != d)
    throw std::invalid_argument("project_so_blockwise: bad block shape");
  const int n = static_cast<int>(Y.rows()) / d;
  Matrix out(Y.rows(), d);
  for (int i = 0; i < n; ++i)
    out.middleRows(i * d, d) = project_so(Y.middleRows(i * d, d), degenerate);
  return out;
}

Matrix random_rotation(Rng& rng, int d) {
  if (d < 2) throw std::invalid_argument("random_rotation: d >= 2 required");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = gauss(rng);

  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  Matrix Rf = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (Rf(j, j) < 0) Q.col(j) *= -1.0;
  if (Q.determinant() < 0) Q.col(d - 1) *= -1.0;
  return Q;
}

double geodesic_angle_deg(const Matrix& r1, const Matrix& r2) {
  if (r1.rows() != r2.rows() || r1.cols() != r2.cols())
    throw std::invalid_argument("geodesic_angle_deg: dimension mismatch");
  const int d = static_cast<int>(r1.rows());
  const Matrix rel = r1.transpose() * r2;
  if (d <= 3) {
    // atan2 of the skew part against the trace: unlike acos of the trace,
    // this stays relative-accurate for angles near zero.
    const double c = (rel.trace() - (d - 2)) / 2.0;
    const double s = (rel - rel.transpose()).norm() / (2.0 * std::sqrt(2.0));
    return std::atan2(s, c) * 180.0 / M_PI;
  }
  // ||log(rel)||_F / sqrt(2): sum of squared principal angles, read off the
  // complex eigenvalue arguments.
  Eigen::EigenSolver<Matrix> es(rel);
  double sum_sq = 0.0;
  for (int i = 0; i < d; ++i)
    sum_sq += std::pow(std::arg(es.eigenvalues()(i)), 2);
  return std::sqrt(sum_sq / 2.0) * 180.0 / M_PI;
}

}  // namespace sesync
