#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace sesync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

constexpr double kOrthoTol = 1e-10;

/// True if M is orthogonal with det +1 within `tol` (Frobenius).
bool is_rotation(const Matrix& M, double tol = kOrthoTol);

/// A rigid motion (R, t) in SE(d) with homogeneous form [[R^T, t],[0,1]].
struct RigidMotion {
  Matrix R;  // d x d, in SO(d)
  Vector t;  // d

  int dim() const { return static_cast<int>(t.size()); }

  static RigidMotion identity(int d);

  /// The (d+1)x(d+1) homogeneous matrix [[R^T, t],[0,1]].
  Matrix hom() const;

  /// Motion whose homogeneous matrix equals `H`.
  static RigidMotion from_hom(const Matrix& H);

  /// Action on a point: R^T x + t.
  Vector apply(const Vector& x) const;
};

/// compose(G1, G2) has hom(G1) * hom(G2) as its homogeneous matrix.
RigidMotion compose(const RigidMotion& g1, const RigidMotion& g2);
RigidMotion invert(const RigidMotion& g);

/// G_i^{-1} G_j. Its homogeneous top-left block is R_i R_j^T and its
/// translation column is R_i (t_j - t_i).
RigidMotion relative(const RigidMotion& gi, const RigidMotion& gj);

/// Nearest special-orthogonal matrix to M in Frobenius norm, via SVD with
/// the determinant correction applied to the last column of U. If the two
/// smallest singular values coincide and det(UV^T) < 0, the nearest
/// rotation is not unique; `degenerate` (when non-null) is set in that
/// case and the SVD's own ordering decides.
Matrix project_so(const Matrix& M, bool* degenerate = nullptr);

/// Apply project_so to each d x d block of the nd x d stack Y.
Matrix project_so_blockwise(const Matrix& Y, int d, bool* degenerate = nullptr);

/// Haar-distributed rotation: QR of a Gaussian matrix, columns sign-fixed
/// so the triangular factor has positive diagonal, last column flipped if
/// the determinant comes out -1.
Matrix random_rotation(Rng& rng, int d);

/// Geodesic distance between rotations in degrees. For d in {2,3} this is
/// arccos((tr(R1^T R2) - (d-2))/2); for larger d, ||log(R1^T R2)||_F
/// normalized so a single planar rotation by theta reports theta.
double geodesic_angle_deg(const Matrix& r1, const Matrix& r2);

}  // namespace sesync
