#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sesync/spectral.hpp"

namespace sesync {

enum class Method { kAse, kTwoStage, kNaiveProjection };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct EstimateSet {
  int n = 0;
  int d = 0;
  std::vector<RigidMotion> motions;
  Method method = Method::kAse;
  Vector eigenvalues;  // smallest d eigenvalues of the matrix that was decomposed
  std::vector<std::string> warnings;
};

/// Closed-form translation recovery t_i = -(1/2n) (vec(R^T T_hat))_i for a
/// fixed set of rotations; minimizes the translation quadratic.
std::vector<Vector> recover_translations(const std::vector<Matrix>& rotations,
                                         const Matrix& t_hat);

struct AseOptions {
  /// Anchor block for the rounding products Phi_i Phi_anchor^T. The default
  /// is block 0 (the first block).
  bool anchor_largest_block = false;
};

/// Anchored spectral estimator: Phi from Omega, R_i = Pi_SO(Phi_i Phi_1^T),
/// translations by the closed form.
EstimateSet ase(const ObservationSet& obs, const AseOptions& opts = {});

/// Rotations from the rotation-only matrix 2n I - (S + S^T) with the same
/// anchored rounding; translations from the full observations afterwards.
EstimateSet two_stage(const ObservationSet& obs);

/// Round each block Phi_i directly. With sign_flip, first replace
/// Phi <- Phi diag(s) for the sign pattern s in {-1,+1}^d that makes the
/// most block determinants positive (ties toward all +1).
EstimateSet naive_projection(const ObservationSet& obs, bool sign_flip);

/// Rounding + translation recovery applied to an externally supplied basis;
/// lets tests inject a right orthogonal factor into Phi.
EstimateSet round_anchored(const SpectralBasis& basis, const Matrix& t_hat);

}  // namespace sesync
