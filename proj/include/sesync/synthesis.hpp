#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sesync/geometry.hpp"

namespace sesync {

/// Ground-truth motions (R*_i, t*_i) with translations recentered to sum zero.
struct GroundTruth {
  int n = 0;
  int d = 0;
  std::vector<Matrix> rotations;
  std::vector<Vector> translations;
  double max_translation_norm = 0.0;  // M_t

  RigidMotion motion(int i) const { return {rotations[i], translations[i]}; }

  /// Stacked nd x d matrix R* whose i-th block row is R*_i.
  Matrix stacked_rotations() const;
};

enum class MirrorMode { kMirrored, kIndependent };

/// Noisy pairwise blocks S_ij (d x d) and s_ij (d-vectors) on the complete
/// graph, stored as nd x nd and nd x n block matrices. Diagonal blocks are
/// S_ii = I, s_ii = 0.
struct ObservationSet {
  int n = 0;
  int d = 0;
  Matrix S;  // nd x nd
  Matrix s;  // nd x n
  double sigma1 = 0.0;  // NaN when unknown (imported observations)
  double sigma2 = 0.0;
  MirrorMode mirror_mode = MirrorMode::kMirrored;

  Eigen::Block<const Matrix> block_S(int i, int j) const {
    return S.block(i * d, j * d, d, d);
  }
  Eigen::Block<const Matrix> block_s(int i, int j) const {
    return s.block(i * d, j, d, 1);
  }
  bool sigma_known() const;
};

GroundTruth generate_ground_truth(int n, int d, double translation_scale, Rng& rng);

/// S_ij = R*_i R*_j^T + W^R_ij, s_ij = R*_i (t*_j - t*_i) + w^t_ij with
/// i.i.d. Gaussian noise. Mirrored mode sets S_ji = S_ij^T and draws the
/// translation noise antisymmetrically (w_ji = -w_ij); independent mode
/// draws every ordered pair fresh.
ObservationSet synthesize_observations(const GroundTruth& gt, double sigma1,
                                       double sigma2, Rng& rng,
                                       MirrorMode mode = MirrorMode::kMirrored);

/// Build observations from a complete grid of relative motions (diagonal
/// ignored). Sigma fields are set to NaN. A motion grid entry (i,j) must be
/// present for every i != j; `present` marks which entries are valid.
ObservationSet observations_from_motions(const std::vector<std::vector<RigidMotion>>& rel,
                                         const std::vector<std::vector<bool>>& present);
/// Same, with every supplied grid entry assumed present (a short row still
/// counts as a missing pair).
ObservationSet observations_from_motions(const std::vector<std::vector<RigidMotion>>& rel);

/// CSV dump with a self-describing header (n, d, sigma1, sigma2, mode),
/// then the row-major S and s blocks. Round-trips exactly at 17 digits.
void save_observations_csv(const ObservationSet& obs, std::ostream& out);
ObservationSet load_observations_csv(std::istream& in);
void save_observations_csv(const ObservationSet& obs, const std::string& path);
ObservationSet load_observations_csv(const std::string& path);

}  // namespace sesync
