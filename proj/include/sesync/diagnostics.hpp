#pragma once

#include <string>
#include <vector>

#include "sesync/data_matrix.hpp"

namespace sesync {

/// Ground-truth/noise split of the data matrix: the clean counterparts of
/// T_hat and Sigma_hat, the translation-noise matrix E, the centered noise
/// matrix Delta, and H = Omega - sigma2^2 (n-1) I.
struct GroundTruthDecomposition {
  int n = 0;
  int d = 0;
  Matrix t_star;        // nd x n
  Matrix sigma_star;    // nd x nd block diagonal
  Matrix xi_star;       // nd x nd block diagonal
  Matrix upsilon_star;  // nd x nd
  Matrix e_noise;       // nd x n
  Matrix delta;         // nd x nd
  Matrix h;             // nd x nd
  Matrix laplacian;     // n x n, n I - J
  Matrix s_star;        // nd x n clean translation comparisons
  Matrix w_rot;         // nd x nd rotation noise W^R
};

GroundTruthDecomposition build_ground_truth_decomposition(const GroundTruth& gt,
                                                          const ObservationSet& obs);

struct BoundCheck {
  std::string quantity;
  double value = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  double ratio() const { return bound > 0 ? value / bound : (value > 0 ? 1e300 : 0.0); }
};

/// Deterministic operator-norm bounds on the clean translation matrices:
/// ||T*_D|| <= M_t n, ||s*|| <= 2 M_t n, ||T*|| <= 3 M_t n,
/// ||s*_i|| <= 2 M_t sqrt(n).
std::vector<BoundCheck> check_norm_bounds(const GroundTruthDecomposition& decomp,
                                          const GroundTruth& gt);

/// Spectrum checks on H: lambda_d(H) <= ||Delta|| and
/// lambda_{d+1}(H) >= 2n - ||Delta||.
std::vector<BoundCheck> check_eigen_gap(const GroundTruthDecomposition& decomp);

void write_report_csv(const std::vector<BoundCheck>& checks, std::ostream& out);

}  // namespace sesync
