#pragma once

#include <string>

#include "sesync/synthesis.hpp"

namespace sesync {

/// The reduced objective's data matrix Omega = 2n I - 2S + Sigma_hat
/// - (1/2n) T_hat T_hat^T, symmetrized, with its ingredients attached.
struct DataMatrix {
  int n = 0;
  int d = 0;
  Matrix omega;      // nd x nd, symmetric
  Matrix t_hat;      // nd x n
  Matrix sigma_hat;  // nd x nd, block diagonal
};

/// T_hat = BlkDiag(sum_j s_1j, ..., sum_j s_nj) - s.
Matrix build_t_hat(const ObservationSet& obs);

/// Sigma_hat = BlkDiag(sum_j s_1j s_1j^T, ..., sum_j s_nj s_nj^T).
Matrix build_sigma_hat(const ObservationSet& obs);

DataMatrix build_omega(const ObservationSet& obs);

/// Plain-text dump: header "nd nd", then row-major space-separated entries.
void save_omega_txt(const DataMatrix& dm, const std::string& path);

}  // namespace sesync
