#include "sesync/estimators.hpp"

#include <stdexcept>

namespace sesync {

std::string method_name(Method m) {
  switch (m) {
    case Method::kAse: return "ase";
    case Method::kTwoStage: return "two-stage";
    case Method::kNaiveProjection: return "naive";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "ase") return Method::kAse;
  if (name == "two-stage" || name == "two_stage") return Method::kTwoStage;
  if (name == "naive" || name == "naive-projection") return Method::kNaiveProjection;
  return std::nullopt;
}

std::vector<Vector> recover_translations(const std::vector<Matrix>& rotations,
                                         const Matrix& t_hat) {
  const int n = static_cast<int>(rotations.size());
  if (n == 0) throw std::invalid_argument("recover_translations: empty rotation set");
  const int d = static_cast<int>(rotations[0].rows());
  if (t_hat.rows() != n * d || t_hat.cols() != n)
    throw std::invalid_argument("recover_translations: T_hat is not nd x n");

  Matrix stacked(n * d, d);
  for (int i = 0; i < n; ++i) stacked.middleRows(i * d, d) = rotations[i];
  const Matrix rt_that = stacked.transpose() * t_hat;  // d x n
  std::vector<Vector> out(n);
  for (int i = 0; i < n; ++i) out[i] = -rt_that.col(i) / (2.0 * n);
  return out;
}

namespace {

int pick_anchor(const SpectralBasis& basis, const AseOptions& opts) {
  if (!opts.anchor_largest_block) return 0;
  int best = 0;
  double best_norm = -1.0;
  for (int i = 0; i < basis.n; ++i) {
    const double nrm = basis.block(i).norm();
    if (nrm > best_norm) {
      best_norm = nrm;
      best = i;
    }
  }
  return best;
}

EstimateSet finish(const SpectralBasis& basis, const Matrix& t_hat,
                   std::vector<Matrix> rotations, Method method) {
  EstimateSet est;
  est.n = basis.n;
  est.d = basis.d;
  est.method = method;
  est.eigenvalues = basis.eigenvalues;
  if (basis.degenerate_gap)
    est.warnings.push_back("degenerate spectrum: lambda_d ~ lambda_{d+1}");
  const std::vector<Vector> translations = recover_translations(rotations, t_hat);
  est.motions.resize(est.n);
  for (int i = 0; i < est.n; ++i) est.motions[i] = {std::move(rotations[i]), translations[i]};
  return est;
}

}  // namespace

EstimateSet round_anchored(const SpectralBasis& basis, const Matrix& t_hat) {
  const Matrix anchor = basis.block(0);
  std::vector<Matrix> rotations(basis.n);
  for (int i = 0; i < basis.n; ++i)
    rotations[i] = project_so(basis.block(i) * anchor.transpose());
  return finish(basis, t_hat, std::move(rotations), Method::kAse);
}

EstimateSet ase(const ObservationSet& obs, const AseOptions& opts) {
  if (obs.n < 2) throw std::invalid_argument("ase: n >= 2 required");
  const DataMatrix dm = build_omega(obs);
  const SpectralBasis basis = smallest_eigvecs(dm);
  const int anchor_idx = pick_anchor(basis, opts);
  const Matrix anchor = basis.block(anchor_idx);
  std::vector<Matrix> rotations(basis.n);
  for (int i = 0; i < basis.n; ++i)
    rotations[i] = project_so(basis.block(i) * anchor.transpose());
  return finish(basis, dm.t_hat, std::move(rotations), Method::kAse);
}

EstimateSet two_stage(const ObservationSet& obs) {
  if (obs.n < 2) throw std::invalid_argument("two_stage: n >= 2 required");
  const int n = obs.n, d = obs.d;
  const Matrix omega_r =
      2.0 * n * Matrix::Identity(n * d, n * d) - (obs.S + obs.S.transpose());
  const SpectralBasis basis = smallest_eigvecs(omega_r, n, d);
  const Matrix anchor = basis.block(0);
  std::vector<Matrix> rotations(n);
  for (int i = 0; i < n; ++i)
    rotations[i] = project_so(basis.block(i) * anchor.transpose());
  EstimateSet est = finish(basis, build_t_hat(obs), std::move(rotations), Method::kTwoStage);
  est.method = Method::kTwoStage;
  return est;
}

EstimateSet naive_projection(const ObservationSet& obs, bool sign_flip) {
  if (obs.n < 2) throw std::invalid_argument("naive_projection: n >= 2 required");
  const DataMatrix dm = build_omega(obs);
  SpectralBasis basis = smallest_eigvecs(dm);
  const int n = obs.n, d = obs.d;

  if (sign_flip) {
    // Choose s in {-1,+1}^d maximizing the number of blocks with positive
    // determinant; ties broken toward all +1 (enumerated first).
    int best_mask = 0, best_count = -1;
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vector s(d);
      for (int c = 0; c < d; ++c) s(c) = (mask >> c) & 1 ? -1.0 : 1.0;
      int count = 0;
      for (int i = 0; i < n; ++i)
        if ((basis.block(i) * s.asDiagonal()).determinant() > 0) ++count;
      if (count > best_count) {
        best_count = count;
        best_mask = mask;
      }
    }
    for (int c = 0; c < d; ++c)
      if ((best_mask >> c) & 1) basis.phi.col(c) *= -1.0;
  }

  std::vector<Matrix> rotations(n);
  for (int i = 0; i < n; ++i) rotations[i] = project_so(basis.block(i));
  EstimateSet est = finish(basis, dm.t_hat, std::move(rotations), Method::kNaiveProjection);
  est.method = Method::kNaiveProjection;
  return est;
}

}  // namespace sesync
