#include "sesync/synthesis.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sesync {

Matrix GroundTruth::stacked_rotations() const {
  Matrix R(n * d, d);
  for (int i = 0; i < n; ++i) R.middleRows(i * d, d) = rotations[i];
  return R;
}

bool ObservationSet::sigma_known() const {
  return !std::isnan(sigma1) && !std::isnan(sigma2);
}

GroundTruth generate_ground_truth(int n, int d, double translation_scale, Rng& rng) {
  if (n < 2) throw std::invalid_argument("generate_ground_truth: n >= 2 required");
  if (d < 2) throw std::invalid_argument("generate_ground_truth: d >= 2 required");
  if (translation_scale < 0) throw std::invalid_argument("negative translation scale");

  GroundTruth gt;
  gt.n = n;
  gt.d = d;
  gt.rotations.reserve(n);
  gt.translations.reserve(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n; ++i) gt.rotations.push_back(random_rotation(rng, d));
  Vector mean = Vector::Zero(d);
  for (int i = 0; i < n; ++i) {
    Vector t = Vector::NullaryExpr(d, [&](Eigen::Index) { return translation_scale * gauss(rng); });
    gt.translations.push_back(t);
    mean += t;
  }
  mean /= n;
  for (auto& t : gt.translations) t -= mean;  // exact sum-zero gauge
  for (const auto& t : gt.translations)
    gt.max_translation_norm = std::max(gt.max_translation_norm, t.norm());
  return gt;
}

ObservationSet synthesize_observations(const GroundTruth& gt, double sigma1,
                                       double sigma2, Rng& rng, MirrorMode mode) {
  if (sigma1 < 0 || sigma2 < 0) throw std::invalid_argument("negative noise level");
  const int n = gt.n, d = gt.d;
  ObservationSet obs;
  obs.n = n;
  obs.d = d;
  obs.sigma1 = sigma1;
  obs.sigma2 = sigma2;
  obs.mirror_mode = mode;
  obs.S = Matrix::Zero(n * d, n * d);
  obs.s = Matrix::Zero(n * d, n);

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto noise_block = [&](double sigma) -> Matrix {
    return Matrix::NullaryExpr(d, d, [&](Eigen::Index, Eigen::Index) { return sigma * gauss(rng); });
  };
  auto noise_vec = [&](double sigma) -> Vector {
    return Vector::NullaryExpr(d, [&](Eigen::Index) { return sigma * gauss(rng); });
  };

  for (int i = 0; i < n; ++i) obs.S.block(i * d, i * d, d, d) = Matrix::Identity(d, d);

  auto clean_S = [&](int i, int j) -> Matrix {
    return gt.rotations[i] * gt.rotations[j].transpose();
  };
  auto clean_s = [&](int i, int j) -> Vector {
    return gt.rotations[i] * (gt.translations[j] - gt.translations[i]);
  };

  if (mode == MirrorMode::kMirrored) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Matrix wr = noise_block(sigma1);
        const Vector wt = noise_vec(sigma2);
        obs.S.block(i * d, j * d, d, d) = clean_S(i, j) + wr;
        obs.S.block(j * d, i * d, d, d) = obs.S.block(i * d, j * d, d, d).transpose();
        obs.s.block(i * d, j, d, 1) = clean_s(i, j) + wt;
        obs.s.block(j * d, i, d, 1) = clean_s(j, i) - wt;  // w_ji = -w_ij
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        obs.S.block(i * d, j * d, d, d) = clean_S(i, j) + noise_block(sigma1);
        obs.s.block(i * d, j, d, 1) = clean_s(i, j) + noise_vec(sigma2);
      }
    }
  }
  return obs;
}

ObservationSet observations_from_motions(const std::vector<std::vector<RigidMotion>>& rel) {
  std::vector<std::vector<bool>> present;
  for (const auto& row : rel) present.emplace_back(row.size(), true);
  return observations_from_motions(rel, present);
}

ObservationSet observations_from_motions(const std::vector<std::vector<RigidMotion>>& rel,
                                         const std::vector<std::vector<bool>>& present) {
  const int n = static_cast<int>(rel.size());
  if (n < 2) throw std::invalid_argument("observations_from_motions: n >= 2 required");
  auto has = [&](int i, int j) {
    return i < static_cast<int>(present.size()) && j < static_cast<int>(present[i].size()) &&
           present[i][j] && j < static_cast<int>(rel[i].size());
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !has(i, j))
        throw std::runtime_error("observations_from_motions: incomplete graph, missing pair (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");

  int d = 0;
  for (int j = 0; j < n; ++j)
    if (j != 0 && has(0, j)) { d = rel[0][j].dim(); break; }

  ObservationSet obs;
  obs.n = n;
  obs.d = d;
  obs.sigma1 = std::nan("");
  obs.sigma2 = std::nan("");
  obs.mirror_mode = MirrorMode::kIndependent;
  obs.S = Matrix::Zero(n * d, n * d);
  obs.s = Matrix::Zero(n * d, n);
  for (int i = 0; i < n; ++i) obs.S.block(i * d, i * d, d, d) = Matrix::Identity(d, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Matrix H = rel[i][j].hom();
      obs.S.block(i * d, j * d, d, d) = H.topLeftCorner(d, d);
      obs.s.block(i * d, j, d, 1) = H.topRightCorner(d, 1);
    }
  }
  return obs;
}

void save_observations_csv(const ObservationSet& obs, std::ostream& out) {
  out.precision(17);
  out << "n,d,sigma1,sigma2,mirror_mode\n"
      << obs.n << ',' << obs.d << ',' << obs.sigma1 << ',' << obs.sigma2 << ','
      << (obs.mirror_mode == MirrorMode::kMirrored ? "mirrored" : "independent") << '\n';
  for (int r = 0; r < obs.S.rows(); ++r) {
    for (int c = 0; c < obs.S.cols(); ++c) out << (c ? "," : "") << obs.S(r, c);
    out << '\n';
  }
  for (int r = 0; r < obs.s.rows(); ++r) {
    for (int c = 0; c < obs.s.cols(); ++c) out << (c ? "," : "") << obs.s(r, c);
    out << '\n';
  }
}

ObservationSet load_observations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("observation csv: missing header");
  if (!std::getline(in, line)) throw std::runtime_error("observation csv: missing header row");
  std::istringstream hdr(line);
  ObservationSet obs;
  std::string field;
  std::getline(hdr, field, ',');
  obs.n = std::stoi(field);
  std::getline(hdr, field, ',');
  obs.d = std::stoi(field);
  std::getline(hdr, field, ',');
  obs.sigma1 = std::stod(field);
  std::getline(hdr, field, ',');
  obs.sigma2 = std::stod(field);
  std::getline(hdr, field, ',');
  obs.mirror_mode = (field == "mirrored") ? MirrorMode::kMirrored : MirrorMode::kIndependent;

  auto read_matrix = [&](int rows, int cols) {
    Matrix M(rows, cols);
    for (int r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) throw std::runtime_error("observation csv: truncated");
      std::istringstream row(line);
      for (int c = 0; c < cols; ++c) {
        if (!std::getline(row, field, ',')) throw std::runtime_error("observation csv: short row");
        M(r, c) = std::stod(field);
      }
    }
    return M;
  };
  obs.S = read_matrix(obs.n * obs.d, obs.n * obs.d);
  obs.s = read_matrix(obs.n * obs.d, obs.n);
  return obs;
}

void save_observations_csv(const ObservationSet& obs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  save_observations_csv(obs, out);
}

ObservationSet load_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_observations_csv(in);
}

}  // namespace sesync
