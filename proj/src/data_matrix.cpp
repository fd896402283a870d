#include "sesync/data_matrix.hpp"

#include <fstream>
#include <stdexcept>

namespace sesync {

Matrix build_t_hat(const ObservationSet& obs) {
  const int n = obs.n, d = obs.d;
  Matrix t_hat = -obs.s;
  for (int i = 0; i < n; ++i) {
    Vector row_sum = Vector::Zero(d);
    for (int j = 0; j < n; ++j) row_sum += obs.s.block(i * d, j, d, 1);
    t_hat.block(i * d, i, d, 1) = row_sum - obs.s.block(i * d, i, d, 1);
  }
  return t_hat;
}

Matrix build_sigma_hat(const ObservationSet& obs) {
  const int n = obs.n, d = obs.d;
  Matrix sigma_hat = Matrix::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i) {
    Matrix block = Matrix::Zero(d, d);
    for (int j = 0; j < n; ++j) {
      const Vector sij = obs.s.block(i * d, j, d, 1);
      block += sij * sij.transpose();
    }
    sigma_hat.block(i * d, i * d, d, d) = block;
  }
  return sigma_hat;
}

DataMatrix build_omega(const ObservationSet& obs) {
  const int n = obs.n, d = obs.d;
  DataMatrix dm;
  dm.n = n;
  dm.d = d;
  dm.t_hat = build_t_hat(obs);
  dm.sigma_hat = build_sigma_hat(obs);
  Matrix omega = 2.0 * n * Matrix::Identity(n * d, n * d) - 2.0 * obs.S + dm.sigma_hat -
                 dm.t_hat * dm.t_hat.transpose() / (2.0 * n);
  dm.omega = 0.5 * (omega + omega.transpose());
  return dm;
}

void save_omega_txt(const DataMatrix& dm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << dm.omega.rows() << ' ' << dm.omega.cols() << '\n';
  for (int r = 0; r < dm.omega.rows(); ++r) {
    for (int c = 0; c < dm.omega.cols(); ++c) out << (c ? " " : "") << dm.omega(r, c);
    out << '\n';
  }
}

}  // namespace sesync
