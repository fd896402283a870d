#include "sesync/registration.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace sesync {

PoseGraph PoseGraph::from_motions(const std::vector<RigidMotion>& absolute) {
  PoseGraph g;
  g.n = static_cast<int>(absolute.size());
  g.relative.assign(g.n, std::vector<RigidMotion>(g.n));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      g.relative[i][j] = (i == j) ? RigidMotion::identity(absolute[i].dim())
                                  : ::sesync::relative(absolute[i], absolute[j]);
  return g;
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply")
    throw std::runtime_error(path + ": not a PLY file");

  long vertex_count = -1;
  bool in_vertex_element = false;
  int x_idx = -1, y_idx = -1, z_idx = -1, prop_idx = 0;
  bool ascii = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment") continue;
    if (tok == "format") {
      ls >> tok;
      if (tok != "ascii") throw std::runtime_error(path + ": binary PLY is unsupported");
      ascii = true;
    } else if (tok == "element") {
      std::string name;
      long count;
      ls >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
    } else if (tok == "property" && in_vertex_element) {
      std::string type, name;
      ls >> type >> name;
      if (type != "float" && type != "double" && type != "float32" && type != "float64")
        throw std::runtime_error(path + ": unsupported vertex property type " + type);
      if (name == "x") x_idx = prop_idx;
      if (name == "y") y_idx = prop_idx;
      if (name == "z") z_idx = prop_idx;
      ++prop_idx;
    } else if (tok == "end_header") {
      break;
    }
  }
  if (!ascii) throw std::runtime_error(path + ": malformed header (no format line)");
  if (vertex_count < 0) throw std::runtime_error(path + ": no vertex element");
  if (x_idx < 0 || y_idx < 0 || z_idx < 0)
    throw std::runtime_error(path + ": vertex element lacks x/y/z properties");

  PointCloud cloud;
  cloud.label = path;
  cloud.points.reserve(vertex_count);
  for (long k = 0; k < vertex_count; ++k) {
    if (!std::getline(in, line))
      throw std::runtime_error(path + ": vertex count mismatch (fewer rows than header)");
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) < prop_idx)
      throw std::runtime_error(path + ": short vertex row");
    Eigen::Vector3d p(vals[x_idx], vals[y_idx], vals[z_idx]);
    if (!p.allFinite()) throw std::runtime_error(path + ": non-finite vertex");
    cloud.points.push_back(p);
  }
  if (cloud.points.empty()) throw std::runtime_error(path + ": empty cloud");
  return cloud;
}

void save_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  out.precision(9);
  for (const auto& p : cloud.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

RigidMotion kabsch_pairwise(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kabsch: size mismatch");
  if (a.size() < 3) throw std::invalid_argument("kabsch: need at least d points");
  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (int k = 0; k < a.size(); ++k) {
    ca += a.points[k];
    cb += b.points[k];
  }
  ca /= a.size();
  cb /= b.size();
  Matrix cov = Matrix::Zero(3, 3);
  for (int k = 0; k < a.size(); ++k)
    cov += (a.points[k] - ca) * (b.points[k] - cb).transpose();

  Eigen::JacobiSVD<Matrix> svd(cov);
  const Vector sv = svd.singularValues();
  if (sv(1) <= 1e-12 * std::max(1.0, sv(0)))
    throw std::runtime_error("kabsch: degenerate geometry (rank < d-1)");

  RigidMotion g;
  g.R = project_so(cov);
  g.t = cb - g.R.transpose() * ca;
  return g;
}

namespace {

// Exact nearest neighbor: exhaustive for small clouds, uniform grid above.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(const std::vector<Eigen::Vector3d>& pts) : pts_(pts) {
    if (pts_.size() <= 2000) return;
    lo_ = hi_ = pts_[0];
    for (const auto& p : pts_) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    const double extent = std::max((hi_ - lo_).maxCoeff(), 1e-9);
    cell_ = extent / std::max(1.0, std::cbrt(static_cast<double>(pts_.size())));
    for (int k = 0; k < static_cast<int>(pts_.size()); ++k)
      cells_[key(pts_[k])].push_back(k);
    use_grid_ = true;
  }

  int query(const Eigen::Vector3d& q) const {
    if (!use_grid_) return exhaustive(q);
    int best = -1;
    double best_sq = std::numeric_limits<double>::max();
    const Eigen::Vector3i qc = coords(q);
    for (int ring = 0;; ++ring) {
      // Once a candidate is found, ring distance (ring-1)*cell is a lower
      // bound on distances from un-scanned cells.
      if (best >= 0 && (ring - 1) * cell_ > std::sqrt(best_sq)) break;
      bool any_cell = scan_ring(qc, ring, q, best, best_sq);
      if (!any_cell && best >= 0) break;
      if (ring > 2 * range_limit()) {
        if (best >= 0) break;
        return exhaustive(q);
      }
    }
    return best;
  }

 private:
  int exhaustive(const Eigen::Vector3d& q) const {
    int best = 0;
    double best_sq = (pts_[0] - q).squaredNorm();
    for (int k = 1; k < static_cast<int>(pts_.size()); ++k) {
      const double dsq = (pts_[k] - q).squaredNorm();
      if (dsq < best_sq) {
        best_sq = dsq;
        best = k;
      }
    }
    return best;
  }

  Eigen::Vector3i coords(const Eigen::Vector3d& p) const {
    return ((p - lo_) / cell_).array().floor().cast<int>();
  }
  long long key(const Eigen::Vector3d& p) const {
    const Eigen::Vector3i c = coords(p);
    return (static_cast<long long>(c.x()) * 73856093LL) ^
           (static_cast<long long>(c.y()) * 19349663LL) ^
           (static_cast<long long>(c.z()) * 83492791LL);
  }
  long long key_of(const Eigen::Vector3i& c) const {
    return (static_cast<long long>(c.x()) * 73856093LL) ^
           (static_cast<long long>(c.y()) * 19349663LL) ^
           (static_cast<long long>(c.z()) * 83492791LL);
  }
  int range_limit() const {
    return static_cast<int>(std::ceil((hi_ - lo_).norm() / cell_)) + 2;
  }

  bool scan_ring(const Eigen::Vector3i& qc, int ring, const Eigen::Vector3d& q,
                 int& best, double& best_sq) const {
    bool any = false;
    for (int dx = -ring; dx <= ring; ++dx)
      for (int dy = -ring; dy <= ring; ++dy)
        for (int dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
          auto it = cells_.find(key_of(qc + Eigen::Vector3i(dx, dy, dz)));
          if (it == cells_.end()) continue;
          any = true;
          for (int k : it->second) {
            const double dsq = (pts_[k] - q).squaredNorm();
            if (dsq < best_sq) {
              best_sq = dsq;
              best = k;
            }
          }
        }
    return any;
  }

  const std::vector<Eigen::Vector3d>& pts_;
  bool use_grid_ = false;
  Eigen::Vector3d lo_, hi_;
  double cell_ = 1.0;
  std::unordered_map<long long, std::vector<int>> cells_;
};

double correspondence_rms(const PointCloud& a, const PointCloud& b,
                          const NearestNeighborIndex& index, const RigidMotion& g,
                          std::vector<int>& match) {
  double sum_sq = 0.0;
  match.resize(a.size());
  for (int k = 0; k < a.size(); ++k) {
    const Eigen::Vector3d p = g.R.transpose() * a.points[k] + g.t;
    match[k] = index.query(p);
    sum_sq += (p - b.points[match[k]]).squaredNorm();
  }
  return std::sqrt(sum_sq / a.size());
}

}  // namespace

IcpResult icp_refine(const PointCloud& a, const PointCloud& b, const RigidMotion& init,
                     int max_iters, double tol) {
  if (a.points.empty() || b.points.empty())
    throw std::invalid_argument("icp_refine: empty cloud");
  NearestNeighborIndex index(b.points);
  std::vector<int> match;

  IcpResult best{init, correspondence_rms(a, b, index, init, match), 0};
  RigidMotion current = init;
  double prev_rms = best.rms;
  for (int iter = 1; iter <= max_iters; ++iter) {
    PointCloud matched;
    matched.points.reserve(a.size());
    for (int k = 0; k < a.size(); ++k) matched.points.push_back(b.points[match[k]]);
    current = kabsch_pairwise(a, matched);
    const double rms = correspondence_rms(a, b, index, current, match);
    if (rms < best.rms) {
      best.motion = current;
      best.rms = rms;
      best.iterations = iter;
    }
    if (std::abs(prev_rms - rms) < tol || rms > best.rms) break;
    prev_rms = rms;
  }
  return best;
}

PoseGraph perturb_pose_graph(const PoseGraph& truth, double max_angle_deg,
                             double trans_sigma_mm, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PoseGraph out = truth;
  for (int i = 0; i < truth.n; ++i) {
    for (int j = 0; j < truth.n; ++j) {
      if (i == j) continue;
      const double angle = uni(rng) * max_angle_deg * M_PI / 180.0;
      Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
      while (axis.norm() < 1e-12) axis = {gauss(rng), gauss(rng), gauss(rng)};
      axis.normalize();
      const Matrix noise_rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();

      Matrix H = truth.relative[i][j].hom();
      H.topLeftCorner(3, 3) = noise_rot * H.topLeftCorner(3, 3);
      for (int c = 0; c < 3; ++c) H(c, 3) += trans_sigma_mm * gauss(rng);
      out.relative[i][j] = RigidMotion::from_hom(H);
    }
  }
  return out;
}

RegistrationResult register_scans(const std::vector<PointCloud>& scans,
                                  const PoseGraph& graph, Method method) {
  const int n = graph.n;
  if (static_cast<int>(scans.size()) != n)
    throw std::invalid_argument("register_scans: scan/graph count mismatch");
  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, true));
  const ObservationSet obs = observations_from_motions(graph.relative, present);

  RegistrationResult result;
  switch (method) {
    case Method::kAse: result.estimates = ase(obs); break;
    case Method::kTwoStage: result.estimates = two_stage(obs); break;
    case Method::kNaiveProjection: result.estimates = naive_projection(obs, true); break;
  }

  for (int i = 0; i < n; ++i) {
    const RigidMotion& g = result.estimates.motions[i];
    for (const auto& p : scans[i].points)
      result.merged.points.push_back(g.R.transpose() * p + g.t);
  }
  result.merged.label = "merged";
  return result;
}

void save_pose_graph_csv(const PoseGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "i,j,r00,r01,r02,r10,r11,r12,r20,r21,r22,t0,t1,t2\n";
  for (int i = 0; i < graph.n; ++i) {
    for (int j = 0; j < graph.n; ++j) {
      if (i == j) continue;
      const RigidMotion& g = graph.relative[i][j];
      out << i << ',' << j;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ',' << g.R(r, c);
      for (int c = 0; c < 3; ++c) out << ',' << g.t(c);
      out << '\n';
    }
  }
}

PoseGraph load_pose_graph_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  struct Row {
    int i, j;
    RigidMotion g;
  };
  std::vector<Row> rows;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    auto next = [&] {
      if (!std::getline(ls, field, ',')) throw std::runtime_error("pose graph csv: short row");
      return field;
    };
    Row row;
    row.i = std::stoi(next());
    row.j = std::stoi(next());
    row.g.R = Matrix(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) row.g.R(r, c) = std::stod(next());
    row.g.t = Vector(3);
    for (int c = 0; c < 3; ++c) row.g.t(c) = std::stod(next());
    n = std::max({n, row.i + 1, row.j + 1});
    rows.push_back(std::move(row));
  }
  PoseGraph graph;
  graph.n = n;
  graph.relative.assign(n, std::vector<RigidMotion>(n, RigidMotion::identity(3)));
  std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
  for (auto& row : rows) {
    graph.relative[row.i][row.j] = std::move(row.g);
    seen[row.i][row.j] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !seen[i][j])
        throw std::runtime_error("pose graph csv: incomplete graph, missing (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
  return graph;
}

}  // namespace sesync
