#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sesync/experiments.hpp"
#include "sesync/registration.hpp"

using namespace sesync;

namespace {

PointCloud random_cloud(int count, Rng& rng, double extent = 100.0) {
  std::uniform_real_distribution<double> coord(-extent, extent);
  PointCloud cloud;
  for (int k = 0; k < count; ++k)
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
  return cloud;
}

PointCloud apply_motion(const PointCloud& cloud, const RigidMotion& g) {
  PointCloud out;
  for (const auto& p : cloud.points) {
    const Vector q = g.apply(Vector(p));
    out.points.emplace_back(q(0), q(1), q(2));
  }
  return out;
}

double paired_rms(const PointCloud& a, const PointCloud& b) {
  double sq = 0.0;
  for (int k = 0; k < a.size(); ++k) sq += (a.points[k] - b.points[k]).squaredNorm();
  return std::sqrt(sq / a.size());
}

RigidMotion random_motion(Rng& rng, double trans = 50.0) {
  std::uniform_real_distribution<double> coord(-trans, trans);
  return {random_rotation(rng, 3), Eigen::Vector3d(coord(rng), coord(rng), coord(rng))};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

struct FileGuard {
  std::string path;
  ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("PLY: save/load round trip") {
  Rng rng(1);
  const PointCloud cloud = random_cloud(100, rng);
  const std::string path = "roundtrip_test.ply";
  FileGuard guard{path};
  save_ply(cloud, path);
  const PointCloud back = load_ply(path);
  REQUIRE(back.size() == cloud.size());
  double worst = 0.0;
  for (int k = 0; k < cloud.size(); ++k)
    worst = std::max(worst, (cloud.points[k] - back.points[k]).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-6);
}

TEST_CASE("PLY: one-vertex hand-written file") {
  const std::string path = "single_vertex.ply";
  FileGuard guard{path};
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n1.5 -2.25 3.0\n");
  const PointCloud cloud = load_ply(path);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0] == Eigen::Vector3d(1.5, -2.25, 3.0));
}

TEST_CASE("PLY: malformed inputs rejected") {
  const std::string path = "bad.ply";
  FileGuard guard{path};

  SUBCASE("binary format") {
    write_file(path,
               "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n");
    CHECK_THROWS(load_ply(path));
  }
  SUBCASE("missing coordinate property") {
    write_file(path,
               "ply\nformat ascii 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nend_header\n1 2\n");
    CHECK_THROWS(load_ply(path));
  }
  SUBCASE("vertex count mismatch") {
    write_file(path,
               "ply\nformat ascii 1.0\nelement vertex 3\n"
               "property float x\nproperty float y\nproperty float z\n"
               "end_header\n1 2 3\n4 5 6\n");
    CHECK_THROWS(load_ply(path));
  }
  SUBCASE("not a ply file") {
    write_file(path, "obj\n");
    CHECK_THROWS(load_ply(path));
  }
}

TEST_CASE("Kabsch: identity on identical clouds") {
  Rng rng(3);
  const PointCloud cloud = random_cloud(50, rng);
  const RigidMotion g = kabsch_pairwise(cloud, cloud);
  CHECK((g.R - Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK(g.t.norm() < 1e-10);
}

TEST_CASE("Kabsch: exact recovery of a known motion") {
  Rng rng(5);
  const PointCloud a = random_cloud(60, rng);
  const RigidMotion truth = random_motion(rng);
  const PointCloud b = apply_motion(a, truth);
  const RigidMotion est = kabsch_pairwise(a, b);
  CHECK((est.R - truth.R).norm() < 1e-9);
  CHECK((est.t - truth.t).norm() < 1e-9);
  CHECK(paired_rms(apply_motion(a, est), b) < 1e-9);
}

TEST_CASE("Kabsch: local perturbations cannot beat the estimate under jitter") {
  Rng rng(7);
  const PointCloud a = random_cloud(200, rng);
  const RigidMotion truth = random_motion(rng);
  PointCloud b = apply_motion(a, truth);
  std::normal_distribution<double> jitter(0.0, 0.1);
  for (auto& p : b.points) p += Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng));

  const RigidMotion est = kabsch_pairwise(a, b);
  const double best = paired_rms(apply_motion(a, est), b);

  // Grid of small translation offsets and axis rotations around the estimate.
  for (double eps : {1e-3, 1e-2, 0.1}) {
    for (int axis = 0; axis < 3; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        RigidMotion shifted = est;
        shifted.t(axis) += sign * eps;
        CHECK(best <= paired_rms(apply_motion(a, shifted), b) + 1e-6);

        Matrix rot = Matrix::Identity(3, 3);
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        rot(u, u) = std::cos(sign * eps);
        rot(u, v) = -std::sin(sign * eps);
        rot(v, u) = std::sin(sign * eps);
        rot(v, v) = std::cos(sign * eps);
        RigidMotion turned{est.R * rot, est.t};
        CHECK(best <= paired_rms(apply_motion(a, turned), b) + 1e-6);
      }
    }
  }
}

TEST_CASE("Kabsch: degenerate geometry rejected") {
  PointCloud a, b;
  for (int k = 0; k < 10; ++k) {
    a.points.emplace_back(k, 0.0, 0.0);  // collinear
    b.points.emplace_back(k, 0.0, 0.0);
  }
  CHECK_THROWS(kabsch_pairwise(a, b));
}

TEST_CASE("ICP: exact initialization returns immediately") {
  Rng rng(9);
  const PointCloud a = random_cloud(100, rng);
  const RigidMotion truth = random_motion(rng);
  const PointCloud b = apply_motion(a, truth);
  const IcpResult res = icp_refine(a, b, truth);
  CHECK(res.rms < 1e-9);
  CHECK((res.motion.R - truth.R).norm() < 1e-9);
}

TEST_CASE("ICP: converges from a small pose perturbation") {
  Rng rng(11);
  const PointCloud a = random_cloud(500, rng);
  const RigidMotion truth = random_motion(rng, 10.0);
  const PointCloud b = apply_motion(a, truth);

  // 2 degrees about z, 0.5 mm offset.
  const double ang = 2.0 * M_PI / 180.0;
  Matrix rz = Matrix::Identity(3, 3);
  rz(0, 0) = std::cos(ang);
  rz(0, 1) = -std::sin(ang);
  rz(1, 0) = std::sin(ang);
  rz(1, 1) = std::cos(ang);
  RigidMotion init{truth.R * rz, truth.t + Eigen::Vector3d(0.5, 0.0, 0.0)};

  const IcpResult res = icp_refine(a, b, init);
  CHECK(geodesic_angle_deg(res.motion.R, truth.R) < 0.1);

  // Monotone contract: refined RMS never exceeds the initial one.
  const double init_rms = paired_rms(apply_motion(a, init), b);
  CHECK(res.rms <= init_rms + 1e-12);
}

TEST_CASE("ICP: zero iteration budget returns the initialization") {
  Rng rng(13);
  const PointCloud a = random_cloud(50, rng);
  const PointCloud b = apply_motion(a, random_motion(rng));
  const RigidMotion init = random_motion(rng);
  const IcpResult res = icp_refine(a, b, init, 0);
  CHECK(res.motion.R == init.R);
  CHECK(res.motion.t == init.t);
  CHECK(res.iterations == 0);
}

TEST_CASE("pose graph perturbation statistics") {
  Rng rng(17);
  std::vector<RigidMotion> absolute;
  for (int i = 0; i < 100; ++i) absolute.push_back(random_motion(rng, 20.0));
  const PoseGraph truth = PoseGraph::from_motions(absolute);

  SUBCASE("zero perturbation is the identity map") {
    Rng r2(1);
    const PoseGraph same = perturb_pose_graph(truth, 0.0, 0.0, r2);
    for (int i = 0; i < truth.n; ++i)
      for (int j = 0; j < truth.n; ++j) {
        CHECK((same.relative[i][j].R - truth.relative[i][j].R).norm() < 1e-12);
        CHECK((same.relative[i][j].t - truth.relative[i][j].t).norm() < 1e-12);
      }
  }

  SUBCASE("angles in range, translation noise at the right scale") {
    Rng r2(2);
    const PoseGraph noisy = perturb_pose_graph(truth, 8.0, 0.8, r2);
    double sq = 0.0;
    long count = 0;
    for (int i = 0; i < truth.n; ++i)
      for (int j = 0; j < truth.n; ++j) {
        if (i == j) continue;
        const double angle =
            geodesic_angle_deg(noisy.relative[i][j].R, truth.relative[i][j].R);
        CHECK(angle >= 0.0);
        CHECK(angle <= 8.0 + 1e-9);
        const Vector diff = noisy.relative[i][j].t - truth.relative[i][j].t;
        sq += diff.squaredNorm();
        count += 3;
      }
    const double std_dev = std::sqrt(sq / count);
    CHECK(std_dev > 0.72);
    CHECK(std_dev < 0.88);
  }
}

TEST_CASE("register_scans: exact graph merges scans exactly") {
  Rng rng(19);
  const SyntheticScans fixture = make_synthetic_scans(5, 200, rng);

  // Truth merge: each scan mapped back to the world frame by its own motion.
  std::vector<PointCloud> truth_frames;
  for (int i = 0; i < 5; ++i)
    truth_frames.push_back(apply_motion(fixture.scans[i], fixture.motions[i]));

  for (Method m : {Method::kAse, Method::kTwoStage, Method::kNaiveProjection}) {
    const RegistrationResult res = register_scans(fixture.scans, fixture.truth_graph, m);
    REQUIRE(res.merged.size() == 5 * 200);
    // The merged cloud agrees with the truth merge up to one common motion;
    // estimate it from the first scan's points and apply it everywhere.
    PointCloud merged_first, truth_first;
    for (int k = 0; k < 200; ++k) {
      merged_first.points.push_back(res.merged.points[k]);
      truth_first.points.push_back(truth_frames[0].points[k]);
    }
    const RigidMotion gauge = kabsch_pairwise(merged_first, truth_first);
    double sq = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int k = 0; k < 200; ++k) {
        const Vector mapped = gauge.apply(Vector(res.merged.points[i * 200 + k]));
        sq += (mapped - Vector(truth_frames[i].points[k])).squaredNorm();
      }
    CHECK(std::sqrt(sq / (5 * 200)) < 1e-7);
  }
}

TEST_CASE("register_scans rejects an incomplete graph") {
  Rng rng(23);
  const SyntheticScans fixture = make_synthetic_scans(4, 50, rng);
  PoseGraph broken = fixture.truth_graph;
  broken.relative[0].pop_back();
  CHECK_THROWS(register_scans(fixture.scans, broken, Method::kAse));
}

TEST_CASE("pose graph CSV round trip") {
  Rng rng(29);
  std::vector<RigidMotion> absolute;
  for (int i = 0; i < 6; ++i) absolute.push_back(random_motion(rng, 30.0));
  const PoseGraph graph = PoseGraph::from_motions(absolute);
  const std::string path = "graph_roundtrip.csv";
  FileGuard guard{path};
  save_pose_graph_csv(graph, path);
  const PoseGraph back = load_pose_graph_csv(path);
  REQUIRE(back.n == graph.n);
  for (int i = 0; i < graph.n; ++i)
    for (int j = 0; j < graph.n; ++j) {
      CHECK((back.relative[i][j].R - graph.relative[i][j].R).norm() < 1e-12);
      CHECK((back.relative[i][j].t - graph.relative[i][j].t).norm() < 1e-12);
    }
}
