#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sesync/synthesis.hpp"

using namespace sesync;

TEST_CASE("ground truth: zero scale gives zero translations") {
  Rng rng(7);
  const GroundTruth gt = generate_ground_truth(2, 2, 0.0, rng);
  CHECK(gt.translations[0].norm() == 0.0);
  CHECK(gt.translations[1].norm() == 0.0);
  CHECK(gt.max_translation_norm == 0.0);
}

TEST_CASE("ground truth: translations recentered, rotations proper") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const GroundTruth gt = generate_ground_truth(12, 3, 2.5, rng);
    Vector sum = Vector::Zero(3);
    double mt = 0.0;
    for (int i = 0; i < gt.n; ++i) {
      sum += gt.translations[i];
      mt = std::max(mt, gt.translations[i].norm());
      CHECK(is_rotation(gt.rotations[i]));
    }
    CHECK(sum.norm() < 1e-12);
    CHECK(gt.max_translation_norm == doctest::Approx(mt).epsilon(1e-14));
  }
}

TEST_CASE("ground truth: empirical per-coordinate translation std near scale") {
  Rng rng(13);
  double sq = 0.0;
  int count = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const GroundTruth gt = generate_ground_truth(500, 3, 1.0, rng);
    for (const auto& t : gt.translations) sq += t.squaredNorm();
    count += gt.n * gt.d;
  }
  const double std_dev = std::sqrt(sq / count);
  CHECK(std_dev > 0.9);
  CHECK(std_dev < 1.1);
}

TEST_CASE("ground truth: rejects n < 2") {
  Rng rng(1);
  CHECK_THROWS(generate_ground_truth(1, 3, 1.0, rng));
}

TEST_CASE("observations: determinism for identical seeds") {
  Rng rng_gt(5);
  const GroundTruth gt = generate_ground_truth(8, 3, 1.0, rng_gt);
  Rng a(99), b(99);
  const ObservationSet oa = synthesize_observations(gt, 0.7, 0.4, a);
  const ObservationSet ob = synthesize_observations(gt, 0.7, 0.4, b);
  CHECK(oa.S == ob.S);
  CHECK(oa.s == ob.s);
}

TEST_CASE("observations: noiseless blocks are exact and cocycle-consistent") {
  Rng rng(17);
  const GroundTruth gt = generate_ground_truth(6, 3, 1.0, rng);
  const ObservationSet obs = synthesize_observations(gt, 0.0, 0.0, rng);
  const int n = gt.n, d = gt.d;
  for (int i = 0; i < n; ++i) {
    CHECK((obs.block_S(i, i) - Matrix::Identity(d, d)).norm() == 0.0);
    CHECK(obs.block_s(i, i).norm() == 0.0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Matrix clean_S = gt.rotations[i] * gt.rotations[j].transpose();
      const Vector clean_s = gt.rotations[i] * (gt.translations[j] - gt.translations[i]);
      CHECK((Matrix(obs.block_S(i, j)) - clean_S).norm() < 1e-14);
      CHECK((Vector(obs.block_s(i, j)) - clean_s).norm() < 1e-14);
    }
  }
  // Composing i->j->k comparisons reproduces the direct i->k comparison.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Matrix sij = obs.block_S(i, j), sjk = obs.block_S(j, k);
        CHECK((sij * sjk - Matrix(obs.block_S(i, k))).norm() < 1e-10);
        const Vector chained = Vector(obs.block_s(i, j)) + sij * Vector(obs.block_s(j, k));
        CHECK((chained - Vector(obs.block_s(i, k))).norm() < 1e-10);
      }
}

TEST_CASE("observations: mirrored mode is symmetric, independent mode is not") {
  Rng rng(23);
  const GroundTruth gt = generate_ground_truth(10, 3, 1.0, rng);
  const ObservationSet mirrored = synthesize_observations(gt, 0.5, 0.5, rng);
  CHECK((mirrored.S - mirrored.S.transpose()).norm() == 0.0);
  // Mirrored translation noise is antisymmetric: s_ij + S-free clean parts cancel.
  for (int i = 0; i < gt.n; ++i)
    for (int j = i + 1; j < gt.n; ++j) {
      const Vector wij = Vector(mirrored.block_s(i, j)) -
                         gt.rotations[i] * (gt.translations[j] - gt.translations[i]);
      const Vector wji = Vector(mirrored.block_s(j, i)) -
                         gt.rotations[j] * (gt.translations[i] - gt.translations[j]);
      CHECK((wij + wji).norm() < 1e-14);
    }

  const ObservationSet indep =
      synthesize_observations(gt, 0.5, 0.5, rng, MirrorMode::kIndependent);
  CHECK((indep.S - indep.S.transpose()).norm() > 1e-3);
}

TEST_CASE("observations: empirical rotation-noise entry variance") {
  Rng rng(29);
  const GroundTruth gt = generate_ground_truth(200, 3, 1.0, rng);
  const ObservationSet obs = synthesize_observations(gt, 1.0, 0.3, rng);
  double sq = 0.0;
  long count = 0;
  for (int i = 0; i < gt.n; ++i)
    for (int j = 0; j < gt.n; ++j) {
      if (i == j) continue;
      const Matrix w =
          Matrix(obs.block_S(i, j)) - gt.rotations[i] * gt.rotations[j].transpose();
      sq += w.squaredNorm();
      count += w.size();
    }
  const double variance = sq / count;
  CHECK(variance > 0.95);
  CHECK(variance < 1.05);
}

TEST_CASE("observations: negative noise level rejected") {
  Rng rng(3);
  const GroundTruth gt = generate_ground_truth(3, 2, 1.0, rng);
  CHECK_THROWS(synthesize_observations(gt, -0.1, 0.0, rng));
}

TEST_CASE("observations from relative motions match noiseless synthesis") {
  Rng rng(31);
  const GroundTruth gt = generate_ground_truth(7, 3, 1.0, rng);
  Rng rng2 = rng;
  const ObservationSet direct = synthesize_observations(gt, 0.0, 0.0, rng2);

  std::vector<std::vector<RigidMotion>> grid(gt.n, std::vector<RigidMotion>(gt.n));
  for (int i = 0; i < gt.n; ++i)
    for (int j = 0; j < gt.n; ++j)
      grid[i][j] = (i == j) ? RigidMotion::identity(gt.d)
                            : relative(gt.motion(i), gt.motion(j));
  const ObservationSet imported = observations_from_motions(grid);
  CHECK((imported.S - direct.S).norm() < 1e-12);
  CHECK((imported.s - direct.s).norm() < 1e-12);
  CHECK(!imported.sigma_known());
}

TEST_CASE("observations from an incomplete grid are rejected") {
  Rng rng(37);
  const GroundTruth gt = generate_ground_truth(4, 2, 1.0, rng);
  std::vector<std::vector<RigidMotion>> grid(gt.n);
  for (int i = 0; i < gt.n; ++i) {
    for (int j = 0; j < gt.n; ++j)
      grid[i].push_back(i == j ? RigidMotion::identity(gt.d)
                               : relative(gt.motion(i), gt.motion(j)));
  }
  grid[1].pop_back();  // drop pair (1, 3)
  CHECK_THROWS(observations_from_motions(grid));
}

TEST_CASE("observation CSV round trip") {
  Rng rng(41);
  const GroundTruth gt = generate_ground_truth(5, 3, 1.0, rng);
  const ObservationSet obs = synthesize_observations(gt, 0.4, 0.6, rng);

  std::stringstream buffer;
  save_observations_csv(obs, buffer);
  const ObservationSet back = load_observations_csv(buffer);
  CHECK(back.n == obs.n);
  CHECK(back.d == obs.d);
  CHECK(back.sigma1 == doctest::Approx(obs.sigma1));
  CHECK(back.sigma2 == doctest::Approx(obs.sigma2));
  CHECK(back.mirror_mode == obs.mirror_mode);
  CHECK((back.S - obs.S).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.s - obs.s).cwiseAbs().maxCoeff() < 1e-12);
}
