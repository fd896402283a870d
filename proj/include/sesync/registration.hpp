#pragma once

#include <string>
#include <vector>

#include "sesync/estimators.hpp"
#include "sesync/evaluation.hpp"

namespace sesync {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;  // millimeters
  std::string label;

  int size() const { return static_cast<int>(points.size()); }
};

/// Complete grid of relative motions C_ij (diagonal identity). C_ij maps
/// scan-j coordinates into scan-i coordinates.
struct PoseGraph {
  int n = 0;
  std::vector<std::vector<RigidMotion>> relative;  // n x n

  static PoseGraph from_motions(const std::vector<RigidMotion>& absolute);
};

/// ASCII PLY, x/y/z float or double vertex properties only.
PointCloud load_ply(const std::string& path);
void save_ply(const PointCloud& cloud, const std::string& path);

/// Least-squares motion for positionally corresponded clouds, minimizing
/// sum_k ||R^T a_k + t - b_k||^2 (the motion's action maps A onto B).
RigidMotion kabsch_pairwise(const PointCloud& a, const PointCloud& b);

struct IcpResult {
  RigidMotion motion;
  double rms = 0.0;
  int iterations = 0;
};

/// Alternate exact nearest-neighbor correspondence and Kabsch alignment,
/// starting from `init`, until the RMS improvement drops below `tol` or
/// `max_iters` is reached. The best iterate seen is returned, so the final
/// RMS never exceeds the initial one.
IcpResult icp_refine(const PointCloud& a, const PointCloud& b, const RigidMotion& init,
                     int max_iters = 50, double tol = 1e-10);

/// Compose each off-diagonal relative rotation with a random rotation whose
/// angle is uniform in [0, max_angle_deg] about a uniform axis, and add
/// N(0, trans_sigma^2 I) to each relative translation.
PoseGraph perturb_pose_graph(const PoseGraph& truth, double max_angle_deg,
                             double trans_sigma_mm, Rng& rng);

struct RegistrationResult {
  EstimateSet estimates;
  PointCloud merged;
};

/// Synchronize the pose graph with the chosen estimator and merge all scans
/// into the common frame of the estimates.
RegistrationResult register_scans(const std::vector<PointCloud>& scans,
                                  const PoseGraph& graph, Method method);

/// Pose graph CSV: one row per ordered pair, "i,j,r00..r22,t0,t1,t2"
/// (rotation row-major, then translation).
void save_pose_graph_csv(const PoseGraph& graph, const std::string& path);
PoseGraph load_pose_graph_csv(const std::string& path);

}  // namespace sesync
