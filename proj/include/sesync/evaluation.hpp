#pragma once

#include "sesync/estimators.hpp"

namespace sesync {

struct ErrorReport {
  Method method = Method::kAse;
  double max_se_error = 0.0;       // max_i ||hom(G_i) - hom(Q o G*_i)||_F
  double avg_rotation_deg = 0.0;
  double max_rotation_deg = 0.0;
  double avg_translation_err = 0.0;
  double max_translation_err = 0.0;
  RigidMotion alignment;           // the common gauge Q
};

/// Common-gauge alignment: rotation by special-orthogonal Procrustes over
/// sum_i R*_i^T R_i, translation by the residual mean. The aligned ground
/// truth motion i is (R*_i P, P^T t*_i + p).
RigidMotion align_global(const EstimateSet& est, const GroundTruth& gt);

ErrorReport error_report(const EstimateSet& est, const GroundTruth& gt);

}  // namespace sesync
