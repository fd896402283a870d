#include "sesync/evaluation.hpp"

#include <stdexcept>

namespace sesync {

RigidMotion align_global(const EstimateSet& est, const GroundTruth& gt) {
  if (est.n != gt.n || est.d != gt.d)
    throw std::invalid_argument("align_global: dimension mismatch");
  const int n = gt.n, d = gt.d;
  Matrix sum = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) sum += gt.rotations[i].transpose() * est.motions[i].R;
  RigidMotion q;
  q.R = project_so(sum);
  q.t = Vector::Zero(d);
  for (int i = 0; i < n; ++i)
    q.t += est.motions[i].t - q.R.transpose() * gt.translations[i];
  q.t /= n;
  return q;
}

ErrorReport error_report(const EstimateSet& est, const GroundTruth& gt) {
  const int n = gt.n;
  const RigidMotion q = align_global(est, gt);
  ErrorReport rep;
  rep.method = est.method;
  rep.alignment = q;
  for (int i = 0; i < n; ++i) {
    const RigidMotion aligned = compose(q, gt.motion(i));  // (R*_i P, P^T t*_i + p)
    const double rot_deg = geodesic_angle_deg(est.motions[i].R, aligned.R);
    const double trans_err = (est.motions[i].t - aligned.t).norm();
    const double se_err = (est.motions[i].hom() - aligned.hom()).norm();
    rep.avg_rotation_deg += rot_deg;
    rep.avg_translation_err += trans_err;
    rep.max_rotation_deg = std::max(rep.max_rotation_deg, rot_deg);
    rep.max_translation_err = std::max(rep.max_translation_err, trans_err);
    rep.max_se_error = std::max(rep.max_se_error, se_err);
  }
  rep.avg_rotation_deg /= n;
  rep.avg_translation_err /= n;
  return rep;
}

}  // namespace sesync
