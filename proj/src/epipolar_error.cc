#include "epigeom/epipolar_error.h"

#include <cmath>

namespace epigeom {

double NormalizedEpipolarError(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  const Vec3 rf0 = pose.rotation() * obs.f0.vec();
  return std::abs(obs.f1.vec().dot(t_hat.cross(rf0)));
}

double StandardEpipolarError(const RelativePose& pose, const ObservationPair& obs) {
  const auto f0 = obs.f0_normalized();
  const auto f1 = obs.f1_normalized();
  if (!f0 || !f1) {
    throw GeometryError(GeometryError::Kind::kUndefinedCoordinates,
                        "ray is not representable in z=1 coordinates");
  }
  const Vec3& t_hat = pose.translation_dir();
  return std::abs(f1->dot(t_hat.cross(pose.rotation() * *f0)));
}

double PlaneDistanceError(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  const Vec3 normal = t_hat.cross(pose.rotation() * obs.f0.vec());
  const double normal_norm = normal.norm();
  if (normal_norm <= 1e-12) {
    throw GeometryError(GeometryError::Kind::kDegeneratePlane,
                        "t_hat is parallel to R f0; epipolar plane undefined");
  }
  return NormalizedEpipolarError(pose, obs) / normal_norm;
}

}  // namespace epigeom
