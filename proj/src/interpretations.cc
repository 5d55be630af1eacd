#include "epigeom/interpretations.h"

#include <algorithm>
#include <cmath>

#include "epigeom/epipolar_error.h"
#include "epigeom/l1_triangulation.h"

namespace epigeom {
namespace {

constexpr double kDegenerateNorm = 1e-12;

}  // namespace

double TetrahedronVolume(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  const Vec3 rf0 = pose.rotation() * obs.f0.vec();
  return std::abs(t_hat.dot(rf0.cross(obs.f1.vec()))) / 6.0;
}

double RayDistance(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3 m = (pose.rotation() * obs.f0.vec()).cross(obs.f1.vec());
  const double m_norm = m.norm();
  if (m_norm <= kDegenerateNorm) {
    throw GeometryError(GeometryError::Kind::kParallelRays,
                        "rays are parallel; distance is undefined");
  }
  return std::abs(pose.translation().dot(m)) / m_norm;
}

double ParallaxAngle(const RelativePose& pose, const ObservationPair& obs) {
  return AcuteAngleBetween(pose.rotation() * obs.f0.vec(), obs.f1.vec());
}

double DistanceIdentity(const RelativePose& pose, const ObservationPair& obs) {
  const double d = RayDistance(pose, obs);
  return std::sin(ParallaxAngle(pose, obs)) * d / pose.translation_norm();
}

IncidenceAngles IncidenceAnglesOf(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  return {AcuteAngleBetween(pose.rotation() * obs.f0.vec(), t_hat),
          AcuteAngleBetween(obs.f1.vec(), t_hat)};
}

double DihedralAngle(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  const Vec3 n0 = (pose.rotation() * obs.f0.vec()).cross(t_hat);
  const Vec3 n1 = obs.f1.vec().cross(t_hat);
  if (n0.norm() <= kDegenerateNorm || n1.norm() <= kDegenerateNorm) {
    throw GeometryError(GeometryError::Kind::kDegeneratePlane,
                        "a ray is parallel to t_hat; bounding plane undefined");
  }
  const double s = n0.normalized().cross(n1.normalized()).norm();
  return std::asin(std::clamp(s, -1.0, 1.0));
}

double DihedralIdentity(const RelativePose& pose, const ObservationPair& obs) {
  const double alpha = DihedralAngle(pose, obs);
  const IncidenceAngles phi = IncidenceAnglesOf(pose, obs);
  return std::sin(phi.phi0) * std::sin(phi.phi1) * std::sin(alpha);
}

double QuadrupleProductCheck(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  const Vec3 a = (pose.rotation() * obs.f0.vec()).cross(t_hat);
  const Vec3 b = obs.f1.vec().cross(t_hat);
  return a.cross(b).norm();
}

double L1Identity(const RelativePose& pose, const ObservationPair& obs,
                  double theta_l1) {
  const IncidenceAngles phi = IncidenceAnglesOf(pose, obs);
  return std::sin(std::max(phi.phi0, phi.phi1)) * std::sin(theta_l1);
}

ErrorBreakdown FullBreakdown(const RelativePose& pose, const ObservationPair& obs) {
  ErrorBreakdown out;
  out.e_hat = NormalizedEpipolarError(pose, obs);
  out.volume = TetrahedronVolume(pose, obs);
  out.volume_estimate = 6.0 * out.volume;
  out.parallax = ParallaxAngle(pose, obs);
  const IncidenceAngles phi = IncidenceAnglesOf(pose, obs);
  out.phi0 = phi.phi0;
  out.phi1 = phi.phi1;
  out.quadruple_product = QuadrupleProductCheck(pose, obs);

  auto record = [&out](const char* field, const GeometryError& e) {
    out.degeneracies.push_back(std::string(field) + ": " + KindName(e.kind()));
  };

  try {
    out.ray_distance = RayDistance(pose, obs);
    out.distance_estimate = DistanceIdentity(pose, obs);
  } catch (const GeometryError& e) {
    record("ray_distance", e);
    out.distance_estimate = 0.0;
  }
  try {
    out.dihedral = DihedralAngle(pose, obs);
    out.dihedral_estimate = DihedralIdentity(pose, obs);
  } catch (const GeometryError& e) {
    record("dihedral", e);
  }
  try {
    out.theta_l1 = L1OptimalAngle(pose, obs);
    out.l1_estimate = L1Identity(pose, obs, *out.theta_l1);
  } catch (const GeometryError& e) {
    record("theta_l1", e);
  }
  return out;
}

}  // namespace epigeom
