#include "epigeom/l1_triangulation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "epigeom/epipolar_error.h"

namespace epigeom {
namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kTieTolerance = 1e-15;

struct Quotients {
  // Sine of the angle needed to move ray 1 onto the plane of ray 0, and
  // vice versa. Infinite when the target plane is undefined.
  double move_ray1;
  double move_ray0;
};

Quotients ComputeQuotients(const RelativePose& pose, const ObservationPair& obs) {
  const Vec3& t_hat = pose.translation_dir();
  const Vec3 rf0 = pose.rotation() * obs.f0.vec();
  const double plane0 = rf0.cross(t_hat).norm();
  const double plane1 = obs.f1.vec().cross(t_hat).norm();
  if (std::max(plane0, plane1) <= kDegenerateNorm) {
    throw GeometryError(GeometryError::Kind::kFullyDegenerate,
                        "both rays are parallel to the translation");
  }
  const double e_hat = NormalizedEpipolarError(pose, obs);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return {plane0 > kDegenerateNorm ? e_hat / plane0 : kInf,
          plane1 > kDegenerateNorm ? e_hat / plane1 : kInf};
}

Vec3 ProjectOntoPlane(const Vec3& v, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  return v - v.dot(n) * n;
}

}  // namespace

double L1OptimalAngle(const RelativePose& pose, const ObservationPair& obs) {
  const Quotients q = ComputeQuotients(pose, obs);
  return std::asin(std::clamp(std::min(q.move_ray1, q.move_ray0), 0.0, 1.0));
}

CorrectedPair L1CorrectRays(const RelativePose& pose, const ObservationPair& obs) {
  const Quotients q = ComputeQuotients(pose, obs);
  const bool move_ray0 = q.move_ray0 < q.move_ray1 - kTieTolerance;
  const double sine = std::clamp(move_ray0 ? q.move_ray0 : q.move_ray1, 0.0, 1.0);
  if (std::asin(sine) >= std::numbers::pi / 2 - kPerpendicularMargin) {
    throw GeometryError(GeometryError::Kind::kPerpendicularRay,
                        "ray is perpendicular to the target epipolar plane");
  }

  const Vec3& t_hat = pose.translation_dir();
  const Vec3 rf0 = pose.rotation() * obs.f0.vec();
  const Vec3& f1 = obs.f1.vec();
  if (move_ray0) {
    const UnitVec3 rf0_corr(ProjectOntoPlane(rf0, f1.cross(t_hat)));
    return {UnitVec3(pose.rotation().Transpose() * rf0_corr.vec()), obs.f1,
            AngleBetween(rf0, rf0_corr), 0.0, 0};
  }
  const UnitVec3 f1_corr(ProjectOntoPlane(f1, rf0.cross(t_hat)));
  return {obs.f0, f1_corr, 0.0, AngleBetween(f1, f1_corr), 1};
}

TriangulatedPoint IntersectCorrected(const RelativePose& pose,
                                     const CorrectedPair& corrected) {
  const Vec3& t = pose.translation();
  const Vec3 d0 = pose.rotation() * corrected.f0.vec();
  const Vec3& d1 = corrected.f1.vec();
  const Vec3 n = d0.cross(d1);
  const double n_sq = n.squaredNorm();
  if (std::sqrt(n_sq) <= kDegenerateNorm) {
    throw GeometryError(GeometryError::Kind::kParallelRays,
                        "corrected rays are parallel");
  }
  // t + s0 d0 - s1 d1 must be parallel to n; crossing with d1 (resp. d0)
  // and projecting on n isolates each depth.
  const double s0 = -t.cross(d1).dot(n) / n_sq;
  const double s1 = -t.cross(d0).dot(n) / n_sq;
  TriangulatedPoint out;
  out.point = 0.5 * ((t + s0 * d0) + s1 * d1);
  out.depth0 = s0;
  out.depth1 = s1;
  return out;
}

double AngularCost(const RelativePose& pose, const ObservationPair& obs,
                   const Vec3& point) {
  const Vec3 rf0 = pose.rotation() * obs.f0.vec();
  return AngleBetween(rf0, point - pose.translation()) +
         AngleBetween(obs.f1.vec(), point);
}

}  // namespace epigeom
