#pragma once

#include "epigeom/geometry.h"

namespace epigeom {

// Rays after the L1-optimal correction. Exactly one ray is moved; the other
// is returned unchanged with a zero correction angle.
struct CorrectedPair {
  UnitVec3 f0;
  UnitVec3 f1;
  double theta0 = 0.0;
  double theta1 = 0.0;
  int corrected_ray = 1;

  double total_angle() const { return theta0 + theta1; }
};

// Point in the frame of c1 together with signed depths along each corrected
// ray: point ~ t + depth0 * R f0' ~ depth1 * f1'.
struct TriangulatedPoint {
  Vec3 point;
  double depth0 = 0.0;
  double depth1 = 0.0;

  bool cheirality_ok() const { return depth0 >= 0.0 && depth1 >= 0.0; }
};

// Corrections whose angle reaches pi/2 - kPerpendicularMargin are rejected.
inline constexpr double kPerpendicularMargin = 1e-9;

// The minimum of theta0 + theta1 over ray pairs satisfying the epipolar
// constraint, via sin(theta) = min(e/|R f0 x t|, e/|f1 x t|).
// Throws kFullyDegenerate when both rays are parallel to t.
double L1OptimalAngle(const RelativePose& pose, const ObservationPair& obs);

// Projects the ray with the smaller quotient onto the bounding epipolar
// plane of the other ray. Ties within 1e-15 move ray 1.
CorrectedPair L1CorrectRays(const RelativePose& pose, const ObservationPair& obs);

// Least-squares depths along both corrected rays; returns the midpoint of
// the closest points. Throws kParallelRays when |R f0' x f1'| <= 1e-12.
TriangulatedPoint IntersectCorrected(const RelativePose& pose,
                                     const CorrectedPair& corrected);

// theta0 + theta1 for the rays from each camera center to `point` (frame c1)
// measured against the observed rays.
double AngularCost(const RelativePose& pose, const ObservationPair& obs,
                   const Vec3& point);

}  // namespace epigeom
