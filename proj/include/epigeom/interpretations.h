#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epigeom/geometry.h"

namespace epigeom {

// Geometric quantities that each reproduce the normalized epipolar error:
//
//   e_hat = 6 V                                  (tetrahedron volume)
//         = sin(beta) d / |t|                    (ray-ray distance)
//         = sin(phi0) sin(phi1) sin(alpha)       (bounding-plane dihedral)
//         = sin(max(phi0, phi1)) sin(theta_L1)   (L1 angular error)
//
// beta, alpha, phi0, phi1 and theta_L1 all live in [0, pi/2].

double TetrahedronVolume(const RelativePose& pose, const ObservationPair& obs);

// Distance between the lines t + s0 R f0 and s1 f1, in units of |t|.
// Throws kParallelRays when |R f0 x f1| <= 1e-12.
double RayDistance(const RelativePose& pose, const ObservationPair& obs);

// Acute angle between R f0 and f1.
double ParallaxAngle(const RelativePose& pose, const ObservationPair& obs);

// sin(beta) d / |t|. Propagates kParallelRays.
double DistanceIdentity(const RelativePose& pose, const ObservationPair& obs);

struct IncidenceAngles {
  double phi0;  // between R f0 and t_hat
  double phi1;  // between f1 and t_hat
};

IncidenceAngles IncidenceAnglesOf(const RelativePose& pose, const ObservationPair& obs);

// Angle between the normals of the planes (t, R f0) and (t, f1), evaluated
// as asin of the cross product of the unit normals.
// Throws kDegeneratePlane when either ray is parallel to t_hat.
double DihedralAngle(const RelativePose& pose, const ObservationPair& obs);

double DihedralIdentity(const RelativePose& pose, const ObservationPair& obs);

// |(R f0 x t_hat) x (f1 x t_hat)|, which collapses to e_hat by the vector
// quadruple product expansion.
double QuadrupleProductCheck(const RelativePose& pose, const ObservationPair& obs);

// sin(max(phi0, phi1)) sin(theta_l1).
double L1Identity(const RelativePose& pose, const ObservationPair& obs,
                  double theta_l1);

struct ErrorBreakdown {
  double e_hat = 0.0;
  double volume = 0.0;
  std::optional<double> ray_distance;
  double parallax = 0.0;
  std::optional<double> dihedral;
  double phi0 = 0.0;
  double phi1 = 0.0;
  std::optional<double> theta_l1;

  // Each interpretation's estimate of e_hat.
  double volume_estimate = 0.0;
  double distance_estimate = 0.0;
  std::optional<double> dihedral_estimate;
  std::optional<double> l1_estimate;
  double quadruple_product = 0.0;

  // "<field>: <reason>" for every quantity whose precondition failed.
  std::vector<std::string> degeneracies;

  bool degenerate() const { return !degeneracies.empty(); }
};

// Never throws on geometric degeneracy. When the rays are parallel the
// distance is left undefined and its estimate of e_hat is taken as 0.
ErrorBreakdown FullBreakdown(const RelativePose& pose, const ObservationPair& obs);

}  // namespace epigeom
