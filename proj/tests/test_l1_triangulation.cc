#include <doctest.h>

#include "epigeom/epipolar_error.h"
#include "epigeom/interpretations.h"
#include "epigeom/l1_triangulation.h"
#include "test_util.h"

using namespace epigeom;
using namespace epigeom::testing;

namespace {

// Random rays near a true correspondence, like noisy measurements.
ObservationPair NoisyRays(Rng& rng, const RelativePose& pose, double noise) {
  std::uniform_real_distribution<double> depth(1.0, 10.0);
  std::normal_distribution<double> jitter(0.0, noise);
  for (;;) {
    const Vec3 p = depth(rng) * RandomUnitVector(rng);
    if ((p - pose.translation()).norm() < 0.5) continue;
    const auto exact = RaysOfPoint(pose, p);
    const Vec3 f0 = exact.f0.vec() + Vec3(jitter(rng), jitter(rng), jitter(rng));
    const Vec3 f1 = exact.f1.vec() + Vec3(jitter(rng), jitter(rng), jitter(rng));
    return ObservationPair(UnitVec3(f0), UnitVec3(f1));
  }
}

}  // namespace

TEST_CASE("L1OptimalAngle") {
  const ObservationPair coplanar(UnitVec3(0, 0.3, 1), UnitVec3(-0.2, 0.3, 1));
  CHECK(L1OptimalAngle(AxisPose(), coplanar) <= 1e-15);
  // Both quotients equal 1.
  CHECK(L1OptimalAngle(AxisPose(), OrthonormalRays()) == doctest::Approx(kPi / 2));

  Rng rng(89);
  for (int i = 0; i < 10000; ++i) {
    const auto pose = RandomPose(rng);
    const auto obs = RandomRays(rng);
    const double theta = L1OptimalAngle(pose, obs);
    CHECK(theta >= 0.0);
    CHECK(theta <= kPi / 2);
    const auto phi = IncidenceAnglesOf(pose, obs);
    CHECK(std::abs(std::sin(std::max(phi.phi0, phi.phi1)) * std::sin(theta) -
                   NormalizedEpipolarError(pose, obs)) <= 1e-12);
  }

  SUBCASE("one ray along t is still defined") {
    const ObservationPair obs(UnitVec3(1, 0, 0), UnitVec3(0, 0.2, 1));
    CHECK(L1OptimalAngle(AxisPose(), obs) <= 1e-15);
  }
  SUBCASE("both rays along t") {
    try {
      L1OptimalAngle(AxisPose(), ObservationPair(UnitVec3(1, 0, 0), UnitVec3(-1, 0, 0)));
      FAIL("expected an exception");
    } catch (const GeometryError& e) {
      CHECK(e.kind() == GeometryError::Kind::kFullyDegenerate);
    }
  }
}

TEST_CASE("L1CorrectRays on constructed cases") {
  SUBCASE("coplanar input is returned unchanged") {
    const ObservationPair coplanar(UnitVec3(0, 0.3, 1), UnitVec3(-0.2, 0.3, 1));
    const auto c = L1CorrectRays(AxisPose(), coplanar);
    CHECK((c.f0.vec() - coplanar.f0.vec()).norm() <= 1e-15);
    CHECK((c.f1.vec() - coplanar.f1.vec()).norm() <= 1e-15);
    CHECK(c.theta0 == 0.0);
    CHECK(c.theta1 <= 1e-15);
  }
  SUBCASE("tied quotients move ray 1 onto the plane of ray 0") {
    const ObservationPair obs(UnitVec3(0, 0, 1), UnitVec3(0, 0.1, 1));
    const auto c = L1CorrectRays(AxisPose(), obs);
    CHECK(c.corrected_ray == 1);
    CHECK((c.f1.vec() - Vec3(0, 0, 1)).norm() <= 1e-15);
    CHECK((c.f0.vec() - Vec3(0, 0, 1)).norm() == 0.0);
    CHECK(c.theta0 == 0.0);
    CHECK(c.theta1 == doctest::Approx(std::atan(0.1)).epsilon(1e-14));
    CHECK(L1OptimalAngle(AxisPose(), obs) == doctest::Approx(std::atan(0.1)).epsilon(1e-14));
    CHECK(std::abs(c.theta1 - DenseSearchL1(AxisPose(), obs, 1000000)) <= 1e-6);

    // Both corrected rays point along z: parallel lines, no finite intersection.
    try {
      IntersectCorrected(AxisPose(), c);
      FAIL("expected an exception");
    } catch (const GeometryError& e) {
      CHECK(e.kind() == GeometryError::Kind::kParallelRays);
    }
  }
  SUBCASE("ray 0 moved, intersection on the z axis of c1") {
    // f1 = z, |f1 x t_hat| = 1 > |R f0 x t_hat|, so ray 0 has the smaller
    // quotient. Its projection onto y = 0 is (-1,0,1)/sqrt2, which meets the
    // z axis at (0,0,1) with depths sqrt2 and 1.
    const ObservationPair obs(UnitVec3(-1, 0.1, 1), UnitVec3(0, 0, 1));
    const auto c = L1CorrectRays(AxisPose(), obs);
    CHECK(c.corrected_ray == 0);
    CHECK((c.f0.vec() - Vec3(-1, 0, 1).normalized()).norm() <= 1e-15);
    CHECK(c.theta1 == 0.0);
    CHECK(c.theta0 == doctest::Approx(std::atan(0.1 / std::sqrt(2.0))).epsilon(1e-14));

    const auto p = IntersectCorrected(AxisPose(), c);
    CHECK((p.point - Vec3(0, 0, 1)).norm() <= 1e-15);
    CHECK(p.depth0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p.depth1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.cheirality_ok());
  }
  SUBCASE("perpendicular ray is rejected") {
    try {
      L1CorrectRays(AxisPose(), OrthonormalRays());
      FAIL("expected an exception");
    } catch (const GeometryError& e) {
      CHECK(e.kind() == GeometryError::Kind::kPerpendicularRay);
    }
  }
}

TEST_CASE("L1CorrectRays invariants on random draws") {
  Rng rng(97);
  int checked = 0;
  double worst_constraint = 0.0, worst_angle = 0.0;
  while (checked < 20000) {
    const auto pose = RandomPose(rng);
    const auto obs = checked % 2 ? RandomRays(rng) : NoisyRays(rng, pose, 0.02);
    const double theta = L1OptimalAngle(pose, obs);
    if (theta >= kPi / 2 - 1e-6) continue;
    ++checked;
    const auto c = L1CorrectRays(pose, obs);
    CHECK((c.theta0 == 0.0 || c.theta1 == 0.0));
    worst_angle = std::max(worst_angle, std::abs(c.total_angle() - theta));
    worst_constraint = std::max(worst_constraint,
                                NormalizedEpipolarError(pose, ObservationPair(c.f0, c.f1)));
    // The untouched ray is returned bit for bit.
    if (c.corrected_ray == 1) {
      CHECK(c.f0.vec() == obs.f0.vec());
    } else {
      CHECK(c.f1.vec() == obs.f1.vec());
    }
  }
  CHECK(worst_angle <= 1e-12);
  CHECK(worst_constraint <= 1e-14);
}

TEST_CASE("L1CorrectRays against the dense-search oracle") {
  Rng rng(101);
  int checked = 0;
  while (checked < 20) {
    const auto pose = RandomPose(rng);
    const auto obs = checked % 2 ? RandomRays(rng) : NoisyRays(rng, pose, 0.05);
    if (L1OptimalAngle(pose, obs) >= kPi / 2 - 1e-6) continue;
    ++checked;
    const auto c = L1CorrectRays(pose, obs);
    const double oracle = DenseSearchL1(pose, obs, 1000000);
    CHECK(c.total_angle() <= oracle + 1e-6);
    // The oracle is a grid minimum of the same objective, so it cannot be
    // much better than the closed form either.
    CHECK(c.total_angle() >= oracle - 1e-6);
  }
}

TEST_CASE("IntersectCorrected") {
  SUBCASE("exact correspondences recover the point") {
    Rng rng(103);
    std::uniform_real_distribution<double> depth(1.0, 10.0);
    int checked = 0;
    while (checked < 1000) {
      const auto pose = RandomPose(rng);
      const Vec3 p = depth(rng) * RandomUnitVector(rng);
      const auto obs = RaysOfPoint(pose, p);
      if (ParallaxAngle(pose, obs) < 1e-2) continue;
      ++checked;
      const CorrectedPair exact{obs.f0, obs.f1, 0.0, 0.0, 1};
      const auto tri = IntersectCorrected(pose, exact);
      CHECK((tri.point - p).norm() <= 1e-10 * (1.0 + p.norm()));
      CHECK(tri.cheirality_ok());
    }
  }
  SUBCASE("both residual bounds hold for corrected pairs") {
    Rng rng(107);
    int checked = 0;
    while (checked < 5000) {
      const auto pose = RandomPose(rng);
      const auto obs = NoisyRays(rng, pose, 0.02);
      if (L1OptimalAngle(pose, obs) >= kPi / 2 - 1e-6) continue;
      const auto c = L1CorrectRays(pose, obs);
      const Vec3 d0 = pose.rotation() * c.f0.vec();
      if (d0.cross(c.f1.vec()).norm() < 1e-3) continue;
      ++checked;
      const auto tri = IntersectCorrected(pose, c);
      const double scale = 1e-10 * (1.0 + tri.point.norm());
      CHECK((tri.point - (pose.translation() + tri.depth0 * d0)).norm() <= scale);
      CHECK((tri.point - tri.depth1 * c.f1.vec()).norm() <= scale);
    }
  }
  SUBCASE("negative depth is flagged") {
    // Rays diverge: the lines meet behind camera 1.
    const RelativePose pose(Rotation::Identity(), Vec3(1, 0, 0));
    const CorrectedPair c{UnitVec3(1, 0, 1), UnitVec3(-1, 0, 1), 0.0, 0.0, 1};
    const auto tri = IntersectCorrected(pose, c);
    CHECK_FALSE(tri.cheirality_ok());
  }
}

TEST_CASE("AngularCost is minimized by the triangulated point") {
  Rng rng(109);
  int checked = 0;
  while (checked < 500) {
    const auto pose = RandomPose(rng);
    const auto obs = NoisyRays(rng, pose, 0.02);
    const double theta = L1OptimalAngle(pose, obs);
    if (theta >= kPi / 2 - 1e-6) continue;
    const auto c = L1CorrectRays(pose, obs);
    const Vec3 d0 = pose.rotation() * c.f0.vec();
    if (d0.cross(c.f1.vec()).norm() < 1e-2) continue;
    const auto tri = IntersectCorrected(pose, c);
    if (!tri.cheirality_ok()) continue;
    ++checked;
    CHECK(std::abs(AngularCost(pose, obs, tri.point) - theta) <= 1e-12);
    for (int k = 0; k < 20; ++k) {
      const Vec3 moved = tri.point + 1e-6 * RandomUnitVector(rng);
      CHECK(AngularCost(pose, obs, moved) >= theta);
    }
  }
}
