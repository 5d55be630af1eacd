#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "epigeom/geometry.h"
#include "epigeom/interpretations.h"
#include "epigeom/l1_triangulation.h"

namespace epigeom {

using Rng = std::mt19937_64;

// Independent stream for one trial, derived from (seed, index) so trials can
// run in any order or concurrently and still reproduce.
Rng MakeTrialRng(std::uint64_t seed, std::uint64_t index);

struct SimConfig {
  int image_width = 640;
  int image_height = 480;
  double focal = 525.0;
  double sigma_px = 10.0;
  double depth_min = 1.0;
  double depth_max = 10.0;
  double half_baseline = 0.5;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::vector<int> perturb_exponents = {-24, -21, -18, -15, -12, -9, -6};
  int perturbs_per_magnitude = 100;
  int max_visibility_attempts = 10000;

  // Throws std::invalid_argument on an inconsistent configuration.
  void Validate() const;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole camera with principal point at the image center. `orientation`
// maps world into camera coordinates: x_cam = R (x_world - center).
struct Camera {
  Vec3 center = Vec3::Zero();
  Rotation orientation;
  int width = 640;
  int height = 480;
  double focal = 525.0;

  Vec3 ToCamera(const Vec3& world) const;
  bool InImage(const Pixel& px) const;
};

struct Scene {
  Camera cam0;
  Camera cam1;
  Vec3 point = Vec3::Zero();

  RelativePose Pose() const;
};

Rotation RandomRotation(Rng& rng);
Vec3 RandomUnitVector(Rng& rng);

// Cameras at +-c with |c| = half_baseline, the point at (0, 0, D) with
// D ~ U(depth_min, depth_max). Both orientations are redrawn each round until
// the point is visible in both images. Throws std::runtime_error after
// max_visibility_attempts rounds.
Scene SampleScene(Rng& rng, const SimConfig& config);

// Takes a point in camera coordinates. Throws kBehindCamera when z <= 1e-9.
Pixel Project(const Camera& camera, const Vec3& point_cam);

Pixel PerturbPixel(Rng& rng, const Pixel& px, double sigma_px);

UnitVec3 Backproject(const Camera& camera, const Pixel& px);

// Fraction of perturbations, per exponent m in config.perturb_exponents, for
// which moving `point` (frame c1) by 10^m in a uniformly random direction
// does not lower the angular cost below theta_l1.
std::vector<double> PerturbationOptimalityCheck(Rng& rng, const RelativePose& pose,
                                                const Vec3& point,
                                                const ObservationPair& measured,
                                                double theta_l1,
                                                const SimConfig& config);

struct TrialRecord {
  std::uint64_t index = 0;
  double e_hat_before = 0.0;
  double e_hat_after = 0.0;
  double e_hat_est = 0.0;
  double theta_l1 = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  std::vector<double> optimality;
  ErrorBreakdown breakdown;
  bool cheirality_ok = true;
  bool degenerate = false;
  std::string reason;
};

// One pass of the protocol: sample, project, add noise, backproject,
// correct, triangulate, perturb.
TrialRecord RunTrial(Rng& rng, const SimConfig& config);

// Runs config.trials trials on `threads` workers (0 = hardware concurrency).
// The result is ordered by trial index and independent of `threads`.
std::vector<TrialRecord> RunTrials(const SimConfig& config, unsigned threads = 0);

}  // namespace epigeom
