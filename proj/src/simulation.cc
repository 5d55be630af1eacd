#include "epigeom/simulation.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "epigeom/epipolar_error.h"
#include "parallel.h"

namespace epigeom {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng MakeTrialRng(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = SplitMix64(seed);
  const std::uint64_t b = SplitMix64(a ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

void SimConfig::Validate() const {
  if (image_width <= 0 || image_height <= 0 || !(focal > 0.0)) {
    throw std::invalid_argument("image size and focal length must be positive");
  }
  if (!(sigma_px >= 0.0)) throw std::invalid_argument("sigma_px must be >= 0");
  if (!(depth_min > 0.0 && depth_min < depth_max)) {
    throw std::invalid_argument("need 0 < depth_min < depth_max");
  }
  if (!(half_baseline > 0.0)) throw std::invalid_argument("half_baseline must be > 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (perturbs_per_magnitude < 1) {
    throw std::invalid_argument("perturbs_per_magnitude must be >= 1");
  }
  if (max_visibility_attempts < 1) {
    throw std::invalid_argument("max_visibility_attempts must be >= 1");
  }
}

Vec3 Camera::ToCamera(const Vec3& world) const {
  return orientation * (world - center);
}

bool Camera::InImage(const Pixel& px) const {
  return px.u >= 0.0 && px.u <= width && px.v >= 0.0 && px.v <= height;
}

RelativePose Scene::Pose() const {
  return RelativePoseFromWorld(cam0.center, cam0.orientation, cam1.center,
                               cam1.orientation);
}

Rotation RandomRotation(Rng& rng) {
  // Uniform unit quaternion (Shoemake's subgroup algorithm).
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(rng);
  const double a = 2.0 * std::numbers::pi * unit(rng);
  const double b = 2.0 * std::numbers::pi * unit(rng);
  const double r1 = std::sqrt(1.0 - u1);
  const double r2 = std::sqrt(u1);
  Eigen::Quaterniond q(r2 * std::cos(b), r1 * std::sin(a), r1 * std::cos(a),
                       r2 * std::sin(b));
  q.normalize();
  return Rotation(q.toRotationMatrix());
}

Vec3 RandomUnitVector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const Vec3 v(normal(rng), normal(rng), normal(rng));
    const double n = v.norm();
    if (n > 1e-8) return v / n;
  }
}

Pixel Project(const Camera& camera, const Vec3& point_cam) {
  if (!(point_cam.z() > 1e-9)) {
    throw GeometryError(GeometryError::Kind::kBehindCamera,
                        "point is behind the camera");
  }
  return {camera.focal * point_cam.x() / point_cam.z() + camera.width / 2.0,
          camera.focal * point_cam.y() / point_cam.z() + camera.height / 2.0};
}

Pixel PerturbPixel(Rng& rng, const Pixel& px, double sigma_px) {
  if (sigma_px < 0.0) throw std::invalid_argument("sigma_px must be >= 0");
  if (sigma_px == 0.0) return px;
  std::normal_distribution<double> noise(0.0, sigma_px);
  const double du = noise(rng);
  const double dv = noise(rng);
  return {px.u + du, px.v + dv};
}

UnitVec3 Backproject(const Camera& camera, const Pixel& px) {
  return UnitVec3((px.u - camera.width / 2.0) / camera.focal,
                  (px.v - camera.height / 2.0) / camera.focal, 1.0);
}

Scene SampleScene(Rng& rng, const SimConfig& config) {
  Scene scene;
  const Vec3 c0 = config.half_baseline * RandomUnitVector(rng);
  std::uniform_real_distribution<double> depth(config.depth_min, config.depth_max);
  scene.point = Vec3(0.0, 0.0, depth(rng));
  for (Camera* cam : {&scene.cam0, &scene.cam1}) {
    cam->width = config.image_width;
    cam->height = config.image_height;
    cam->focal = config.focal;
  }
  scene.cam0.center = c0;
  scene.cam1.center = -c0;

  auto visible = [&scene](const Camera& cam) {
    const Vec3 x = cam.ToCamera(scene.point);
    return x.z() > 1e-9 && cam.InImage(Project(cam, x));
  };
  for (int attempt = 0; attempt < config.max_visibility_attempts; ++attempt) {
    scene.cam0.orientation = RandomRotation(rng);
    scene.cam1.orientation = RandomRotation(rng);
    if (visible(scene.cam0) && visible(scene.cam1)) return scene;
  }
  throw std::runtime_error("visibility-timeout");
}

std::vector<double> PerturbationOptimalityCheck(Rng& rng, const RelativePose& pose,
                                                const Vec3& point,
                                                const ObservationPair& measured,
                                                double theta_l1,
                                                const SimConfig& config) {
  std::vector<double> fractions;
  fractions.reserve(config.perturb_exponents.size());
  for (const int m : config.perturb_exponents) {
    const double magnitude = std::pow(10.0, m);
    int kept = 0;
    for (int k = 0; k < config.perturbs_per_magnitude; ++k) {
      const Vec3 moved = point + magnitude * RandomUnitVector(rng);
      if (AngularCost(pose, measured, moved) >= theta_l1) ++kept;
    }
    fractions.push_back(static_cast<double>(kept) / config.perturbs_per_magnitude);
  }
  return fractions;
}

TrialRecord RunTrial(Rng& rng, const SimConfig& config) {
  TrialRecord rec;
  auto fail = [&rec](std::string reason) {
    rec.degenerate = true;
    rec.reason = std::move(reason);
    return rec;
  };

  Scene scene;
  try {
    scene = SampleScene(rng, config);
  } catch (const std::runtime_error& e) {
    return fail(e.what());
  }

  const Pixel px0 = PerturbPixel(rng, Project(scene.cam0, scene.cam0.ToCamera(scene.point)),
                                 config.sigma_px);
  const Pixel px1 = PerturbPixel(rng, Project(scene.cam1, scene.cam1.ToCamera(scene.point)),
                                 config.sigma_px);
  const RelativePose pose = scene.Pose();
  const ObservationPair measured(Backproject(scene.cam0, px0),
                                 Backproject(scene.cam1, px1));

  rec.e_hat_before = NormalizedEpipolarError(pose, measured);
  rec.breakdown = FullBreakdown(pose, measured);
  try {
    const CorrectedPair corrected = L1CorrectRays(pose, measured);
    rec.e_hat_after =
        NormalizedEpipolarError(pose, ObservationPair(corrected.f0, corrected.f1));
    rec.theta_l1 = L1OptimalAngle(pose, measured);
    rec.e_hat_est = L1Identity(pose, measured, rec.theta_l1);
    rec.abs_diff = std::abs(rec.e_hat_est - rec.e_hat_before);
    rec.rel_diff = rec.e_hat_before > 0.0
                       ? rec.abs_diff / rec.e_hat_before
                       : (rec.abs_diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const TriangulatedPoint tri = IntersectCorrected(pose, corrected);
    rec.cheirality_ok = tri.cheirality_ok();
    rec.optimality = PerturbationOptimalityCheck(rng, pose, tri.point, measured,
                                                 rec.theta_l1, config);
  } catch (const GeometryError& e) {
    return fail(KindName(e.kind()));
  }
  return rec;
}

std::vector<TrialRecord> RunTrials(const SimConfig& config, unsigned threads) {
  config.Validate();
  std::vector<TrialRecord> records(config.trials);
  internal::ParallelFor(config.trials, threads, [&](std::uint64_t i) {
    Rng rng = MakeTrialRng(config.seed, i);
    records[i] = RunTrial(rng, config);
    records[i].index = i;
  });
  return records;
}

}  // namespace epigeom
