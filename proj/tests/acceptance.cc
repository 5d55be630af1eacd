// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. All tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "epigeom/epipolar_error.h"
#include "epigeom/interpretations.h"
#include "epigeom/l1_triangulation.h"
#include "epigeom/report.h"
#include "epigeom/simulation.h"
#include "test_util.h"

namespace fs = std::filesystem;
using namespace epigeom;
using namespace epigeom::testing;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int failures = 0;

void Report(int id, const std::string& name, bool passed, const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", passed ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  failures += !passed;
}

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::map<std::string, std::string> DirContents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

// 1. Identity suite over 1e5 non-degenerate configurations.
void IdentitySuite() {
  const auto start = Clock::now();
  VerifyConfig config;
  config.trials = 100000;
  config.seed = 7;
  config.min_angle = 1e-3;
  const SummaryReport report = RunIdentitySuite(config);
  const double elapsed = Seconds(start);

  bool ok = report.metadata.nondegenerate == config.trials && elapsed < 30.0;
  std::string detail;
  for (const char* key : {kIdentityVolume, kIdentityDistance, kIdentityDihedral, kIdentityL1,
                          kIdentityQuadruple}) {
    const auto it = report.identity_max_errors.find(key);
    const bool present = it != report.identity_max_errors.end();
    ok &= present && it->second <= 1e-12;
    detail += std::string(key) + "=" + (present ? Sci(it->second) : "missing") + " ";
  }
  detail += "n=" + std::to_string(report.metadata.nondegenerate) + " time=" + Sci(elapsed) + "s";
  Report(1, "identity suite, max |dev| <= 1e-12, < 30 s", ok, detail);
}

// 2-4 share one desk-scale simulation run.
void Appendix() {
  SimConfig config;
  config.trials = 10000;
  config.seed = 1;
  config.sigma_px = 10.0;
  const auto start = Clock::now();
  const auto records = RunTrials(config);
  const SummaryReport report = Aggregate(records, config);
  const double elapsed = Seconds(start);
  const auto& meta = report.metadata;
  const std::uint64_t n = meta.nondegenerate;

  std::string degenerate;
  for (const auto& [reason, count] : meta.degenerate_counts) {
    degenerate += " " + reason + "=" + std::to_string(count);
  }

  {
    const std::uint64_t after_ok = meta.counters.at("e_hat_after_le_1e-14");
    const double median = meta.stats.at("e_hat_before_median");
    const bool ok = n > 0 && after_ok == n && median >= 1e-4 && median <= 1e-1;
    Report(2, "corrected rays intersect; median e_hat before in [1e-4, 1e-1]", ok,
           std::to_string(after_ok) + "/" + std::to_string(n) + " after <= 1e-14, max after=" +
               Sci(meta.stats.at("e_hat_after_max")) + ", median before=" + Sci(median) +
               ", degenerate:" + (degenerate.empty() ? " none" : degenerate));
  }
  {
    const std::uint64_t diff_ok = meta.counters.at("abs_diff_le_1e-12");
    const bool ok = n > 0 && diff_ok * 1000 >= n * 999;
    Report(3, "|e_est - e_hat| <= 1e-12 in >= 99.9% of trials", ok,
           std::to_string(diff_ok) + "/" + std::to_string(n) + ", max=" +
               Sci(meta.stats.at("abs_diff_max")));
  }
  {
    bool ok = elapsed < 600.0 && report.optimality_curve.size() == config.perturb_exponents.size();
    bool floor_seen = false;
    std::string curve;
    for (const auto& [m, pct] : report.optimality_curve) {
      if (m >= -9) ok &= pct == 100.0;
      if (m < -9 && pct < 100.0) floor_seen = true;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "10^%d:%.2f%% ", m, pct);
      curve += buf;
    }
    ok &= floor_seen;
    Report(4, "100% for m >= -9, numerical floor below -9, < 10 min", ok,
           curve + "time=" + Sci(elapsed) + "s");
  }
}

// 5. Independent oracles.
void Oracles() {
  {
    Rng rng(2024);
    double worst = 0.0;
    int checked = 0;
    while (checked < 10000) {
      const auto pose = RandomPose(rng);
      const auto obs = RandomRays(rng);
      const Vec3 d0 = pose.rotation() * obs.f0.vec();
      if (d0.cross(obs.f1.vec()).norm() < 1e-3) continue;
      ++checked;
      worst = std::max(worst, std::abs(RayDistance(pose, obs) -
                                       ClosestLineDistance(pose.translation(), d0, obs.f1)));
    }
    Report(5, "ray distance vs least-squares closest points (1e4, tol 1e-10)", worst <= 1e-10,
           "max |diff|=" + Sci(worst));
  }
  {
    Rng rng(2025);
    std::normal_distribution<double> jitter(0.0, 0.05);
    int checked = 0, wins = 0;
    double worst_excess = -1.0;
    while (checked < 100) {
      const auto pose = RandomPose(rng);
      // Alternate between noisy correspondences and unrelated rays.
      ObservationPair obs = RandomRays(rng);
      if (checked % 2 == 0) {
        const Vec3 p = 5.0 * RandomUnitVector(rng) + Vec3(0, 0, 6);
        const auto exact = RaysOfPoint(pose, p);
        obs = ObservationPair(UnitVec3(exact.f0.vec() + Vec3(jitter(rng), jitter(rng), jitter(rng))),
                              UnitVec3(exact.f1.vec() + Vec3(jitter(rng), jitter(rng), jitter(rng))));
      }
      if (L1OptimalAngle(pose, obs) >= kPi / 2 - 1e-6) continue;
      ++checked;
      const double ours = L1CorrectRays(pose, obs).total_angle();
      const double oracle = DenseSearchL1(pose, obs, 1000000);
      wins += ours <= oracle + 1e-6;
      worst_excess = std::max(worst_excess, ours - oracle);
    }
    Report(5, "L1 correction vs 1e6-sample dense search (100 instances, tol 1e-6 rad)",
           wins == checked, std::to_string(wins) + "/" + std::to_string(checked) +
                                " beat or tie, max(ours - oracle)=" + Sci(worst_excess));
  }
}

// 6. Byte-identical outputs across runs and concurrency levels.
void Determinism() {
  const fs::path root = fs::temp_directory_path() / "epigeom_acceptance";
  fs::remove_all(root);

  bool ok = true;
  std::string detail;
  {
    VerifyConfig config;
    config.trials = 20000;
    config.seed = 7;
    std::map<std::string, std::string> first;
    for (unsigned threads : {1u, 1u, 2u, 8u}) {
      const fs::path dir = root / ("verify_" + std::to_string(threads));
      fs::remove_all(dir);
      WriteReportCsv(RunIdentitySuite(config, threads), dir);
      WriteReportJson(RunIdentitySuite(config, threads), dir);
      const auto contents = DirContents(dir);
      if (first.empty()) first = contents;
      ok &= contents == first;
    }
    detail += "verify: " + std::to_string(first.size()) + " files, appendix: ";
  }
  {
    SimConfig config;
    config.trials = 10000;
    config.seed = 1;
    std::map<std::string, std::string> first;
    for (unsigned threads : {1u, 1u, 3u, 8u}) {
      const fs::path dir = root / ("appendix_" + std::to_string(threads));
      fs::remove_all(dir);
      const SummaryReport report = Aggregate(RunTrials(config, threads), config);
      WriteReportCsv(report, dir);
      WriteReportJson(report, dir);
      const auto contents = DirContents(dir);
      if (first.empty()) first = contents;
      ok &= contents == first;
    }
    detail += std::to_string(first.size()) + " files";
  }
  fs::remove_all(root);
  Report(6, "byte-identical outputs across runs and thread counts", ok, detail);
}

}  // namespace

int main() {
  IdentitySuite();
  Appendix();
  Oracles();
  Determinism();
  std::printf("%s: %d criterion check(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
