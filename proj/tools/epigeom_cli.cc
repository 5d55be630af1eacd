// Command-line front end for the epigeom library.
//
//   epigeom verify    --trials N --seed S --out DIR [--format csv|json]
//   epigeom appendix  --trials N --seed S --sigma PX --out DIR [--format csv|json]
//   epigeom breakdown --translation x,y,z --f0 x,y,z --f1 x,y,z [--rotation r00,...,r22]
//
// Exit codes: 0 success, 1 property violation, 2 I/O failure, 3 usage.

#include <cmath>
#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epigeom/epipolar_error.h"
#include "epigeom/geometry.h"
#include "epigeom/interpretations.h"
#include "epigeom/report.h"
#include "epigeom/simulation.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> ParseNumbers(const std::string& text, std::size_t expected,
                                 const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string field = text.substr(pos, end - pos);
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t");
    field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size() ||
        !std::isfinite(v)) {
      throw UsageError(flag + ": malformed number '" + field + "'");
    }
    out.push_back(v);
    pos = end + 1;
  }
  if (out.size() != expected) {
    throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated numbers");
  }
  return out;
}

epigeom::Vec3 ParseVec3(const std::string& text, const std::string& flag) {
  const auto v = ParseNumbers(text, 3, flag);
  return {v[0], v[1], v[2]};
}

void WriteReport(const epigeom::SummaryReport& report, const std::string& out_dir,
                 const std::string& format) {
  if (format == "json") {
    epigeom::WriteReportJson(report, out_dir);
  } else {
    epigeom::WriteReportCsv(report, out_dir);
  }
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int RunVerify(std::uint64_t trials, std::uint64_t seed, unsigned threads,
              const std::string& out_dir, const std::string& format) {
  epigeom::VerifyConfig config;
  config.trials = trials;
  config.seed = seed;
  const auto report = epigeom::RunIdentitySuite(config, threads);
  WriteReport(report, out_dir, format);

  bool ok = report.metadata.nondegenerate > 0;
  for (const auto& [name, err] : report.identity_max_errors) {
    const bool pass = err <= epigeom::kIdentityTolerance;
    ok &= pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " max|dev|=" << Fmt(err) << '\n';
  }
  std::cout << report.metadata.nondegenerate << " configurations checked\n";
  return ok ? kExitOk : kExitViolation;
}

int RunAppendix(std::uint64_t trials, std::uint64_t seed, double sigma, unsigned threads,
                const std::string& out_dir, const std::string& format) {
  epigeom::SimConfig config;
  config.trials = trials;
  config.seed = seed;
  config.sigma_px = sigma;
  config.Validate();
  const auto records = epigeom::RunTrials(config, threads);
  const auto report = epigeom::Aggregate(records, config);
  WriteReport(report, out_dir, format);

  bool ok = true;
  for (const auto& check : epigeom::CheckAppendixProperties(report)) {
    ok &= check.passed;
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
  }
  for (const auto& [reason, count] : report.metadata.degenerate_counts) {
    std::cout << "degenerate " << reason << ": " << count << '\n';
  }
  return ok ? kExitOk : kExitViolation;
}

std::string OptionalText(const std::optional<double>& v) {
  return v ? Fmt(*v) : std::string("undefined");
}

int RunBreakdown(const std::string& rotation_text, const std::string& translation_text,
                 const std::string& f0_text, const std::string& f1_text,
                 const std::string& format) {
  using epigeom::GeometryError;
  epigeom::Mat3 r = epigeom::Mat3::Identity();
  if (!rotation_text.empty()) {
    const auto v = ParseNumbers(rotation_text, 9, "--rotation");
    r << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  }
  const epigeom::Vec3 t = ParseVec3(translation_text, "--translation");
  const epigeom::Vec3 f0 = ParseVec3(f0_text, "--f0");
  const epigeom::Vec3 f1 = ParseVec3(f1_text, "--f1");

  std::optional<epigeom::RelativePose> pose;
  std::optional<epigeom::ObservationPair> obs;
  try {
    pose.emplace(epigeom::Rotation(r), t);
    obs.emplace(epigeom::UnitVec3(f0), epigeom::UnitVec3(f1));
  } catch (const GeometryError& e) {
    throw UsageError(e.what());
  }
  const epigeom::ErrorBreakdown b = epigeom::FullBreakdown(*pose, *obs);

  if (format == "json") {
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    const nlohmann::json j{{"e_hat", b.e_hat},
                           {"volume", b.volume},
                           {"ray_distance", opt(b.ray_distance)},
                           {"parallax", b.parallax},
                           {"dihedral", opt(b.dihedral)},
                           {"phi0", b.phi0},
                           {"phi1", b.phi1},
                           {"theta_l1", opt(b.theta_l1)},
                           {"estimates",
                            {{"volume", b.volume_estimate},
                             {"distance", b.distance_estimate},
                             {"dihedral", opt(b.dihedral_estimate)},
                             {"l1", opt(b.l1_estimate)},
                             {"quadruple_product", b.quadruple_product}}},
                           {"degeneracies", b.degeneracies}};
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }

  std::cout << "e_hat             " << Fmt(b.e_hat) << '\n'
            << "volume            " << Fmt(b.volume) << '\n'
            << "ray_distance      " << OptionalText(b.ray_distance) << '\n'
            << "parallax          " << Fmt(b.parallax) << '\n'
            << "dihedral          " << OptionalText(b.dihedral) << '\n'
            << "phi0              " << Fmt(b.phi0) << '\n'
            << "phi1              " << Fmt(b.phi1) << '\n'
            << "theta_l1          " << OptionalText(b.theta_l1) << '\n'
            << "estimate volume   " << Fmt(b.volume_estimate) << '\n'
            << "estimate distance " << Fmt(b.distance_estimate) << '\n'
            << "estimate dihedral " << OptionalText(b.dihedral_estimate) << '\n'
            << "estimate l1       " << OptionalText(b.l1_estimate) << '\n'
            << "quadruple_product " << Fmt(b.quadruple_product) << '\n';
  if (b.degeneracies.empty()) {
    std::cout << "degenerate        none\n";
  }
  for (const auto& d : b.degeneracies) std::cout << "degenerate        " << d << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized epipolar error: identity verification and simulation"};
  app.require_subcommand(1);

  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double sigma = 10.0;
  unsigned threads = 0;
  std::string out_dir = "epigeom_out";
  std::string format = "csv";

  auto add_common = [&](CLI::App* sub, std::uint64_t default_trials, std::uint64_t default_seed) {
    sub->add_option("--trials", trials, "Number of trials")
        ->default_val(default_trials)
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Random seed")->default_val(default_seed);
    sub->add_option("--out", out_dir, "Output directory")->default_val(out_dir);
    sub->add_option("--format", format, "Output format")
        ->default_val(format)
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->default_val(0);
  };

  auto* verify = app.add_subcommand("verify", "Check the four identities on random configurations");
  add_common(verify, 100000, 7);

  auto* appendix = app.add_subcommand("appendix", "Run the two-camera simulation protocol");
  add_common(appendix, 10000, 1);
  appendix->add_option("--sigma", sigma, "Pixel noise standard deviation")
      ->default_val(10.0)
      ->check(CLI::NonNegativeNumber);

  std::string rotation_text, translation_text, f0_text, f1_text;
  auto* breakdown = app.add_subcommand("breakdown", "Print every interpretation for one observation");
  breakdown->add_option("--rotation", rotation_text, "Row-major R (9 numbers), default identity");
  breakdown->add_option("--translation", translation_text, "t as x,y,z")->required();
  breakdown->add_option("--f0", f0_text, "Ray in camera 0 as x,y,z")->required();
  breakdown->add_option("--f1", f1_text, "Ray in camera 1 as x,y,z")->required();
  breakdown->add_option("--format", format, "Output format")
      ->default_val("text")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) return RunVerify(trials, seed, threads, out_dir, format);
    if (*appendix) return RunAppendix(trials, seed, sigma, threads, out_dir, format);
    return RunBreakdown(rotation_text, translation_text, f0_text, f1_text, format);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << breakdown->help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const epigeom::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}
