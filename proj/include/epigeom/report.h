#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "epigeom/simulation.h"

namespace epigeom {

inline constexpr const char* kVersion = "0.1.0";

// Histogram layout: decades [-20, -19), ..., [-1, 0]. Values below 1e-20
// (including exact zeros) land in the first bin, values >= 1 in the last, so
// counts always sum to the number of samples.
inline constexpr int kHistogramMinLog10 = -20;
inline constexpr int kHistogramMaxLog10 = 0;

struct HistogramBin {
  int low_log10 = 0;
  int high_log10 = 0;
  std::uint64_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

using Histogram = std::vector<HistogramBin>;

Histogram MakeLog10Histogram(const std::vector<double>& values);

// Identity names used as keys of SummaryReport::identity_max_errors.
inline constexpr const char* kIdentityVolume = "volume";
inline constexpr const char* kIdentityDistance = "distance";
inline constexpr const char* kIdentityDihedral = "dihedral";
inline constexpr const char* kIdentityL1 = "l1";
inline constexpr const char* kIdentityQuadruple = "quadruple_product";

struct ReportMetadata {
  std::string kind;  // "verify" or "appendix"
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t nondegenerate = 0;
  std::map<std::string, double> config;
  std::map<std::string, std::uint64_t> degenerate_counts;
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, double> stats;

  bool operator==(const ReportMetadata&) const = default;
};

struct SummaryReport {
  std::map<std::string, Histogram> histograms;
  std::map<int, double> optimality_curve;  // exponent -> success percentage
  std::map<std::string, double> identity_max_errors;
  ReportMetadata metadata;

  bool operator==(const SummaryReport&) const = default;
};

// Largest |e_hat - estimate| over the five identities of one breakdown.
// Undefined estimates are skipped.
std::map<std::string, double> IdentityDeviations(const ErrorBreakdown& b);

// Appendix aggregation. Throws std::invalid_argument on empty input.
SummaryReport Aggregate(const std::vector<TrialRecord>& records, const SimConfig& config);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Pass/fail of the simulation properties read off an appendix report:
// corrected rays intersect, the L1 identity holds, perturbations never win
// for exponents >= -9, and noiseless data satisfies the constraint.
std::vector<PropertyCheck> CheckAppendixProperties(const SummaryReport& report);

struct VerifyConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 7;
  // Minimum phi0, phi1 and beta of accepted configurations.
  double min_angle = 1e-3;
};

inline constexpr double kIdentityTolerance = 1e-12;

// Random pose (|t| ~ U(0.1, 10)) and random unit rays, redrawn until
// phi0, phi1 and beta are all >= min_angle.
std::pair<RelativePose, ObservationPair> RandomConfiguration(Rng& rng, double min_angle);

SummaryReport RunIdentitySuite(const VerifyConfig& config, unsigned threads = 0);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV layout: fig4.csv, fig5.csv, fig6.csv, fig7.csv for the appendix
// histograms and optimality curve, histograms.csv for any other histogram,
// identities.csv, and metadata.json. Throws IoError.
void WriteReportCsv(const SummaryReport& report, const std::filesystem::path& dir);
SummaryReport ReadReportCsv(const std::filesystem::path& dir);

// Single report.json in `dir`. Throws IoError.
void WriteReportJson(const SummaryReport& report, const std::filesystem::path& dir);
SummaryReport ReadReportJson(const std::filesystem::path& dir);

}  // namespace epigeom
