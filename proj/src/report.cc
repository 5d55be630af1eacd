#include "epigeom/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "epigeom/epipolar_error.h"
#include "parallel.h"

namespace epigeom {
namespace {

using nlohmann::json;

constexpr const char* kMetadataFile = "metadata.json";
constexpr const char* kReportJsonFile = "report.json";

// Appendix histogram names and the file each is written to.
constexpr const char* kHistBefore = "e_hat_before";
constexpr const char* kHistAfter = "e_hat_after";
constexpr const char* kHistAbsDiff = "abs_diff";
constexpr const char* kHistRelDiff = "rel_diff";

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("malformed number '" + s + "'");
  }
  return v;
}

template <typename Int>
Int ParseInt(const std::string& s) {
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("malformed integer '" + s + "'");
  }
  return v;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Rows of a CSV file without its header; each row must have `columns` fields.
std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path,
                                              std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != columns) throw IoError("bad row in " + path.string());
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void Finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void EnsureDirectory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

json MetadataToJson(const ReportMetadata& m) {
  return json{{"kind", m.kind},
              {"version", m.version},
              {"seed", m.seed},
              {"trials", m.trials},
              {"nondegenerate", m.nondegenerate},
              {"config", m.config},
              {"degenerate_counts", m.degenerate_counts},
              {"counters", m.counters},
              {"stats", m.stats}};
}

ReportMetadata MetadataFromJson(const json& j) try {
  ReportMetadata m;
  m.kind = j.at("kind").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.trials = j.at("trials").get<std::uint64_t>();
  m.nondegenerate = j.at("nondegenerate").get<std::uint64_t>();
  m.config = j.at("config").get<std::map<std::string, double>>();
  m.degenerate_counts = j.at("degenerate_counts").get<std::map<std::string, std::uint64_t>>();
  m.counters = j.at("counters").get<std::map<std::string, std::uint64_t>>();
  m.stats = j.at("stats").get<std::map<std::string, double>>();
  return m;
} catch (const json::exception& e) {
  throw IoError(std::string("malformed metadata: ") + e.what());
}

json ParseJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void WriteHistogramRows(std::ostream& out, const Histogram& h, const std::string& prefix) {
  for (const HistogramBin& bin : h) {
    out << prefix << bin.low_log10 << ',' << bin.high_log10 << ',' << bin.count << '\n';
  }
}

HistogramBin ParseBin(const std::string& low, const std::string& high,
                      const std::string& count) {
  return {ParseInt<int>(low), ParseInt<int>(high), ParseInt<std::uint64_t>(count)};
}

}  // namespace

Histogram MakeLog10Histogram(const std::vector<double>& values) {
  Histogram h;
  for (int low = kHistogramMinLog10; low < kHistogramMaxLog10; ++low) {
    h.push_back({low, low + 1, 0});
  }
  const int last = static_cast<int>(h.size()) - 1;
  for (const double v : values) {
    int idx = 0;
    if (v > 0.0) {
      const double lg = std::log10(v);
      idx = std::isfinite(lg) ? static_cast<int>(std::floor(lg)) - kHistogramMinLog10 : last;
      idx = std::clamp(idx, 0, last);
    } else if (std::isnan(v)) {
      idx = last;
    }
    ++h[idx].count;
  }
  return h;
}

std::map<std::string, double> IdentityDeviations(const ErrorBreakdown& b) {
  std::map<std::string, double> dev;
  dev[kIdentityVolume] = std::abs(b.e_hat - b.volume_estimate);
  dev[kIdentityDistance] = std::abs(b.e_hat - b.distance_estimate);
  if (b.dihedral_estimate) dev[kIdentityDihedral] = std::abs(b.e_hat - *b.dihedral_estimate);
  if (b.l1_estimate) dev[kIdentityL1] = std::abs(b.e_hat - *b.l1_estimate);
  dev[kIdentityQuadruple] = std::abs(b.e_hat - b.quadruple_product);
  return dev;
}

namespace {

void MergeMax(std::map<std::string, double>& into, const std::map<std::string, double>& from) {
  for (const auto& [name, value] : from) {
    auto [it, inserted] = into.emplace(name, value);
    if (!inserted) it->second = std::max(it->second, value);
  }
}

std::string ExponentKey(int m) { return "optimality_kept_m" + std::to_string(m); }

}  // namespace

SummaryReport Aggregate(const std::vector<TrialRecord>& records, const SimConfig& config) {
  if (records.empty()) throw std::invalid_argument("no trial records to aggregate");

  SummaryReport report;
  ReportMetadata& meta = report.metadata;
  meta.kind = "appendix";
  meta.seed = config.seed;
  meta.trials = records.size();
  meta.config = {{"image_width", config.image_width},
                 {"image_height", config.image_height},
                 {"focal", config.focal},
                 {"sigma_px", config.sigma_px},
                 {"depth_min", config.depth_min},
                 {"depth_max", config.depth_max},
                 {"half_baseline", config.half_baseline},
                 {"perturbs_per_magnitude", config.perturbs_per_magnitude},
                 {"max_visibility_attempts", config.max_visibility_attempts}};

  std::vector<double> before, after, abs_diff, rel_diff;
  std::vector<std::uint64_t> kept(config.perturb_exponents.size(), 0);
  std::uint64_t after_ok = 0, before_ok = 0, diff_ok = 0, cheirality = 0;
  for (const TrialRecord& r : records) {
    if (r.degenerate) {
      ++meta.degenerate_counts[r.reason];
      continue;
    }
    before.push_back(r.e_hat_before);
    after.push_back(r.e_hat_after);
    abs_diff.push_back(r.abs_diff);
    rel_diff.push_back(r.rel_diff);
    after_ok += r.e_hat_after <= 1e-14;
    before_ok += r.e_hat_before <= 1e-14;
    diff_ok += r.abs_diff <= kIdentityTolerance;
    cheirality += !r.cheirality_ok;
    for (std::size_t k = 0; k < kept.size() && k < r.optimality.size(); ++k) {
      kept[k] += static_cast<std::uint64_t>(
          std::llround(r.optimality[k] * config.perturbs_per_magnitude));
    }
    MergeMax(report.identity_max_errors, IdentityDeviations(r.breakdown));
  }
  meta.nondegenerate = before.size();
  meta.counters = {{"e_hat_after_le_1e-14", after_ok},
                   {"e_hat_before_le_1e-14", before_ok},
                   {"abs_diff_le_1e-12", diff_ok},
                   {"cheirality_violations", cheirality}};
  meta.stats = {{"e_hat_before_median", Median(before)},
                {"e_hat_after_max", after.empty() ? 0.0 : *std::max_element(after.begin(), after.end())},
                {"abs_diff_max", abs_diff.empty() ? 0.0 : *std::max_element(abs_diff.begin(), abs_diff.end())}};

  const std::uint64_t per_exponent = meta.nondegenerate * config.perturbs_per_magnitude;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const int m = config.perturb_exponents[k];
    meta.counters[ExponentKey(m)] = kept[k];
    report.optimality_curve[m] =
        per_exponent == 0 ? 0.0 : 100.0 * static_cast<double>(kept[k]) / per_exponent;
  }

  report.histograms[kHistBefore] = MakeLog10Histogram(before);
  report.histograms[kHistAfter] = MakeLog10Histogram(after);
  report.histograms[kHistAbsDiff] = MakeLog10Histogram(abs_diff);
  report.histograms[kHistRelDiff] = MakeLog10Histogram(rel_diff);
  return report;
}

std::vector<PropertyCheck> CheckAppendixProperties(const SummaryReport& report) {
  const ReportMetadata& meta = report.metadata;
  const std::uint64_t n = meta.nondegenerate;
  auto counter = [&meta](const std::string& key) -> std::uint64_t {
    const auto it = meta.counters.find(key);
    return it == meta.counters.end() ? 0 : it->second;
  };
  std::vector<PropertyCheck> checks;

  checks.push_back({"nondegenerate_trials", n > 0,
                    std::to_string(n) + " of " + std::to_string(meta.trials)});

  const std::uint64_t after_ok = counter("e_hat_after_le_1e-14");
  checks.push_back({"corrected_rays_intersect", n > 0 && after_ok == n,
                    std::to_string(after_ok) + "/" + std::to_string(n) +
                        " with e_hat after correction <= 1e-14"});

  const std::uint64_t diff_ok = counter("abs_diff_le_1e-12");
  checks.push_back({"l1_identity", n > 0 && diff_ok * 1000 >= n * 999,
                    std::to_string(diff_ok) + "/" + std::to_string(n) +
                        " with |e_est - e_hat| <= 1e-12"});

  bool optimal = !report.optimality_curve.empty();
  std::string detail;
  for (const auto& [m, pct] : report.optimality_curve) {
    if (m >= -9 && pct != 100.0) optimal = false;
    detail += "m=" + std::to_string(m) + ":" + FormatDouble(pct) + "% ";
  }
  checks.push_back({"perturbation_optimality", optimal, detail});

  const auto sigma = meta.config.find("sigma_px");
  if (sigma != meta.config.end() && sigma->second == 0.0) {
    const std::uint64_t before_ok = counter("e_hat_before_le_1e-14");
    checks.push_back({"noiseless_constraint", n > 0 && before_ok == n,
                      std::to_string(before_ok) + "/" + std::to_string(n) +
                          " with e_hat before correction <= 1e-14"});
  }
  return checks;
}

std::pair<RelativePose, ObservationPair> RandomConfiguration(Rng& rng, double min_angle) {
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (;;) {
    const RelativePose pose(RandomRotation(rng), scale(rng) * RandomUnitVector(rng));
    const ObservationPair obs{UnitVec3(RandomUnitVector(rng)), UnitVec3(RandomUnitVector(rng))};
    const Vec3 rf0 = pose.rotation() * obs.f0.vec();
    const Vec3& t_hat = pose.translation_dir();
    if (AcuteAngleBetween(rf0, t_hat) >= min_angle &&
        AcuteAngleBetween(obs.f1.vec(), t_hat) >= min_angle &&
        AcuteAngleBetween(rf0, obs.f1.vec()) >= min_angle) {
      return {pose, obs};
    }
  }
}

SummaryReport RunIdentitySuite(const VerifyConfig& config, unsigned threads) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");

  std::vector<ErrorBreakdown> breakdowns(config.trials);
  internal::ParallelFor(config.trials, threads, [&](std::uint64_t i) {
    Rng rng = MakeTrialRng(config.seed, i);
    const auto [pose, obs] = RandomConfiguration(rng, config.min_angle);
    breakdowns[i] = FullBreakdown(pose, obs);
  });

  SummaryReport report;
  ReportMetadata& meta = report.metadata;
  meta.kind = "verify";
  meta.seed = config.seed;
  meta.trials = config.trials;
  meta.config = {{"min_angle", config.min_angle}, {"tolerance", kIdentityTolerance}};

  std::vector<double> e_hat;
  std::map<std::string, std::vector<double>> deviations;
  std::uint64_t violations = 0;
  for (const ErrorBreakdown& b : breakdowns) {
    if (b.degenerate()) {
      for (const std::string& reason : b.degeneracies) ++meta.degenerate_counts[reason];
      continue;
    }
    e_hat.push_back(b.e_hat);
    const auto dev = IdentityDeviations(b);
    bool violated = false;
    for (const auto& [name, value] : dev) {
      deviations[name].push_back(value);
      violated |= !(value <= kIdentityTolerance);
    }
    violations += violated;
    MergeMax(report.identity_max_errors, dev);
  }
  meta.nondegenerate = e_hat.size();
  meta.counters = {{"identity_violations", violations}};
  meta.stats = {{"e_hat_median", Median(e_hat)}};
  report.histograms["e_hat"] = MakeLog10Histogram(e_hat);
  for (const auto& [name, values] : deviations) {
    report.histograms["deviation_" + name] = MakeLog10Histogram(values);
  }
  return report;
}

void WriteReportCsv(const SummaryReport& report, const std::filesystem::path& dir) {
  EnsureDirectory(dir);
  const auto& h = report.histograms;

  if (h.count(kHistBefore) || h.count(kHistAfter)) {
    const auto path = dir / "fig4.csv";
    auto out = OpenForWrite(path);
    out << "stage,bin_low_log10,bin_high_log10,count\n";
    if (auto it = h.find(kHistBefore); it != h.end()) WriteHistogramRows(out, it->second, "before,");
    if (auto it = h.find(kHistAfter); it != h.end()) WriteHistogramRows(out, it->second, "after,");
    Finish(out, path);
  }
  if (!report.optimality_curve.empty()) {
    const auto path = dir / "fig5.csv";
    auto out = OpenForWrite(path);
    out << "exponent,success_pct\n";
    for (const auto& [m, pct] : report.optimality_curve) out << m << ',' << FormatDouble(pct) << '\n';
    Finish(out, path);
  }
  for (const auto& [name, file] : {std::pair{kHistAbsDiff, "fig6.csv"}, std::pair{kHistRelDiff, "fig7.csv"}}) {
    const auto it = h.find(name);
    if (it == h.end()) continue;
    const auto path = dir / file;
    auto out = OpenForWrite(path);
    out << "bin_low_log10,bin_high_log10,count\n";
    WriteHistogramRows(out, it->second, "");
    Finish(out, path);
  }

  bool has_other = false;
  for (const auto& [name, hist] : h) {
    has_other |= name != kHistBefore && name != kHistAfter && name != kHistAbsDiff &&
                 name != kHistRelDiff;
  }
  if (has_other) {
    const auto path = dir / "histograms.csv";
    auto out = OpenForWrite(path);
    out << "name,bin_low_log10,bin_high_log10,count\n";
    for (const auto& [name, hist] : h) {
      if (name == kHistBefore || name == kHistAfter || name == kHistAbsDiff || name == kHistRelDiff) {
        continue;
      }
      WriteHistogramRows(out, hist, name + ",");
    }
    Finish(out, path);
  }

  {
    const auto path = dir / "identities.csv";
    auto out = OpenForWrite(path);
    out << "identity,max_abs_deviation\n";
    for (const auto& [name, value] : report.identity_max_errors) {
      out << name << ',' << FormatDouble(value) << '\n';
    }
    Finish(out, path);
  }
  {
    const auto path = dir / kMetadataFile;
    auto out = OpenForWrite(path);
    out << MetadataToJson(report.metadata).dump(2) << '\n';
    Finish(out, path);
  }
}

SummaryReport ReadReportCsv(const std::filesystem::path& dir) {
  SummaryReport report;
  report.metadata = MetadataFromJson(ParseJsonFile(dir / kMetadataFile));

  if (std::filesystem::exists(dir / "fig4.csv")) {
    for (const auto& row : ReadCsv(dir / "fig4.csv", 4)) {
      const char* name = row[0] == "before"  ? kHistBefore
                         : row[0] == "after" ? kHistAfter
                                             : nullptr;
      if (!name) throw IoError("unknown stage '" + row[0] + "' in fig4.csv");
      report.histograms[name].push_back(ParseBin(row[1], row[2], row[3]));
    }
  }
  if (std::filesystem::exists(dir / "fig5.csv")) {
    for (const auto& row : ReadCsv(dir / "fig5.csv", 2)) {
      report.optimality_curve[ParseInt<int>(row[0])] = ParseDouble(row[1]);
    }
  }
  for (const auto& [name, file] : {std::pair{kHistAbsDiff, "fig6.csv"}, std::pair{kHistRelDiff, "fig7.csv"}}) {
    if (!std::filesystem::exists(dir / file)) continue;
    auto& hist = report.histograms[name];
    for (const auto& row : ReadCsv(dir / file, 3)) hist.push_back(ParseBin(row[0], row[1], row[2]));
  }
  if (std::filesystem::exists(dir / "histograms.csv")) {
    for (const auto& row : ReadCsv(dir / "histograms.csv", 4)) {
      report.histograms[row[0]].push_back(ParseBin(row[1], row[2], row[3]));
    }
  }
  for (const auto& row : ReadCsv(dir / "identities.csv", 2)) {
    report.identity_max_errors[row[0]] = ParseDouble(row[1]);
  }
  return report;
}

void WriteReportJson(const SummaryReport& report, const std::filesystem::path& dir) {
  EnsureDirectory(dir);
  json histograms = json::object();
  for (const auto& [name, hist] : report.histograms) {
    json bins = json::array();
    for (const HistogramBin& b : hist) bins.push_back({b.low_log10, b.high_log10, b.count});
    histograms[name] = std::move(bins);
  }
  json curve = json::array();
  for (const auto& [m, pct] : report.optimality_curve) {
    curve.push_back({{"exponent", m}, {"success_pct", pct}});
  }
  const json j{{"histograms", histograms},
               {"optimality_curve", curve},
               {"identity_max_errors", report.identity_max_errors},
               {"metadata", MetadataToJson(report.metadata)}};
  const auto path = dir / kReportJsonFile;
  auto out = OpenForWrite(path);
  out << j.dump(2) << '\n';
  Finish(out, path);
}

SummaryReport ReadReportJson(const std::filesystem::path& dir) {
  const json j = ParseJsonFile(dir / kReportJsonFile);
  SummaryReport report;
  try {
    for (const auto& [name, bins] : j.at("histograms").items()) {
      auto& hist = report.histograms[name];
      for (const auto& b : bins) {
        hist.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<std::uint64_t>()});
      }
    }
    for (const auto& entry : j.at("optimality_curve")) {
      report.optimality_curve[entry.at("exponent").get<int>()] =
          entry.at("success_pct").get<double>();
    }
    report.identity_max_errors = j.at("identity_max_errors").get<std::map<std::string, double>>();
    report.metadata = MetadataFromJson(j.at("metadata"));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report.json: ") + e.what());
  }
  return report;
}

}  // namespace epigeom
