#pragma once

// DatasetBundle: the six input series, with loading, validation, and a
// versioned CSV-directory persistence layout:
//
//   <dir>/manifest.json
//   <dir>/ma_actual.csv ... one CSV per series (format: timestamp,entity,value)

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/series.hpp"

namespace peakdispatch {

struct DatasetBundle {
  HourlySeries ma_actual;      // regional actual load (entity MA)
  HourlySeries ma_forecast;    // day-ahead regional forecast (entity MA_FCST)
  HourlySeries ps_actual;      // zone actual load (entity PS)
  HourlySeries mg_load;        // microgrid building load (entity MG)
  HourlySeries pv_actual;      // PV production (entity PV)
  HourlySeries ssrd_forecast;  // forecast surface short-wave radiation (entity SSRD)
  DateRange coverage{};

  const HourlySeries& series(const std::string& name) const {
    if (name == "ma_actual") return ma_actual;
    if (name == "ma_forecast") return ma_forecast;
    if (name == "ps_actual") return ps_actual;
    if (name == "mg_load") return mg_load;
    if (name == "pv_actual") return pv_actual;
    if (name == "ssrd_forecast") return ssrd_forecast;
    throw ConfigError("unknown series: " + name);
  }

  static const std::vector<std::string>& series_names() {
    static const std::vector<std::string> names = {"ma_actual", "ps_actual",     "mg_load",
                                                   "pv_actual", "ssrd_forecast", "ma_forecast"};
    return names;
  }
};

struct GapSummary {
  std::map<std::string, std::vector<std::pair<CivilDate, int>>> by_series;
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [k, v] : by_series) n += v.size();
    return n;
  }
  std::string describe() const {
    std::ostringstream os;
    for (const auto& [name, gaps] : by_series)
      for (const auto& [d, h] : gaps)
        os << name << ": missing hour " << h << " on " << to_string(d) << "\n";
    return os.str();
  }
};

struct BundlePaths {
  std::string ma_actual;
  std::string ma_forecast;
  std::string ps_actual;
  std::string mg_load;
  std::string pv_actual;
  std::string ssrd_forecast;
};

struct LoadOptions {
  /// Reject bundles with interior gaps. When false, gaps are only reported.
  bool reject_gaps = true;
};

namespace detail {

inline HourlySeries pick_entity(std::map<std::string, HourlySeries>&& m,
                                const std::string& entity, const std::string& path) {
  if (auto it = m.find(entity); it != m.end()) return std::move(it->second);
  if (m.size() == 1) {
    // Single-entity file: accept it under the requested role.
    HourlySeries s = std::move(m.begin()->second);
    return HourlySeries(entity, s.timestamps(), s.values());
  }
  throw ParseError(path + ": entity '" + entity + "' not found");
}

}  // namespace detail

/// Loads and validates the six series. Throws ParseError with a line number
/// on malformed rows, GapError naming the missing hours when reject_gaps.
inline DatasetBundle load_bundle(const BundlePaths& paths, const LoadOptions& opts = {},
                                 GapSummary* gap_report = nullptr) {
  DatasetBundle b{
      detail::pick_entity(read_series_csv_file(paths.ma_actual), "MA", paths.ma_actual),
      detail::pick_entity(read_series_csv_file(paths.ma_forecast), "MA_FCST", paths.ma_forecast),
      detail::pick_entity(read_series_csv_file(paths.ps_actual), "PS", paths.ps_actual),
      detail::pick_entity(read_series_csv_file(paths.mg_load), "MG", paths.mg_load),
      detail::pick_entity(read_series_csv_file(paths.pv_actual), "PV", paths.pv_actual),
      detail::pick_entity(read_series_csv_file(paths.ssrd_forecast), "SSRD",
                          paths.ssrd_forecast)};
  GapSummary gaps;
  for (const std::string& name : DatasetBundle::series_names()) {
    const HourlySeries& s = b.series(name);
    if (s.empty()) throw GapError(name + ": series is empty");
    s.validate_values();
    auto g = s.gaps();
    if (!g.empty()) gaps.by_series[name] = std::move(g);
  }
  if (gap_report) *gap_report = gaps;
  if (opts.reject_gaps && gaps.total() > 0) throw GapError(gaps.describe());
  // Coverage: intersection of local-date spans.
  DateRange cov = *b.ma_actual.coverage();
  for (const std::string& name : DatasetBundle::series_names()) {
    const auto c = b.series(name).coverage();
    if (c->start > cov.start) cov.start = c->start;
    if (c->end < cov.end) cov.end = c->end;
  }
  b.coverage = cov;
  return b;
}

constexpr int kBundleFormatVersion = 1;

inline void save_bundle(const std::string& dir, const DatasetBundle& b) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const std::string& name : DatasetBundle::series_names())
    write_series_csv((fs::path(dir) / (name + ".csv")).string(), b.series(name));
  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw IoError("cannot write manifest in " + dir);
  mf << "{\n  \"format\": \"peakdispatch-bundle\",\n  \"version\": " << kBundleFormatVersion
     << ",\n  \"coverage\": [\"" << to_string(b.coverage.start) << "\", \""
     << to_string(b.coverage.end) << "\"]\n}\n";
}

inline DatasetBundle load_bundle_dir(const std::string& dir, const LoadOptions& opts = {}) {
  namespace fs = std::filesystem;
  const fs::path manifest = fs::path(dir) / "manifest.json";
  if (!fs::exists(manifest)) throw IoError("not a bundle directory (no manifest.json): " + dir);
  std::ifstream mf(manifest);
  std::stringstream ss;
  ss << mf.rdbuf();
  if (ss.str().find("\"peakdispatch-bundle\"") == std::string::npos)
    throw ParseError(dir + ": unrecognized manifest");
  if (ss.str().find("\"version\": " + std::to_string(kBundleFormatVersion)) == std::string::npos)
    throw ParseError(dir + ": unsupported bundle version");
  BundlePaths p;
  p.ma_actual = (fs::path(dir) / "ma_actual.csv").string();
  p.ma_forecast = (fs::path(dir) / "ma_forecast.csv").string();
  p.ps_actual = (fs::path(dir) / "ps_actual.csv").string();
  p.mg_load = (fs::path(dir) / "mg_load.csv").string();
  p.pv_actual = (fs::path(dir) / "pv_actual.csv").string();
  p.ssrd_forecast = (fs::path(dir) / "ssrd_forecast.csv").string();
  return load_bundle(p, opts);
}

}  // namespace peakdispatch
