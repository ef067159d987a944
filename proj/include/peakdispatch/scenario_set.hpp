#pragma once

// ScenarioSet: N_s sampled 24-hour paths for one entity on one target day.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"

namespace peakdispatch {

class ScenarioSet {
 public:
  ScenarioSet() = default;
  /// `paths` is row-major n x 24. Load entities must be nonnegative; net-load
  /// sets (entity "MG_NET") may go negative when PV exceeds the building load.
  ScenarioSet(std::string entity, CivilDate date, std::vector<double> paths, std::uint64_t seed)
      : entity_(std::move(entity)), date_(date), paths_(std::move(paths)), seed_(seed) {
    if (paths_.size() % 24 != 0) throw LengthMismatchError("scenario paths must be n x 24");
    n_ = paths_.size() / 24;
    if (n_ == 0) throw EmptyScenarioError("scenario set for " + entity_ + " is empty");
    const bool nonneg = entity_ != "MG_NET";
    for (double v : paths_) {
      if (!std::isfinite(v)) throw SpecError("non-finite scenario value for " + entity_);
      if (nonneg && v < 0.0) throw SpecError("negative load scenario for " + entity_);
    }
  }

  const std::string& entity() const { return entity_; }
  const CivilDate& date() const { return date_; }
  std::size_t n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  double at(std::size_t scenario, int hour) const { return paths_[scenario * 24 + hour]; }
  const std::vector<double>& raw() const { return paths_; }

  std::array<double, 24> scenario(std::size_t i) const {
    std::array<double, 24> out{};
    for (int h = 0; h < 24; ++h) out[h] = at(i, h);
    return out;
  }

  /// Scenario-wise mean per hour.
  std::array<double, 24> hourly_mean() const {
    std::array<double, 24> m{};
    for (std::size_t s = 0; s < n_; ++s)
      for (int h = 0; h < 24; ++h) m[h] += at(s, h);
    for (auto& v : m) v /= static_cast<double>(n_);
    return m;
  }

  double scenario_max(std::size_t i) const {
    double m = at(i, 0);
    for (int h = 1; h < 24; ++h) m = std::max(m, at(i, h));
    return m;
  }

  /// Earliest hour attaining the scenario maximum.
  int scenario_argmax(std::size_t i) const {
    int hm = 0;
    double m = at(i, 0);
    for (int h = 1; h < 24; ++h)
      if (at(i, h) > m) {
        m = at(i, h);
        hm = h;
      }
    return hm;
  }

  /// Pathwise subtraction of a fixed 24-vector (e.g. a PV forecast); the
  /// result is a net-load set.
  ScenarioSet minus_profile(const std::array<double, 24>& profile,
                            const std::string& entity = "MG_NET") const {
    std::vector<double> out(paths_.size());
    for (std::size_t s = 0; s < n_; ++s)
      for (int h = 0; h < 24; ++h) out[s * 24 + h] = at(s, h) - profile[h];
    return ScenarioSet(entity, date_, std::move(out), seed_);
  }

 private:
  std::string entity_;
  CivilDate date_{};
  std::vector<double> paths_;
  std::size_t n_ = 0;
  std::uint64_t seed_ = 0;
};

/// CSV: scenario_id,entity,hour,value
inline void write_scenarios_csv(std::ostream& os, const std::vector<ScenarioSet>& sets) {
  os << "scenario_id,entity,hour,value\n";
  char buf[32];
  for (const auto& set : sets)
    for (std::size_t s = 0; s < set.n(); ++s)
      for (int h = 0; h < 24; ++h) {
        std::snprintf(buf, sizeof(buf), "%.17g", set.at(s, h));
        os << s << ',' << set.entity() << ',' << h << ',' << buf << '\n';
      }
}

inline void write_scenarios_csv(const std::string& path, const std::vector<ScenarioSet>& sets) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_scenarios_csv(f, sets);
}

inline std::vector<ScenarioSet> read_scenarios_csv(std::istream& is, const CivilDate& date,
                                                   const std::string& origin = "<csv>") {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(origin + ": empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "scenario_id,entity,hour,value")
    throw ParseError(origin + ":1: expected header 'scenario_id,entity,hour,value'");
  std::map<std::string, std::map<std::size_t, std::array<double, 24>>> data;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t sid;
    char entity[64];
    int hour;
    double value;
    if (std::sscanf(line.c_str(), "%zu,%63[^,],%d,%lf", &sid, entity, &hour, &value) != 4 ||
        hour < 0 || hour > 23)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": bad scenario row");
    data[entity][sid][hour] = value;
  }
  std::vector<ScenarioSet> out;
  for (auto& [entity, rows] : data) {
    std::vector<double> paths;
    paths.reserve(rows.size() * 24);
    std::size_t expect = 0;
    for (auto& [sid, vals] : rows) {
      if (sid != expect++) throw ParseError(origin + ": non-contiguous scenario ids");
      for (int h = 0; h < 24; ++h) paths.push_back(vals[h]);
    }
    out.emplace_back(entity, date, std::move(paths), 0);
  }
  return out;
}

}  // namespace peakdispatch
