#pragma once

// HourlySeries: a calendar-aligned vector of hourly values for one entity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"

namespace peakdispatch {

enum class DaySliceMode { kStrict, kLenient };
enum class ResampleMode { kMean, kSum };

/// Entities whose values are power averages (MW) or prices; these resample by
/// mean, never by sum.
inline bool is_rate_entity(const std::string& entity) {
  return entity == "MA" || entity == "MA_FCST" || entity == "PS" || entity == "MG" ||
         entity == "PV" || entity == "PRICE" || entity == "SSRD" || entity == "MG_NET";
}

class HourlySeries {
 public:
  HourlySeries() = default;
  HourlySeries(std::string entity, std::vector<Timestamp> stamps, std::vector<double> values)
      : entity_(std::move(entity)), stamps_(std::move(stamps)), values_(std::move(values)) {
    if (stamps_.size() != values_.size())
      throw LengthMismatchError("timestamps and values differ in length");
    validate_order();
    build_index();
  }

  const std::string& entity() const { return entity_; }
  std::size_t size() const { return stamps_.size(); }
  bool empty() const { return stamps_.empty(); }
  const std::vector<Timestamp>& timestamps() const { return stamps_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  const Timestamp& timestamp(std::size_t i) const { return stamps_[i]; }

  /// Local-date coverage (first and last local dates present).
  std::optional<DateRange> coverage() const {
    if (empty()) return std::nullopt;
    return DateRange{stamps_.front().local_date(), stamps_.back().local_date()};
  }

  /// Loads and PV must be nonnegative; prices only finite.
  void validate_values() const {
    const bool nonneg = entity_ != "PRICE" && entity_ != "MG_NET";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw SpecError(entity_ + ": non-finite value at " + to_string(stamps_[i]));
      if (nonneg && values_[i] < 0.0)
        throw SpecError(entity_ + ": negative value at " + to_string(stamps_[i]));
    }
  }

  bool has_day(const CivilDate& d) const {
    auto it = day_index_.find(d);
    if (it == day_index_.end()) return false;
    for (int h = 0; h < 24; ++h)
      if (it->second[h] < 0) return false;
    return true;
  }

  /// The 24 values of one local day, hour order 0..23.
  ///
  /// Strict mode requires all 24 local hours present exactly once. Lenient
  /// mode pads a missing hour with the nearest earlier value (the next later
  /// one at the start of the day) and takes the first row of a duplicated
  /// local hour, which covers DST transition days.
  std::array<double, 24> day_slice(const CivilDate& d,
                                   DaySliceMode mode = DaySliceMode::kStrict) const {
    auto it = day_index_.find(d);
    if (it == day_index_.end())
      throw GapError(entity_ + ": no data for " + to_string(d));
    const auto& idx = it->second;
    std::array<double, 24> out{};
    if (mode == DaySliceMode::kStrict) {
      for (int h = 0; h < 24; ++h) {
        if (idx[h] < 0)
          throw GapError(entity_ + ": missing hour " + std::to_string(h) + " on " + to_string(d));
        if (dup_hours_.count(std::make_pair(d, h)))
          throw GapError(entity_ + ": duplicated local hour " + std::to_string(h) + " on " +
                         to_string(d));
        out[h] = values_[idx[h]];
      }
      return out;
    }
    int last_seen = -1;
    for (int h = 0; h < 24; ++h)
      if (idx[h] >= 0) {
        last_seen = h;
        break;
      }
    if (last_seen < 0) throw GapError(entity_ + ": no data for " + to_string(d));
    double carry = values_[idx[last_seen]];
    for (int h = 0; h < 24; ++h) {
      if (idx[h] >= 0) carry = values_[idx[h]];
      out[h] = carry;
    }
    return out;
  }

  /// Sub-series restricted to local dates in [start, end].
  HourlySeries slice(const DateRange& range) const {
    std::vector<Timestamp> ts;
    std::vector<double> vs;
    for (std::size_t i = 0; i < stamps_.size(); ++i) {
      const CivilDate d = stamps_[i].local_date();
      if (range.contains(d)) {
        ts.push_back(stamps_[i]);
        vs.push_back(values_[i]);
      }
    }
    return HourlySeries(entity_, std::move(ts), std::move(vs));
  }

  /// Local dates for which all 24 hours are present.
  std::vector<CivilDate> complete_days() const {
    std::vector<CivilDate> out;
    for (const auto& [d, idx] : day_index_) {
      bool full = true;
      for (int h = 0; h < 24; ++h)
        if (idx[h] < 0) full = false;
      if (full) out.push_back(d);
    }
    return out;
  }

  /// Missing hours per day, for gap reports.
  std::vector<std::pair<CivilDate, int>> gaps() const {
    std::vector<std::pair<CivilDate, int>> out;
    if (day_index_.empty()) return out;
    for (const auto& [d, idx] : day_index_) {
      for (int h = 0; h < 24; ++h)
        if (idx[h] < 0) out.emplace_back(d, h);
    }
    // Interior days only: the first/last day may legitimately start or end
    // mid-day.
    const CivilDate first = day_index_.begin()->first;
    const CivilDate last = day_index_.rbegin()->first;
    out.erase(std::remove_if(out.begin(), out.end(),
                             [&](const auto& g) { return g.first == first || g.first == last; }),
              out.end());
    return out;
  }

 private:
  void validate_order() const {
    for (std::size_t i = 1; i < stamps_.size(); ++i)
      if (!(stamps_[i - 1] < stamps_[i]))
        throw SpecError(entity_ + ": timestamps not strictly increasing at " +
                        to_string(stamps_[i]));
  }

  void build_index() {
    for (std::size_t i = 0; i < stamps_.size(); ++i) {
      const CivilDate d = stamps_[i].local_date();
      const int h = stamps_[i].local_hour();
      auto& idx = day_index_.try_emplace(d, make_empty()).first->second;
      if (idx[h] >= 0)
        dup_hours_.insert(std::make_pair(d, h));
      else
        idx[h] = static_cast<int>(i);
    }
  }

  static std::array<int, 24> make_empty() {
    std::array<int, 24> a{};
    a.fill(-1);
    return a;
  }

  std::string entity_;
  std::vector<Timestamp> stamps_;
  std::vector<double> values_;
  std::map<CivilDate, std::array<int, 24>> day_index_;
  std::set<std::pair<CivilDate, int>> dup_hours_;
};

/// Collapses a strict 15-minute grid to hourly values. All four quarter slots
/// of an hour must be present.
inline HourlySeries resample_quarter_hour_to_hourly(const std::string& entity,
                                                    const std::vector<Timestamp>& stamps,
                                                    const std::vector<double>& values,
                                                    ResampleMode mode) {
  if (stamps.size() != values.size())
    throw LengthMismatchError("timestamps and values differ in length");
  if (mode == ResampleMode::kSum && is_rate_entity(entity))
    throw UnitError(entity + ": sum resampling is not valid for a rate entity");
  std::map<std::int64_t, std::pair<int, double>> hours;  // utc hour start -> (count, acc)
  std::map<std::int64_t, int> offsets;
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    const std::int64_t s = stamps[i].utc_seconds;
    if (s % 900 != 0)
      throw GapError(entity + ": timestamp off the 15-minute grid at " + to_string(stamps[i]));
    const std::int64_t hour_start = s - (s % 3600 + 3600) % 3600;
    auto& slot = hours[hour_start];
    slot.first += 1;
    slot.second += values[i];
    offsets[hour_start] = stamps[i].offset_minutes;
  }
  std::vector<Timestamp> out_ts;
  std::vector<double> out_vs;
  for (const auto& [hour_start, slot] : hours) {
    if (slot.first != 4) {
      Timestamp t{hour_start, offsets[hour_start]};
      throw GapError(entity + ": hour starting " + to_string(t) + " has " +
                     std::to_string(slot.first) + " of 4 quarter slots");
    }
    out_ts.push_back(Timestamp{hour_start, offsets[hour_start]});
    out_vs.push_back(mode == ResampleMode::kMean ? slot.second / 4.0 : slot.second);
  }
  return HourlySeries(entity, std::move(out_ts), std::move(out_vs));
}

// ---------------------------------------------------------------------------
// CSV format: header "timestamp,entity,value", ISO-8601 timestamps with
// offset.

inline void write_series_csv(std::ostream& os, const HourlySeries& s) {
  os << "timestamp,entity,value\n";
  char buf[32];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.value(i));
    os << to_string(s.timestamp(i)) << ',' << s.entity() << ',' << buf << '\n';
  }
}

inline void write_series_csv(const std::string& path, const HourlySeries& s) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_series_csv(f, s);
}

/// Reads one or more entities from a series CSV. Rows may be unsorted; within
/// an entity, duplicated timestamps are a ParseError.
inline std::map<std::string, HourlySeries> read_series_csv(std::istream& is,
                                                           const std::string& origin = "<csv>") {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(origin + ": empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,entity,value")
    throw ParseError(origin + ":1: expected header 'timestamp,entity,value'");
  std::map<std::string, std::vector<std::pair<Timestamp, double>>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 3 columns");
    Timestamp ts;
    try {
      ts = parse_iso8601(line.substr(0, c1));
    } catch (const ParseError& e) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const std::string entity = line.substr(c1 + 1, c2 - c1 - 1);
    char* endp = nullptr;
    const std::string vstr = line.substr(c2 + 1);
    const double v = std::strtod(vstr.c_str(), &endp);
    if (endp == vstr.c_str() || *endp != '\0')
      throw ParseError(origin + ":" + std::to_string(lineno) + ": bad value '" + vstr + "'");
    rows[entity].emplace_back(ts, v);
  }
  std::map<std::string, HourlySeries> out;
  for (auto& [entity, rv] : rows) {
    std::stable_sort(rv.begin(), rv.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rv.size(); ++i)
      if (rv[i].first.utc_seconds == rv[i - 1].first.utc_seconds)
        throw ParseError(origin + ": duplicated timestamp " + to_string(rv[i].first) +
                         " for entity " + entity);
    std::vector<Timestamp> ts;
    std::vector<double> vs;
    ts.reserve(rv.size());
    vs.reserve(rv.size());
    for (auto& [t, v] : rv) {
      ts.push_back(t);
      vs.push_back(v);
    }
    out.emplace(entity, HourlySeries(entity, std::move(ts), std::move(vs)));
  }
  return out;
}

inline std::map<std::string, HourlySeries> read_series_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  return read_series_csv(f, path);
}

}  // namespace peakdispatch
