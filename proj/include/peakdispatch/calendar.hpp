#pragma once

// Calendar arithmetic and timestamp handling.
//
// Timestamps carry an explicit UTC offset, so local civil time is always
// derived from the data itself and no timezone database is needed. DST
// transitions show up as offset changes between consecutive rows.

#include <array>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "peakdispatch/errors.hpp"

namespace peakdispatch {

struct CivilDate {
  int year = 0;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  friend bool operator==(const CivilDate& a, const CivilDate& b) {
    return a.year == b.year && a.month == b.month && a.day == b.day;
  }
  friend bool operator!=(const CivilDate& a, const CivilDate& b) { return !(a == b); }
  friend bool operator<(const CivilDate& a, const CivilDate& b) {
    if (a.year != b.year) return a.year < b.year;
    if (a.month != b.month) return a.month < b.month;
    return a.day < b.day;
  }
  friend bool operator<=(const CivilDate& a, const CivilDate& b) { return a < b || a == b; }
  friend bool operator>(const CivilDate& a, const CivilDate& b) { return b < a; }
  friend bool operator>=(const CivilDate& a, const CivilDate& b) { return b <= a; }
};

// Days since 1970-01-01 (proleptic Gregorian). Howard Hinnant's algorithm.
inline std::int64_t days_from_civil(const CivilDate& cd) {
  std::int64_t y = cd.year;
  const int m = cd.month;
  const int d = cd.day;
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

/// Day of week, 0=Sunday .. 6=Saturday.
inline int weekday(const CivilDate& cd) {
  const std::int64_t z = days_from_civil(cd);
  return static_cast<int>(z >= -4 ? (z + 4) % 7 : (z + 5) % 7 + 6);
}

inline bool is_weekend(const CivilDate& cd) {
  const int w = weekday(cd);
  return w == 0 || w == 6;
}

inline CivilDate add_days(const CivilDate& cd, std::int64_t n) {
  return civil_from_days(days_from_civil(cd) + n);
}

inline CivilDate next_day(const CivilDate& cd) { return add_days(cd, 1); }

inline std::string to_string(const CivilDate& cd) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", cd.year, cd.month, cd.day);
  return buf;
}

inline CivilDate parse_date(const std::string& s) {
  int y = 0, m = 0, d = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
      d > 31)
    throw ParseError("invalid date: '" + s + "'");
  return CivilDate{y, m, d};
}

/// Inclusive date range.
struct DateRange {
  CivilDate start;
  CivilDate end;

  bool contains(const CivilDate& d) const { return start <= d && d <= end; }
  std::int64_t n_days() const { return days_from_civil(end) - days_from_civil(start) + 1; }
};

// ---------------------------------------------------------------------------
// Timestamps

/// A point in time with the UTC offset it was recorded in.
struct Timestamp {
  std::int64_t utc_seconds = 0;  // seconds since 1970-01-01T00:00:00Z
  int offset_minutes = 0;        // local = utc + offset

  std::int64_t local_seconds() const { return utc_seconds + 60ll * offset_minutes; }
  CivilDate local_date() const {
    std::int64_t ls = local_seconds();
    std::int64_t days = ls >= 0 ? ls / 86400 : (ls - 86399) / 86400;
    return civil_from_days(days);
  }
  int local_hour() const {
    std::int64_t ls = local_seconds();
    std::int64_t sod = ls - (ls >= 0 ? ls / 86400 : (ls - 86399) / 86400) * 86400;
    return static_cast<int>(sod / 3600);
  }
  friend bool operator==(const Timestamp& a, const Timestamp& b) {
    return a.utc_seconds == b.utc_seconds && a.offset_minutes == b.offset_minutes;
  }
  friend bool operator<(const Timestamp& a, const Timestamp& b) {
    return a.utc_seconds < b.utc_seconds;
  }
};

inline Timestamp make_timestamp(const CivilDate& d, int hour, int minute, int offset_minutes) {
  Timestamp t;
  const std::int64_t local = days_from_civil(d) * 86400 + hour * 3600ll + minute * 60ll;
  t.utc_seconds = local - 60ll * offset_minutes;
  t.offset_minutes = offset_minutes;
  return t;
}

/// Parses "YYYY-MM-DDTHH:MM:SS+HH:MM" (also accepts trailing "Z" and a space
/// in place of the "T"). Fractional seconds are not supported.
inline Timestamp parse_iso8601(const std::string& s) {
  int y, mo, d, h, mi, se;
  char sep;
  int n = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &se,
                  &n) != 7 ||
      (sep != 'T' && sep != ' '))
    throw ParseError("invalid timestamp: '" + s + "'");
  const std::string rest = s.substr(n);
  int offset_minutes = 0;
  if (rest == "Z" || rest == "z" || rest == "+00:00" || rest == "-00:00") {
    offset_minutes = 0;
  } else if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
    int oh = 0, om = 0;
    if (std::sscanf(rest.c_str() + 1, "%2d:%2d", &oh, &om) != 2)
      throw ParseError("invalid timezone offset: '" + s + "'");
    offset_minutes = (oh * 60 + om) * (rest[0] == '-' ? -1 : 1);
  } else {
    throw ParseError("missing timezone offset: '" + s + "'");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 ||
      se > 60)
    throw ParseError("timestamp field out of range: '" + s + "'");
  Timestamp t = make_timestamp(CivilDate{y, mo, d}, h, mi, offset_minutes);
  t.utc_seconds += se;
  return t;
}

inline std::string to_string(const Timestamp& t) {
  const std::int64_t ls = t.local_seconds();
  const std::int64_t days = ls >= 0 ? ls / 86400 : (ls - 86399) / 86400;
  const std::int64_t sod = ls - days * 86400;
  const CivilDate cd = civil_from_days(days);
  const int off = t.offset_minutes;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld%c%02d:%02d", cd.year,
                cd.month, cd.day, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60), static_cast<long long>(sod % 60),
                off < 0 ? '-' : '+', std::abs(off) / 60, std::abs(off) % 60);
  return buf;
}

// ---------------------------------------------------------------------------
// Holidays and business days

namespace detail {

inline CivilDate nth_weekday_of_month(int year, int month, int wday, int nth) {
  CivilDate d{year, month, 1};
  int w = weekday(d);
  int first = 1 + (wday - w + 7) % 7;
  return CivilDate{year, month, first + 7 * (nth - 1)};
}

inline CivilDate last_weekday_of_month(int year, int month, int wday) {
  // Walk back from the last day of the month.
  CivilDate first_next = month == 12 ? CivilDate{year + 1, 1, 1} : CivilDate{year, month + 1, 1};
  CivilDate d = add_days(first_next, -1);
  while (weekday(d) != wday) d = add_days(d, -1);
  return d;
}

/// Saturday observed Friday, Sunday observed Monday.
inline CivilDate observed(const CivilDate& d) {
  const int w = weekday(d);
  if (w == 6) return add_days(d, -1);
  if (w == 0) return add_days(d, 1);
  return d;
}

}  // namespace detail

/// US federal holidays for one year, with weekend observance shifts applied.
inline std::vector<CivilDate> us_federal_holidays(int year) {
  using detail::nth_weekday_of_month;
  std::vector<CivilDate> h;
  h.push_back(detail::observed(CivilDate{year, 1, 1}));             // New Year's Day
  h.push_back(nth_weekday_of_month(year, 1, 1, 3));                 // MLK Day
  h.push_back(nth_weekday_of_month(year, 2, 1, 3));                 // Washington's Birthday
  h.push_back(detail::last_weekday_of_month(year, 5, 1));           // Memorial Day
  if (year >= 2021) h.push_back(detail::observed(CivilDate{year, 6, 19}));  // Juneteenth
  h.push_back(detail::observed(CivilDate{year, 7, 4}));             // Independence Day
  h.push_back(nth_weekday_of_month(year, 9, 1, 1));                 // Labor Day
  h.push_back(nth_weekday_of_month(year, 10, 1, 2));                // Columbus Day
  h.push_back(detail::observed(CivilDate{year, 11, 11}));           // Veterans Day
  h.push_back(nth_weekday_of_month(year, 11, 4, 4));                // Thanksgiving
  h.push_back(detail::observed(CivilDate{year, 12, 25}));           // Christmas
  return h;
}

/// Holiday lookup. Defaults to US federal holidays; a custom list replaces
/// them entirely.
class HolidayCalendar {
 public:
  HolidayCalendar() = default;
  explicit HolidayCalendar(std::vector<CivilDate> custom)
      : custom_(custom.begin(), custom.end()), use_custom_(true) {}

  bool is_holiday(const CivilDate& d) const {
    if (use_custom_) return custom_.count(d) > 0;
    if (!years_.count(d.year)) {
      for (const CivilDate& h : us_federal_holidays(d.year)) cache_.insert(h);
      years_.insert(d.year);
    }
    return cache_.count(d) > 0;
  }

 private:
  std::set<CivilDate> custom_;
  bool use_custom_ = false;
  mutable std::set<CivilDate> cache_;
  mutable std::set<int> years_;
};

/// True iff `d` is a Monday-Friday non-holiday inside the CP season.
inline bool is_cp_business_day(const CivilDate& d, const DateRange& cp_season,
                               const HolidayCalendar& holidays = HolidayCalendar{}) {
  if (!cp_season.contains(d)) return false;
  if (is_weekend(d)) return false;
  return !holidays.is_holiday(d);
}

}  // namespace peakdispatch
