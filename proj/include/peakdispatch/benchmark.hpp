#pragma once

// Rule-based baseline: fixed charge/discharge windows plus a CP alert derived
// from the public regional forecast. The alert fires when the day-ahead
// forecast peak exceeds a tuned quantile of season-to-date forecast peaks.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "peakdispatch/battery.hpp"
#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/series.hpp"

namespace peakdispatch {

/// Hours [start, end); rate is a fraction of capacity per hour, <= 0 selects
/// the automatic rate (reach the SOC bound exactly by window end; the CP
/// window instead discharges at the maximum rate).
struct PolicyWindow {
  int start = 0;
  int end = 0;
  double rate = -1.0;
};

struct BenchmarkPolicy {
  PolicyWindow night_charge{0, 3, -1.0};
  PolicyWindow peak1_discharge{5, 8, -1.0};
  PolicyWindow midday_charge{11, 14, -1.0};
  PolicyWindow cp_discharge{16, 18, -1.0};
  PolicyWindow peak2_discharge{19, 22, -1.0};
  double alert_quantile = 0.97;
  DateRange tuned_on{};

  void validate() const {
    for (const PolicyWindow* w :
         {&night_charge, &peak1_discharge, &midday_charge, &cp_discharge, &peak2_discharge})
      if (w->start < 0 || w->end > 24 || w->start >= w->end)
        throw SpecError("policy window out of range");
    if (alert_quantile <= 0.0 || alert_quantile >= 1.0)
      throw SpecError("alert quantile must be in (0,1)");
  }
};

namespace detail {

inline double window_charge_rate(const PolicyWindow& w, const BatterySpec& bat, double soc) {
  const double cap_rate = std::min(1.0, bat.max_charge_mw / bat.capacity_mwh);
  if (w.rate > 0.0) return std::min(w.rate, cap_rate);
  const double need = (bat.soc_max - soc) / (bat.eta_minus * (w.end - w.start));
  return std::clamp(need, 0.0, cap_rate);
}

inline double window_discharge_rate(const PolicyWindow& w, const BatterySpec& bat, double soc,
                                    bool max_rate) {
  const double cap_rate = std::min(1.0, bat.max_discharge_mw / bat.capacity_mwh);
  if (w.rate > 0.0) return std::min(w.rate, cap_rate);
  if (max_rate) return cap_rate;
  const double avail = (soc - bat.soc_min) * bat.eta_plus / (w.end - w.start);
  return std::clamp(avail, 0.0, cap_rate);
}

}  // namespace detail

/// Builds the day's schedule. Actions are clipped hour by hour so charging
/// stops at soc_max and discharging at soc_min; hours 0-15 are identical with
/// and without an alert.
inline Schedule benchmark_schedule(const BenchmarkPolicy& policy, bool alert,
                                   const BatterySpec& battery_in) {
  policy.validate();
  const BatterySpec bat = battery_in.resolved();
  bat.validate();
  Schedule s;
  double soc = bat.soc_init;
  double rate = 0.0;
  int rate_window = -1;  // window id whose rate is currently frozen
  auto in_window = [](const PolicyWindow& w, int h) { return h >= w.start && h < w.end; };
  for (int h = 0; h < 24; ++h) {
    const PolicyWindow* charge = nullptr;
    const PolicyWindow* discharge = nullptr;
    bool cp_window = false;
    int wid = -1;
    if (in_window(policy.night_charge, h)) {
      charge = &policy.night_charge;
      wid = 0;
    } else if (in_window(policy.peak1_discharge, h)) {
      discharge = &policy.peak1_discharge;
      wid = 1;
    } else if (in_window(policy.midday_charge, h)) {
      charge = &policy.midday_charge;
      wid = 2;
    } else if (alert && in_window(policy.cp_discharge, h)) {
      discharge = &policy.cp_discharge;
      cp_window = true;
      wid = 3;
    } else if (in_window(policy.peak2_discharge, h)) {
      discharge = &policy.peak2_discharge;
      wid = 4;
    }
    if (charge) {
      if (wid != rate_window) {
        rate = detail::window_charge_rate(*charge, bat, soc);
        rate_window = wid;
      }
      const double headroom = std::max(0.0, (bat.soc_max - soc) / bat.eta_minus);
      s.pi_minus[h] = std::min(rate, headroom);
      s.b[h] = 0;
    } else if (discharge) {
      if (wid != rate_window) {
        rate = detail::window_discharge_rate(*discharge, bat, soc, cp_window);
        rate_window = wid;
      }
      const double avail = std::max(0.0, (soc - bat.soc_min) * bat.eta_plus);
      s.pi_plus[h] = std::min(rate, avail);
      s.b[h] = s.pi_plus[h] > 0.0 ? 1 : 0;
    } else {
      rate_window = -1;
      s.b[h] = 0;
    }
    soc += s.pi_minus[h] * bat.eta_minus - s.pi_plus[h] / bat.eta_plus;
    s.soc[h] = soc;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Alert tuning

/// Empirical quantile with linear interpolation (sorted copy, type 7).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw LengthMismatchError("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - i) * (v[i + 1] - v[i]);
}

struct AlertTuneOptions {
  double false_alert_penalty = 0.25;
  /// Month/day of the CP season within each year.
  int season_start_month = 6, season_start_day = 1;
  int season_end_month = 9, season_end_day = 30;
  int min_prior_days = 5;  // no alert before this much season history
  HolidayCalendar holidays{};
};

struct AlertTuneResult {
  double quantile = 0.999;
  double score = 0.0;
  bool degenerate = false;  // all thresholds scored equally (e.g. flat forecasts)
  int seasons = 0;
};

inline std::vector<double> alert_quantile_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 9; ++i) g.push_back(0.90 + 0.01 * i);
  g.push_back(0.995);
  g.push_back(0.999);
  return g;
}

namespace detail {

struct SeasonHistory {
  std::vector<double> forecast_peaks;  // business days, chronological
  int cp_index = -1;                   // index of the realized season peak day
};

inline std::vector<SeasonHistory> season_histories(const HourlySeries& ma_forecast,
                                                   const HourlySeries& ma_actual,
                                                   const DateRange& backtest_range,
                                                   const AlertTuneOptions& opts) {
  std::vector<SeasonHistory> seasons;
  for (int year = backtest_range.start.year; year <= backtest_range.end.year; ++year) {
    const DateRange season{{year, opts.season_start_month, opts.season_start_day},
                           {year, opts.season_end_month, opts.season_end_day}};
    if (season.start < backtest_range.start || backtest_range.end < season.end) continue;
    SeasonHistory sh;
    double best_actual = -std::numeric_limits<double>::infinity();
    for (CivilDate d = season.start; d <= season.end; d = next_day(d)) {
      if (!is_cp_business_day(d, season, opts.holidays)) continue;
      if (!ma_forecast.has_day(d) || !ma_actual.has_day(d))
        throw InsufficientHistoryError("history does not cover " + to_string(d));
      const auto f = ma_forecast.day_slice(d);
      const auto a = ma_actual.day_slice(d);
      sh.forecast_peaks.push_back(*std::max_element(f.begin(), f.end()));
      const double amax = *std::max_element(a.begin(), a.end());
      if (amax > best_actual) {
        best_actual = amax;
        sh.cp_index = static_cast<int>(sh.forecast_peaks.size()) - 1;
      }
    }
    if (!sh.forecast_peaks.empty()) seasons.push_back(std::move(sh));
  }
  return seasons;
}

}  // namespace detail

/// Grid search over alert quantiles; the score is (CP days caught) minus
/// penalty times false alerts, summed over backtest seasons. Ties prefer the
/// larger quantile (fewer alerts).
inline AlertTuneResult tune_alert(const HourlySeries& ma_forecast_history,
                                  const HourlySeries& ma_actual_history,
                                  const DateRange& backtest_range,
                                  const AlertTuneOptions& opts = {}) {
  const auto seasons =
      detail::season_histories(ma_forecast_history, ma_actual_history, backtest_range, opts);
  if (seasons.empty())
    throw InsufficientHistoryError("no complete CP season inside the backtest range");
  AlertTuneResult best;
  bool have = false;
  bool all_equal = true;
  double first_score = 0.0;
  for (const double q : alert_quantile_grid()) {
    double score = 0.0;
    for (const auto& sh : seasons) {
      std::vector<double> prior;
      for (std::size_t t = 0; t < sh.forecast_peaks.size(); ++t) {
        bool alert = false;
        if (static_cast<int>(prior.size()) >= opts.min_prior_days)
          alert = sh.forecast_peaks[t] > quantile(prior, q);
        if (alert) {
          if (static_cast<int>(t) == sh.cp_index)
            score += 1.0;
          else
            score -= opts.false_alert_penalty;
        }
        prior.push_back(sh.forecast_peaks[t]);
      }
    }
    if (!have) {
      first_score = score;
    } else if (score != first_score) {
      all_equal = false;
    }
    if (!have || score >= best.score) {  // ties prefer larger q; the grid ascends
      best.quantile = q;
      best.score = score;
      best.seasons = static_cast<int>(seasons.size());
    }
    have = true;
  }
  best.degenerate = all_equal;
  return best;
}

/// Day-ahead alert decision: today's forecast peak against the quantile of
/// season-to-date business-day forecast peaks (strictly before `date`).
inline bool cp_alert(const HourlySeries& ma_forecast, const CivilDate& date,
                     const DateRange& season, double q, const AlertTuneOptions& opts = {}) {
  if (!ma_forecast.has_day(date)) throw GapError("no forecast for " + to_string(date));
  std::vector<double> prior;
  for (CivilDate d = season.start; d < date; d = next_day(d)) {
    if (!is_cp_business_day(d, season, opts.holidays)) continue;
    if (!ma_forecast.has_day(d)) continue;
    const auto f = ma_forecast.day_slice(d);
    prior.push_back(*std::max_element(f.begin(), f.end()));
  }
  if (static_cast<int>(prior.size()) < opts.min_prior_days) return false;
  const auto f = ma_forecast.day_slice(date);
  return *std::max_element(f.begin(), f.end()) > quantile(prior, q);
}

}  // namespace peakdispatch
