#pragma once

// Settlement: daily Actual P&L, sequential Final P&L with running CP/NCP
// attribution, monthly demand charges, seasonal 1CP/5CP identification, and
// season reports.
//
// Two NCP accounting modes: `as-written` charges the full peak level on every
// running-maximum update day (the literal sequential formula); `incremental`
// (default) charges lambda * (new max - previous max), which telescopes to
// lambda * final monthly maximum — the true bill.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "peakdispatch/battery.hpp"
#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/peakprob.hpp"
#include "peakdispatch/tariff.hpp"

namespace peakdispatch {

enum class NcpAccounting { kIncremental, kAsWritten };
enum class CpAttribution { kExPost, kRunning };

struct FiveCpEntry {
  double level_mw = 0.0;
  CivilDate date{};
  int hour = -1;
};

struct SeasonCp {
  CivilDate date{};
  int hour = -1;
  double level_mw = 0.0;
};

struct LedgerState {
  DateRange cp_season{};
  HolidayCalendar holidays{};
  int month_key = -1;  // year*100 + month
  double month_max_mw = 0.0;
  SeasonCp running_cp{};
  std::vector<FiveCpEntry> five_cp;  // sorted descending, distinct days, <= 5
  std::optional<SeasonCp> expost_cp; // frozen season CP for ex-post attribution
  std::optional<CivilDate> last_date;

  static LedgerState init(const TariffConfig& tariff) {
    LedgerState s;
    s.cp_season = tariff.cp_season;
    s.holidays = tariff.holidays;
    return s;
  }
};

namespace detail {

inline int month_key(const CivilDate& d) { return d.year * 100 + d.month; }

inline int earliest_argmax(const std::array<double, 24>& v) {
  int hm = 0;
  for (int h = 1; h < 24; ++h)
    if (v[h] > v[hm]) hm = h;
  return hm;
}

}  // namespace detail

/// Updates running month/season peaks from one day's realizations. The zone
/// load feeds the 1CP/5CP tracking (business days only); the microgrid net
/// load (including the battery) feeds the monthly NCP maximum.
inline void update_running_peaks(LedgerState& state, const std::array<double, 24>& zone_load,
                                 const std::array<double, 24>& mg_net_load,
                                 const CivilDate& date) {
  if (state.last_date && !(*state.last_date < date))
    throw OutOfOrderError("settlement days must be processed chronologically");
  if (detail::month_key(date) != state.month_key) {
    state.month_key = detail::month_key(date);
    state.month_max_mw = 0.0;
  }
  const int h_net = detail::earliest_argmax(mg_net_load);
  state.month_max_mw = std::max(state.month_max_mw, mg_net_load[h_net]);

  if (is_cp_business_day(date, state.cp_season, state.holidays)) {
    const int h_zone = detail::earliest_argmax(zone_load);
    const double zone_max = zone_load[h_zone];
    if (zone_max > state.running_cp.level_mw || state.running_cp.hour < 0) {
      state.running_cp = {date, h_zone, zone_max};
    }
    // Distinct-day 5CP list: only the day's single maximum competes.
    FiveCpEntry e{zone_max, date, h_zone};
    state.five_cp.push_back(e);
    std::stable_sort(state.five_cp.begin(), state.five_cp.end(),
                     [](const FiveCpEntry& a, const FiveCpEntry& b) {
                       return a.level_mw > b.level_mw;
                     });
    if (state.five_cp.size() > 5) state.five_cp.resize(5);
  }
  state.last_date = date;
}

struct PnlBreakdown {
  CivilDate date{};
  double energy = 0.0;  // USD
  double cp = 0.0;
  double ncp = 0.0;
  std::array<double, 24> hourly_ecc{};
  std::array<double, 24> hourly_ecp{};
  int h_star = -1;  // hour of maximum realized net load
  bool cp_update = false;
  bool ncp_update = false;
  double total() const { return energy + cp + ncp; }
};

/// End-of-day P&L using probabilities (the three-term daily formula): energy
/// cost, CP term weighted by p_day * p_hour, NCP term at the realized
/// net-load argmax weighted by the NCP-day probability.
inline PnlBreakdown actual_pnl(const CivilDate& date, const Schedule& schedule,
                               const std::array<double, 24>& actual_mg_load,
                               const std::array<double, 24>& actual_pv,
                               const PeakProbabilities& cp_probs, double ncp_day_prob,
                               const TariffConfig& tariff, const BatterySpec& battery_in) {
  const BatterySpec bat = battery_in.resolved();
  const std::string err = schedule.check(bat, 1e-6);
  if (!err.empty()) throw InfeasibleScheduleError(err);
  const auto prices = tariff.prices(date, DaySliceMode::kLenient);
  PnlBreakdown p;
  p.date = date;
  std::array<double, 24> net{};
  for (int h = 0; h < 24; ++h) {
    net[h] = actual_mg_load[h] - actual_pv[h] +
             bat.capacity_mwh * (schedule.pi_minus[h] - schedule.pi_plus[h]);
    p.hourly_ecc[h] = prices[h] * net[h];
    p.hourly_ecp[h] = tariff.lambda_cp * cp_probs.p_day_nrm * cp_probs.p_hour[h] * net[h];
    p.energy += p.hourly_ecc[h];
    p.cp += p.hourly_ecp[h];
  }
  p.h_star = detail::earliest_argmax(net);
  p.ncp = tariff.lambda_ncp * ncp_day_prob * net[p.h_star];
  return p;
}

/// Sequential Final P&L: CP term with running or ex-post indicators, NCP term
/// on running-maximum update days under the chosen accounting mode. Updates
/// the ledger state (chronological order enforced).
inline PnlBreakdown final_pnl(const CivilDate& date, const Schedule& schedule,
                              const std::array<double, 24>& actual_mg_load,
                              const std::array<double, 24>& actual_pv,
                              const std::array<double, 24>& zone_load, LedgerState& state,
                              const TariffConfig& tariff, const BatterySpec& battery_in,
                              NcpAccounting accounting = NcpAccounting::kIncremental,
                              CpAttribution attribution = CpAttribution::kExPost) {
  const BatterySpec bat = battery_in.resolved();
  const std::string err = schedule.check(bat, 1e-6);
  if (!err.empty()) throw InfeasibleScheduleError(err);
  if (state.last_date && !(*state.last_date < date))
    throw OutOfOrderError("settlement days must be processed chronologically");
  if (attribution == CpAttribution::kExPost && !state.expost_cp)
    throw IncompleteSeasonError("ex-post attribution requires the frozen season CP");

  const auto prices = tariff.prices(date, DaySliceMode::kLenient);
  PnlBreakdown p;
  p.date = date;
  std::array<double, 24> net{};
  for (int h = 0; h < 24; ++h) {
    net[h] = actual_mg_load[h] - actual_pv[h] +
             bat.capacity_mwh * (schedule.pi_minus[h] - schedule.pi_plus[h]);
    p.hourly_ecc[h] = prices[h] * net[h];
    p.energy += p.hourly_ecc[h];
  }
  p.h_star = detail::earliest_argmax(net);
  const double day_max = net[p.h_star];

  // NCP: compare against the pre-update monthly maximum.
  const double prev_max = detail::month_key(date) == state.month_key ? state.month_max_mw : 0.0;
  if (day_max > prev_max) {
    p.ncp_update = true;
    p.ncp = accounting == NcpAccounting::kIncremental
                ? tariff.lambda_ncp * (day_max - prev_max)
                : tariff.lambda_ncp * day_max;
  }

  // CP indicator.
  if (attribution == CpAttribution::kExPost) {
    if (state.expost_cp->hour >= 0 && date == state.expost_cp->date) {
      p.cp_update = true;
      p.cp = tariff.lambda_cp * net[state.expost_cp->hour];
      p.hourly_ecp[state.expost_cp->hour] = p.cp;
    }
  } else {
    if (is_cp_business_day(date, state.cp_season, state.holidays)) {
      const int h_zone = detail::earliest_argmax(zone_load);
      if (zone_load[h_zone] > state.running_cp.level_mw || state.running_cp.hour < 0) {
        p.cp_update = true;
        p.cp = tariff.lambda_cp * net[h_zone];
        p.hourly_ecp[h_zone] = p.cp;
      }
    }
  }
  update_running_peaks(state, zone_load, net, date);
  return p;
}

// ---------------------------------------------------------------------------
// Ledger and reports

struct MonthSummary {
  int year = 0;
  int month = 0;
  double ncp_level_mw = 0.0;
  int ncp_hour = -1;
  CivilDate ncp_date{};
  double demand_charge_usd = 0.0;  // sum of the month's NCP charges
};

struct BillLedger {
  std::string policy;
  std::vector<PnlBreakdown> days;
  LedgerState state;
  std::vector<MonthSummary> months;

  void add_day(const PnlBreakdown& p, const std::array<double, 24>& net_of_day) {
    const int key = detail::month_key(p.date);
    if (months.empty() || months.back().year * 100 + months.back().month != key)
      months.push_back({p.date.year, p.date.month, 0.0, -1, {}, 0.0});
    MonthSummary& m = months.back();
    m.demand_charge_usd += p.ncp;
    if (p.ncp_update) {
      m.ncp_level_mw = net_of_day[p.h_star];
      m.ncp_hour = p.h_star;
      m.ncp_date = p.date;
    }
    days.push_back(p);
  }

  double total_energy() const {
    double s = 0.0;
    for (const auto& d : days) s += d.energy;
    return s;
  }
  double total_cp() const {
    double s = 0.0;
    for (const auto& d : days) s += d.cp;
    return s;
  }
  double total() const {
    double s = 0.0;
    for (const auto& d : days) s += d.total();
    return s;
  }
};

struct SeasonReport {
  std::vector<std::string> labels;
  std::vector<double> values;
};

inline const char* month_name(int m) {
  static const char* names[] = {"January", "February", "March",     "April",   "May",
                                "June",    "July",     "August",    "September",
                                "October", "November", "December"};
  return m >= 1 && m <= 12 ? names[m - 1] : "?";
}

/// Table-style season summary: total energy cost, one demand-charge row per
/// month, the final CP charge, and the grand total.
inline SeasonReport season_report(const BillLedger& ledger, const DateRange& season) {
  if (ledger.days.empty()) throw IncompleteSeasonError("ledger is empty");
  if (ledger.days.front().date != season.start || ledger.days.back().date != season.end)
    throw IncompleteSeasonError("ledger does not cover the full season");
  SeasonReport r;
  r.labels.push_back("Total Electricity Consumption Cost (USD)");
  r.values.push_back(ledger.total_energy());
  for (const auto& m : ledger.months) {
    r.labels.push_back(std::string("Demand charge for ") + month_name(m.month) + " (USD)");
    r.values.push_back(m.demand_charge_usd);
  }
  r.labels.push_back("Final Coincident Peak Charge (USD)");
  r.values.push_back(ledger.total_cp());
  r.labels.push_back("Total Final Cost (USD)");
  r.values.push_back(ledger.total());
  return r;
}

inline void write_pnl_csv(std::ostream& os, const BillLedger& ledger) {
  os << "date,ecc,ecp,edc,total\n";
  char buf[128];
  for (const auto& d : ledger.days) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n", to_string(d.date).c_str(),
                  d.energy, d.cp, d.ncp, d.total());
    os << buf;
  }
}

/// Two-policy comparison in the style of a final-cost table.
inline std::string format_comparison(const SeasonReport& a, const SeasonReport& b,
                                     const std::string& name_a, const std::string& name_b) {
  if (a.labels.size() != b.labels.size())
    throw LengthMismatchError("reports have different row sets");
  std::ostringstream os;
  std::size_t w = 0;
  for (const auto& l : a.labels) w = std::max(w, l.size());
  os << std::string(w, ' ') << "  " << name_a << "  " << name_b << "  Delta (" << name_b << " - "
     << name_a << ")\n";
  char buf[160];
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-*s  %14.2f  %14.2f  %14.2f\n", static_cast<int>(w),
                  a.labels[i].c_str(), a.values[i], b.values[i], b.values[i] - a.values[i]);
    os << buf;
  }
  return os.str();
}

}  // namespace peakdispatch
