#pragma once

// DayContext: everything the optimizer needs to build one day's program.

#include <array>
#include <cmath>
#include <optional>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/peakprob.hpp"
#include "peakdispatch/scenario_set.hpp"

namespace peakdispatch {

struct DayContext {
  CivilDate date{};
  /// Building-load scenarios (battery excluded).
  ScenarioSet mg_scenarios;
  /// Scenario-wise mean of mg_scenarios.
  std::array<double, 24> mg_mean_load{};
  std::array<double, 24> pv_forecast{};
  /// Zone (PS) CP probabilities.
  PeakProbabilities cp_probs;
  /// Optional RTO 5CP probabilities.
  std::optional<PeakProbabilities> cp5_probs;
  /// Probability the day sets a new monthly net-load maximum.
  double ncp_day_prob = 0.0;
  /// NCP running maximum for the current month, in MW.
  double running_month_max = 0.0;
  /// CP-season running maximum of the zone load, in MW.
  double running_cp_level = 0.0;

  void validate() const {
    const auto mean = mg_scenarios.hourly_mean();
    for (int h = 0; h < 24; ++h)
      if (std::abs(mean[h] - mg_mean_load[h]) > 1e-9)
        throw SpecError("mg_mean_load does not match scenario mean at hour " + std::to_string(h));
    if (ncp_day_prob < 0.0 || ncp_day_prob > 1.0) throw SpecError("ncp_day_prob out of [0,1]");
    cp_probs.validate();
    if (cp5_probs) cp5_probs->validate();
    for (int h = 0; h < 24; ++h)
      if (!std::isfinite(pv_forecast[h]) || pv_forecast[h] < 0.0)
        throw SpecError("pv_forecast must be finite and nonnegative");
  }
};

inline DayContext make_day_context(const ScenarioSet& mg_scenarios,
                                   const std::array<double, 24>& pv_forecast,
                                   const PeakProbabilities& cp_probs, double ncp_day_prob,
                                   double running_month_max = 0.0,
                                   double running_cp_level = 0.0) {
  DayContext ctx;
  ctx.date = mg_scenarios.date();
  ctx.mg_scenarios = mg_scenarios;
  ctx.mg_mean_load = mg_scenarios.hourly_mean();
  ctx.pv_forecast = pv_forecast;
  ctx.cp_probs = cp_probs;
  ctx.ncp_day_prob = ncp_day_prob;
  ctx.running_month_max = running_month_max;
  ctx.running_cp_level = running_cp_level;
  return ctx;
}

}  // namespace peakdispatch
