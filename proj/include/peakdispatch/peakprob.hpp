#pragma once

// Peak probabilities from scenario sets: the chance that a day sets a new
// running maximum, and the distribution of the peak hour within the day.
//
// "New maximum" is strict (>): a tie does not update the running maximum.
// Argmax ties break toward the earliest hour, so histograms are
// deterministic.

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/scenario_set.hpp"

namespace peakdispatch {

struct PeakProbabilities {
  CivilDate date{};
  std::string entity;
  double p_day_nrm = 0.0;
  std::array<double, 24> p_hour{};

  void validate() const {
    if (p_day_nrm < 0.0 || p_day_nrm > 1.0) throw SpecError("p_day_nrm out of [0,1]");
    double sum = 0.0;
    for (double p : p_hour) {
      if (p < 0.0) throw SpecError("negative hourly peak probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw SpecError("hourly peak probabilities must sum to 1");
  }
};

/// Fraction of scenarios whose daily maximum strictly exceeds running_max.
inline double day_nrm_probability(const ScenarioSet& scenarios, double running_max) {
  if (scenarios.n() == 0) throw EmptyScenarioError("no scenarios");
  std::size_t hits = 0;
  for (std::size_t s = 0; s < scenarios.n(); ++s)
    if (scenarios.scenario_max(s) > running_max) ++hits;
  return static_cast<double>(hits) / static_cast<double>(scenarios.n());
}

/// p_hour[h] = fraction of scenarios whose (earliest) argmax hour is h.
inline std::array<double, 24> hour_peak_histogram(const ScenarioSet& scenarios) {
  if (scenarios.n() == 0) throw EmptyScenarioError("no scenarios");
  std::array<double, 24> hist{};
  for (std::size_t s = 0; s < scenarios.n(); ++s) hist[scenarios.scenario_argmax(s)] += 1.0;
  for (auto& v : hist) v /= static_cast<double>(scenarios.n());
  return hist;
}

/// NCP-day probability: day_nrm_probability applied to net-load scenarios
/// (battery excluded), against the month's running maximum.
inline double ncp_day_probability(const ScenarioSet& mg_net_scenarios, double month_running_max) {
  return day_nrm_probability(mg_net_scenarios, month_running_max);
}

/// Probability that the day enters the 5CP list: fraction of scenarios whose
/// daily max exceeds the current fifth-highest running daily max. Pass
/// -infinity (or any value below all loads) while fewer than five season days
/// have been observed.
inline double five_cp_day_probability(const ScenarioSet& scenarios,
                                      double fifth_highest_running) {
  return day_nrm_probability(scenarios, fifth_highest_running);
}

inline PeakProbabilities make_peak_probabilities(const ScenarioSet& scenarios,
                                                 double running_max) {
  PeakProbabilities p;
  p.date = scenarios.date();
  p.entity = scenarios.entity();
  p.p_day_nrm = day_nrm_probability(scenarios, running_max);
  p.p_hour = hour_peak_histogram(scenarios);
  return p;
}

inline void write_probs_json(std::ostream& os, const PeakProbabilities& p) {
  char buf[32];
  os << "{\n  \"date\": \"" << to_string(p.date) << "\",\n  \"entity\": \"" << p.entity
     << "\",\n  \"p_day_nrm\": ";
  std::snprintf(buf, sizeof(buf), "%.17g", p.p_day_nrm);
  os << buf << ",\n  \"p_hour\": [";
  for (int h = 0; h < 24; ++h) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.p_hour[h]);
    os << (h ? ", " : "") << buf;
  }
  os << "]\n}\n";
}

inline void write_probs_json(const std::string& path, const PeakProbabilities& p) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_probs_json(f, p);
}

}  // namespace peakdispatch
