#pragma once

// Battery specification and daily dispatch schedules.

#include <array>
#include <cmath>
#include <string>

#include "peakdispatch/errors.hpp"

namespace peakdispatch {

struct BatterySpec {
  double capacity_mwh = 1000.0;    // C
  double max_discharge_mw = 500.0; // Pi+
  double max_charge_mw = 500.0;    // Pi-
  double eta_round = 0.8;
  double eta_plus = 0.0;   // discharging efficiency; 0 means sqrt(eta_round)
  double eta_minus = 0.0;  // charging efficiency; 0 means sqrt(eta_round)
  double soc_min = 0.20;
  double soc_max = 0.96;
  double soc_init = 0.20;

  BatterySpec resolved() const {
    BatterySpec b = *this;
    if (b.eta_plus == 0.0) b.eta_plus = std::sqrt(b.eta_round);
    if (b.eta_minus == 0.0) b.eta_minus = std::sqrt(b.eta_round);
    return b;
  }

  void validate() const {
    const BatterySpec b = resolved();
    if (!(b.capacity_mwh > 0.0)) throw SpecError("battery capacity must be positive");
    if (!(b.max_discharge_mw > 0.0) || !(b.max_charge_mw > 0.0))
      throw SpecError("battery rate limits must be positive");
    if (!(0.0 <= b.soc_min && b.soc_min <= b.soc_init && b.soc_init <= b.soc_max &&
          b.soc_max <= 1.0))
      throw SpecError("require 0 <= soc_min <= soc_init <= soc_max <= 1");
    if (std::abs(b.eta_plus * b.eta_minus - b.eta_round) > 1e-12)
      throw SpecError("eta_plus * eta_minus must equal eta_round within 1e-12");
  }
};

/// Per-hour charge/discharge fractions of capacity, mode binaries, and the
/// resulting SOC path. pi values are fractions of C, so pi*C is the power in
/// MW for that hour.
struct Schedule {
  std::array<double, 24> pi_plus{};   // discharge
  std::array<double, 24> pi_minus{};  // charge
  std::array<int, 24> b{};            // 1 = discharging mode
  std::array<double, 24> soc{};

  /// Net battery draw from the grid at hour h, in MW (positive = charging
  /// load, negative = discharge injection).
  double grid_draw_mw(const BatterySpec& spec, int h) const {
    return spec.capacity_mwh * (pi_minus[h] - pi_plus[h]);
  }

  /// Recomputes the SOC path from the actions.
  void recompute_soc(const BatterySpec& spec_in) {
    const BatterySpec spec = spec_in.resolved();
    double s = spec.soc_init;
    for (int h = 0; h < 24; ++h) {
      s += pi_minus[h] * spec.eta_minus - pi_plus[h] / spec.eta_plus;
      soc[h] = s;
    }
  }

  /// Checks every schedule invariant; returns a message for the first
  /// violation, empty if valid.
  std::string check(const BatterySpec& spec_in, double tol = 1e-9) const {
    const BatterySpec spec = spec_in.resolved();
    const double cap = spec.capacity_mwh;
    for (int h = 0; h < 24; ++h) {
      if (pi_plus[h] < -tol || pi_plus[h] > 1.0 + tol)
        return "pi_plus out of [0,1] at hour " + std::to_string(h);
      if (pi_minus[h] < -tol || pi_minus[h] > 1.0 + tol)
        return "pi_minus out of [0,1] at hour " + std::to_string(h);
      if (b[h] != 0 && b[h] != 1) return "b not binary at hour " + std::to_string(h);
      if (pi_minus[h] * cap > (1 - b[h]) * spec.max_charge_mw + tol * cap)
        return "charge rate exceeds (1-b)*Pi- at hour " + std::to_string(h);
      if (pi_plus[h] * cap > b[h] * spec.max_discharge_mw + tol * cap)
        return "discharge rate exceeds b*Pi+ at hour " + std::to_string(h);
      if (pi_plus[h] * pi_minus[h] > tol)
        return "simultaneous charge and discharge at hour " + std::to_string(h);
    }
    double s = spec.soc_init;
    for (int h = 0; h < 24; ++h) {
      s += pi_minus[h] * spec.eta_minus - pi_plus[h] / spec.eta_plus;
      if (std::abs(soc[h] - s) > tol) return "soc recursion violated at hour " + std::to_string(h);
      if (soc[h] < spec.soc_min - tol || soc[h] > spec.soc_max + tol)
        return "soc out of [soc_min, soc_max] at hour " + std::to_string(h);
    }
    return {};
  }

  bool valid(const BatterySpec& spec, double tol = 1e-9) const { return check(spec, tol).empty(); }
};

inline Schedule zero_schedule(const BatterySpec& spec) {
  Schedule s;
  s.recompute_soc(spec);
  return s;
}

/// Initial SOC implied by a schedule's hour-0 state (inverse recursion step).
inline double implied_soc_init(const Schedule& s, const BatterySpec& spec_in) {
  const BatterySpec spec = spec_in.resolved();
  return s.soc[0] - s.pi_minus[0] * spec.eta_minus + s.pi_plus[0] / spec.eta_plus;
}

}  // namespace peakdispatch
