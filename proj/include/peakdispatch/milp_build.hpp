#pragma once

// Assembles the day-ahead stochastic dispatch MILP.
//
// min  ECC + ECP [+ ECP_5CP] + lambda_deg * sum(u_h + v_h)
//                            + lambda_ncp * p_ncp * (1/N_s) * sum_i s_i
// s.t. SOC_h = SOC_{h-1} + pi-_h eta- - pi+_h / eta+        (SOC_{-1} = soc_init)
//      C pi-_h <= (1 - b_h) Pi-,   C pi+_h <= b_h Pi+
//      soc_min <= SOC_h <= soc_max
//      pi-_h - pi+_h - pi-_{h-1} + pi+_{h-1} = u_h - v_h    (pi_{-1} = 0)
//      s_i >= net_{i,h} + C pi-_h - C pi+_h                 (all i, h)
//
// Constant load terms stay in the objective so reported values are
// bill-interpretable USD.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "peakdispatch/battery.hpp"
#include "peakdispatch/context.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/milp.hpp"
#include "peakdispatch/tariff.hpp"

namespace peakdispatch {

/// Horizon-generic description of one dispatch day. `scen_net[i*hours + h]`
/// is scenario i's load net of PV (battery excluded).
struct DispatchProblem {
  int hours = 24;
  std::vector<double> prices;       // USD/MWh per hour
  std::vector<double> mean_net;     // mean load - PV per hour, MW
  std::vector<double> scen_net;     // n_scenarios x hours, MW
  int n_scenarios = 0;
  double p_day_cp = 0.0;
  std::vector<double> p_hour_cp;    // per hour
  double p_day_5cp = 0.0;           // used only when lambda_5cp is set
  std::vector<double> p_hour_5cp;
  double ncp_prob = 0.0;
  BatterySpec battery;
  double lambda_cp = 0.0;
  std::optional<double> lambda_5cp;
  double lambda_ncp = 0.0;
  double lambda_deg = 0.0;
};

namespace detail {

inline std::string hsuf(const char* base, int h) { return std::string(base) + std::to_string(h); }

}  // namespace detail

inline MilpInstance build_dispatch_milp(const DispatchProblem& p) {
  const int hh = p.hours;
  if (hh < 1) throw DimensionError("horizon must be at least 1 hour");
  if (static_cast<int>(p.prices.size()) != hh || static_cast<int>(p.mean_net.size()) != hh ||
      static_cast<int>(p.p_hour_cp.size()) != hh)
    throw DimensionError("per-hour inputs must match the horizon");
  if (p.n_scenarios < 1 || static_cast<int>(p.scen_net.size()) != p.n_scenarios * hh)
    throw DimensionError("scenario matrix must be n_scenarios x hours with n_scenarios >= 1");
  if (p.lambda_5cp && static_cast<int>(p.p_hour_5cp.size()) != hh)
    throw DimensionError("p_hour_5cp must match the horizon when lambda_5cp is set");
  const BatterySpec bat = p.battery.resolved();
  bat.validate();
  if (bat.soc_init < bat.soc_min || bat.soc_init > bat.soc_max)
    throw InfeasibleBoundsError("soc_init outside [soc_min, soc_max]");

  MilpInstance inst;
  inst.n_hours = hh;
  inst.n_scenarios = p.n_scenarios;
  const double cap = bat.capacity_mwh;

  // Variable layout: 6 per-hour blocks, then the s_i block.
  const auto pim = [&](int h) { return h; };
  const auto pip = [&](int h) { return hh + h; };
  const auto soc = [&](int h) { return 2 * hh + h; };
  const auto mode = [&](int h) { return 3 * hh + h; };
  const auto ru = [&](int h) { return 4 * hh + h; };
  const auto rv = [&](int h) { return 5 * hh + h; };
  const auto peak = [&](int i) { return 6 * hh + i; };

  inst.vars.resize(6 * hh + p.n_scenarios);
  for (int h = 0; h < hh; ++h) {
    // Per-hour price weight: energy price plus probability-weighted CP rates.
    double w = p.prices[h] + p.lambda_cp * p.p_day_cp * p.p_hour_cp[h];
    if (p.lambda_5cp) w += *p.lambda_5cp * p.p_day_5cp * p.p_hour_5cp[h];
    inst.vars[pim(h)] = {detail::hsuf("pim_", h), 0.0, 1.0, cap * w,
                         false,  VarKind::kPiMinus, h, -1};
    inst.vars[pip(h)] = {detail::hsuf("pip_", h), 0.0, 1.0, -cap * w,
                         false,  VarKind::kPiPlus,  h, -1};
    inst.vars[soc(h)] = {detail::hsuf("soc_", h), 0.0, 1.0, 0.0, false, VarKind::kSoc, h, -1};
    inst.vars[mode(h)] = {detail::hsuf("b_", h), 0.0, 1.0, 0.0, true, VarKind::kMode, h, -1};
    inst.vars[ru(h)] = {detail::hsuf("u_", h), 0.0, kInf, p.lambda_deg,
                        false, VarKind::kRampPos, h, -1};
    inst.vars[rv(h)] = {detail::hsuf("v_", h), 0.0, kInf, p.lambda_deg,
                        false, VarKind::kRampNeg, h, -1};
    inst.obj_constant += w * p.mean_net[h];
  }
  const double peak_cost = p.lambda_ncp * p.ncp_prob / p.n_scenarios;
  for (int i = 0; i < p.n_scenarios; ++i)
    inst.vars[peak(i)] = {"s_" + std::to_string(i + 1), 0.0, kInf, peak_cost,
                          false, VarKind::kPeak, -1, i};

  // SOC recursion, rate coupling, preservation, ramp definition.
  for (int h = 0; h < hh; ++h) {
    MilpRow rec;
    rec.name = detail::hsuf("socrec_", h);
    rec.kind = RowKind::kSocRecursion;
    rec.hour = h;
    rec.coeffs = {{soc(h), 1.0}, {pim(h), -bat.eta_minus}, {pip(h), 1.0 / bat.eta_plus}};
    if (h > 0) rec.coeffs.push_back({soc(h - 1), -1.0});
    rec.lo = rec.hi = h == 0 ? bat.soc_init : 0.0;
    inst.rows.push_back(std::move(rec));
  }
  for (int h = 0; h < hh; ++h) {
    MilpRow rc;
    rc.name = detail::hsuf("ratec_", h);
    rc.kind = RowKind::kRateCharge;
    rc.hour = h;
    rc.coeffs = {{pim(h), cap}, {mode(h), bat.max_charge_mw}};
    rc.hi = bat.max_charge_mw;
    inst.rows.push_back(std::move(rc));

    MilpRow rd;
    rd.name = detail::hsuf("rated_", h);
    rd.kind = RowKind::kRateDischarge;
    rd.hour = h;
    rd.coeffs = {{pip(h), cap}, {mode(h), -bat.max_discharge_mw}};
    rd.hi = 0.0;
    inst.rows.push_back(std::move(rd));
  }
  for (int h = 0; h < hh; ++h) {
    MilpRow rng;
    rng.name = detail::hsuf("socrng_", h);
    rng.kind = RowKind::kSocRange;
    rng.hour = h;
    rng.coeffs = {{soc(h), 1.0}};
    rng.lo = bat.soc_min;
    rng.hi = bat.soc_max;
    inst.rows.push_back(std::move(rng));
  }
  for (int h = 0; h < hh; ++h) {
    MilpRow ramp;
    ramp.name = detail::hsuf("ramp_", h);
    ramp.kind = RowKind::kRamp;
    ramp.hour = h;
    ramp.coeffs = {{pim(h), 1.0}, {pip(h), -1.0}, {ru(h), -1.0}, {rv(h), 1.0}};
    if (h > 0) {
      ramp.coeffs.push_back({pim(h - 1), -1.0});
      ramp.coeffs.push_back({pip(h - 1), 1.0});
    }
    ramp.lo = ramp.hi = 0.0;
    inst.rows.push_back(std::move(ramp));
  }
  // Peak epigraph rows, one per (scenario, hour).
  for (int i = 0; i < p.n_scenarios; ++i)
    for (int h = 0; h < hh; ++h) {
      MilpRow pr;
      pr.name = "peak_" + std::to_string(i + 1) + "_" + std::to_string(h);
      pr.kind = RowKind::kPeak;
      pr.hour = h;
      pr.scenario = i;
      pr.coeffs = {{peak(i), 1.0}, {pim(h), -cap}, {pip(h), cap}};
      pr.lo = p.scen_net[static_cast<std::size_t>(i) * hh + h];
      inst.rows.push_back(std::move(pr));
    }
  inst.validate();
  return inst;
}

inline DispatchProblem dispatch_problem_from_context(const DayContext& ctx,
                                                     const BatterySpec& battery,
                                                     const TariffConfig& tariff) {
  ctx.validate();
  tariff.validate();
  DispatchProblem p;
  p.hours = 24;
  const auto prices = tariff.prices(ctx.date);
  p.prices.assign(prices.begin(), prices.end());
  p.n_scenarios = static_cast<int>(ctx.mg_scenarios.n());
  p.mean_net.resize(24);
  for (int h = 0; h < 24; ++h) p.mean_net[h] = ctx.mg_mean_load[h] - ctx.pv_forecast[h];
  p.scen_net.resize(static_cast<std::size_t>(p.n_scenarios) * 24);
  for (int i = 0; i < p.n_scenarios; ++i)
    for (int h = 0; h < 24; ++h)
      p.scen_net[static_cast<std::size_t>(i) * 24 + h] =
          ctx.mg_scenarios.at(i, h) - ctx.pv_forecast[h];
  p.p_day_cp = ctx.cp_probs.p_day_nrm;
  p.p_hour_cp.assign(ctx.cp_probs.p_hour.begin(), ctx.cp_probs.p_hour.end());
  if (tariff.lambda_5cp && ctx.cp5_probs) {
    p.lambda_5cp = tariff.lambda_5cp;
    p.p_day_5cp = ctx.cp5_probs->p_day_nrm;
    p.p_hour_5cp.assign(ctx.cp5_probs->p_hour.begin(), ctx.cp5_probs->p_hour.end());
  }
  p.ncp_prob = ctx.ncp_day_prob;
  p.battery = battery;
  p.lambda_cp = tariff.lambda_cp;
  p.lambda_ncp = tariff.lambda_ncp;
  p.lambda_deg = tariff.lambda_deg;
  return p;
}

inline MilpInstance build_milp(const DayContext& ctx, const BatterySpec& battery,
                               const TariffConfig& tariff) {
  return build_dispatch_milp(dispatch_problem_from_context(ctx, battery, tariff));
}

/// The objective split into its named components, evaluated directly from a
/// schedule (EDC through the per-scenario maximum, not the linearization).
struct ObjectiveTerms {
  double ecc = 0.0;
  double ecp = 0.0;
  double ecp_pjm = 0.0;
  double edc = 0.0;
  double edp = 0.0;
  double total() const { return ecc + ecp + ecp_pjm + edc + edp; }
};

inline ObjectiveTerms objective_terms(const DispatchProblem& p, const Schedule& schedule) {
  if (p.hours != 24) throw DimensionError("objective_terms expects a 24-hour problem");
  const BatterySpec bat = p.battery.resolved();
  const std::string err = schedule.check(bat, 1e-6);
  if (!err.empty()) throw InfeasibleScheduleError(err);
  const double cap = bat.capacity_mwh;
  ObjectiveTerms t;
  for (int h = 0; h < 24; ++h) {
    const double battery_term = cap * (schedule.pi_plus[h] - schedule.pi_minus[h]);
    const double net = p.mean_net[h] - battery_term;
    t.ecc += p.prices[h] * net;
    t.ecp += p.lambda_cp * p.p_day_cp * p.p_hour_cp[h] * net;
    if (p.lambda_5cp) t.ecp_pjm += *p.lambda_5cp * p.p_day_5cp * p.p_hour_5cp[h] * net;
    const double prev =
        h == 0 ? 0.0 : schedule.pi_minus[h - 1] - schedule.pi_plus[h - 1];
    t.edp += p.lambda_deg * std::abs(schedule.pi_minus[h] - schedule.pi_plus[h] - prev);
  }
  for (int i = 0; i < p.n_scenarios; ++i) {
    double m = -kInf;
    for (int h = 0; h < 24; ++h) {
      const double net = p.scen_net[static_cast<std::size_t>(i) * 24 + h] +
                         cap * (schedule.pi_minus[h] - schedule.pi_plus[h]);
      m = std::max(m, net);
    }
    t.edc += m;
  }
  t.edc *= p.lambda_ncp * p.ncp_prob / p.n_scenarios;
  return t;
}

inline ObjectiveTerms objective_terms(const DayContext& ctx, const BatterySpec& battery,
                                      const TariffConfig& tariff, const Schedule& schedule) {
  return objective_terms(dispatch_problem_from_context(ctx, battery, tariff), schedule);
}

}  // namespace peakdispatch
