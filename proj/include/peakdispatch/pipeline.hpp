#pragma once

// Daily pipeline and seasonal backtest orchestration.
//
// run_day executes fit-pv -> scenario chain -> peak probabilities -> MILP
// build/solve for one date, with all training windows ending the day before
// (no look-ahead). run_season threads two settlement ledgers (optimizer,
// benchmark) through the season chronologically, persists per-day artifacts
// under <out_dir>/<date>/, and supports resuming from those artifacts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peakdispatch/battery.hpp"
#include "peakdispatch/benchmark.hpp"
#include "peakdispatch/branch_bound.hpp"
#include "peakdispatch/bundle.hpp"
#include "peakdispatch/calendar.hpp"
#include "peakdispatch/context.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/lp_format.hpp"
#include "peakdispatch/milp_build.hpp"
#include "peakdispatch/peakprob.hpp"
#include "peakdispatch/pvforecast.hpp"
#include "peakdispatch/scengen.hpp"
#include "peakdispatch/settle.hpp"
#include "peakdispatch/tariff.hpp"

namespace peakdispatch {

struct ScenConfig {
  int n_scenarios = 1000;
  Transform transform = Transform::kLog;
  int window_days = 365;
  int min_days = 60;
  int threads = 1;
};

struct RunConfig {
  std::string bundle_dir;
  std::string out_dir = "runs";
  std::uint64_t seed = 1;
  DateRange range{};                 // backtest / season range
  std::string policy = "both";       // optimizer | benchmark | both
  NcpAccounting accounting = NcpAccounting::kIncremental;
  CpAttribution attribution = CpAttribution::kExPost;
  BatterySpec battery{};
  TariffConfig tariff{};
  ScenConfig scen{};
  MipOptions mip{};
  BenchmarkPolicy bench{};
  std::string alert_mode = "auto";   // auto | on | off
  std::optional<DateRange> bench_tune_range;
  bool carry_soc = false;
  bool write_lp_artifacts = true;
  bool resume = false;

  void validate() const {
    battery.validate();
    tariff.validate();
    if (!(range.start <= range.end)) throw ConfigError("empty run range");
    if (scen.n_scenarios < 1) throw ConfigError("n_scenarios must be >= 1");
    if (policy != "optimizer" && policy != "benchmark" && policy != "both")
      throw ConfigError("policy must be optimizer, benchmark, or both");
    if (alert_mode != "auto" && alert_mode != "on" && alert_mode != "off")
      throw ConfigError("alert mode must be auto, on, or off");
  }
};

// ---------------------------------------------------------------------------
// JSON config

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.bundle_dir = j.value("bundle", "");
    c.out_dir = j.value("out_dir", c.out_dir);
    c.seed = j.value("seed", c.seed);
    if (j.contains("range")) {
      c.range.start = parse_date(j["range"].value("start", ""));
      c.range.end = parse_date(j["range"].value("end", ""));
    }
    c.policy = j.value("policy", c.policy);
    c.accounting = j.value("accounting", "incremental") == std::string("as-written")
                       ? NcpAccounting::kAsWritten
                       : NcpAccounting::kIncremental;
    c.attribution = j.value("attribution", "ex-post") == std::string("running")
                        ? CpAttribution::kRunning
                        : CpAttribution::kExPost;
    if (j.contains("battery")) {
      const auto& b = j["battery"];
      c.battery.capacity_mwh = b.value("capacity_mwh", c.battery.capacity_mwh);
      c.battery.max_discharge_mw = b.value("max_discharge_mw", c.battery.max_discharge_mw);
      c.battery.max_charge_mw = b.value("max_charge_mw", c.battery.max_charge_mw);
      c.battery.eta_round = b.value("eta_round", c.battery.eta_round);
      c.battery.eta_plus = b.value("eta_plus", 0.0);
      c.battery.eta_minus = b.value("eta_minus", 0.0);
      c.battery.soc_min = b.value("soc_min", c.battery.soc_min);
      c.battery.soc_max = b.value("soc_max", c.battery.soc_max);
      c.battery.soc_init = b.value("soc_init", c.battery.soc_init);
    }
    if (j.contains("tariff")) {
      const auto& t = j["tariff"];
      c.tariff.lambda_cp = t.value("lambda_cp", 0.0);
      if (t.contains("lambda_5cp")) c.tariff.lambda_5cp = t["lambda_5cp"].get<double>();
      c.tariff.lambda_ncp = t.value("lambda_ncp", 0.0);
      c.tariff.lambda_deg = t.value("lambda_deg", 0.0);
      c.tariff.flat_price = t.value("flat_price", 0.0);
      if (t.contains("holidays")) {
        std::vector<CivilDate> hol;
        for (const auto& s : t["holidays"]) hol.push_back(parse_date(s.get<std::string>()));
        c.tariff.holidays = HolidayCalendar(hol);
      }
      if (t.contains("cp_season")) {
        c.tariff.cp_season.start = parse_date(t["cp_season"].value("start", ""));
        c.tariff.cp_season.end = parse_date(t["cp_season"].value("end", ""));
      }
    }
    if (c.tariff.cp_season.start == CivilDate{} || !(c.tariff.cp_season.start <= c.tariff.cp_season.end))
      c.tariff.cp_season = c.range;
    if (j.contains("scenarios")) {
      const auto& s = j["scenarios"];
      c.scen.n_scenarios = s.value("n", c.scen.n_scenarios);
      c.scen.transform =
          s.value("transform", "log") == std::string("identity") ? Transform::kIdentity
                                                                 : Transform::kLog;
      c.scen.window_days = s.value("window_days", c.scen.window_days);
      c.scen.min_days = s.value("min_days", c.scen.min_days);
      c.scen.threads = s.value("threads", c.scen.threads);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      c.mip.lazy_peaks = s.value("lazy_peaks", c.mip.lazy_peaks);
      c.mip.warm_start = s.value("warm_start", c.mip.warm_start);
      c.mip.rel_gap = s.value("rel_gap", c.mip.rel_gap);
    }
    if (j.contains("benchmark")) {
      const auto& b = j["benchmark"];
      c.bench.alert_quantile = b.value("alert_quantile", c.bench.alert_quantile);
      c.alert_mode = b.value("alert_mode", c.alert_mode);
      if (b.contains("tune_range")) {
        DateRange r;
        r.start = parse_date(b["tune_range"].value("start", ""));
        r.end = parse_date(b["tune_range"].value("end", ""));
        c.bench_tune_range = r;
      }
    }
    c.carry_soc = j.value("carry_soc", c.carry_soc);
    c.write_lp_artifacts = j.value("write_lp", c.write_lp_artifacts);
    c.resume = j.value("resume", c.resume);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return parse_run_config(j);
}

// ---------------------------------------------------------------------------
// Daily pipeline

struct DayResult {
  CivilDate date{};
  PeakProbabilities cp_probs;
  double ncp_prob = 0.0;
  std::optional<Schedule> optimizer;   // absent in benchmark-only mode
  std::optional<double> objective;     // MILP objective, USD
  std::optional<Schedule> benchmark;
  bool alert = false;
  PnlBreakdown opt_actual;             // probability-weighted daily P&L
  PnlBreakdown bench_actual;
};

/// Running-state inputs the optimizer needs from the settlement thread.
struct RunningState {
  double month_max_mw = 0.0;
  double cp_level_mw = 0.0;
  double fifth_cp_mw = -kInf;  // -inf while fewer than 5 season days observed
  double soc_init = -1.0;      // <0 keeps the configured value
};

namespace detail {

inline DateRange training_window(const RunConfig& cfg, const DatasetBundle& bundle,
                                 const CivilDate& date) {
  const CivilDate end = add_days(date, -1);
  if (!(bundle.coverage.start <= end))
    throw LookAheadError("no history before " + to_string(date));
  CivilDate start = add_days(date, -cfg.scen.window_days);
  if (start < bundle.coverage.start) start = bundle.coverage.start;
  const DateRange w{start, end};
  if (w.n_days() < cfg.scen.min_days)
    throw LookAheadError("only " + std::to_string(w.n_days()) + " history days before " +
                         to_string(date) + ", need " + std::to_string(cfg.scen.min_days));
  return w;
}

inline void write_schedule_csv(const std::string& path, const Schedule& s) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "hour,pi_minus,pi_plus,b,soc\n";
  char buf[128];
  for (int h = 0; h < 24; ++h) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%.17g\n", h, s.pi_minus[h], s.pi_plus[h],
                  s.b[h], s.soc[h]);
    f << buf;
  }
}

inline Schedule read_schedule_csv(const std::string& path, const BatterySpec& bat) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  std::string line;
  std::getline(f, line);
  Schedule s;
  int h;
  double pm, pp, soc;
  int b;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%d,%lf", &h, &pm, &pp, &b, &soc) != 5 || h < 0 ||
        h > 23)
      throw ParseError(path + ": bad schedule row");
    s.pi_minus[h] = pm;
    s.pi_plus[h] = pp;
    s.b[h] = b;
    s.soc[h] = soc;
  }
  const std::string err = s.check(bat, 1e-6);
  if (!err.empty()) throw InfeasibleScheduleError(path + ": " + err);
  return s;
}

}  // namespace detail

/// Executes the full daily pipeline for one date. Training windows end the
/// day before; all randomness derives from (seed, date).
inline DayResult run_day(const RunConfig& cfg, const DatasetBundle& bundle,
                         const CivilDate& date, const RunningState& running = {},
                         const std::string& artifact_dir = "") {
  cfg.validate();
  const DateRange window = detail::training_window(cfg, bundle, date);
  const std::uint64_t day_seed =
      mix_seed(cfg.seed, static_cast<std::uint64_t>(days_from_civil(date)));

  // PV forecast.
  const PvModel pv_model = fit_pv(bundle.ssrd_forecast, bundle.pv_actual, date);
  if (!bundle.ssrd_forecast.has_day(date))
    throw GapError("no radiation forecast for " + to_string(date));
  const PvPrediction pv_fcst = predict_pv(pv_model, bundle.ssrd_forecast.day_slice(date));

  // Scenario chain.
  FitOptions fopts;
  fopts.transform = cfg.scen.transform;
  fopts.min_days = cfg.scen.min_days;
  fopts.holidays = cfg.tariff.holidays;
  DayModels models;
  try {
    models.forecast_to_regional = fit_joint(bundle.ma_forecast, bundle.ma_actual, window, fopts);
    models.regional_to_zone = fit_joint(bundle.ma_actual, bundle.ps_actual, window, fopts);
    models.zone_to_microgrid = fit_joint(bundle.ps_actual, bundle.mg_load, window, fopts);
  } catch (const InsufficientDataError& e) {
    throw LookAheadError(std::string(e.what()) + " (training must end before " +
                         to_string(date) + ")");
  }
  const DayScenarios scen =
      generate_day_scenarios(bundle, models, date, pv_fcst.values, cfg.scen.n_scenarios,
                             day_seed, cfg.scen.threads, cfg.tariff.holidays);

  // Peak probabilities against the running levels.
  DayResult out;
  out.date = date;
  out.cp_probs = make_peak_probabilities(scen.ps, running.cp_level_mw);
  out.ncp_prob = ncp_day_probability(scen.mg_net, running.month_max_mw);

  BatterySpec battery = cfg.battery.resolved();
  if (cfg.carry_soc && running.soc_init >= 0.0)
    battery.soc_init = std::clamp(running.soc_init, battery.soc_min, battery.soc_max);

  DayContext ctx = make_day_context(scen.mg, pv_fcst.values, out.cp_probs, out.ncp_prob,
                                    running.month_max_mw, running.cp_level_mw);
  if (cfg.tariff.lambda_5cp) {
    PeakProbabilities p5;
    p5.date = date;
    p5.entity = scen.ma.entity();
    p5.p_day_nrm = five_cp_day_probability(scen.ma, running.fifth_cp_mw);
    p5.p_hour = hour_peak_histogram(scen.ma);
    ctx.cp5_probs = p5;
  }

  const bool want_opt = cfg.policy != "benchmark";
  const bool want_bench = cfg.policy != "optimizer";
  MilpInstance inst;
  if (want_opt) {
    inst = build_milp(ctx, battery, cfg.tariff);
    const MipResult res = solve_milp(inst, cfg.mip);
    if (res.status != MipStatus::kOptimal || !res.schedule)
      throw NumericalError("dispatch MILP did not solve to optimality on " + to_string(date));
    out.optimizer = *res.schedule;
    out.objective = res.objective;
    if (!artifact_dir.empty()) {
      std::ofstream lg(std::filesystem::path(artifact_dir) / "solver_log.csv");
      write_solver_log(lg, res.log);
    }
  }
  if (want_bench) {
    out.alert = cfg.alert_mode == "on" ||
                (cfg.alert_mode == "auto" &&
                 cp_alert(bundle.ma_forecast, date, cfg.tariff.cp_season,
                          cfg.bench.alert_quantile));
    out.benchmark = benchmark_schedule(cfg.bench, out.alert, battery);
  }

  // Probability-weighted P&L against the realized day.
  const auto actual_mg = bundle.mg_load.day_slice(date, DaySliceMode::kLenient);
  const auto actual_pv = bundle.pv_actual.day_slice(date, DaySliceMode::kLenient);
  if (out.optimizer)
    out.opt_actual = actual_pnl(date, *out.optimizer, actual_mg, actual_pv, out.cp_probs,
                                out.ncp_prob, cfg.tariff, battery);
  if (out.benchmark)
    out.bench_actual = actual_pnl(date, *out.benchmark, actual_mg, actual_pv, out.cp_probs,
                                  out.ncp_prob, cfg.tariff, battery);

  if (!artifact_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(artifact_dir);
    write_scenarios_csv((fs::path(artifact_dir) / "scenarios.csv").string(),
                        {scen.ma, scen.ps, scen.mg, scen.mg_net});
    write_probs_json((fs::path(artifact_dir) / "probs.json").string(), out.cp_probs);
    write_pv_model_json((fs::path(artifact_dir) / "pv_model.json").string(), pv_model);
    if (out.optimizer)
      detail::write_schedule_csv((fs::path(artifact_dir) / "schedule_optimizer.csv").string(),
                                 *out.optimizer);
    if (out.benchmark)
      detail::write_schedule_csv((fs::path(artifact_dir) / "schedule_benchmark.csv").string(),
                                 *out.benchmark);
    if (want_opt && cfg.write_lp_artifacts)
      write_lp((fs::path(artifact_dir) / "instance.lp").string(), inst);
    nlohmann::json j;
    j["date"] = to_string(date);
    j["ncp_prob"] = out.ncp_prob;
    j["p_day_nrm"] = out.cp_probs.p_day_nrm;
    j["alert"] = out.alert;
    if (out.objective) j["objective"] = *out.objective;
    if (out.optimizer) j["optimizer_actual_pnl"] = out.opt_actual.total();
    if (out.benchmark) j["benchmark_actual_pnl"] = out.bench_actual.total();
    std::ofstream pf(fs::path(artifact_dir) / "pnl.json");
    pf << j.dump(2) << "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Season backtest

struct SeasonResult {
  BillLedger optimizer;
  BillLedger benchmark;
  std::optional<SeasonReport> optimizer_report;
  std::optional<SeasonReport> benchmark_report;
  SeasonCp season_cp{};
  double tuned_quantile = -1.0;
};

namespace detail {

struct StoredDay {
  CivilDate date{};
  std::optional<Schedule> optimizer;
  std::optional<Schedule> benchmark;
  std::array<double, 24> mg{}, pv{}, zone{};
};

inline std::array<double, 24> net_with_battery(const StoredDay& d, const Schedule& s,
                                               const BatterySpec& bat) {
  std::array<double, 24> net{};
  for (int h = 0; h < 24; ++h)
    net[h] = d.mg[h] - d.pv[h] + bat.capacity_mwh * (s.pi_minus[h] - s.pi_plus[h]);
  return net;
}

}  // namespace detail

/// Pass 2: sequential Final P&L settlement over stored schedules, with the
/// season CP frozen first for ex-post attribution.
inline void settle_pass(const RunConfig& cfg, const std::vector<detail::StoredDay>& stored,
                        SeasonResult& result, bool partial) {
  if (stored.empty()) return;
  const BatterySpec bat = cfg.battery.resolved();

  // Freeze the season CP by scanning the zone realizations.
  LedgerState scan = LedgerState::init(cfg.tariff);
  for (const auto& d : stored) {
    std::array<double, 24> zero{};
    update_running_peaks(scan, d.zone, zero, d.date);
  }
  result.season_cp = scan.running_cp;

  auto settle_policy = [&](bool optimizer) -> BillLedger {
    BillLedger ledger;
    ledger.policy = optimizer ? "optimizer" : "benchmark";
    ledger.state = LedgerState::init(cfg.tariff);
    ledger.state.expost_cp = scan.running_cp;
    for (const auto& d : stored) {
      const std::optional<Schedule>& s = optimizer ? d.optimizer : d.benchmark;
      if (!s) continue;
      BatterySpec day_bat = bat;
      day_bat.soc_init = implied_soc_init(*s, bat);
      const PnlBreakdown p = final_pnl(d.date, *s, d.mg, d.pv, d.zone, ledger.state, cfg.tariff,
                                       day_bat, cfg.accounting, cfg.attribution);
      ledger.add_day(p, detail::net_with_battery(d, *s, bat));
    }
    return ledger;
  };

  if (cfg.policy != "benchmark") result.optimizer = settle_policy(true);
  if (cfg.policy != "optimizer") result.benchmark = settle_policy(false);

  namespace fs = std::filesystem;
  const char* suffix = partial ? "_partial.csv" : ".csv";
  if (!result.optimizer.days.empty()) {
    std::ofstream f(fs::path(cfg.out_dir) / (std::string("pnl_optimizer") + suffix));
    write_pnl_csv(f, result.optimizer);
  }
  if (!result.benchmark.days.empty()) {
    std::ofstream f(fs::path(cfg.out_dir) / (std::string("pnl_benchmark") + suffix));
    write_pnl_csv(f, result.benchmark);
  }
  if (partial) return;
  const DateRange season{stored.front().date, stored.back().date};
  if (!result.optimizer.days.empty())
    result.optimizer_report = season_report(result.optimizer, season);
  if (!result.benchmark.days.empty())
    result.benchmark_report = season_report(result.benchmark, season);
}

/// Chronological season loop with per-day artifacts and ledger threading.
/// Resumable: previously persisted schedules are reloaded instead of
/// re-solved, which reproduces the uninterrupted run exactly.
inline SeasonResult run_season(const RunConfig& cfg_in, const DatasetBundle& bundle) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  SeasonResult result;
  if (cfg.alert_mode == "auto" && cfg.bench_tune_range) {
    const AlertTuneResult tuned =
        tune_alert(bundle.ma_forecast, bundle.ma_actual, *cfg.bench_tune_range);
    cfg.bench.alert_quantile = tuned.quantile;
    result.tuned_quantile = tuned.quantile;
  }

  const bool want_opt = cfg.policy != "benchmark";
  const bool want_bench = cfg.policy != "optimizer";
  const BatterySpec bat = cfg.battery.resolved();

  // Pass 1: schedules and probability-weighted P&L, day by day.
  std::vector<detail::StoredDay> stored;
  LedgerState opt_track = LedgerState::init(cfg.tariff);
  std::vector<double> ma_daily_max;  // RTO-proxy running list for the 5CP term
  double opt_soc = -1.0, bench_soc = -1.0;

  for (CivilDate date = cfg.range.start; date <= cfg.range.end; date = next_day(date)) {
    const std::string day_dir = (fs::path(cfg.out_dir) / to_string(date)).string();
    detail::StoredDay day;
    day.date = date;
    day.mg = bundle.mg_load.day_slice(date, DaySliceMode::kLenient);
    day.pv = bundle.pv_actual.day_slice(date, DaySliceMode::kLenient);
    day.zone = bundle.ps_actual.day_slice(date, DaySliceMode::kLenient);

    const std::string opt_path = day_dir + "/schedule_optimizer.csv";
    const std::string bench_path = day_dir + "/schedule_benchmark.csv";
    const bool have_artifacts = cfg.resume && (!want_opt || fs::exists(opt_path)) &&
                                (!want_bench || fs::exists(bench_path));
    try {
      if (have_artifacts) {
        if (want_opt) {
          BatterySpec b = bat;
          if (cfg.carry_soc && opt_soc >= 0.0)
            b.soc_init = std::clamp(opt_soc, b.soc_min, b.soc_max);
          day.optimizer = detail::read_schedule_csv(opt_path, b);
        }
        if (want_bench) {
          BatterySpec b = bat;
          if (cfg.carry_soc && bench_soc >= 0.0)
            b.soc_init = std::clamp(bench_soc, b.soc_min, b.soc_max);
          day.benchmark = detail::read_schedule_csv(bench_path, b);
        }
      } else {
        RunningState running;
        running.month_max_mw =
            detail::month_key(date) == opt_track.month_key ? opt_track.month_max_mw : 0.0;
        running.cp_level_mw =
            opt_track.running_cp.hour >= 0 ? opt_track.running_cp.level_mw : 0.0;
        if (ma_daily_max.size() >= 5) {
          std::vector<double> top = ma_daily_max;
          std::sort(top.begin(), top.end(), std::greater<>());
          running.fifth_cp_mw = top[4];
        }
        running.soc_init = opt_soc;
        const DayResult r = run_day(cfg, bundle, date, running, day_dir);
        day.optimizer = r.optimizer;
        day.benchmark = r.benchmark;
      }
    } catch (const Error&) {
      // Persist the partial ledgers, then propagate the original error.
      settle_pass(cfg, stored, result, /*partial=*/true);
      throw;
    }

    // Track running peaks for the next day's probabilities (optimizer view).
    if (day.optimizer) {
      const auto net = detail::net_with_battery(day, *day.optimizer, bat);
      update_running_peaks(opt_track, day.zone, net, date);
      opt_soc = day.optimizer->soc[23];
    }
    if (day.benchmark) bench_soc = day.benchmark->soc[23];
    if (bundle.ma_actual.has_day(date) &&
        is_cp_business_day(date, cfg.tariff.cp_season, cfg.tariff.holidays)) {
      const auto ma = bundle.ma_actual.day_slice(date);
      ma_daily_max.push_back(*std::max_element(ma.begin(), ma.end()));
    }
    stored.push_back(std::move(day));
  }

  settle_pass(cfg, stored, result, /*partial=*/false);
  return result;
}

}  // namespace peakdispatch
