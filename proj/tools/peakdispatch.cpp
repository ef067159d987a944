// peakdispatch CLI: dataset ingestion, synthetic worlds, model fitting,
// scenario generation, peak probabilities, day-ahead optimization, the
// rule-based benchmark, settlement, and the seasonal backtest.
//
// Exit codes: 0 ok, 2 data error, 3 solver error, 4 config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "peakdispatch/peakdispatch.hpp"

namespace pd = peakdispatch;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

pd::SynthWorldSpec parse_synth_spec(const json& j) {
  pd::SynthWorldSpec s;
  s.seed = j.value("seed", s.seed);
  s.n_days = j.value("n_days", s.n_days);
  if (j.contains("start_date")) s.start_date = pd::parse_date(j["start_date"].get<std::string>());
  s.utc_offset_minutes = j.value("utc_offset_minutes", s.utc_offset_minutes);
  if (j.contains("regional_base")) {
    const auto& b = j["regional_base"];
    if (b.size() != 24) throw pd::ConfigError("regional_base must have 24 values");
    for (int h = 0; h < 24; ++h) s.regional_base[h] = b[h].get<double>();
  }
  s.weekend_factor = j.value("weekend_factor", s.weekend_factor);
  s.seasonal_amplitude = j.value("seasonal_amplitude", s.seasonal_amplitude);
  s.seasonal_peak_doy = j.value("seasonal_peak_doy", s.seasonal_peak_doy);
  s.zone_loading = j.value("zone_loading", s.zone_loading);
  s.mg_loading = j.value("mg_loading", s.mg_loading);
  s.sigma_ma = j.value("sigma_ma", s.sigma_ma);
  s.rho_ma = j.value("rho_ma", s.rho_ma);
  s.sigma_ps = j.value("sigma_ps", s.sigma_ps);
  s.sigma_mg = j.value("sigma_mg", s.sigma_mg);
  s.forecast_log_sigma = j.value("forecast_log_sigma", s.forecast_log_sigma);
  s.forecast_log_rho = j.value("forecast_log_rho", s.forecast_log_rho);
  s.subset_sanity = j.value("subset_sanity", s.subset_sanity);
  s.pv_capacity_mw = j.value("pv_capacity_mw", s.pv_capacity_mw);
  s.radiation_peak_wm2 = j.value("radiation_peak_wm2", s.radiation_peak_wm2);
  s.cloud_sigma = j.value("cloud_sigma", s.cloud_sigma);
  s.pv_noise_mw = j.value("pv_noise_mw", s.pv_noise_mw);
  s.ssrd_forecast_sigma_wm2 = j.value("ssrd_forecast_sigma_wm2", s.ssrd_forecast_sigma_wm2);
  return s;
}

pd::RunConfig load_config_or_die(const std::string& path, const std::string& out_dir_override,
                                 std::uint64_t seed_override, bool has_seed) {
  pd::RunConfig cfg = pd::load_run_config(path);
  if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
  if (has_seed) cfg.seed = seed_override;
  return cfg;
}

struct ReportRows {
  std::vector<std::string> labels;
  std::vector<double> values;
};

ReportRows report_from_pnl_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw pd::IoError("cannot open: " + path);
  std::string line;
  std::getline(f, line);
  if (line != "date,ecc,ecp,edc,total") throw pd::ParseError(path + ": unexpected header");
  double total_ecc = 0, total_ecp = 0, total_all = 0;
  std::map<int, double> demand_by_month;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    char datestr[16];
    double ecc, ecp, edc, total;
    if (std::sscanf(line.c_str(), "%15[^,],%lf,%lf,%lf,%lf", datestr, &ecc, &ecp, &edc,
                    &total) != 5)
      throw pd::ParseError(path + ": bad row: " + line);
    const pd::CivilDate d = pd::parse_date(datestr);
    total_ecc += ecc;
    total_ecp += ecp;
    total_all += total;
    demand_by_month[d.year * 100 + d.month] += edc;
  }
  ReportRows r;
  r.labels.push_back("Total Electricity Consumption Cost (USD)");
  r.values.push_back(total_ecc);
  for (const auto& [key, v] : demand_by_month) {
    r.labels.push_back(std::string("Demand charge for ") + pd::month_name(key % 100) + " (USD)");
    r.values.push_back(v);
  }
  r.labels.push_back("Final Coincident Peak Charge (USD)");
  r.values.push_back(total_ecp);
  r.labels.push_back("Total Final Cost (USD)");
  r.values.push_back(total_all);
  return r;
}

void print_report(const ReportRows& r) {
  std::size_t w = 0;
  for (const auto& l : r.labels) w = std::max(w, l.size());
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    std::printf("%-*s  %14.2f\n", static_cast<int>(w), r.labels[i].c_str(), r.values[i]);
}

void write_comparison(const std::string& out_dir, const ReportRows& bench,
                      const ReportRows& opt) {
  std::ofstream f(fs::path(out_dir) / "season_report.txt");
  std::size_t w = 0;
  for (const auto& l : bench.labels) w = std::max(w, l.size());
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-*s  %14s  %14s  %14s\n", static_cast<int>(w), "",
                "Benchmark", "Solution", "Delta");
  f << buf;
  std::cout << buf;
  for (std::size_t i = 0; i < bench.labels.size() && i < opt.labels.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-*s  %14.2f  %14.2f  %14.2f\n", static_cast<int>(w),
                  bench.labels[i].c_str(), bench.values[i], opt.values[i],
                  opt.values[i] - bench.values[i]);
    f << buf;
    std::cout << buf;
  }
}

void write_daily_diff(const std::string& out_dir) {
  const auto read = [](const std::string& p) {
    std::map<std::string, std::array<double, 4>> rows;
    std::ifstream f(p);
    if (!f) return rows;
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      char datestr[16];
      std::array<double, 4> v{};
      if (std::sscanf(line.c_str(), "%15[^,],%lf,%lf,%lf,%lf", datestr, &v[0], &v[1], &v[2],
                      &v[3]) == 5)
        rows[datestr] = v;
    }
    return rows;
  };
  const auto opt = read((fs::path(out_dir) / "pnl_optimizer.csv").string());
  const auto bench = read((fs::path(out_dir) / "pnl_benchmark.csv").string());
  if (opt.empty() || bench.empty()) return;
  std::ofstream f(fs::path(out_dir) / "daily_difference.csv");
  f << "date,delta_ecc,delta_ecp,delta_edc,delta_total\n";
  char buf[160];
  for (const auto& [date, v] : opt) {
    auto it = bench.find(date);
    if (it == bench.end()) continue;
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n", date.c_str(),
                  v[0] - it->second[0], v[1] - it->second[1], v[2] - it->second[2],
                  v[3] - it->second[3]);
    f << buf;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead battery dispatch optimizer and seasonal backtester"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "Run configuration JSON")->envname("PEAKDISPATCH_CONFIG");
  app.add_option("--out-dir", out_dir, "Output directory override");
  app.add_option("--seed", seed, "Seed override")->each([&](const std::string&) { seed_set = true; });

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load CSV series into a validated bundle");
  std::string ma, maf, ps, mg, pv, ssrd, out;
  bool allow_gaps = false;
  ingest->add_option("--ma", ma, "Regional actual load CSV")->required();
  ingest->add_option("--ma-forecast", maf, "Regional day-ahead forecast CSV")->required();
  ingest->add_option("--ps", ps, "Zone actual load CSV")->required();
  ingest->add_option("--mg", mg, "Microgrid load CSV")->required();
  ingest->add_option("--pv", pv, "PV production CSV")->required();
  ingest->add_option("--ssrd", ssrd, "Radiation forecast CSV")->required();
  ingest->add_option("--out", out, "Bundle directory to write")->required();
  ingest->add_flag("--allow-gaps", allow_gaps, "Report gaps instead of rejecting");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic world bundle");
  std::string synth_spec_path, synth_out, truth_out;
  synth->add_option("--spec", synth_spec_path, "SynthWorldSpec JSON (defaults when omitted)");
  synth->add_option("--out", synth_out, "Bundle directory to write")->required();
  synth->add_option("--truth", truth_out, "Ground-truth JSON output path");

  // pvfit
  auto* pvfit = app.add_subcommand("pvfit", "Fit the per-hour PV regression");
  std::string pv_bundle, pv_asof, pv_out;
  pvfit->add_option("--bundle", pv_bundle)->required();
  pvfit->add_option("--as-of", pv_asof, "Fit date (training ends the day before)")->required();
  pvfit->add_option("--out", pv_out)->required();

  // scengen
  auto* sceng = app.add_subcommand("scengen", "Generate conditional day scenarios");
  std::string sg_bundle, sg_date, sg_out;
  int sg_n = 1000;
  std::uint64_t sg_seed = 1;
  int sg_window = 365;
  std::string sg_transform = "log";
  sceng->add_option("--bundle", sg_bundle)->required();
  sceng->add_option("--date", sg_date)->required();
  sceng->add_option("--n", sg_n);
  sceng->add_option("--seed", sg_seed);
  sceng->add_option("--window-days", sg_window);
  sceng->add_option("--transform", sg_transform)->check(CLI::IsMember({"log", "identity"}));
  sceng->add_option("--out", sg_out)->required();

  // peakprob
  auto* pk = app.add_subcommand("peakprob", "Peak probabilities from a scenario CSV");
  std::string pk_scen, pk_out, pk_entity = "PS", pk_date = "1970-01-01";
  double pk_running = 0.0;
  pk->add_option("--scen", pk_scen)->required();
  pk->add_option("--running-max", pk_running)->required();
  pk->add_option("--entity", pk_entity, "Entity to evaluate (default PS)");
  pk->add_option("--date", pk_date);
  pk->add_option("--out", pk_out)->required();

  // optimize
  auto* opt = app.add_subcommand("optimize", "Run the daily pipeline for one date");
  std::string opt_date;
  opt->add_option("--date", opt_date)->required();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Rule-based schedule for one date");
  std::string b_bundle, b_date, b_alert = "auto", b_out;
  double b_quantile = 0.97;
  bench->add_option("--bundle", b_bundle)->required();
  bench->add_option("--date", b_date)->required();
  bench->add_option("--alert", b_alert)->check(CLI::IsMember({"auto", "on", "off"}));
  bench->add_option("--quantile", b_quantile);
  bench->add_option("--out", b_out)->required();

  // settle / backtest / report
  auto* settle = app.add_subcommand("settle", "Re-settle a season from persisted schedules");
  auto* backtest = app.add_subcommand("backtest", "Full season backtest");
  auto* report = app.add_subcommand("report", "Render the season comparison report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      pd::BundlePaths paths{ma, maf, ps, mg, pv, ssrd};
      pd::LoadOptions lo;
      lo.reject_gaps = !allow_gaps;
      pd::GapSummary gaps;
      const pd::DatasetBundle b = pd::load_bundle(paths, lo, &gaps);
      pd::save_bundle(out, b);
      std::cout << "bundle: " << pd::to_string(b.coverage.start) << " .. "
                << pd::to_string(b.coverage.end) << ", gaps: " << gaps.total() << "\n";
      if (gaps.total()) std::cout << gaps.describe();
    } else if (*synth) {
      pd::SynthWorldSpec spec;
      if (!synth_spec_path.empty()) {
        std::ifstream f(synth_spec_path);
        if (!f) throw pd::ConfigError("cannot open spec: " + synth_spec_path);
        json j;
        f >> j;
        spec = parse_synth_spec(j);
      }
      if (seed_set) spec.seed = seed;
      pd::SynthGroundTruth truth;
      const pd::DatasetBundle b = pd::generate_synth_world(spec, &truth);
      pd::save_bundle(synth_out, b);
      if (!truth_out.empty()) pd::write_ground_truth_json(truth_out, truth);
      std::cout << "synthetic bundle: " << spec.n_days << " days from "
                << pd::to_string(spec.start_date) << ", clip fraction "
                << truth.clip_fraction() << "\n";
    } else if (*pvfit) {
      const pd::DatasetBundle b = pd::load_bundle_dir(pv_bundle);
      const pd::PvModel m = pd::fit_pv(b.ssrd_forecast, b.pv_actual, pd::parse_date(pv_asof));
      pd::write_pv_model_json(pv_out, m);
      std::cout << "pv model written to " << pv_out << "\n";
    } else if (*sceng) {
      const pd::DatasetBundle b = pd::load_bundle_dir(sg_bundle);
      const pd::CivilDate date = pd::parse_date(sg_date);
      pd::RunConfig cfg;
      cfg.scen.window_days = sg_window;
      cfg.scen.transform =
          sg_transform == "identity" ? pd::Transform::kIdentity : pd::Transform::kLog;
      const pd::DateRange window{
          pd::add_days(date, -sg_window) < b.coverage.start ? b.coverage.start
                                                            : pd::add_days(date, -sg_window),
          pd::add_days(date, -1)};
      pd::FitOptions fo;
      fo.transform = cfg.scen.transform;
      pd::DayModels models{pd::fit_joint(b.ma_forecast, b.ma_actual, window, fo),
                           pd::fit_joint(b.ma_actual, b.ps_actual, window, fo),
                           pd::fit_joint(b.ps_actual, b.mg_load, window, fo)};
      const pd::PvModel pvm = pd::fit_pv(b.ssrd_forecast, b.pv_actual, date);
      const auto pvf = pd::predict_pv(pvm, b.ssrd_forecast.day_slice(date));
      const pd::DayScenarios scen =
          pd::generate_day_scenarios(b, models, date, pvf.values, sg_n, sg_seed);
      pd::write_scenarios_csv(sg_out, {scen.ma, scen.ps, scen.mg, scen.mg_net});
      std::cout << "wrote " << sg_n << " scenarios per entity to " << sg_out << "\n";
    } else if (*pk) {
      std::ifstream f(pk_scen);
      if (!f) throw pd::IoError("cannot open: " + pk_scen);
      const auto sets = pd::read_scenarios_csv(f, pd::parse_date(pk_date), pk_scen);
      const pd::ScenarioSet* chosen = nullptr;
      for (const auto& s : sets)
        if (s.entity() == pk_entity) chosen = &s;
      if (!chosen)
        throw pd::ParseError(pk_scen + ": no scenarios for entity " + pk_entity);
      const pd::PeakProbabilities probs = pd::make_peak_probabilities(*chosen, pk_running);
      pd::write_probs_json(pk_out, probs);
      std::cout << "p_day_nrm = " << probs.p_day_nrm << "\n";
    } else if (*opt) {
      if (config_path.empty()) throw pd::ConfigError("optimize requires --config");
      pd::RunConfig cfg = load_config_or_die(config_path, out_dir, seed, seed_set);
      const pd::DatasetBundle b = pd::load_bundle_dir(cfg.bundle_dir);
      const pd::CivilDate date = pd::parse_date(opt_date);
      const std::string day_dir =
          (fs::path(cfg.out_dir) / pd::to_string(date)).string();
      const pd::DayResult r = pd::run_day(cfg, b, date, {}, day_dir);
      std::cout << "date " << pd::to_string(date) << ": p_day_nrm=" << r.cp_probs.p_day_nrm
                << " ncp_prob=" << r.ncp_prob;
      if (r.objective) std::cout << " objective=" << *r.objective;
      std::cout << "\nartifacts in " << day_dir << "\n";
    } else if (*bench) {
      const pd::DatasetBundle b = pd::load_bundle_dir(b_bundle);
      const pd::CivilDate date = pd::parse_date(b_date);
      pd::BenchmarkPolicy policy;
      policy.alert_quantile = b_quantile;
      pd::BatterySpec bat;
      pd::DateRange season{{date.year, 6, 1}, {date.year, 9, 30}};
      if (!config_path.empty()) {
        pd::RunConfig cfg = load_config_or_die(config_path, out_dir, seed, seed_set);
        policy = cfg.bench;
        bat = cfg.battery;
        season = cfg.tariff.cp_season;
      }
      bool alert = b_alert == "on";
      if (b_alert == "auto")
        alert = pd::cp_alert(b.ma_forecast, date, season, policy.alert_quantile);
      const pd::Schedule s = pd::benchmark_schedule(policy, alert, bat);
      std::ofstream f(b_out);
      if (!f) throw pd::IoError("cannot open for writing: " + b_out);
      f << "hour,pi_minus,pi_plus,b,soc\n";
      char buf[128];
      for (int h = 0; h < 24; ++h) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%.17g\n", h, s.pi_minus[h],
                      s.pi_plus[h], s.b[h], s.soc[h]);
        f << buf;
      }
      std::cout << "alert=" << (alert ? "on" : "off") << " schedule written to " << b_out << "\n";
    } else if (*settle || *backtest) {
      if (config_path.empty()) throw pd::ConfigError("requires --config");
      pd::RunConfig cfg = load_config_or_die(config_path, out_dir, seed, seed_set);
      if (*settle) cfg.resume = true;  // settle never re-solves
      const pd::DatasetBundle b = pd::load_bundle_dir(cfg.bundle_dir);
      const pd::SeasonResult res = pd::run_season(cfg, b);
      if (res.optimizer_report && res.benchmark_report) {
        std::cout << pd::format_comparison(*res.benchmark_report, *res.optimizer_report,
                                           "Benchmark", "Solution");
        std::ofstream f(fs::path(cfg.out_dir) / "season_report.txt");
        f << pd::format_comparison(*res.benchmark_report, *res.optimizer_report, "Benchmark",
                                   "Solution");
      } else if (res.optimizer_report) {
        print_report({res.optimizer_report->labels, res.optimizer_report->values});
      } else if (res.benchmark_report) {
        print_report({res.benchmark_report->labels, res.benchmark_report->values});
      }
      write_daily_diff(cfg.out_dir);
      std::cout << "season CP: " << pd::to_string(res.season_cp.date) << " hour "
                << res.season_cp.hour << "\n";
    } else if (*report) {
      if (config_path.empty() && out_dir.empty())
        throw pd::ConfigError("report requires --config or --out-dir");
      std::string dir = out_dir;
      if (dir.empty()) dir = load_config_or_die(config_path, "", 0, false).out_dir;
      const std::string opt_csv = (fs::path(dir) / "pnl_optimizer.csv").string();
      const std::string bench_csv = (fs::path(dir) / "pnl_benchmark.csv").string();
      const bool has_opt = fs::exists(opt_csv), has_bench = fs::exists(bench_csv);
      if (has_opt && has_bench) {
        write_comparison(dir, report_from_pnl_csv(bench_csv), report_from_pnl_csv(opt_csv));
        write_daily_diff(dir);
      } else if (has_opt) {
        print_report(report_from_pnl_csv(opt_csv));
      } else if (has_bench) {
        print_report(report_from_pnl_csv(bench_csv));
      } else {
        throw pd::IoError("no settlement CSVs in " + dir);
      }
    }
  } catch (const pd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const pd::NumericalError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const pd::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
