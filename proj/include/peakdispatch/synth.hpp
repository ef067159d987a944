#pragma once

// Synthetic world generation: a linear factor model with known ground truth.
//
//   regional  MA_dh = base_h * season(d) * week(d) + F_dh          (AR(1) noise F)
//   zone      PS_dh = alpha * MA_dh + eps_ps
//   microgrid MG_dh = beta  * PS_dh + eps_mg
//   forecast  MAf_dh = MA_dh * exp(e_dh)                           (AR(1) log error)
//
// Negative draws are clipped at zero and counted. All randomness flows from
// per-day substreams of the seed, so generation is deterministic and
// parallelizable across days.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "peakdispatch/bundle.hpp"
#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/rng.hpp"
#include "peakdispatch/series.hpp"

namespace peakdispatch {

struct SynthWorldSpec {
  std::uint64_t seed = 1;
  int n_days = 540;
  CivilDate start_date{2024, 1, 1};
  int utc_offset_minutes = -300;  // fixed offset; DST-free synthetic calendar

  /// Regional base profile in MW (hour 0..23). Defaults to a double-peak
  /// weekday shape around 30 GW.
  std::array<double, 24> regional_base = {
      24000, 22800, 22200, 22000, 22400, 23600, 26000, 28800, 30400, 31200, 31600, 32000,
      32400, 32800, 33200, 33600, 34000, 34400, 33600, 32000, 30400, 28800, 27200, 25600};
  double weekend_factor = 0.85;
  double seasonal_amplitude = 0.15;  // multiplicative annual sinusoid, peak mid-July
  int seasonal_peak_doy = 200;

  double zone_loading = 0.30;  // alpha
  double mg_loading = 0.25;    // beta

  double sigma_ma = 900.0;  // stationary std of the regional AR(1) factor, MW
  double rho_ma = 0.6;      // AR(1) across hours
  double sigma_ps = 250.0;
  double sigma_mg = 60.0;
  double forecast_log_sigma = 0.015;
  double forecast_log_rho = 0.8;

  /// Subset-zone sanity mode: layer noise applied as a nonnegative
  /// subtraction, so PS <= MA and MG <= PS pointwise when loadings <= 1.
  bool subset_sanity = false;

  double pv_capacity_mw = 500.0;
  double radiation_peak_wm2 = 900.0;
  double cloud_sigma = 0.25;
  double pv_noise_mw = 8.0;
  double ssrd_forecast_sigma_wm2 = 40.0;

  void validate() const {
    if (n_days < 1) throw SpecError("n_days must be >= 1");
    if (sigma_ma < 0 || sigma_ps < 0 || sigma_mg < 0 || forecast_log_sigma < 0 ||
        cloud_sigma < 0 || pv_noise_mw < 0 || ssrd_forecast_sigma_wm2 < 0)
      throw SpecError("noise parameters must be nonnegative (PSD covariance)");
    if (std::abs(rho_ma) >= 1.0 || std::abs(forecast_log_rho) >= 1.0)
      throw SpecError("AR(1) coefficients must be in (-1,1)");
    if (zone_loading < 0 || mg_loading < 0) throw SpecError("loadings must be nonnegative");
    if (pv_capacity_mw < 0 || radiation_peak_wm2 <= 0)
      throw SpecError("pv capacity must be nonnegative, radiation peak positive");
  }
};

/// Latent parameters and bookkeeping of one generated world.
struct SynthGroundTruth {
  SynthWorldSpec spec;
  double pv_coef_truth = 0.0;  // MW per W/m^2
  std::size_t clipped_values = 0;
  std::size_t total_load_values = 0;

  double clip_fraction() const {
    return total_load_values ? static_cast<double>(clipped_values) / total_load_values : 0.0;
  }

  /// Analytic corr(PS_h, MA_h) for the constant-base configuration (per-hour
  /// stationary noise).
  double analytic_zone_region_corr() const {
    const double a = spec.zone_loading;
    const double num = a * spec.sigma_ma;
    const double den =
        std::sqrt(a * a * spec.sigma_ma * spec.sigma_ma + spec.sigma_ps * spec.sigma_ps);
    return den > 0 ? num / den : 0.0;
  }
};

namespace detail {

inline void ar1_path(Rng& rng, double sigma, double rho, int n, std::vector<double>& out) {
  out.resize(n);
  if (sigma == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  double x = sigma * rng.next_normal();
  out[0] = x;
  const double innov = sigma * std::sqrt(1.0 - rho * rho);
  for (int i = 1; i < n; ++i) {
    x = rho * x + innov * rng.next_normal();
    out[i] = x;
  }
}

inline double clip0(double v, std::size_t& clipped) {
  if (v < 0.0) {
    ++clipped;
    return 0.0;
  }
  return v;
}

}  // namespace detail

inline DatasetBundle generate_synth_world(const SynthWorldSpec& spec,
                                          SynthGroundTruth* truth_out = nullptr) {
  spec.validate();
  SynthGroundTruth truth;
  truth.spec = spec;
  truth.pv_coef_truth = spec.pv_capacity_mw / spec.radiation_peak_wm2;

  const std::size_t n = static_cast<std::size_t>(spec.n_days) * 24;
  std::vector<Timestamp> ts(n);
  std::vector<double> ma(n), maf(n), ps(n), mg(n), pv(n), ssrd(n);

  std::vector<double> f_noise, e_noise;
  for (int d = 0; d < spec.n_days; ++d) {
    const CivilDate date = add_days(spec.start_date, d);
    const int doy = static_cast<int>(days_from_civil(date) -
                                     days_from_civil(CivilDate{date.year, 1, 1})) +
                    1;
    const double season =
        1.0 + spec.seasonal_amplitude *
                  std::cos(2.0 * M_PI * (doy - spec.seasonal_peak_doy) / 365.25);
    const double week = is_weekend(date) ? spec.weekend_factor : 1.0;

    Rng day_rng = Rng::substream(spec.seed, static_cast<std::uint64_t>(days_from_civil(date)));
    detail::ar1_path(day_rng, spec.sigma_ma, spec.rho_ma, 24, f_noise);
    detail::ar1_path(day_rng, spec.forecast_log_sigma, spec.forecast_log_rho, 24, e_noise);

    // Solar: one cloudiness draw per day plus hourly texture.
    const double day_cloud = std::min(1.0, std::abs(spec.cloud_sigma * day_rng.next_normal()));

    for (int h = 0; h < 24; ++h) {
      const std::size_t i = static_cast<std::size_t>(d) * 24 + h;
      ts[i] = make_timestamp(date, h, 0, spec.utc_offset_minutes);

      const double ma_v =
          detail::clip0(spec.regional_base[h] * season * week + f_noise[h], truth.clipped_values);
      double ps_v, mg_v;
      if (spec.subset_sanity) {
        ps_v = detail::clip0(
            spec.zone_loading * ma_v - std::abs(spec.sigma_ps * day_rng.next_normal()),
            truth.clipped_values);
        mg_v = detail::clip0(
            spec.mg_loading * ps_v - std::abs(spec.sigma_mg * day_rng.next_normal()),
            truth.clipped_values);
      } else {
        ps_v = detail::clip0(spec.zone_loading * ma_v + spec.sigma_ps * day_rng.next_normal(),
                             truth.clipped_values);
        mg_v = detail::clip0(spec.mg_loading * ps_v + spec.sigma_mg * day_rng.next_normal(),
                             truth.clipped_values);
      }
      ma[i] = ma_v;
      ps[i] = ps_v;
      mg[i] = mg_v;
      maf[i] = ma_v * std::exp(e_noise[h]);
      truth.total_load_values += 3;

      // Actual radiation drives PV production; the bundle stores only the
      // day-ahead radiation forecast, which is what the PV regression sees.
      const double sun = h >= 6 && h <= 18 ? std::sin(M_PI * (h - 6) / 12.0) : 0.0;
      const double hour_cloud =
          std::min(1.0, std::abs(0.3 * spec.cloud_sigma * day_rng.next_normal()));
      const double ssrd_actual =
          std::max(0.0, spec.radiation_peak_wm2 * sun * season * (1.0 - day_cloud) *
                            (1.0 - hour_cloud));
      pv[i] = std::max(0.0, truth.pv_coef_truth * ssrd_actual +
                                (ssrd_actual > 0 ? spec.pv_noise_mw * day_rng.next_normal()
                                                 : 0.0));
      ssrd[i] = std::max(
          0.0, ssrd_actual + (ssrd_actual > 0 ? spec.ssrd_forecast_sigma_wm2 *
                                                    day_rng.next_normal()
                                              : 0.0));
    }
  }

  DatasetBundle b{HourlySeries("MA", ts, ma),      HourlySeries("MA_FCST", ts, maf),
                  HourlySeries("PS", ts, ps),      HourlySeries("MG", ts, mg),
                  HourlySeries("PV", ts, pv),      HourlySeries("SSRD", ts, ssrd)};
  b.coverage = DateRange{spec.start_date, add_days(spec.start_date, spec.n_days - 1)};
  if (truth_out) *truth_out = truth;
  return b;
}

inline void write_ground_truth_json(const std::string& path, const SynthGroundTruth& t) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "{\n"
    << "  \"seed\": " << t.spec.seed << ",\n"
    << "  \"n_days\": " << t.spec.n_days << ",\n"
    << "  \"zone_loading\": " << t.spec.zone_loading << ",\n"
    << "  \"mg_loading\": " << t.spec.mg_loading << ",\n"
    << "  \"sigma_ma\": " << t.spec.sigma_ma << ",\n"
    << "  \"rho_ma\": " << t.spec.rho_ma << ",\n"
    << "  \"sigma_ps\": " << t.spec.sigma_ps << ",\n"
    << "  \"sigma_mg\": " << t.spec.sigma_mg << ",\n"
    << "  \"forecast_log_sigma\": " << t.spec.forecast_log_sigma << ",\n"
    << "  \"forecast_log_rho\": " << t.spec.forecast_log_rho << ",\n"
    << "  \"pv_coef_truth\": " << t.pv_coef_truth << ",\n"
    << "  \"clipped_values\": " << t.clipped_values << ",\n"
    << "  \"total_load_values\": " << t.total_load_values << "\n"
    << "}\n";
}

}  // namespace peakdispatch
