#pragma once

// Per-hour no-intercept linear regression of PV production on forecast
// surface short-wave radiation. Training data is separated by hour; each
// coefficient uses all paired history strictly before the target day.

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/series.hpp"

namespace peakdispatch {

struct PvModel {
  std::array<double, 24> coef{};        // MW per W/m^2
  std::array<int, 24> train_counts{};   // pairs used per hour
  std::array<bool, 24> degenerate{};    // sum x^2 = 0 or fewer than 2 pairs
  CivilDate fit_date{};
};

struct PvFitOptions {
  /// Drop training pairs with PV below this level while radiation exceeds the
  /// threshold (maintenance outliers); negative disables the filter.
  double drop_zero_pv_above_ssrd = -1.0;
};

/// coef[h] = sum(x*y) / sum(x^2) over hour-h pairs strictly before `as_of`.
inline PvModel fit_pv(const HourlySeries& history_ssrd, const HourlySeries& history_pv,
                      const CivilDate& as_of, const PvFitOptions& opts = {}) {
  PvModel m;
  m.fit_date = as_of;
  std::array<double, 24> sxy{};
  std::array<double, 24> sxx{};
  auto cov = history_ssrd.coverage();
  if (cov) {
    for (CivilDate d = cov->start; d < as_of && d <= cov->end; d = next_day(d)) {
      if (!history_ssrd.has_day(d) || !history_pv.has_day(d)) continue;
      const auto x = history_ssrd.day_slice(d);
      const auto y = history_pv.day_slice(d);
      for (int h = 0; h < 24; ++h) {
        if (opts.drop_zero_pv_above_ssrd >= 0.0 && x[h] > opts.drop_zero_pv_above_ssrd &&
            y[h] <= 0.0)
          continue;
        sxy[h] += x[h] * y[h];
        sxx[h] += x[h] * x[h];
        m.train_counts[h] += 1;
      }
    }
  }
  bool any = false;
  for (int h = 0; h < 24; ++h) {
    if (m.train_counts[h] >= 2 && sxx[h] > 0.0) {
      m.coef[h] = sxy[h] / sxx[h];
      m.degenerate[h] = false;
      any = true;
    } else {
      m.coef[h] = 0.0;
      m.degenerate[h] = true;
    }
  }
  if (!any) throw NoDataError("no hour has two or more usable training pairs before " +
                              to_string(as_of));
  return m;
}

struct PvPrediction {
  std::array<double, 24> values{};
  int clamped = 0;  // negative predictions clipped to zero
};

/// prediction[h] = max(0, coef[h] * ssrd[h]).
inline PvPrediction predict_pv(const PvModel& model, const std::array<double, 24>& ssrd) {
  PvPrediction p;
  for (int h = 0; h < 24; ++h) {
    const double raw = model.coef[h] * ssrd[h];
    if (raw < 0.0) {
      p.values[h] = 0.0;
      ++p.clamped;
    } else {
      p.values[h] = raw;
    }
  }
  return p;
}

struct PvScore {
  double mae = 0.0;
  double mse = 0.0;
};

inline PvScore score_pv(const std::vector<double>& predictions,
                        const std::vector<double>& actuals) {
  if (predictions.size() != actuals.size())
    throw LengthMismatchError("prediction and actual lengths differ");
  if (predictions.empty()) throw LengthMismatchError("empty evaluation window");
  PvScore s;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - actuals[i];
    s.mae += std::abs(e);
    s.mse += e * e;
  }
  s.mae /= static_cast<double>(predictions.size());
  s.mse /= static_cast<double>(predictions.size());
  return s;
}

inline void write_pv_model_json(std::ostream& os, const PvModel& m) {
  char buf[32];
  os << "{\n  \"fit_date\": \"" << to_string(m.fit_date) << "\",\n  \"coef\": [";
  for (int h = 0; h < 24; ++h) {
    std::snprintf(buf, sizeof(buf), "%.17g", m.coef[h]);
    os << (h ? ", " : "") << buf;
  }
  os << "],\n  \"train_counts\": [";
  for (int h = 0; h < 24; ++h) os << (h ? ", " : "") << m.train_counts[h];
  os << "],\n  \"degenerate\": [";
  for (int h = 0; h < 24; ++h) os << (h ? ", " : "") << (m.degenerate[h] ? "true" : "false");
  os << "]\n}\n";
}

inline void write_pv_model_json(const std::string& path, const PvModel& m) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_pv_model_json(f, m);
}

}  // namespace peakdispatch
