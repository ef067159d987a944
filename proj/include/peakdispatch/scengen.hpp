#pragma once

// Conditional Monte Carlo scenario generation.
//
// A JointLoadModel is a multivariate Gaussian on the (optionally log-)
// transformed hourly values of an entity pair (A, B): per-hour means by
// calendar class (weekday vs weekend+holiday) and a pooled 2H x 2H residual
// covariance with Ledoit-Wolf-style shrinkage toward the diagonal and an
// eigenvalue floor. Scenarios for B are drawn from the exact Gaussian
// conditional law given A's 24 values.
//
// Chains keep one child draw per parent path, so N_s is constant through
// forecast -> regional -> zone -> microgrid.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "peakdispatch/bundle.hpp"
#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/rng.hpp"
#include "peakdispatch/scenario_set.hpp"
#include "peakdispatch/series.hpp"

namespace peakdispatch {

enum class Transform { kLog, kIdentity };
enum class CalendarClass { kWeekday = 0, kWeekendHoliday = 1 };

inline CalendarClass calendar_class(const CivilDate& d,
                                    const HolidayCalendar& holidays = HolidayCalendar{}) {
  return is_weekend(d) || holidays.is_holiday(d) ? CalendarClass::kWeekendHoliday
                                                 : CalendarClass::kWeekday;
}

constexpr double kLogFloorMw = 1e-3;

inline double apply_transform(Transform t, double v) {
  return t == Transform::kLog ? std::log(std::max(v, kLogFloorMw)) : v;
}
inline double invert_transform(Transform t, double z) {
  return t == Transform::kLog ? std::exp(z) : std::max(z, 0.0);
}

struct JointLoadModel {
  std::string entity_a;
  std::string entity_b;
  Transform transform = Transform::kLog;
  int hours = 24;  // per entity; dimension is 2*hours
  /// Mean vectors by calendar class, each of length 2*hours.
  std::array<Eigen::VectorXd, 2> class_means;
  Eigen::MatrixXd residual_cov;  // 2*hours x 2*hours
  DateRange fit_window{};
  int n_days_fit = 0;
  double shrinkage_delta = 0.0;
  double eigen_floor = 0.0;

  int dim() const { return 2 * hours; }
  const Eigen::VectorXd& mean(CalendarClass c) const {
    return class_means[static_cast<int>(c)];
  }
};

/// A condition on the model's entity A for one target day.
struct Condition {
  std::string entity;
  CivilDate date{};
  std::vector<double> values;  // length = model hours, untransformed
};

namespace detail {

/// Ledoit-Wolf-style shrinkage intensity toward the diagonal target
/// (Schafer-Strimmer estimator on the off-diagonal entries).
inline double shrinkage_intensity(const std::vector<Eigen::VectorXd>& residuals,
                                  const Eigen::MatrixXd& sample_cov) {
  const int n = static_cast<int>(residuals.size());
  const int d = static_cast<int>(sample_cov.rows());
  if (n < 3) return 1.0;
  double var_sum = 0.0, cov_sq_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double s_ij = sample_cov(i, j);
      double w2 = 0.0;
      const double wbar = s_ij * (n - 1.0) / n;
      for (const auto& r : residuals) {
        const double w = r[i] * r[j];
        w2 += (w - wbar) * (w - wbar);
      }
      var_sum += (static_cast<double>(n) / ((n - 1.0) * (n - 1.0) * (n - 1.0))) * w2;
      cov_sq_sum += s_ij * s_ij;
    }
  }
  if (cov_sq_sum <= 0.0) return 1.0;
  return std::clamp(var_sum / cov_sq_sum, 0.0, 1.0);
}

inline void floor_eigenvalues(Eigen::MatrixXd& cov, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw SingularCovError("eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  bool changed = false;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] < floor) {
      ev[i] = floor;
      changed = true;
    }
  if (changed)
    cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

struct FitOptions {
  int min_days = 60;
  Transform transform = Transform::kLog;
  HolidayCalendar holidays{};
};

/// Fits the joint Gaussian for a pair of series over a date window. Days
/// enter only when both entities have all 24 hours.
inline JointLoadModel fit_joint(const HourlySeries& a, const HourlySeries& b,
                                const DateRange& window, const FitOptions& opts = {}) {
  JointLoadModel m;
  m.entity_a = a.entity();
  m.entity_b = b.entity();
  m.transform = opts.transform;
  m.hours = 24;
  m.fit_window = window;
  const int d = m.dim();

  std::vector<Eigen::VectorXd> obs;
  std::vector<int> cls;
  for (CivilDate date = window.start; date <= window.end; date = next_day(date)) {
    if (!a.has_day(date) || !b.has_day(date)) continue;
    const auto va = a.day_slice(date);
    const auto vb = b.day_slice(date);
    Eigen::VectorXd z(d);
    for (int h = 0; h < 24; ++h) {
      z[h] = apply_transform(m.transform, va[h]);
      z[24 + h] = apply_transform(m.transform, vb[h]);
    }
    obs.push_back(std::move(z));
    cls.push_back(static_cast<int>(calendar_class(date, opts.holidays)));
  }
  m.n_days_fit = static_cast<int>(obs.size());
  if (m.n_days_fit < opts.min_days)
    throw InsufficientDataError("fit window has " + std::to_string(m.n_days_fit) +
                                " complete days, need " + std::to_string(opts.min_days));

  // Class means; an absent class falls back to the pooled mean.
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(d);
  for (const auto& z : obs) pooled += z;
  pooled /= static_cast<double>(obs.size());
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    int count = 0;
    for (std::size_t i = 0; i < obs.size(); ++i)
      if (cls[i] == c) {
        mu += obs[i];
        ++count;
      }
    m.class_means[c] = count > 0 ? Eigen::VectorXd(mu / count) : pooled;
  }

  std::vector<Eigen::VectorXd> residuals;
  residuals.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i)
    residuals.push_back(obs[i] - m.class_means[cls[i]]);

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (const auto& r : residuals) s += r * r.transpose();
  s /= static_cast<double>(residuals.size() - 1);

  m.shrinkage_delta = detail::shrinkage_intensity(residuals, s);
  Eigen::MatrixXd target = s.diagonal().asDiagonal();
  m.residual_cov = (1.0 - m.shrinkage_delta) * s + m.shrinkage_delta * target;
  m.eigen_floor = std::max(1e-8 * m.residual_cov.trace() / d, 1e-12);
  detail::floor_eigenvalues(m.residual_cov, m.eigen_floor);

  Eigen::LLT<Eigen::MatrixXd> llt(m.residual_cov);
  if (llt.info() != Eigen::Success)
    throw SingularCovError("residual covariance not positive definite after shrinkage");
  return m;
}

/// Convenience overload resolving bundle series by entity name.
inline JointLoadModel fit_joint(const DatasetBundle& bundle, const std::string& entity_a,
                                const std::string& entity_b, const DateRange& window,
                                const FitOptions& opts = {}) {
  auto by_entity = [&](const std::string& e) -> const HourlySeries& {
    for (const auto& name : DatasetBundle::series_names())
      if (bundle.series(name).entity() == e) return bundle.series(name);
    throw ConfigError("bundle has no series for entity " + e);
  };
  return fit_joint(by_entity(entity_a), by_entity(entity_b), window, opts);
}

/// Precomputed Gaussian conditioning of B given A for one model.
class ConditionalLaw {
 public:
  ConditionalLaw(const JointLoadModel& model, CalendarClass cls) : model_(model), cls_(cls) {
    const int h = model.hours;
    const auto& mu = model.mean(cls);
    mu_a_ = mu.head(h);
    mu_b_ = mu.tail(h);
    const Eigen::MatrixXd caa = model.residual_cov.topLeftCorner(h, h);
    const Eigen::MatrixXd cab = model.residual_cov.topRightCorner(h, h);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(caa);
    if (ldlt.info() != Eigen::Success)
      throw SingularCovError("conditioning block is not positive semidefinite");
    gain_ = ldlt.solve(cab).transpose();  // K = Cov_BA * Cov_AA^-1
    Eigen::MatrixXd cond_cov =
        model.residual_cov.bottomRightCorner(h, h) - gain_ * cab;
    cond_cov = 0.5 * (cond_cov + cond_cov.transpose());
    // Jitter only if roundoff pushed an eigenvalue below zero.
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::LLT<Eigen::MatrixXd> llt(cond_cov +
                                      jitter * Eigen::MatrixXd::Identity(h, h));
      if (llt.info() == Eigen::Success) {
        chol_ = llt.matrixL();
        return;
      }
      jitter = jitter == 0.0 ? std::max(1e-12, 1e-12 * cond_cov.trace()) : jitter * 100;
    }
    throw SingularCovError("conditional covariance not positive definite");
  }

  Eigen::VectorXd conditional_mean(const Eigen::VectorXd& a_transformed) const {
    return mu_b_ + gain_ * (a_transformed - mu_a_);
  }
  const Eigen::MatrixXd& chol() const { return chol_; }
  Eigen::MatrixXd conditional_cov() const { return chol_ * chol_.transpose(); }
  const JointLoadModel& model() const { return model_; }
  CalendarClass cls() const { return cls_; }

 private:
  const JointLoadModel& model_;
  CalendarClass cls_;
  Eigen::VectorXd mu_a_, mu_b_;
  Eigen::MatrixXd gain_;
  Eigen::MatrixXd chol_;
};

namespace detail {

/// One draw of B | A for substream (seed, stream). Writes `hours` values.
inline void draw_conditional(const ConditionalLaw& law, const Eigen::VectorXd& cond_mean,
                             Transform transform, std::uint64_t seed, std::uint64_t stream,
                             double* out) {
  const int h = static_cast<int>(cond_mean.size());
  Rng rng = Rng::substream(seed, stream);
  Eigen::VectorXd xi(h);
  for (int i = 0; i < h; ++i) xi[i] = rng.next_normal();
  Eigen::VectorXd z = cond_mean + law.chol() * xi;
  for (int i = 0; i < h; ++i) out[i] = invert_transform(transform, z[i]);
}

}  // namespace detail

/// Conditional sampling with a fixed condition vector; returns the raw n x H
/// matrix (row-major). Deterministic in (seed); independent of n_threads.
inline std::vector<double> sample_conditional_matrix(const JointLoadModel& model,
                                                     CalendarClass cls,
                                                     const std::vector<double>& condition,
                                                     std::size_t n, std::uint64_t seed,
                                                     int n_threads = 1) {
  if (static_cast<int>(condition.size()) != model.hours)
    throw LengthMismatchError("condition must have " + std::to_string(model.hours) + " values");
  for (double v : condition)
    if (!std::isfinite(v)) throw SpecError("condition values must be finite");
  ConditionalLaw law(model, cls);
  Eigen::VectorXd a(model.hours);
  for (int i = 0; i < model.hours; ++i) a[i] = apply_transform(model.transform, condition[i]);
  const Eigen::VectorXd mu = law.conditional_mean(a);

  std::vector<double> out(n * model.hours);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s)
      detail::draw_conditional(law, mu, model.transform, seed, s, &out[s * model.hours]);
  };
  if (n_threads <= 1 || n < 64) {
    work(0, n);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) threads.emplace_back(work, lo, hi);
    }
    for (auto& th : threads) th.join();
  }
  return out;
}

/// Samples a ScenarioSet for the model's entity B given A's 24 values.
inline ScenarioSet sample_conditional(const JointLoadModel& model, const Condition& condition,
                                      std::size_t n, std::uint64_t seed, int n_threads = 1,
                                      const HolidayCalendar& holidays = HolidayCalendar{}) {
  if (condition.entity != model.entity_a)
    throw ModelMismatchError("condition entity " + condition.entity +
                             " does not match model entity " + model.entity_a);
  if (model.hours != 24) throw DimensionError("scenario sets require 24-hour models");
  auto paths = sample_conditional_matrix(model, calendar_class(condition.date, holidays),
                                         condition.values, n, seed, n_threads);
  return ScenarioSet(model.entity_b, condition.date, std::move(paths), seed);
}

/// One child draw per parent path: scenario s of the parent conditions draw s
/// of the child, keeping N_s constant through the chain.
inline ScenarioSet sample_conditional_pathwise(const JointLoadModel& model,
                                               const ScenarioSet& parents, std::uint64_t seed,
                                               int n_threads = 1,
                                               const HolidayCalendar& holidays =
                                                   HolidayCalendar{}) {
  if (parents.entity() != model.entity_a)
    throw ModelMismatchError("parent entity " + parents.entity() +
                             " does not match model entity " + model.entity_a);
  if (model.hours != 24) throw DimensionError("scenario sets require 24-hour models");
  const CalendarClass cls = calendar_class(parents.date(), holidays);
  ConditionalLaw law(model, cls);
  const std::size_t n = parents.n();
  std::vector<double> out(n * 24);
  auto work = [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd a(24);
    for (std::size_t s = lo; s < hi; ++s) {
      for (int h = 0; h < 24; ++h) a[h] = apply_transform(model.transform, parents.at(s, h));
      const Eigen::VectorXd mu = law.conditional_mean(a);
      detail::draw_conditional(law, mu, model.transform, seed, s, &out[s * 24]);
    }
  };
  if (n_threads <= 1 || n < 64) {
    work(0, n);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) threads.emplace_back(work, lo, hi);
    }
    for (auto& th : threads) th.join();
  }
  return ScenarioSet(model.entity_b, parents.date(), std::move(out), seed);
}

/// The three fitted models the daily chain needs.
struct DayModels {
  JointLoadModel forecast_to_regional;  // MA_FCST -> MA
  JointLoadModel regional_to_zone;      // MA -> PS
  JointLoadModel zone_to_microgrid;     // PS -> MG
};

struct DayScenarios {
  ScenarioSet ma;
  ScenarioSet ps;
  ScenarioSet mg;
  ScenarioSet mg_net;  // building load minus PV forecast, battery excluded
};

/// Full daily chain: MA conditioned on its forecast, PS pathwise on MA, MG
/// pathwise on PS, and the net-load set after subtracting the PV forecast.
inline DayScenarios generate_day_scenarios(const DatasetBundle& bundle, const DayModels& models,
                                           const CivilDate& date,
                                           const std::array<double, 24>& pv_forecast,
                                           std::size_t n, std::uint64_t seed, int n_threads = 1,
                                           const HolidayCalendar& holidays = HolidayCalendar{}) {
  if (!bundle.ma_forecast.has_day(date))
    throw GapError("no regional forecast for " + to_string(date));
  const auto fcst = bundle.ma_forecast.day_slice(date);
  Condition cond{models.forecast_to_regional.entity_a, date,
                 std::vector<double>(fcst.begin(), fcst.end())};
  ScenarioSet ma = sample_conditional(models.forecast_to_regional, cond, n, mix_seed(seed, 1),
                                      n_threads, holidays);
  ScenarioSet ps = sample_conditional_pathwise(models.regional_to_zone, ma, mix_seed(seed, 2),
                                               n_threads, holidays);
  ScenarioSet mg = sample_conditional_pathwise(models.zone_to_microgrid, ps, mix_seed(seed, 3),
                                               n_threads, holidays);
  ScenarioSet mg_net = mg.minus_profile(pv_forecast);
  return DayScenarios{std::move(ma), std::move(ps), std::move(mg), std::move(mg_net)};
}

}  // namespace peakdispatch
