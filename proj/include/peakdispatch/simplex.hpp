#pragma once

// Bounded-variable primal revised simplex over an active subset of rows.
//
// Every active row r contributes a logical variable y_r with bounds
// [row.lo, row.hi] and the equality  a_r . x - y_r = 0, so the basis is a mix
// of structural columns and logical unit columns. The factorization exploits
// that: rows whose own logical is basic reduce to identity columns, and only
// the k x k core (structural basic columns restricted to the remaining rows)
// is LU-factorized densely. k never exceeds the structural variable count, so
// instances with tens of thousands of epigraph rows stay cheap. Pivots between
// refactorizations use product-form eta updates; Bland's rule engages after a
// run of degenerate steps.
//
// Phase 1 minimizes the total bound violation of basic variables with +-1
// composite costs; feasible bases skip it (see the dispatch crash basis in
// branch_bound.hpp).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "peakdispatch/errors.hpp"
#include "peakdispatch/milp.hpp"

namespace peakdispatch {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

inline const char* to_cstring(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "?";
}

struct SimplexOptions {
  double feas_tol = 1e-9;   // relative bound tolerance
  double opt_tol = 1e-9;    // reduced-cost tolerance (scaled by max |cost|)
  double pivot_tol = 1e-9;
  int refactor_every = 50;
  int bland_threshold = 50;  // consecutive degenerate pivots before Bland's rule
  std::int64_t max_iterations = 2000000;
};

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

/// Basis snapshot for warm starts; logical statuses are keyed by instance row
/// id so they survive growth of the active set.
struct BasisSnapshot {
  std::vector<VarStatus> structural;
  std::vector<std::pair<int, VarStatus>> logicals;
};

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = 0.0;  // includes the instance objective constant
  std::vector<double> x;   // structural values, instance order
  std::vector<std::pair<int, double>> row_duals;  // (instance row id, dual)
  std::int64_t iterations = 0;
  double max_primal_residual = 0.0;
  double max_dual_residual = 0.0;
  double phase1_infeasibility = 0.0;
};

class BoundedSimplex {
 public:
  /// `bound_override[j]`, when present, replaces the bounds of structural
  /// variable j (used for binary fixings in branch and bound).
  BoundedSimplex(const MilpInstance& inst, std::vector<int> active_rows,
                 const std::vector<std::optional<std::pair<double, double>>>& bound_override,
                 SimplexOptions opts = {})
      : inst_(inst), active_(std::move(active_rows)), opts_(opts) {
    n_ = static_cast<int>(inst.n_vars());
    m_ = static_cast<int>(active_.size());
    total_ = n_ + m_;
    low_.resize(total_);
    upp_.resize(total_);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      low_[j] = inst.vars[j].lower;
      upp_[j] = inst.vars[j].upper;
      cost_[j] = inst.vars[j].obj;
      if (static_cast<std::size_t>(j) < bound_override.size() && bound_override[j]) {
        low_[j] = bound_override[j]->first;
        upp_[j] = bound_override[j]->second;
      }
    }
    row_of_active_.resize(m_);
    cols_.assign(n_, {});
    for (int r = 0; r < m_; ++r) {
      const MilpRow& row = inst.rows[active_[r]];
      row_of_active_[r] = active_[r];
      low_[n_ + r] = row.lo;
      upp_[n_ + r] = row.hi;
      for (const auto& [j, a] : row.coeffs) cols_[j].emplace_back(r, a);
    }
    cost_scale_ = 1.0;
    for (int j = 0; j < n_; ++j) cost_scale_ = std::max(cost_scale_, std::abs(cost_[j]));
  }

  int n_structural() const { return n_; }
  int n_active_rows() const { return m_; }

  /// Solves from a warm basis when given, otherwise from an all-logical
  /// (slack) basis with structurals at their nearest finite bound.
  LpSolution solve(const std::optional<BasisSnapshot>& warm = std::nullopt) {
    install_basis(warm);
    LpSolution sol;
    bool retried = false;
    for (;;) {
      const LpStatus st = run();
      sol.status = st;
      if (st == LpStatus::kOptimal || st == LpStatus::kInfeasible) {
        refactorize();
        recompute_basic_values();
        const double resid = primal_residual();
        if (st == LpStatus::kOptimal && resid > 1e-7 && !retried) {
          retried = true;  // one refactorization retry
          continue;
        }
        if (st == LpStatus::kOptimal && resid > 1e-7)
          throw NumericalError("primal residual " + std::to_string(resid) +
                               " exceeds tolerance after refactorization retry");
        sol.max_primal_residual = resid;
      }
      break;
    }
    sol.iterations = iterations_;
    sol.phase1_infeasibility = total_infeasibility();
    sol.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) sol.x[j] = xval_[j];
    if (sol.status == LpStatus::kOptimal) {
      sol.objective = inst_.obj_constant;
      for (int j = 0; j < n_; ++j) sol.objective += cost_[j] * xval_[j];
      std::vector<double> y;
      duals(y, /*phase1=*/false);
      sol.row_duals.reserve(m_);
      for (int r = 0; r < m_; ++r) sol.row_duals.emplace_back(row_of_active_[r], y[r]);
      sol.max_dual_residual = dual_residual(y);
    }
    return sol;
  }

  BasisSnapshot snapshot() const {
    BasisSnapshot s;
    s.structural.assign(status_.begin(), status_.begin() + n_);
    s.logicals.reserve(m_);
    for (int r = 0; r < m_; ++r) s.logicals.emplace_back(row_of_active_[r], status_[n_ + r]);
    return s;
  }

  /// Installs an explicit basic set (variable ids; logicals as n + active
  /// position). Used by the dispatch crash. Returns false if singular.
  bool try_install_explicit(const std::vector<int>& basic_vars) {
    if (static_cast<int>(basic_vars.size()) != m_) return false;
    status_.assign(total_, VarStatus::kAtLower);
    xval_.assign(total_, 0.0);
    for (int v = 0; v < total_; ++v) set_nonbasic_default(v);
    basic_vars_ = basic_vars;
    pos_of_var_.assign(total_, -1);
    for (int p = 0; p < m_; ++p) {
      status_[basic_vars_[p]] = VarStatus::kBasic;
      pos_of_var_[basic_vars_[p]] = p;
    }
    try {
      refactorize();
    } catch (const NumericalError&) {
      return false;
    }
    recompute_basic_values();
    return true;
  }

 private:
  // ---- basis installation -------------------------------------------------

  void set_nonbasic_default(int v) {
    const double lo = low_[v], up = upp_[v];
    if (std::isfinite(lo) && std::isfinite(up)) {
      if (std::abs(lo) <= std::abs(up)) {
        status_[v] = VarStatus::kAtLower;
        xval_[v] = lo;
      } else {
        status_[v] = VarStatus::kAtUpper;
        xval_[v] = up;
      }
    } else if (std::isfinite(lo)) {
      status_[v] = VarStatus::kAtLower;
      xval_[v] = lo;
    } else if (std::isfinite(up)) {
      status_[v] = VarStatus::kAtUpper;
      xval_[v] = up;
    } else {
      status_[v] = VarStatus::kFree;
      xval_[v] = 0.0;
    }
  }

  void install_basis(const std::optional<BasisSnapshot>& warm) {
    status_.assign(total_, VarStatus::kAtLower);
    xval_.assign(total_, 0.0);
    for (int v = 0; v < total_; ++v) set_nonbasic_default(v);
    std::vector<int> basics;
    if (warm && static_cast<int>(warm->structural.size()) == n_) {
      for (int j = 0; j < n_; ++j)
        if (warm->structural[j] == VarStatus::kBasic)
          basics.push_back(j);
        else
          apply_nonbasic_status(j, warm->structural[j]);
      std::vector<VarStatus> by_row;
      by_row.assign(inst_.rows.size(), VarStatus::kBasic);
      std::vector<char> seen(inst_.rows.size(), 0);
      for (const auto& [row_id, st] : warm->logicals)
        if (row_id >= 0 && row_id < static_cast<int>(inst_.rows.size())) {
          by_row[row_id] = st;
          seen[row_id] = 1;
        }
      for (int r = 0; r < m_; ++r) {
        const int row_id = row_of_active_[r];
        if (!seen[row_id] || by_row[row_id] == VarStatus::kBasic)
          basics.push_back(n_ + r);  // new rows enter with their logical basic
        else
          apply_nonbasic_status(n_ + r, by_row[row_id]);
      }
      if (static_cast<int>(basics.size()) != m_) basics.clear();  // stale snapshot
    }
    if (basics.empty()) {
      for (int v = 0; v < total_; ++v) set_nonbasic_default(v);
      basics.reserve(m_);
      for (int r = 0; r < m_; ++r) basics.push_back(n_ + r);
    }
    basic_vars_ = std::move(basics);
    pos_of_var_.assign(total_, -1);
    for (int p = 0; p < m_; ++p) {
      status_[basic_vars_[p]] = VarStatus::kBasic;
      pos_of_var_[basic_vars_[p]] = p;
    }
    try {
      refactorize();
    } catch (const NumericalError&) {
      // Fall back to the always-valid slack basis.
      for (int v = 0; v < total_; ++v) set_nonbasic_default(v);
      basic_vars_.clear();
      for (int r = 0; r < m_; ++r) basic_vars_.push_back(n_ + r);
      pos_of_var_.assign(total_, -1);
      for (int p = 0; p < m_; ++p) {
        status_[basic_vars_[p]] = VarStatus::kBasic;
        pos_of_var_[basic_vars_[p]] = p;
      }
      refactorize();
    }
    recompute_basic_values();
  }

  void apply_nonbasic_status(int v, VarStatus st) {
    if (st == VarStatus::kAtLower && std::isfinite(low_[v])) {
      status_[v] = VarStatus::kAtLower;
      xval_[v] = low_[v];
    } else if (st == VarStatus::kAtUpper && std::isfinite(upp_[v])) {
      status_[v] = VarStatus::kAtUpper;
      xval_[v] = upp_[v];
    } else {
      set_nonbasic_default(v);
    }
  }

  // ---- factorization ------------------------------------------------------

  void refactorize() {
    core_of_row_.assign(m_, -1);
    slack_basic_row_.assign(m_, 0);
    struct_positions_.clear();
    logical_positions_.clear();
    for (int p = 0; p < m_; ++p) {
      const int v = basic_vars_[p];
      if (v >= n_) {
        slack_basic_row_[v - n_] = 1;
        logical_positions_.push_back(p);
      } else {
        struct_positions_.push_back(p);
      }
    }
    core_rows_.clear();
    for (int r = 0; r < m_; ++r)
      if (!slack_basic_row_[r]) {
        core_of_row_[r] = static_cast<int>(core_rows_.size());
        core_rows_.push_back(r);
      }
    const int k = static_cast<int>(core_rows_.size());
    if (k != static_cast<int>(struct_positions_.size()))
      throw NumericalError("inconsistent basis partition");
    core_dim_ = k;
    if (k > 0) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
      for (int sj = 0; sj < k; ++sj) {
        const int v = basic_vars_[struct_positions_[sj]];
        for (const auto& [r, a] : cols_[v])
          if (core_of_row_[r] >= 0) g(core_of_row_[r], sj) = a;
      }
      lu_.compute(g);
      const double gnorm = g.cwiseAbs().maxCoeff();
      const auto& diag = lu_.matrixLU().diagonal();
      for (int i = 0; i < k; ++i)
        if (std::abs(diag[i]) < 1e-12 * std::max(1.0, gnorm))
          throw NumericalError("singular basis core");
    }
    etas_.clear();
    pivots_since_refactor_ = 0;
  }

  /// z = B^-1 w, w indexed by active row, z by basis position.
  void ftran(const std::vector<double>& w_rows, std::vector<double>& z) const {
    const int k = core_dim_;
    z.assign(m_, 0.0);
    Eigen::VectorXd zs;
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int ci = 0; ci < k; ++ci) rhs[ci] = w_rows[core_rows_[ci]];
      zs = lu_.solve(rhs);
      for (int sj = 0; sj < k; ++sj) z[struct_positions_[sj]] = zs[sj];
    }
    if (!logical_positions_.empty()) {
      // acc = A_SB * z_s restricted to slack-basic rows.
      acc_.assign(m_, 0.0);
      for (int sj = 0; sj < k; ++sj) {
        const int v = basic_vars_[struct_positions_[sj]];
        const double zv = zs[sj];
        if (zv == 0.0) continue;
        for (const auto& [r, a] : cols_[v]) acc_[r] += a * zv;
      }
      for (const int p : logical_positions_) {
        const int r = basic_vars_[p] - n_;
        z[p] = acc_[r] - w_rows[r];
      }
    }
    for (const auto& [p, eta] : etas_) {
      const double zp = z[p] / eta[p];
      if (zp != 0.0)
        for (int q = 0; q < m_; ++q) z[q] -= eta[q] * zp;
      z[p] = zp;
    }
  }

  /// y solves y' B = d' (d by basis position); y indexed by active row.
  void duals_from_basic_costs(std::vector<double> d, std::vector<double>& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const int p = it->first;
      const auto& eta = it->second;
      double dot = 0.0;
      for (int q = 0; q < m_; ++q) dot += d[q] * eta[q];
      d[p] = (d[p] - (dot - d[p] * eta[p])) / eta[p];
    }
    y.assign(m_, 0.0);
    for (const int p : logical_positions_) y[basic_vars_[p] - n_] = -d[p];
    const int k = core_dim_;
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int sj = 0; sj < k; ++sj) {
        const int v = basic_vars_[struct_positions_[sj]];
        double acc = d[struct_positions_[sj]];
        for (const auto& [r, a] : cols_[v])
          if (slack_basic_row_[r]) acc -= a * y[r];
        rhs[sj] = acc;
      }
      const Eigen::VectorXd yc = lu_.transpose().solve(rhs);
      for (int ci = 0; ci < k; ++ci) y[core_rows_[ci]] = yc[ci];
    }
  }

  void duals(std::vector<double>& y, bool phase1) const {
    std::vector<double> d(m_, 0.0);
    for (int p = 0; p < m_; ++p) d[p] = basic_cost(basic_vars_[p], phase1);
    duals_from_basic_costs(std::move(d), y);
  }

  // ---- values and tolerances ----------------------------------------------

  double bound_tol(int v) const {
    const double scale = std::max({1.0, std::isfinite(low_[v]) ? std::abs(low_[v]) : 0.0,
                                   std::isfinite(upp_[v]) ? std::abs(upp_[v]) : 0.0});
    return opts_.feas_tol * scale;
  }

  void recompute_basic_values() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == VarStatus::kBasic || xval_[j] == 0.0) continue;
      for (const auto& [r, a] : cols_[j]) rhs[r] -= a * xval_[j];
    }
    for (int r = 0; r < m_; ++r)
      if (status_[n_ + r] != VarStatus::kBasic) rhs[r] += xval_[n_ + r];
    std::vector<double> z;
    ftran(rhs, z);
    for (int p = 0; p < m_; ++p) xval_[basic_vars_[p]] = z[p];
  }

  double basic_cost(int v, bool phase1) const {
    if (!phase1) return v < n_ ? cost_[v] : 0.0;
    const double tol = bound_tol(v);
    if (xval_[v] < low_[v] - tol) return -1.0;
    if (xval_[v] > upp_[v] + tol) return 1.0;
    return 0.0;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int p = 0; p < m_; ++p) {
      const int v = basic_vars_[p];
      if (xval_[v] < low_[v]) s += low_[v] - xval_[v];
      if (xval_[v] > upp_[v]) s += xval_[v] - upp_[v];
    }
    return s;
  }

  bool is_primal_feasible() const {
    for (int p = 0; p < m_; ++p) {
      const int v = basic_vars_[p];
      const double tol = bound_tol(v);
      if (xval_[v] < low_[v] - tol || xval_[v] > upp_[v] + tol) return false;
    }
    return true;
  }

  double primal_residual() const {
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      const MilpRow& row = inst_.rows[row_of_active_[r]];
      double a = 0.0;
      for (const auto& [j, c] : row.coeffs) a += c * xval_[j];
      const double y = xval_[n_ + r];
      worst = std::max(worst, std::abs(a - y) / std::max(1.0, std::abs(y)));
    }
    for (int v = 0; v < total_; ++v) {
      const double scale = std::max(1.0, std::abs(xval_[v]));
      if (xval_[v] < low_[v]) worst = std::max(worst, (low_[v] - xval_[v]) / scale);
      if (xval_[v] > upp_[v]) worst = std::max(worst, (xval_[v] - upp_[v]) / scale);
    }
    return worst;
  }

  double dual_residual(const std::vector<double>& y) const {
    double worst = 0.0;
    const double scale = std::max(1.0, cost_scale_);
    for (int v = 0; v < total_; ++v) {
      if (status_[v] == VarStatus::kBasic) continue;
      if (low_[v] == upp_[v]) continue;  // fixed: any reduced cost admissible
      const double d = reduced_cost(v, y, /*phase1=*/false);
      if (status_[v] == VarStatus::kAtLower)
        worst = std::max(worst, -d / scale);
      else if (status_[v] == VarStatus::kAtUpper)
        worst = std::max(worst, d / scale);
      else
        worst = std::max(worst, std::abs(d) / scale);
    }
    return worst;
  }

  double reduced_cost(int v, const std::vector<double>& y, bool phase1) const {
    const double c = phase1 ? 0.0 : (v < n_ ? cost_[v] : 0.0);
    if (v >= n_) return c + y[v - n_];
    double dot = 0.0;
    for (const auto& [r, a] : cols_[v]) dot += a * y[r];
    return c - dot;
  }

  // ---- main loop ----------------------------------------------------------

  LpStatus run() {
    int degenerate_streak = 0;
    bool bland = false;
    std::vector<double> y, w, z;
    for (;;) {
      if (iterations_ >= opts_.max_iterations) return LpStatus::kIterationLimit;
      const bool phase1 = !is_primal_feasible();
      duals(y, phase1);

      // Pricing.
      const double dtol = opts_.opt_tol * std::max(1.0, phase1 ? 1.0 : cost_scale_);
      int enter = -1, dir = 0;
      double best = dtol;
      for (int v = 0; v < total_; ++v) {
        if (status_[v] == VarStatus::kBasic || low_[v] == upp_[v]) continue;
        const double d = reduced_cost(v, y, phase1);
        double score = 0.0;
        int cand_dir = 0;
        if (status_[v] == VarStatus::kAtLower && d < -dtol) {
          score = -d;
          cand_dir = 1;
        } else if (status_[v] == VarStatus::kAtUpper && d > dtol) {
          score = d;
          cand_dir = -1;
        } else if (status_[v] == VarStatus::kFree && std::abs(d) > dtol) {
          score = std::abs(d);
          cand_dir = d < 0 ? 1 : -1;
        }
        if (cand_dir == 0) continue;
        if (bland) {
          enter = v;
          dir = cand_dir;
          break;
        }
        if (score > best) {
          best = score;
          enter = v;
          dir = cand_dir;
        }
      }
      if (enter < 0) {
        if (phase1) return LpStatus::kInfeasible;
        return LpStatus::kOptimal;
      }

      // Direction column.
      w.assign(m_, 0.0);
      if (enter >= n_) {
        w[enter - n_] = -1.0;
      } else {
        for (const auto& [r, a] : cols_[enter]) w[r] = a;
      }
      ftran(w, z);

      // Ratio test: x_B(t) = x_B - t * dir * z.
      double tmax = upp_[enter] - low_[enter];  // bound flip distance
      if (!std::isfinite(tmax)) tmax = kInf;
      double tstar = tmax;
      int leave_pos = -1;
      double leave_bound = 0.0;
      double best_piv = 0.0;
      for (int p = 0; p < m_; ++p) {
        if (std::abs(z[p]) <= opts_.pivot_tol) continue;
        const int v = basic_vars_[p];
        const double delta = -dir * z[p];  // rate of change of x_v
        const double tol = bound_tol(v);
        double room = kInf;
        double target = 0.0;
        const bool below = xval_[v] < low_[v] - tol;
        const bool above = xval_[v] > upp_[v] + tol;
        if (phase1 && below) {
          if (delta > 0) {
            room = (low_[v] - xval_[v]) / delta;
            target = low_[v];
          }
        } else if (phase1 && above) {
          if (delta < 0) {
            room = (upp_[v] - xval_[v]) / delta;
            target = upp_[v];
          }
        } else if (delta > 0) {
          if (std::isfinite(upp_[v])) {
            room = (upp_[v] - xval_[v]) / delta;
            target = upp_[v];
          }
        } else {
          if (std::isfinite(low_[v])) {
            room = (low_[v] - xval_[v]) / delta;
            target = low_[v];
          }
        }
        if (room == kInf) continue;
        room = std::max(room, 0.0);
        const double tie = 1e-10;
        bool take = false;
        if (room < tstar - tie) {
          take = true;
        } else if (room <= tstar + tie) {
          if (leave_pos < 0)
            take = true;
          else if (bland)
            take = v < basic_vars_[leave_pos];
          else
            take = std::abs(z[p]) > best_piv;
        }
        if (take) {
          tstar = std::min(tstar, room);
          leave_pos = p;
          leave_bound = target;
          best_piv = std::abs(z[p]);
        }
      }
      if (tstar == kInf && leave_pos < 0) {
        if (phase1)
          throw NumericalError("phase 1 direction unbounded");
        return LpStatus::kUnbounded;
      }

      ++iterations_;
      if (tstar <= 1e-11)
        ++degenerate_streak;
      else
        degenerate_streak = 0;
      if (degenerate_streak > opts_.bland_threshold) bland = true;
      if (degenerate_streak == 0) bland = false;

      // Apply the step.
      if (tstar > 0.0) {
        for (int p = 0; p < m_; ++p)
          if (z[p] != 0.0) xval_[basic_vars_[p]] -= tstar * dir * z[p];
        xval_[enter] += dir * tstar;
      }
      if (leave_pos < 0) {
        // Bound flip: entering variable moved to its opposite bound.
        status_[enter] = status_[enter] == VarStatus::kAtLower ? VarStatus::kAtUpper
                                                               : VarStatus::kAtLower;
        xval_[enter] = status_[enter] == VarStatus::kAtLower ? low_[enter] : upp_[enter];
        continue;
      }
      const int leaving = basic_vars_[leave_pos];
      xval_[leaving] = leave_bound;
      status_[leaving] =
          leave_bound == low_[leaving] ? VarStatus::kAtLower : VarStatus::kAtUpper;
      pos_of_var_[leaving] = -1;
      basic_vars_[leave_pos] = enter;
      pos_of_var_[enter] = leave_pos;
      status_[enter] = VarStatus::kBasic;
      etas_.emplace_back(leave_pos, z);
      ++pivots_since_refactor_;
      if (pivots_since_refactor_ >= opts_.refactor_every) {
        refactorize();
        recompute_basic_values();
      }
    }
  }

  const MilpInstance& inst_;
  std::vector<int> active_;
  SimplexOptions opts_;
  int n_ = 0, m_ = 0, total_ = 0;
  double cost_scale_ = 1.0;
  std::vector<double> low_, upp_, cost_;
  std::vector<int> row_of_active_;
  std::vector<std::vector<std::pair<int, double>>> cols_;

  std::vector<VarStatus> status_;
  std::vector<double> xval_;
  std::vector<int> basic_vars_;
  std::vector<int> pos_of_var_;

  // Factorization state.
  std::vector<int> core_rows_, struct_positions_, logical_positions_;
  std::vector<int> core_of_row_;
  std::vector<char> slack_basic_row_;
  int core_dim_ = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<std::pair<int, std::vector<double>>> etas_;
  mutable std::vector<double> acc_;
  int pivots_since_refactor_ = 0;
  std::int64_t iterations_ = 0;
};

}  // namespace peakdispatch
