#pragma once

// Exact MILP solve: best-first branch and bound on the mode binaries over the
// bounded-variable simplex, with lazy generation of the per-scenario peak
// rows. Lazy mode starts from each scenario's top-3 net-load hours and
// re-separates the most violated row per scenario after every LP solve until
// none is violated beyond the separation tolerance.
//
// Determinism: node selection is best-first by (bound, branching hour, node
// id); all tie-breaks are fixed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peakdispatch/battery.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/milp.hpp"
#include "peakdispatch/simplex.hpp"

namespace peakdispatch {

enum class MipStatus { kOptimal, kInfeasible, kNodeLimit };

struct MipOptions {
  double rel_gap = 1e-9;
  double int_tol = 1e-6;
  double sep_tol = 1e-7;
  bool lazy_peaks = true;
  int initial_rows_per_scenario = 3;
  bool warm_start = true;
  int max_nodes = 200000;
  int max_sep_rounds = 200;
  SimplexOptions lp;
};

struct MipLogEntry {
  int node = 0;
  double bound = 0.0;
  double incumbent = 0.0;
  std::int64_t rows = 0;
  std::int64_t active = 0;
};

struct MipResult {
  MipStatus status = MipStatus::kInfeasible;
  double objective = 0.0;       // incumbent objective (USD)
  double bound = 0.0;           // proven lower bound
  std::vector<double> x;        // incumbent variable values, instance order
  std::optional<Schedule> schedule;  // extracted for 24-hour dispatch instances
  int nodes = 0;
  std::int64_t rows_generated = 0;  // peak rows activated beyond the initial set
  int max_separation_rounds = 0;
  std::int64_t lp_iterations = 0;
  std::vector<MipLogEntry> log;

  double gap() const {
    if (status != MipStatus::kOptimal) return kInf;
    return std::abs(objective - bound) / std::max(1.0, std::abs(objective));
  }
};

inline void write_solver_log(std::ostream& os, const std::vector<MipLogEntry>& log) {
  os << "node,bound,incumbent,rows,active\n";
  char buf[96];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%lld,%lld\n", e.node, e.bound, e.incumbent,
                  static_cast<long long>(e.rows), static_cast<long long>(e.active));
    os << buf;
  }
}

/// Solves the LP relaxation restricted to `active_rows` (binaries relaxed to
/// their continuous bounds).
inline LpSolution solve_lp(const MilpInstance& inst, const std::vector<int>& active_rows,
                           const SimplexOptions& opts = {},
                           const std::optional<BasisSnapshot>& warm = std::nullopt) {
  std::vector<std::optional<std::pair<double, double>>> no_override(inst.n_vars());
  BoundedSimplex splx(inst, active_rows, no_override, opts);
  return splx.solve(warm);
}

namespace detail {

/// Explicit starting basis for dispatch instances: each SOC variable basic in
/// its recursion row, each s_i basic in its highest-rhs active peak row when
/// that rhs is positive, logicals elsewhere. Feasible whenever soc_init lies
/// within [soc_min, soc_max], so phase 1 is skipped.
inline bool dispatch_crash(const MilpInstance& inst, const std::vector<int>& active,
                           BoundedSimplex& splx) {
  if (inst.n_hours <= 0) return false;
  const int m = static_cast<int>(active.size());
  std::vector<int> basics(m);
  for (int r = 0; r < m; ++r) basics[r] = static_cast<int>(inst.n_vars()) + r;

  std::map<int, int> soc_var;  // hour -> var index
  for (std::size_t j = 0; j < inst.vars.size(); ++j)
    if (inst.vars[j].kind == VarKind::kSoc) soc_var[inst.vars[j].hour] = static_cast<int>(j);
  std::map<int, int> peak_var;  // scenario -> var index
  for (std::size_t j = 0; j < inst.vars.size(); ++j)
    if (inst.vars[j].kind == VarKind::kPeak)
      peak_var[inst.vars[j].scenario] = static_cast<int>(j);

  std::map<int, std::pair<double, int>> best_peak_row;  // scenario -> (lo, active pos)
  for (int r = 0; r < m; ++r) {
    const MilpRow& row = inst.rows[active[r]];
    if (row.kind == RowKind::kSocRecursion) {
      auto it = soc_var.find(row.hour);
      if (it == soc_var.end()) return false;
      basics[r] = it->second;
    } else if (row.kind == RowKind::kPeak) {
      auto [it, inserted] = best_peak_row.try_emplace(row.scenario, row.lo, r);
      if (!inserted && row.lo > it->second.first) it->second = {row.lo, r};
    }
  }
  for (const auto& [scen, lo_pos] : best_peak_row) {
    if (lo_pos.first <= 0.0) continue;  // s_i = 0 already satisfies every row
    auto it = peak_var.find(scen);
    if (it == peak_var.end()) return false;
    basics[lo_pos.second] = it->second;
  }
  return splx.try_install_explicit(basics);
}

struct Node {
  double bound = -kInf;
  int branch_hour = 0;
  std::uint64_t id = 0;
  std::vector<std::pair<int, int>> fixings;  // (var index, 0/1)
  std::optional<BasisSnapshot> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.branch_hour != b.branch_hour) return a.branch_hour < b.branch_hour;
    return a.id < b.id;
  }
};

}  // namespace detail

class MilpSolver {
 public:
  MilpSolver(const MilpInstance& inst, MipOptions opts = {}) : inst_(inst), opts_(opts) {
    inst_.validate();
    binaries_ = inst_.binary_indices();
    row_active_.assign(inst_.rows.size(), 0);
    for (std::size_t r = 0; r < inst_.rows.size(); ++r) {
      const MilpRow& row = inst_.rows[r];
      if (row.kind != RowKind::kPeak) {
        row_active_[r] = 1;
        active_.push_back(static_cast<int>(r));
        continue;
      }
      peak_rows_by_scenario_[row.scenario].push_back(static_cast<int>(r));
    }
    if (!opts_.lazy_peaks) {
      for (auto& [scen, rows] : peak_rows_by_scenario_)
        for (int r : rows) {
          row_active_[r] = 1;
          active_.push_back(r);
        }
    } else {
      for (auto& [scen, rows] : peak_rows_by_scenario_) {
        std::vector<int> order = rows;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
          if (inst_.rows[a].lo != inst_.rows[b].lo) return inst_.rows[a].lo > inst_.rows[b].lo;
          return inst_.rows[a].hour < inst_.rows[b].hour;
        });
        const int take = std::min<int>(opts_.initial_rows_per_scenario,
                                       static_cast<int>(order.size()));
        for (int i = 0; i < take; ++i) {
          row_active_[order[i]] = 1;
          active_.push_back(order[i]);
        }
      }
      std::sort(active_.begin(), active_.end());
    }
    initial_active_ = static_cast<std::int64_t>(active_.size());
  }

  MipResult solve() {
    MipResult res;
    double incumbent_obj = kInf;
    std::vector<double> incumbent_x;
    std::set<detail::Node, detail::NodeOrder> queue;
    std::uint64_t next_id = 0;

    detail::Node root;
    root.id = next_id++;
    auto root_lp = solve_node_lp(root, nullptr);
    if (root_lp.status == LpStatus::kInfeasible) {
      res.status = MipStatus::kInfeasible;
      return res;
    }
    if (root_lp.status != LpStatus::kOptimal)
      throw NumericalError("root relaxation did not solve to optimality: " +
                           std::string(to_cstring(root_lp.status)));
    root.bound = root_lp.objective;
    root.basis = last_basis_;
    queue.insert(root);
    std::map<std::uint64_t, LpSolution> lp_cache;
    lp_cache[root.id] = std::move(root_lp);

    while (!queue.empty()) {
      if (res.nodes >= opts_.max_nodes) {
        res.status = MipStatus::kNodeLimit;
        res.bound = queue.begin()->bound;
        finalize(res, incumbent_obj, incumbent_x);
        return res;
      }
      detail::Node node = *queue.begin();
      queue.erase(queue.begin());
      const double gap_abs = opts_.rel_gap * std::max(1.0, std::abs(incumbent_obj));
      if (node.bound >= incumbent_obj - gap_abs) break;  // best-first: all pruned

      LpSolution lp;
      if (auto it = lp_cache.find(node.id); it != lp_cache.end()) {
        lp = std::move(it->second);
        lp_cache.erase(it);
      } else {
        lp = solve_node_lp(node, node.basis ? &*node.basis : nullptr);
      }
      ++res.nodes;
      if (lp.status == LpStatus::kInfeasible) {
        log_node(res, node.bound, incumbent_obj);
        continue;
      }
      if (lp.status != LpStatus::kOptimal)
        throw NumericalError("node relaxation did not solve to optimality");
      if (lp.objective >= incumbent_obj - gap_abs) {
        log_node(res, lp.objective, incumbent_obj);
        continue;
      }

      const int frac = most_fractional_binary(lp.x);
      if (frac < 0) {
        // Integral: round, fix, re-solve, then accept as incumbent.
        detail::Node fixed = node;
        fixed.fixings.clear();
        for (int j : binaries_) fixed.fixings.emplace_back(j, lp.x[j] > 0.5 ? 1 : 0);
        LpSolution fixed_lp = solve_node_lp(fixed, last_basis_ ? &*last_basis_ : nullptr);
        if (fixed_lp.status == LpStatus::kOptimal &&
            fixed_lp.objective < incumbent_obj - gap_abs) {
          incumbent_obj = fixed_lp.objective;
          incumbent_x = fixed_lp.x;
        }
        log_node(res, lp.objective, incumbent_obj);
        continue;
      }

      // Branch.
      log_node(res, lp.objective, incumbent_obj);
      const int hour = inst_.vars[binaries_[frac]].hour;
      for (int v = 0; v <= 1; ++v) {
        detail::Node child;
        child.bound = lp.objective;
        child.branch_hour = hour >= 0 ? hour : frac;
        child.id = next_id++;
        child.fixings = node.fixings;
        child.fixings.emplace_back(binaries_[frac], v);
        if (opts_.warm_start) child.basis = last_basis_;
        if (child.bound < incumbent_obj - gap_abs) queue.insert(std::move(child));
      }
    }

    res.status = incumbent_obj < kInf ? MipStatus::kOptimal : MipStatus::kInfeasible;
    res.bound = incumbent_obj;
    for (const auto& n : queue) res.bound = std::min(res.bound, n.bound);
    finalize(res, incumbent_obj, incumbent_x);
    return res;
  }

  std::int64_t rows_generated() const { return rows_generated_; }

 private:
  void log_node(MipResult& res, double bound, double incumbent) {
    res.log.push_back({res.nodes, bound, incumbent, rows_generated_,
                       static_cast<std::int64_t>(active_.size())});
  }

  void finalize(MipResult& res, double incumbent_obj, std::vector<double>& incumbent_x) {
    res.rows_generated = rows_generated_;
    res.max_separation_rounds = max_sep_rounds_seen_;
    res.lp_iterations = res_lp_iters_;
    if (incumbent_obj < kInf) {
      res.objective = incumbent_obj;
      res.x = std::move(incumbent_x);
      if (res.status == MipStatus::kNodeLimit) res.bound = std::min(res.bound, incumbent_obj);
      if (inst_.n_hours == 24) res.schedule = extract_schedule(res.x);
    } else if (res.status == MipStatus::kOptimal) {
      res.status = MipStatus::kInfeasible;
    }
  }

  /// Solves a node LP with separation of violated peak rows to convergence.
  LpSolution solve_node_lp(const detail::Node& node, const BasisSnapshot* warm_in) {
    std::vector<std::optional<std::pair<double, double>>> override_(inst_.n_vars());
    for (const auto& [j, v] : node.fixings)
      override_[j] = std::make_pair(static_cast<double>(v), static_cast<double>(v));
    std::optional<BasisSnapshot> warm;
    if (warm_in && opts_.warm_start) warm = *warm_in;
    LpSolution lp;
    int rounds = 0;
    for (;;) {
      BoundedSimplex splx(inst_, active_, override_, opts_.lp);
      bool crashed = false;
      if (!warm && inst_.n_hours > 0) crashed = detail::dispatch_crash(inst_, active_, splx);
      lp = crashed ? splx.solve(splx.snapshot()) : splx.solve(warm);
      last_basis_ = splx.snapshot();
      res_lp_iters_ += lp.iterations;
      if (lp.status != LpStatus::kOptimal) return lp;
      if (!separate(lp.x)) break;
      if (opts_.warm_start) warm = last_basis_;
      if (++rounds > opts_.max_sep_rounds)
        throw NumericalError("separation did not converge");
    }
    max_sep_rounds_seen_ = std::max(max_sep_rounds_seen_, rounds);
    return lp;
  }

  /// Activates the most violated inactive peak row per scenario. Returns true
  /// if any row was added.
  bool separate(const std::vector<double>& x) {
    bool added = false;
    for (const auto& [scen, rows] : peak_rows_by_scenario_) {
      int best_row = -1;
      double best_viol = opts_.sep_tol;
      for (int r : rows) {
        if (row_active_[r]) continue;
        const MilpRow& row = inst_.rows[r];
        const double viol = row.lo - row.activity(x);
        if (viol > best_viol) {
          best_viol = viol;
          best_row = r;
        }
      }
      if (best_row >= 0) {
        row_active_[best_row] = 1;
        active_.insert(std::lower_bound(active_.begin(), active_.end(), best_row), best_row);
        ++rows_generated_;
        added = true;
      }
    }
    return added;
  }

  /// Index into binaries_ of the most fractional binary (ties: lowest hour),
  /// or -1 when all are integral within int_tol.
  int most_fractional_binary(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = opts_.int_tol;
    for (std::size_t i = 0; i < binaries_.size(); ++i) {
      const double v = x[binaries_[i]];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-15) {
        best = static_cast<int>(i);
        best_frac = frac;
      }
      // Equal fractionality keeps the earlier (lower-hour) candidate; the
      // binaries_ list is already in hour order for built instances.
    }
    return best;
  }

  /// Cleans LP roundoff and packages the incumbent as a Schedule.
  Schedule extract_schedule(const std::vector<double>& x) const {
    Schedule s;
    BatterySpec bat;  // only used for SOC recomputation via instance metadata
    double eta_minus = 0.0, eta_plus = 0.0, soc_init = 0.0;
    // Recover battery dynamics from the SOC recursion rows.
    for (const auto& row : inst_.rows) {
      if (row.kind != RowKind::kSocRecursion || row.hour != 0) continue;
      soc_init = row.lo;
      for (const auto& [j, c] : row.coeffs) {
        if (inst_.vars[j].kind == VarKind::kPiMinus) eta_minus = -c;
        if (inst_.vars[j].kind == VarKind::kPiPlus) eta_plus = 1.0 / c;
      }
      break;
    }
    for (std::size_t j = 0; j < inst_.vars.size(); ++j) {
      const auto& v = inst_.vars[j];
      if (v.hour < 0 || v.hour >= 24) continue;
      const double val = x[j];
      switch (v.kind) {
        case VarKind::kPiMinus: s.pi_minus[v.hour] = std::clamp(val, 0.0, 1.0); break;
        case VarKind::kPiPlus: s.pi_plus[v.hour] = std::clamp(val, 0.0, 1.0); break;
        case VarKind::kMode: s.b[v.hour] = val > 0.5 ? 1 : 0; break;
        default: break;
      }
    }
    for (int h = 0; h < 24; ++h) {
      if (s.pi_minus[h] < 1e-11) s.pi_minus[h] = 0.0;
      if (s.pi_plus[h] < 1e-11) s.pi_plus[h] = 0.0;
      if (s.b[h] == 1) s.pi_minus[h] = 0.0;
      if (s.b[h] == 0) s.pi_plus[h] = 0.0;
    }
    double soc = soc_init;
    for (int h = 0; h < 24; ++h) {
      soc += s.pi_minus[h] * eta_minus - s.pi_plus[h] / eta_plus;
      s.soc[h] = soc;
    }
    return s;
  }

  MilpInstance inst_;
  MipOptions opts_;
  std::vector<int> binaries_;
  std::vector<char> row_active_;
  std::vector<int> active_;
  std::map<int, std::vector<int>> peak_rows_by_scenario_;
  std::optional<BasisSnapshot> last_basis_;
  std::int64_t rows_generated_ = 0;
  std::int64_t initial_active_ = 0;
  int max_sep_rounds_seen_ = 0;
  std::int64_t res_lp_iters_ = 0;
};

inline MipResult solve_milp(const MilpInstance& inst, const MipOptions& opts = {}) {
  MilpSolver solver(inst, opts);
  return solver.solve();
}

}  // namespace peakdispatch
