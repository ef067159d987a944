#pragma once

// MilpInstance: variables with bounds and costs, sparse constraint rows with
// range semantics (lo <= a.x <= hi), a binary subset, and per-item metadata
// tying variables and rows back to their dispatch roles.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "peakdispatch/errors.hpp"

namespace peakdispatch {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind {
  kPiMinus,   // charge fraction
  kPiPlus,    // discharge fraction
  kSoc,
  kMode,      // binary b_h
  kRampPos,   // u_h
  kRampNeg,   // v_h
  kPeak,      // s_i epigraph variable
  kOther
};

enum class RowKind {
  kSocRecursion,
  kRateCharge,
  kRateDischarge,
  kSocRange,
  kRamp,
  kPeak,  // s_i >= net load of scenario i at hour h
  kOther
};

struct MilpVar {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double obj = 0.0;
  bool is_binary = false;
  VarKind kind = VarKind::kOther;
  int hour = -1;
  int scenario = -1;  // 0-based
};

struct MilpRow {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (var index, coefficient)
  double lo = -kInf;
  double hi = kInf;
  RowKind kind = RowKind::kOther;
  int hour = -1;
  int scenario = -1;

  double activity(const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& [j, c] : coeffs) a += c * x[j];
    return a;
  }
};

struct MilpInstance {
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;
  double obj_constant = 0.0;
  // Dispatch metadata; 0 hours marks a generic (e.g. imported) instance.
  int n_hours = 0;
  int n_scenarios = 0;

  std::size_t n_vars() const { return vars.size(); }
  std::size_t n_rows() const { return rows.size(); }

  std::vector<int> binary_indices() const {
    std::vector<int> out;
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (vars[j].is_binary) out.push_back(static_cast<int>(j));
    return out;
  }

  double objective_value(const std::vector<double>& x) const {
    if (x.size() != vars.size()) throw DimensionError("solution length mismatch");
    double v = obj_constant;
    for (std::size_t j = 0; j < vars.size(); ++j) v += vars[j].obj * x[j];
    return v;
  }

  void validate() const {
    for (const auto& r : rows) {
      for (const auto& [j, c] : r.coeffs) {
        if (j < 0 || static_cast<std::size_t>(j) >= vars.size())
          throw DimensionError("row " + r.name + " references undeclared variable");
        if (!std::isfinite(c)) throw SpecError("row " + r.name + " has non-finite coefficient");
      }
      if (r.lo > r.hi) throw SpecError("row " + r.name + " has crossed bounds");
    }
    for (const auto& v : vars) {
      if (!std::isfinite(v.obj)) throw SpecError("variable " + v.name + " has non-finite cost");
      if (v.lower > v.upper) throw SpecError("variable " + v.name + " has crossed bounds");
      if (v.is_binary && (v.lower < 0.0 || v.upper > 1.0))
        throw SpecError("binary variable " + v.name + " must have bounds within [0,1]");
    }
  }
};

/// Solution check report, recomputed from raw instance data.
struct VerifyReport {
  double max_row_violation = 0.0;
  std::string worst_row;
  double max_bound_violation = 0.0;
  std::string worst_var;
  double max_integrality_violation = 0.0;
  double objective = 0.0;

  double max_violation() const {
    return std::max({max_row_violation, max_bound_violation, max_integrality_violation});
  }
};

inline VerifyReport verify_solution(const MilpInstance& inst, const std::vector<double>& x) {
  if (x.size() != inst.vars.size()) throw DimensionError("solution length mismatch");
  VerifyReport rep;
  rep.objective = inst.objective_value(x);
  for (const auto& r : inst.rows) {
    const double a = r.activity(x);
    const double viol = std::max(r.lo - a, a - r.hi);
    if (viol > rep.max_row_violation) {
      rep.max_row_violation = viol;
      rep.worst_row = r.name;
    }
  }
  for (std::size_t j = 0; j < inst.vars.size(); ++j) {
    const auto& v = inst.vars[j];
    const double viol = std::max(v.lower - x[j], x[j] - v.upper);
    if (viol > rep.max_bound_violation) {
      rep.max_bound_violation = viol;
      rep.worst_var = v.name;
    }
    if (v.is_binary)
      rep.max_integrality_violation =
          std::max(rep.max_integrality_violation, std::abs(x[j] - std::round(x[j])));
  }
  return rep;
}

}  // namespace peakdispatch
