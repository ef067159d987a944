#pragma once

// LP-format text export/import (documented subset).
//
// Emitted sections: Minimize / Subject To / Bounds / Binaries / End. Range
// rows (finite lo < hi) are written as a `name__lo` / `name__hi` pair of
// one-sided rows; the importer merges such pairs back into one range row when
// their coefficient lists are identical, so export -> import round-trips the
// instance. Numbers are printed with 17 significant digits, which round-trips
// doubles exactly. Dispatch metadata (variable and row kinds) is recovered
// from the canonical names when present.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peakdispatch/errors.hpp"
#include "peakdispatch/milp.hpp"

namespace peakdispatch {

namespace detail {

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_terms(std::ostream& os, const std::vector<std::pair<int, double>>& terms,
                        const std::vector<MilpVar>& vars) {
  bool first = true;
  for (const auto& [j, c] : terms) {
    if (c == 0.0) continue;
    if (first) {
      os << (c < 0 ? "- " : "") << fmt_num(std::abs(c)) << ' ' << vars[j].name;
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ") << fmt_num(std::abs(c)) << ' ' << vars[j].name;
    }
  }
  if (first) os << "0 " << vars.front().name;  // empty expression guard
}

}  // namespace detail

inline void write_lp(std::ostream& os, const MilpInstance& inst) {
  os << "\\ peakdispatch LP format v1\n";
  os << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (std::size_t j = 0; j < inst.vars.size(); ++j)
    if (inst.vars[j].obj != 0.0) obj.emplace_back(static_cast<int>(j), inst.vars[j].obj);
  detail::write_terms(os, obj, inst.vars);
  if (inst.obj_constant != 0.0)
    os << (inst.obj_constant < 0 ? " - " : " + ") << detail::fmt_num(std::abs(inst.obj_constant));
  os << "\nSubject To\n";
  for (const auto& row : inst.rows) {
    const bool has_lo = std::isfinite(row.lo);
    const bool has_hi = std::isfinite(row.hi);
    if (has_lo && has_hi && row.lo == row.hi) {
      os << ' ' << row.name << ": ";
      detail::write_terms(os, row.coeffs, inst.vars);
      os << " = " << detail::fmt_num(row.lo) << '\n';
    } else if (has_lo && has_hi) {
      os << ' ' << row.name << "__lo: ";
      detail::write_terms(os, row.coeffs, inst.vars);
      os << " >= " << detail::fmt_num(row.lo) << '\n';
      os << ' ' << row.name << "__hi: ";
      detail::write_terms(os, row.coeffs, inst.vars);
      os << " <= " << detail::fmt_num(row.hi) << '\n';
    } else if (has_lo) {
      os << ' ' << row.name << ": ";
      detail::write_terms(os, row.coeffs, inst.vars);
      os << " >= " << detail::fmt_num(row.lo) << '\n';
    } else if (has_hi) {
      os << ' ' << row.name << ": ";
      detail::write_terms(os, row.coeffs, inst.vars);
      os << " <= " << detail::fmt_num(row.hi) << '\n';
    }
  }
  os << "Bounds\n";
  for (const auto& v : inst.vars) {
    const bool has_lo = std::isfinite(v.lower);
    const bool has_hi = std::isfinite(v.upper);
    if (has_lo && has_hi && v.lower == v.upper)
      os << ' ' << v.name << " = " << detail::fmt_num(v.lower) << '\n';
    else if (has_lo && has_hi)
      os << ' ' << detail::fmt_num(v.lower) << " <= " << v.name << " <= "
         << detail::fmt_num(v.upper) << '\n';
    else if (has_lo)
      os << ' ' << v.name << " >= " << detail::fmt_num(v.lower) << '\n';
    else if (has_hi)
      os << ' ' << v.name << " <= " << detail::fmt_num(v.upper) << '\n';
    else
      os << ' ' << v.name << " free\n";
  }
  bool any_bin = false;
  for (const auto& v : inst.vars)
    if (v.is_binary) {
      if (!any_bin) os << "Binaries\n";
      any_bin = true;
      os << ' ' << v.name << '\n';
    }
  os << "End\n";
}

inline void write_lp(const std::string& path, const MilpInstance& inst) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_lp(f, inst);
}

namespace detail {

struct LpTokenizer {
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  explicit LpTokenizer(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
      const auto cut = line.find('\\');
      if (cut != std::string::npos) line.resize(cut);
      std::string tok;
      auto flush = [&] {
        if (!tok.empty()) {
          tokens.push_back(tok);
          tok.clear();
        }
      };
      for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
          flush();
        } else if (ch == ':' || ch == '+') {
          flush();
          tokens.emplace_back(1, ch);
        } else if (ch == '<' || ch == '>' || ch == '=') {
          // Collapse <=, >=, = into one token.
          if (!tok.empty() && (tok == "<" || tok == ">")) {
            tok += ch;
            flush();
          } else {
            flush();
            tok = ch;
            if (ch == '=') flush();
          }
        } else {
          tok += ch;
        }
      }
      flush();
    }
    for (auto& t : tokens)
      if (t == "<" || t == "<=") t = "<=";
      else if (t == ">" || t == ">=") t = ">=";
  }

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }
  std::string next() { return tokens[pos++]; }
};

inline bool is_number(const std::string& t, double* out) {
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') return false;
  if (out) *out = v;
  return true;
}

inline bool keyword(const std::string& t, const char* kw) {
  if (t.size() != std::string(kw).size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(t[i])) !=
        std::tolower(static_cast<unsigned char>(kw[i])))
      return false;
  return true;
}

/// Recovers dispatch metadata from canonical names.
inline void recover_metadata(MilpInstance& inst) {
  int max_hour = -1, max_scen = -1;
  auto parse_tail_int = [](const std::string& name, const std::string& prefix, int* out) {
    if (name.rfind(prefix, 0) != 0) return false;
    const std::string tail = name.substr(prefix.size());
    if (tail.empty()) return false;
    for (char c : tail)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    *out = std::atoi(tail.c_str());
    return true;
  };
  for (auto& v : inst.vars) {
    int idx = 0;
    if (parse_tail_int(v.name, "pim_", &idx)) v.kind = VarKind::kPiMinus;
    else if (parse_tail_int(v.name, "pip_", &idx)) v.kind = VarKind::kPiPlus;
    else if (parse_tail_int(v.name, "soc_", &idx)) v.kind = VarKind::kSoc;
    else if (parse_tail_int(v.name, "b_", &idx)) v.kind = VarKind::kMode;
    else if (parse_tail_int(v.name, "u_", &idx)) v.kind = VarKind::kRampPos;
    else if (parse_tail_int(v.name, "v_", &idx)) v.kind = VarKind::kRampNeg;
    else if (parse_tail_int(v.name, "s_", &idx)) {
      v.kind = VarKind::kPeak;
      v.scenario = idx - 1;
      max_scen = std::max(max_scen, idx);
      continue;
    } else {
      continue;
    }
    v.hour = idx;
    max_hour = std::max(max_hour, idx);
  }
  for (auto& r : inst.rows) {
    int idx = 0;
    std::string base = r.name;
    for (const char* suf : {"__lo", "__hi"}) {
      const std::string s(suf);
      if (base.size() > s.size() && base.compare(base.size() - s.size(), s.size(), s) == 0)
        base.resize(base.size() - s.size());
    }
    if (parse_tail_int(base, "socrec_", &idx)) r.kind = RowKind::kSocRecursion;
    else if (parse_tail_int(base, "ratec_", &idx)) r.kind = RowKind::kRateCharge;
    else if (parse_tail_int(base, "rated_", &idx)) r.kind = RowKind::kRateDischarge;
    else if (parse_tail_int(base, "socrng_", &idx)) r.kind = RowKind::kSocRange;
    else if (parse_tail_int(base, "ramp_", &idx)) r.kind = RowKind::kRamp;
    else if (base.rfind("peak_", 0) == 0) {
      const auto us = base.find('_', 5);
      if (us != std::string::npos) {
        const std::string si = base.substr(5, us - 5), sh = base.substr(us + 1);
        r.kind = RowKind::kPeak;
        r.scenario = std::atoi(si.c_str()) - 1;
        r.hour = std::atoi(sh.c_str());
        max_hour = std::max(max_hour, r.hour);
      }
      continue;
    } else {
      continue;
    }
    r.hour = idx;
    max_hour = std::max(max_hour, idx);
  }
  // Dispatch instances carry the full variable complement.
  bool looks_dispatch = max_hour >= 0 && max_scen >= 1;
  if (looks_dispatch) {
    inst.n_hours = max_hour + 1;
    inst.n_scenarios = max_scen;
  }
}

}  // namespace detail

inline MilpInstance read_lp(std::istream& is, const std::string& origin = "<lp>") {
  detail::LpTokenizer tz(is);
  MilpInstance inst;
  std::map<std::string, int> var_index;
  auto var_id = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    MilpVar v;
    v.name = name;
    v.lower = 0.0;
    v.upper = kInf;
    inst.vars.push_back(v);
    var_index.emplace(name, static_cast<int>(inst.vars.size()) - 1);
    return static_cast<int>(inst.vars.size()) - 1;
  };

  if (tz.done() || !detail::keyword(tz.peek(), "Minimize"))
    throw ParseError(origin + ": expected Minimize");
  tz.next();

  enum Section { kObj, kRows, kBounds, kBinaries, kDone };
  Section section = kObj;
  auto section_switch = [&](const std::string& t) -> bool {
    if (detail::keyword(t, "Subject")) {
      tz.next();  // "To"
      section = kRows;
      return true;
    }
    if (detail::keyword(t, "Bounds")) {
      section = kBounds;
      return true;
    }
    if (detail::keyword(t, "Binaries") || detail::keyword(t, "Binary")) {
      section = kBinaries;
      return true;
    }
    if (detail::keyword(t, "End")) {
      section = kDone;
      return true;
    }
    return false;
  };

  // Row expression parser: terms until a relational operator.
  auto parse_expr = [&](std::vector<std::pair<int, double>>& terms, double* constant,
                        std::string* stop_op) {
    double sign = 1.0;
    for (;;) {
      if (tz.done()) {
        *stop_op = "";
        return;
      }
      std::string t = tz.peek();
      if (t == "+") {
        tz.next();
        continue;
      }
      if (t == "-") {
        tz.next();
        sign = -sign;
        continue;
      }
      if (t == "<=" || t == ">=" || t == "=") {
        *stop_op = tz.next();
        return;
      }
      double num;
      if (detail::is_number(t, &num)) {
        tz.next();
        if (!tz.done() && tz.peek() != "+" && tz.peek() != "-" && tz.peek() != "<=" &&
            tz.peek() != ">=" && tz.peek() != "=" && !detail::is_number(tz.peek(), nullptr)) {
          terms.emplace_back(var_id(tz.next()), sign * num);
        } else {
          *constant += sign * num;
        }
        sign = 1.0;
        continue;
      }
      terms.emplace_back(var_id(tz.next()), sign);
      sign = 1.0;
    }
  };

  // Objective: optional name.
  {
    std::string first = tz.peek();
    if (!detail::is_number(first, nullptr) && tz.pos + 1 < tz.tokens.size() &&
        tz.tokens[tz.pos + 1] == ":") {
      tz.next();
      tz.next();
    }
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;
    std::string op;
    // Custom loop: the objective ends at a section keyword.
    for (;;) {
      if (tz.done()) break;
      const std::string& t = tz.peek();
      if (detail::keyword(t, "Subject") || detail::keyword(t, "Bounds") ||
          detail::keyword(t, "Binaries") || detail::keyword(t, "End")) {
        break;
      }
      double sign = 1.0;
      std::string tok = tz.next();
      while (tok == "+" || tok == "-") {
        if (tok == "-") sign = -sign;
        if (tz.done()) throw ParseError(origin + ": dangling sign in objective");
        tok = tz.next();
      }
      double num;
      if (detail::is_number(tok, &num)) {
        if (!tz.done() && !detail::is_number(tz.peek(), nullptr) && tz.peek() != "+" &&
            tz.peek() != "-" && !detail::keyword(tz.peek(), "Subject") &&
            !detail::keyword(tz.peek(), "Bounds") && !detail::keyword(tz.peek(), "Binaries") &&
            !detail::keyword(tz.peek(), "End")) {
          terms.emplace_back(var_id(tz.next()), sign * num);
        } else {
          constant += sign * num;
        }
      } else {
        terms.emplace_back(var_id(tok), sign);
      }
    }
    for (const auto& [j, c] : terms) inst.vars[j].obj += c;
    inst.obj_constant = constant;
  }

  // Sections.
  while (!tz.done() && section != kDone) {
    const std::string t = tz.peek();
    if (section_switch(t)) {
      tz.next();
      continue;
    }
    if (section == kRows) {
      std::string name;
      if (tz.pos + 1 < tz.tokens.size() && tz.tokens[tz.pos + 1] == ":") {
        name = tz.next();
        tz.next();
      } else {
        name = "c" + std::to_string(inst.rows.size());
      }
      std::vector<std::pair<int, double>> terms;
      double cst = 0.0;
      std::string op;
      parse_expr(terms, &cst, &op);
      if (op.empty()) throw ParseError(origin + ": row " + name + " missing relation");
      if (tz.done()) throw ParseError(origin + ": row " + name + " missing rhs");
      double rhs;
      if (!detail::is_number(tz.next(), &rhs))
        throw ParseError(origin + ": row " + name + " rhs is not a number");
      rhs -= cst;
      MilpRow row;
      row.name = name;
      row.coeffs = std::move(terms);
      if (op == "=") row.lo = row.hi = rhs;
      else if (op == "<=") row.hi = rhs;
      else row.lo = rhs;
      inst.rows.push_back(std::move(row));
    } else if (section == kBounds) {
      // Forms: lo <= name <= hi | name <= hi | name >= lo | name = v | name free
      std::string a = tz.next();
      double num;
      if (detail::is_number(a, &num)) {
        if (tz.next() != "<=") throw ParseError(origin + ": malformed bound");
        const int j = var_id(tz.next());
        inst.vars[j].lower = num;
        if (!tz.done() && tz.peek() == "<=") {
          tz.next();
          double hi;
          if (!detail::is_number(tz.next(), &hi)) throw ParseError(origin + ": malformed bound");
          inst.vars[j].upper = hi;
        }
      } else {
        const int j = var_id(a);
        if (tz.done()) throw ParseError(origin + ": malformed bound");
        const std::string op = tz.next();
        if (detail::keyword(op, "free")) {
          inst.vars[j].lower = -kInf;
          inst.vars[j].upper = kInf;
        } else if (op == "<=" || op == ">=" || op == "=") {
          double v;
          if (!detail::is_number(tz.next(), &v)) throw ParseError(origin + ": malformed bound");
          if (op == "<=") inst.vars[j].upper = v;
          else if (op == ">=") inst.vars[j].lower = v;
          else inst.vars[j].lower = inst.vars[j].upper = v;
        } else {
          throw ParseError(origin + ": malformed bound near " + op);
        }
      }
    } else if (section == kBinaries) {
      const int j = var_id(tz.next());
      inst.vars[j].is_binary = true;
      inst.vars[j].lower = std::max(inst.vars[j].lower, 0.0);
      inst.vars[j].upper = std::min(inst.vars[j].upper, 1.0);
    } else {
      throw ParseError(origin + ": unexpected token " + tz.next());
    }
  }

  // Merge __lo/__hi range pairs emitted by write_lp.
  std::vector<MilpRow> merged;
  for (std::size_t i = 0; i < inst.rows.size(); ++i) {
    MilpRow& r = inst.rows[i];
    const std::string& nm = r.name;
    if (nm.size() > 4 && nm.compare(nm.size() - 4, 4, "__lo") == 0 &&
        i + 1 < inst.rows.size()) {
      MilpRow& nx = inst.rows[i + 1];
      const std::string base = nm.substr(0, nm.size() - 4);
      if (nx.name == base + "__hi" && nx.coeffs == r.coeffs) {
        MilpRow mergedrow = r;
        mergedrow.name = base;
        mergedrow.hi = nx.hi;
        merged.push_back(std::move(mergedrow));
        ++i;
        continue;
      }
    }
    merged.push_back(std::move(r));
  }
  inst.rows = std::move(merged);
  detail::recover_metadata(inst);
  inst.validate();
  return inst;
}

inline MilpInstance read_lp_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  return read_lp(f, path);
}

}  // namespace peakdispatch
