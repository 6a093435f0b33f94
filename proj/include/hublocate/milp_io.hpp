// Copyright 2026 The hublocate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hublocate/errors.hpp"
#include "hublocate/milp.hpp"
#include "hublocate/network_model.hpp"

namespace hublocate {

namespace detail {

// Accumulates tokens into lines of bounded width.
class LineWrapper {
 public:
  LineWrapper(std::ostringstream& out, std::string indent)
      : out_(out), indent_(std::move(indent)) {}

  void start(const std::string& head) {
    out_ << head;
    width_ = head.size();
  }
  void token(const std::string& tok) {
    if (width_ + tok.size() + 1 > kWidth) {
      out_ << '\n' << indent_;
      width_ = indent_.size();
    } else {
      out_ << ' ';
      ++width_;
    }
    out_ << tok;
    width_ += tok.size();
  }
  void end() { out_ << '\n'; }

 private:
  static constexpr std::size_t kWidth = 78;
  std::ostringstream& out_;
  std::string indent_;
  std::size_t width_ = 0;
};

inline void lp_terms(LineWrapper& w, const MilpModel& m,
                     const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (const auto& [k, coef] : terms) {
    if (coef == 0.0) continue;
    const char* sign = coef < 0.0 ? "-" : "+";
    if (first && coef > 0.0) {
      w.token(fmt_num(coef) + " " + m.variables()[k].name);
    } else {
      w.token(std::string(sign) + " " + fmt_num(std::abs(coef)) + " " +
              m.variables()[k].name);
    }
    first = false;
  }
}

}  // namespace detail

// CPLEX LP text.
inline std::string emit_lp(const MilpModel& m) {
  std::ostringstream out;
  detail::LineWrapper w(out, "   ");
  out << "\\ hublocate linearized model\n";
  out << "Minimize\n";
  std::vector<std::pair<int, double>> obj;
  for (std::size_t k = 0; k < m.variables().size(); ++k) {
    if (m.variables()[k].objective != 0.0) {
      obj.emplace_back(static_cast<int>(k), m.variables()[k].objective);
    }
  }
  w.start(" obj:");
  if (!obj.empty()) detail::lp_terms(w, m, obj);
  w.end();
  out << "Subject To\n";
  for (const Constraint& c : m.constraints()) {
    w.start(" " + c.name + ":");
    if (c.terms.empty()) {
      w.token("0");
    } else {
      detail::lp_terms(w, m, c.terms);
    }
    const char* sense = c.sense == Sense::kLessEqual   ? "<="
                        : c.sense == Sense::kEqual     ? "="
                                                       : ">=";
    w.token(std::string(sense) + " " + detail::fmt_num(c.rhs));
    w.end();
  }
  out << "Bounds\n";
  for (const Variable& v : m.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    const bool finite_upper = std::isfinite(v.upper);
    if (v.lower == 0.0 && !finite_upper) continue;
    out << ' ' << detail::fmt_num(v.lower) << " <= " << v.name;
    if (finite_upper) out << " <= " << detail::fmt_num(v.upper);
    out << '\n';
  }
  auto section = [&](const char* title, VarKind kind) {
    bool any = false;
    for (const Variable& v : m.variables()) {
      if (v.kind != kind) continue;
      if (!any) {
        out << title << '\n';
        w.start("");
        any = true;
      }
      w.token(v.name);
    }
    if (any) w.end();
  };
  section("General", VarKind::kInteger);
  section("Binary", VarKind::kBinary);
  out << "End\n";
  return out.str();
}

// Free-format MPS text.
inline std::string emit_mps(const MilpModel& m) {
  std::ostringstream out;
  out << "NAME hublocate\n";
  out << "ROWS\n";
  out << " N obj\n";
  for (const Constraint& c : m.constraints()) {
    const char type = c.sense == Sense::kLessEqual ? 'L'
                      : c.sense == Sense::kEqual   ? 'E'
                                                   : 'G';
    out << ' ' << type << ' ' << c.name << '\n';
  }
  // Column-major view of the constraint matrix.
  std::vector<std::vector<std::pair<std::size_t, double>>> columns(
      m.variables().size());
  for (std::size_t r = 0; r < m.constraints().size(); ++r) {
    for (const auto& [k, coef] : m.constraints()[r].terms) {
      if (coef != 0.0) columns[k].emplace_back(r, coef);
    }
  }
  out << "COLUMNS\n";
  bool in_marker = false;
  int marker = 0;
  for (std::size_t k = 0; k < m.variables().size(); ++k) {
    const Variable& v = m.variables()[k];
    const bool integral = v.kind != VarKind::kContinuous;
    if (integral != in_marker) {
      out << " MARKER" << marker++ << " 'MARKER' "
          << (integral ? "'INTORG'" : "'INTEND'") << '\n';
      in_marker = integral;
    }
    bool wrote = false;
    if (v.objective != 0.0) {
      out << ' ' << v.name << " obj " << detail::fmt_num(v.objective) << '\n';
      wrote = true;
    }
    for (const auto& [r, coef] : columns[k]) {
      out << ' ' << v.name << ' ' << m.constraints()[r].name << ' '
          << detail::fmt_num(coef) << '\n';
      wrote = true;
    }
    if (!wrote) out << ' ' << v.name << " obj 0\n";
  }
  if (in_marker) out << " MARKER" << marker << " 'MARKER' 'INTEND'\n";
  out << "RHS\n";
  for (const Constraint& c : m.constraints()) {
    if (c.rhs != 0.0) {
      out << " rhs " << c.name << ' ' << detail::fmt_num(c.rhs) << '\n';
    }
  }
  out << "BOUNDS\n";
  for (const Variable& v : m.variables()) {
    switch (v.kind) {
      case VarKind::kBinary:
        out << " BV bnd " << v.name << '\n';
        break;
      case VarKind::kInteger:
        if (std::isfinite(v.upper)) {
          out << " UP bnd " << v.name << ' ' << detail::fmt_num(v.upper) << '\n';
        } else {
          out << " PL bnd " << v.name << '\n';
        }
        break;
      case VarKind::kContinuous:
        if (v.lower != 0.0) {
          out << " LO bnd " << v.name << ' ' << detail::fmt_num(v.lower) << '\n';
        }
        if (std::isfinite(v.upper)) {
          out << " UP bnd " << v.name << ' ' << detail::fmt_num(v.upper) << '\n';
        }
        break;
    }
  }
  out << "ENDATA\n";
  return out.str();
}

// Parses a "name value" per line assignment. Blank lines and lines starting
// with '#' are skipped; variables not listed take the value 0.
inline std::vector<double> parse_values(const MilpModel& m,
                                        const std::string& text) {
  std::vector<double> values(m.variables().size(), 0.0);
  std::vector<bool> seen(values.size(), false);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name) || name[0] == '#') continue;
    double value = 0.0;
    std::string extra;
    if (!(fields >> value) || (fields >> extra)) {
      throw FormatError("line " + std::to_string(line_no),
                        "expected '<name> <value>'");
    }
    const int k = m.find(name);
    if (k == kNone) {
      throw DecodeError("line " + std::to_string(line_no) +
                        ": unknown variable '" + name + "'");
    }
    if (seen[k]) {
      throw DecodeError("line " + std::to_string(line_no) + ": variable '" +
                        name + "' listed twice");
    }
    seen[k] = true;
    values[k] = value;
  }
  return values;
}

inline std::string format_values(const MilpModel& m,
                                 const std::vector<double>& values) {
  std::ostringstream out;
  for (std::size_t k = 0; k < m.variables().size(); ++k) {
    out << m.variables()[k].name << ' ' << detail::fmt_num(values[k]) << '\n';
  }
  return out.str();
}

}  // namespace hublocate
