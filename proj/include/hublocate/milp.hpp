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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hublocate/cost_model.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/grid.hpp"
#include "hublocate/network_model.hpp"
#include "hublocate/solution.hpp"

namespace hublocate {

enum class VarKind { kBinary, kInteger, kContinuous };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double objective = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// Where each variable family of the linearized model lives. kNone marks an
// absent variable (z on unusable relations, u_st on FCL-only relations).
struct ModelLayout {
  struct LandGroup {
    int full = kNone;          // nL
    int head = kNone;          // uL0
    std::vector<int> steps;    // uL1 .. uL(j-1)
  };
  std::size_t nb = 0, ns = 0, nt = 0, j = 0;
  Grid<int> z;          // [b * nt + t][s]
  std::vector<int> x;   // [b]
  Grid<int> y;          // [b * ns + s][h]
  Grid<int> vd;         // [b][s]
  Grid<int> vh;         // [b * ns + s][h]
  Grid<LandGroup> land; // [b][r], r over branches then origin ports
  Grid<int> sea_n;      // [s][t]
  Grid<int> sea_u;      // [s][t]
};

// Solver-independent mixed-integer program. Minimization.
class MilpModel {
 public:
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const ModelLayout& layout() const { return layout_; }

  int find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? kNone : it->second;
  }

  int add_variable(Variable v) {
    if (by_name_.count(v.name) != 0) {
      throw Error("duplicate variable name '" + v.name + "'");
    }
    const int k = static_cast<int>(variables_.size());
    by_name_.emplace(v.name, k);
    variables_.push_back(std::move(v));
    return k;
  }

  void add_constraint(Constraint c) {
    for (const auto& [k, coef] : c.terms) {
      if (k < 0 || static_cast<std::size_t>(k) >= variables_.size()) {
        throw Error("constraint '" + c.name + "' references an undeclared variable");
      }
    }
    constraints_.push_back(std::move(c));
  }

  ModelLayout& mutable_layout() { return layout_; }

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> by_name_;
  ModelLayout layout_;
};

// Closed-form size of the linearized model. With P the positive-demand
// (b, t) pairs, R the usable sea relations and R_n those with an NVOCC rate:
//   variables   = sum_{(b,t) in P} |usable ports of t| + |B| + 2|B|^2|S|
//                 + |B||S| + |B|(|B|+|S|)(j+1) + |R| + |R_n|
//   constraints = |P| + 3|B||S| + 3|B|^2|S| + |B|^2 + |B|(|B|+|S|) + |R|
struct ModelSize {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t hub_flow_variables = 0;  // vh_bsh
};

inline ModelSize expected_model_size(const Instance& inst) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const std::size_t nt = inst.num_destinations();
  const std::size_t j = land_breakpoints_in_band(inst.land_costs, 0).j();
  std::size_t z = 0, pairs = 0, rel = 0, rel_nvocc = 0;
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t usable = 0;
    for (std::size_t s = 0; s < ns; ++s) {
      if (!inst.usable(s, t)) continue;
      ++usable;
      ++rel;
      if (inst.sea_rates(s, t)->has_nvocc()) ++rel_nvocc;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      if (inst.demand(b, t) > 0.0) {
        ++pairs;
        z += usable;
      }
    }
  }
  ModelSize size;
  size.hub_flow_variables = nb * nb * ns;
  size.variables = z + nb + 2 * nb * nb * ns + nb * ns +
                   nb * (nb + ns) * (j + 1) + rel + rel_nvocc;
  size.constraints = pairs + 3 * nb * ns + 3 * nb * nb * ns + nb * nb +
                     nb * (nb + ns) + rel;
  return size;
}

// Linearized mixed-integer model of the integrated problem. y_bs0 is
// eliminated: the direct volume vd_bs and the hub volumes vh_bsh carry the
// split, and hubs may not relay their own volume (y_hsc <= 1 - x_h).
inline MilpModel build_linearized_model(const Instance& inst) {
  require_valid(inst);
  const CostCurves curves(inst);
  const NodeSets& n = inst.nodes;
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const std::size_t nt = inst.num_destinations();
  const std::size_t j = curves.j();
  const double cap = inst.params.land_container_volume;
  const double sea_cap = inst.params.sea_container_volume;
  const auto& B = n.branches;
  const auto& S = n.origin_ports;
  const auto& T = n.destination_ports;
  auto node_r = [&](std::size_t r) -> const std::string& {
    return r < nb ? B[r] : S[r - nb];
  };

  MilpModel m;
  ModelLayout& L = m.mutable_layout();
  L.nb = nb;
  L.ns = ns;
  L.nt = nt;
  L.j = j;
  L.z = Grid<int>(nb * nt, ns, kNone);
  L.x.assign(nb, kNone);
  L.y = Grid<int>(nb * ns, nb, kNone);
  L.vd = Grid<int>(nb, ns, kNone);
  L.vh = Grid<int>(nb * ns, nb, kNone);
  L.land = Grid<ModelLayout::LandGroup>(nb, nb + ns);
  L.sea_n = Grid<int>(ns, nt, kNone);
  L.sea_u = Grid<int>(ns, nt, kNone);

  auto binary = [](std::string name, double obj) {
    return Variable{std::move(name), VarKind::kBinary, 0.0, 1.0, obj};
  };
  const double inf = std::numeric_limits<double>::infinity();

  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double v = inst.demand(b, t);
      if (!(v > 0.0)) continue;
      for (std::size_t s = 0; s < ns; ++s) {
        if (!inst.usable(s, t)) continue;
        L.z(b * nt + t, s) = m.add_variable(binary(
            "z_" + B[b] + "_" + T[t] + "_" + S[s], inst.port_consol_cost[s] * v));
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    L.x[b] = m.add_variable(binary("x_" + B[b], inst.setup_cost[b]));
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t h = 0; h < nb; ++h) {
        L.y(b * ns + s, h) =
            m.add_variable(binary("y_" + B[b] + "_" + S[s] + "_" + B[h], 0.0));
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      L.vd(b, s) = m.add_variable(
          {"vd_" + B[b] + "_" + S[s], VarKind::kContinuous, 0.0, inf, 0.0});
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t h = 0; h < nb; ++h) {
        L.vh(b * ns + s, h) = m.add_variable(
            {"vh_" + B[b] + "_" + S[s] + "_" + B[h], VarKind::kContinuous, 0.0,
             inf, inst.hub_consol_cost[h]});
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < nb + ns; ++r) {
      const ApproxLandCurve& curve = curves.curve(b, r);
      const std::string suffix = "_" + B[b] + "_" + node_r(r);
      ModelLayout::LandGroup& g = L.land(b, r);
      g.full = m.add_variable({"nL" + suffix, VarKind::kInteger, 0.0, inf,
                               curve.values[j]});
      g.head = m.add_variable({"uL0" + suffix, VarKind::kContinuous, 0.0, 1.0,
                               curve.values[0]});
      for (std::size_t i = 1; i < j; ++i) {
        g.steps.push_back(m.add_variable(
            binary("uL" + std::to_string(i) + suffix, curve.values[i])));
      }
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (!inst.usable(s, t)) continue;
      const SeaRate& rate = *inst.sea_rates(s, t);
      const std::string suffix = "_" + S[s] + "_" + T[t];
      const double price =
          rate.has_fcl() ? *rate.fcl_per_container : inst.params.penalty;
      L.sea_n(s, t) =
          m.add_variable({"nS" + suffix, VarKind::kInteger, 0.0, inf, price});
      if (rate.has_nvocc()) {
        L.sea_u(s, t) = m.add_variable(
            {"uS" + suffix, VarKind::kContinuous, 0.0,
             rate.nvocc_limit(inst.params.nvocc_cap), *rate.nvocc_per_m3});
      }
    }
  }

  // (7) one origin port per connection.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (!(inst.demand(b, t) > 0.0)) continue;
      Constraint c{"c7_" + B[b] + "_" + T[t], {}, Sense::kEqual, 1.0};
      for (std::size_t s = 0; s < ns; ++s) {
        if (L.z(b * nt + t, s) != kNone) c.terms.emplace_back(L.z(b * nt + t, s), 1.0);
      }
      m.add_constraint(std::move(c));
    }
  }
  // (8) at most one hub per branch-port pair.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      Constraint c{"c8_" + B[b] + "_" + S[s], {}, Sense::kLessEqual, 1.0};
      for (std::size_t h = 0; h < nb; ++h) c.terms.emplace_back(L.y(b * ns + s, h), 1.0);
      m.add_constraint(std::move(c));
    }
  }
  // (10) only opened hubs serve.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t h = 0; h < nb; ++h) {
        m.add_constraint({"act_" + B[b] + "_" + S[s] + "_" + B[h],
                          {{L.y(b * ns + s, h), 1.0}, {L.x[h], -1.0}},
                          Sense::kLessEqual, 0.0});
      }
    }
  }
  // Hubs ship directly: y_hsc <= 1 - x_h.
  for (std::size_t h = 0; h < nb; ++h) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t c = 0; c < nb; ++c) {
        m.add_constraint({"relay_" + B[h] + "_" + S[s] + "_" + B[c],
                          {{L.y(h * ns + s, c), 1.0}, {L.x[h], 1.0}},
                          Sense::kLessEqual, 1.0});
      }
    }
  }
  // Volume split: sum_t v_bt z_bts = vd_bs + sum_h vh_bsh.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      Constraint c{"split_" + B[b] + "_" + S[s], {}, Sense::kEqual, 0.0};
      for (std::size_t t = 0; t < nt; ++t) {
        const int k = L.z(b * nt + t, s);
        if (k != kNone) c.terms.emplace_back(k, inst.demand(b, t));
      }
      c.terms.emplace_back(L.vd(b, s), -1.0);
      for (std::size_t h = 0; h < nb; ++h) c.terms.emplace_back(L.vh(b * ns + s, h), -1.0);
      m.add_constraint(std::move(c));
    }
  }
  // Big-M link with M_b = sum_t v_bt.
  for (std::size_t b = 0; b < nb; ++b) {
    double big_m = 0.0;
    for (std::size_t t = 0; t < nt; ++t) big_m += inst.demand(b, t);
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t h = 0; h < nb; ++h) {
        m.add_constraint({"link_" + B[b] + "_" + S[s] + "_" + B[h],
                          {{L.vh(b * ns + s, h), 1.0}, {L.y(b * ns + s, h), -big_m}},
                          Sense::kLessEqual, 0.0});
      }
    }
  }
  auto capacity_terms = [&](Constraint& c, std::size_t b, std::size_t r) {
    const ApproxLandCurve& curve = curves.curve(b, r);
    const ModelLayout::LandGroup& g = L.land(b, r);
    c.terms.emplace_back(g.full, -cap);
    c.terms.emplace_back(g.head, -curve.breakpoints[0]);
    for (std::size_t i = 1; i < j; ++i) {
      c.terms.emplace_back(g.steps[i - 1], -curve.breakpoints[i]);
    }
  };
  // Land capacity on branch -> port arcs: own direct volume plus relayed.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      Constraint c{"landP_" + B[b] + "_" + S[s], {}, Sense::kLessEqual, 0.0};
      c.terms.emplace_back(L.vd(b, s), 1.0);
      for (std::size_t o = 0; o < nb; ++o) c.terms.emplace_back(L.vh(o * ns + s, b), 1.0);
      capacity_terms(c, b, nb + s);
      m.add_constraint(std::move(c));
    }
  }
  // Land capacity on branch -> hub arcs.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t h = 0; h < nb; ++h) {
      Constraint c{"landH_" + B[b] + "_" + B[h], {}, Sense::kLessEqual, 0.0};
      for (std::size_t s = 0; s < ns; ++s) c.terms.emplace_back(L.vh(b * ns + s, h), 1.0);
      capacity_terms(c, b, h);
      m.add_constraint(std::move(c));
    }
  }
  // One active step per land arc.
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < nb + ns; ++r) {
      const ModelLayout::LandGroup& g = L.land(b, r);
      Constraint c{"step_" + B[b] + "_" + node_r(r), {}, Sense::kLessEqual, 1.0};
      c.terms.emplace_back(g.head, 1.0);
      for (int k : g.steps) c.terms.emplace_back(k, 1.0);
      m.add_constraint(std::move(c));
    }
  }
  // Sea capacity.
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (!inst.usable(s, t)) continue;
      Constraint c{"sea_" + S[s] + "_" + T[t], {}, Sense::kLessEqual, 0.0};
      for (std::size_t b = 0; b < nb; ++b) {
        const int k = L.z(b * nt + t, s);
        if (k != kNone) c.terms.emplace_back(k, inst.demand(b, t));
      }
      c.terms.emplace_back(L.sea_n(s, t), -sea_cap);
      if (L.sea_u(s, t) != kNone) c.terms.emplace_back(L.sea_u(s, t), -1.0);
      m.add_constraint(std::move(c));
    }
  }
  return m;
}

inline double objective_value(const MilpModel& m,
                              const std::vector<double>& values) {
  double total = 0.0;
  for (std::size_t k = 0; k < m.variables().size(); ++k) {
    total += m.variables()[k].objective * values[k];
  }
  return total;
}

inline double constraint_activity(const Constraint& c,
                                  const std::vector<double>& values) {
  double lhs = 0.0;
  for (const auto& [k, coef] : c.terms) lhs += coef * values[k];
  return lhs;
}

struct Residual {
  double value = 0.0;   // largest violation over rows, bounds, integrality
  std::string where;    // constraint or variable name
};

inline Residual max_residual(const MilpModel& m,
                             const std::vector<double>& values) {
  Residual worst;
  auto note = [&](double v, const std::string& name) {
    if (v > worst.value) worst = {v, name};
  };
  for (const Constraint& c : m.constraints()) {
    const double lhs = constraint_activity(c, values);
    switch (c.sense) {
      case Sense::kLessEqual: note(lhs - c.rhs, c.name); break;
      case Sense::kGreaterEqual: note(c.rhs - lhs, c.name); break;
      case Sense::kEqual: note(std::abs(lhs - c.rhs), c.name); break;
    }
  }
  for (std::size_t k = 0; k < m.variables().size(); ++k) {
    const Variable& v = m.variables()[k];
    note(v.lower - values[k], v.name);
    note(values[k] - v.upper, v.name);
    if (v.kind != VarKind::kContinuous) {
      note(std::abs(values[k] - std::round(values[k])), v.name);
    }
  }
  return worst;
}

// Variable assignment realizing a feasible solution. Land and sea step
// variables take the cheapest consistent values, so the model objective
// equals evaluate_cost(..., kApprox).total.
inline std::vector<double> encode_solution(const Instance& inst,
                                           const MilpModel& m,
                                           const Solution& sol) {
  ViolationReport report = check_feasibility(inst, sol);
  if (!report.feasible()) throw InfeasibleSolutionError(std::move(report));
  const ModelLayout& L = m.layout();
  const CostCurves curves(inst);
  const Flows f = compute_flows(inst, sol);
  const std::size_t nb = L.nb, ns = L.ns, nt = L.nt;
  std::vector<double> x(m.variables().size(), 0.0);

  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      const int s = sol.port_choice(b, t);
      if (inst.demand(b, t) > 0.0) x[L.z(b * nt + t, s)] = 1.0;
    }
    x[L.x[b]] = sol.hubs[b] ? 1.0 : 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      const int h = sol.hub_of(b, s);
      if (h != kNone) {
        x[L.y(b * ns + s, h)] = 1.0;
        x[L.vh(b * ns + s, h)] = f.via_hub_volume(b, s);
      }
      x[L.vd(b, s)] = f.direct_volume(b, s);
    }
  }
  auto encode_land = [&](std::size_t b, std::size_t r, double volume) {
    const ApproxSplit split = split_approx(curves.curve(b, r), volume);
    const ModelLayout::LandGroup& g = L.land(b, r);
    x[g.full] = static_cast<double>(split.full);
    x[g.head] = split.head_fraction;
    if (split.step != 0) x[g.steps[split.step - 1]] = 1.0;
  };
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) encode_land(b, nb + s, f.arc_to_port(b, s));
    for (std::size_t h = 0; h < nb; ++h) encode_land(b, h, f.arc_to_hub(b, h));
  }
  const Parameters& p = inst.params;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (L.sea_n(s, t) == kNone) continue;
      const SeaCost sc = sea_cost(*inst.sea_rates(s, t), f.sea_volume(s, t),
                                  p.sea_container_volume, p.nvocc_cap, p.penalty);
      x[L.sea_n(s, t)] = static_cast<double>(sc.containers);
      if (L.sea_u(s, t) != kNone) x[L.sea_u(s, t)] = sc.nvocc_volume;
    }
  }
  return x;
}

inline constexpr double kIntegralityTol = 1e-5;
inline constexpr double kDecodeResidualTol = 1e-4;

// Reads a solution back from a (typically external) variable assignment.
inline Solution decode_solution(const Instance& inst, const MilpModel& m,
                                const std::vector<double>& values) {
  const ModelLayout& L = m.layout();
  if (values.size() != m.variables().size()) {
    throw DecodeError("assignment has " + std::to_string(values.size()) +
                      " values for " + std::to_string(m.variables().size()) +
                      " variables");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Variable& v = m.variables()[k];
    if (v.kind != VarKind::kContinuous &&
        std::abs(values[k] - std::round(values[k])) > kIntegralityTol) {
      throw DecodeError("variable " + v.name + " = " +
                        detail::fmt_num(values[k]) + " is not integral");
    }
  }
  const Residual r = max_residual(m, values);
  if (r.value > kDecodeResidualTol) {
    throw DecodeError("constraint " + r.where + " violated by " +
                      detail::fmt_num(r.value));
  }
  auto on = [&](int k) { return k != kNone && values[k] > 0.5; };
  const std::size_t nb = L.nb, ns = L.ns, nt = L.nt;
  Solution sol = Solution::empty(inst);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t s = 0; s < ns; ++s) {
        if (on(L.z(b * nt + t, s))) {
          sol.port_choice(b, t) = static_cast<int>(s);
          break;
        }
      }
    }
    sol.hubs[b] = on(L.x[b]);
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      double volume = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        if (sol.port_choice(b, t) == static_cast<int>(s)) volume += inst.demand(b, t);
      }
      for (std::size_t h = 0; h < nb; ++h) {
        if (on(L.y(b * ns + s, h))) sol.hub_choice(b, s).push_back(static_cast<int>(h));
      }
      if (volume > 0.0) {
        sol.direct_fraction(b, s) =
            std::clamp(values[L.vd(b, s)] / volume, 0.0, 1.0);
      }
    }
  }
  return sol;
}

}  // namespace hublocate
