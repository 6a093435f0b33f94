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
#include <string>
#include <vector>

#include "hublocate/cost_model.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/grid.hpp"
#include "hublocate/network_model.hpp"

namespace hublocate {

// Full set of decisions.
//  port_choice(b, t): origin port for the (b, t) connection (z_bts = 1), or
//    kNone. Only pairs with positive demand need an entry.
//  hubs[b]: b is upgraded to a hub (x_b = 1).
//  direct_fraction(b, s): share of the b -> s volume sent without a hub
//    stopover (y_bs0).
//  hub_choice(b, s): hubs h with y_bsh = 1, sorted. A feasible solution has
//    at most one; more can only arise from merging independent plans.
struct Solution {
  Grid<int> port_choice;
  std::vector<bool> hubs;
  Grid<double> direct_fraction;
  Grid<std::vector<int>> hub_choice;

  // All-direct, no hubs, no ports chosen.
  static Solution empty(const Instance& inst) {
    Solution sol;
    sol.port_choice =
        Grid<int>(inst.num_branches(), inst.num_destinations(), kNone);
    sol.hubs.assign(inst.num_branches(), false);
    sol.direct_fraction =
        Grid<double>(inst.num_branches(), inst.num_origin_ports(), 1.0);
    sol.hub_choice = Grid<std::vector<int>>(inst.num_branches(),
                                            inst.num_origin_ports());
    return sol;
  }

  // The single hub serving (b, s), or kNone.
  int hub_of(std::size_t b, std::size_t s) const {
    const auto& h = hub_choice(b, s);
    if (h.empty()) return kNone;
    if (h.size() > 1) {
      throw SolutionError("more than one hub chosen for a branch/port pair");
    }
    return h.front();
  }

  void set_hub(std::size_t b, std::size_t s, int h) {
    auto& slot = hub_choice(b, s);
    slot.clear();
    if (h != kNone) slot.push_back(h);
  }

  friend bool operator==(const Solution&, const Solution&) = default;
};

enum class CostMode { kExact, kApprox };

inline const char* to_string(CostMode mode) {
  return mode == CostMode::kExact ? "exact" : "approx";
}

// The six objective terms.
struct CostBreakdown {
  double setup = 0.0;               // hub set-up
  double hub_consolidation = 0.0;   // per m^3 at hubs
  double port_consolidation = 0.0;  // per m^3 at origin ports
  double land_branch_to_port = 0.0; // direct legs plus hub-to-port legs
  double land_branch_to_hub = 0.0;
  double sea = 0.0;
  double total = 0.0;
};

enum class ConstraintId { kC7, kC8, kC9, kC10, kC11 };

inline const char* to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::kC7: return "C7";
    case ConstraintId::kC8: return "C8";
    case ConstraintId::kC9: return "C9";
    case ConstraintId::kC10: return "C10";
    case ConstraintId::kC11: return "C11";
  }
  return "?";
}

struct Violation {
  ConstraintId constraint;
  std::vector<std::string> indices;  // node ids
  std::string description;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(ConstraintId id) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(),
                      [id](const Violation& v) { return v.constraint == id; }));
  }
};

class InfeasibleSolutionError : public Error {
 public:
  explicit InfeasibleSolutionError(ViolationReport report)
      : Error(describe(report)), report_(std::move(report)) {}
  const ViolationReport& report() const { return report_; }

 private:
  static std::string describe(const ViolationReport& r) {
    std::string msg = "solution violates " +
                      std::to_string(r.violations.size()) + " constraint(s)";
    if (!r.violations.empty()) {
      msg += "; first: " + std::string(to_string(r.violations.front().constraint)) +
             " " + r.violations.front().description;
    }
    return msg;
  }
  ViolationReport report_;
};

// Throws SolutionError when the solution cannot be interpreted against the
// instance at all. Constraint violations are not structural.
inline void check_structure(const Instance& inst, const Solution& sol) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const std::size_t nt = inst.num_destinations();
  if (sol.port_choice.rows() != nb || sol.port_choice.cols() != nt ||
      sol.hubs.size() != nb || sol.direct_fraction.rows() != nb ||
      sol.direct_fraction.cols() != ns || sol.hub_choice.rows() != nb ||
      sol.hub_choice.cols() != ns) {
    throw SolutionError("solution shape does not match the instance");
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      const int s = sol.port_choice(b, t);
      if (s == kNone) continue;
      if (s < 0 || static_cast<std::size_t>(s) >= ns) {
        throw SolutionError("port choice refers to an unknown origin port");
      }
      if (inst.demand(b, t) > 0.0 && !inst.usable(s, t)) {
        throw SolutionError("origin port " + inst.nodes.origin_ports[s] +
                            " has no sea rate to " +
                            inst.nodes.destination_ports[t]);
      }
    }
    for (std::size_t s = 0; s < ns; ++s) {
      const double y = sol.direct_fraction(b, s);
      if (!(y >= 0.0 && y <= 1.0)) {
        throw SolutionError("direct fraction outside [0, 1]");
      }
      for (int h : sol.hub_choice(b, s)) {
        if (h < 0 || static_cast<std::size_t>(h) >= nb) {
          throw SolutionError("hub choice refers to an unknown branch");
        }
      }
    }
  }
}

inline constexpr double kFractionTol = 1e-9;

inline ViolationReport check_feasibility(const Instance& inst,
                                         const Solution& sol) {
  check_structure(inst, sol);
  const NodeSets& n = inst.nodes;
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  ViolationReport report;
  auto add = [&](ConstraintId id, std::vector<std::string> idx,
                 std::string what) {
    report.violations.push_back({id, std::move(idx), std::move(what)});
  };
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      if (inst.demand(b, t) > 0.0 && sol.port_choice(b, t) == kNone) {
        add(ConstraintId::kC7, {n.branches[b], n.destination_ports[t]},
            "no origin port chosen for " + n.branches[b] + " -> " +
                n.destination_ports[t]);
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& chosen = sol.hub_choice(b, s);
      if (chosen.size() > 1) {
        std::vector<std::string> idx = {n.branches[b], n.origin_ports[s]};
        std::string list;
        for (int h : chosen) {
          idx.push_back(n.branches[h]);
          list += (list.empty() ? "" : ", ") + n.branches[h];
        }
        add(ConstraintId::kC8, std::move(idx),
            n.branches[b] + " uses several hubs (" + list + ") towards " +
                n.origin_ports[s]);
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      if (sol.direct_fraction(b, s) < 1.0 - kFractionTol &&
          sol.hub_choice(b, s).empty()) {
        add(ConstraintId::kC9, {n.branches[b], n.origin_ports[s]},
            n.branches[b] + " -> " + n.origin_ports[s] +
                " is partly indirect without a hub");
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (int h : sol.hub_choice(b, s)) {
        if (!sol.hubs[h]) {
          add(ConstraintId::kC10,
              {n.branches[b], n.origin_ports[s], n.branches[h]},
              n.branches[h] + " serves as hub for " + n.branches[b] +
                  " but is not a hub");
        }
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (!sol.hubs[b]) continue;
    for (std::size_t s = 0; s < ns; ++s) {
      if (sol.direct_fraction(b, s) < 1.0 - kFractionTol ||
          !sol.hub_choice(b, s).empty()) {
        add(ConstraintId::kC11, {n.branches[b], n.origin_ports[s]},
            "hub " + n.branches[b] + " relays its own volume towards " +
                n.origin_ports[s]);
      }
    }
  }
  return report;
}

// Splits a branch-port volume into (direct, via hub) parts. Shared by the
// evaluator and the model encoder so both see identical arc volumes.
struct VolumeSplit {
  double direct = 0.0;
  double via_hub = 0.0;
};

inline VolumeSplit split_volume(double volume, double direct_fraction,
                                bool has_hub) {
  if (!has_hub || direct_fraction >= 1.0) return {volume, 0.0};
  const double via = (1.0 - direct_fraction) * volume;
  return {volume - via, via};
}

// Volumes on every arc implied by a (structurally valid, single-hub)
// solution.
struct Flows {
  Grid<double> port_volume;      // V_bs: demand of b assigned to port s
  Grid<double> direct_volume;    // own direct part of V_bs
  Grid<double> via_hub_volume;   // part of V_bs routed via hub_of(b, s)
  Grid<double> arc_to_port;      // argument of term (4), [b][s]
  Grid<double> arc_to_hub;       // argument of term (5), [b][h]
  std::vector<double> hub_volume;
  Grid<double> sea_volume;       // [s][t]
};

inline Flows compute_flows(const Instance& inst, const Solution& sol) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const std::size_t nt = inst.num_destinations();
  Flows f;
  f.port_volume = Grid<double>(nb, ns, 0.0);
  f.direct_volume = Grid<double>(nb, ns, 0.0);
  f.via_hub_volume = Grid<double>(nb, ns, 0.0);
  f.arc_to_port = Grid<double>(nb, ns, 0.0);
  f.arc_to_hub = Grid<double>(nb, nb, 0.0);
  f.hub_volume.assign(nb, 0.0);
  f.sea_volume = Grid<double>(ns, nt, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double v = inst.demand(b, t);
      const int s = sol.port_choice(b, t);
      if (v <= 0.0 || s == kNone) continue;
      f.port_volume(b, s) += v;
      f.sea_volume(s, t) += v;
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      const int h = sol.hub_of(b, s);
      const VolumeSplit split = split_volume(
          f.port_volume(b, s), sol.direct_fraction(b, s), h != kNone);
      f.direct_volume(b, s) = split.direct;
      f.via_hub_volume(b, s) = split.via_hub;
      f.arc_to_port(b, s) += split.direct;
      if (h != kNone && split.via_hub > 0.0) {
        f.arc_to_hub(b, h) += split.via_hub;
        f.arc_to_port(h, s) += split.via_hub;
        f.hub_volume[h] += split.via_hub;
      }
    }
  }
  return f;
}

// Objective of a solution that already passed check_feasibility.
inline CostBreakdown evaluate_flows(const CostCurves& curves,
                                    const Solution& sol, const Flows& f,
                                    CostMode mode) {
  const Instance& inst = curves.instance();
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const bool exact = mode == CostMode::kExact;
  CostBreakdown c;
  for (std::size_t h = 0; h < nb; ++h) {
    if (sol.hubs[h]) c.setup += inst.setup_cost[h];
    c.hub_consolidation += inst.hub_consol_cost[h] * f.hub_volume[h];
  }
  for (std::size_t s = 0; s < ns; ++s) {
    double volume = 0.0;
    for (std::size_t b = 0; b < nb; ++b) volume += f.port_volume(b, s);
    c.port_consolidation += inst.port_consol_cost[s] * volume;
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      c.land_branch_to_port += curves.land(b, nb + s, f.arc_to_port(b, s), exact);
    }
    for (std::size_t h = 0; h < nb; ++h) {
      if (f.arc_to_hub(b, h) > 0.0) {
        c.land_branch_to_hub += curves.land(b, h, f.arc_to_hub(b, h), exact);
      }
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      c.sea += curves.sea(s, t, f.sea_volume(s, t));
    }
  }
  c.total = c.setup + c.hub_consolidation + c.port_consolidation +
            c.land_branch_to_port + c.land_branch_to_hub + c.sea;
  return c;
}

inline CostBreakdown evaluate_cost(const CostCurves& curves,
                                   const Solution& sol, CostMode mode) {
  ViolationReport report = check_feasibility(curves.instance(), sol);
  if (!report.feasible()) throw InfeasibleSolutionError(std::move(report));
  return evaluate_flows(curves, sol, compute_flows(curves.instance(), sol),
                        mode);
}

inline CostBreakdown evaluate_cost(const Instance& inst, const Solution& sol,
                                   CostMode mode) {
  return evaluate_cost(CostCurves(inst), sol, mode);
}

// Share (in [0, 1]) of all shipped volume that passes through a hub.
inline double hub_volume_share(const Instance& inst, const Solution& sol) {
  const Flows f = compute_flows(inst, sol);
  double total = 0.0;
  double via = 0.0;
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    for (std::size_t s = 0; s < inst.num_origin_ports(); ++s) {
      total += f.port_volume(b, s);
      via += f.via_hub_volume(b, s);
    }
  }
  return total > 0.0 ? via / total : 0.0;
}

// Drops decisions that cannot influence any term: port choices on pairs
// without demand, and fractions on branch-port pairs without volume.
inline Solution canonicalize(const Instance& inst, Solution sol) {
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      if (!(inst.demand(b, t) > 0.0)) sol.port_choice(b, t) = kNone;
    }
  }
  const Flows f = compute_flows(inst, sol);
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    for (std::size_t s = 0; s < inst.num_origin_ports(); ++s) {
      if (f.port_volume(b, s) == 0.0) sol.direct_fraction(b, s) = 1.0;
    }
  }
  return sol;
}

}  // namespace hublocate
