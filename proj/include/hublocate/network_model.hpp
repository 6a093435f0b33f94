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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hublocate/cost_model.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/grid.hpp"

namespace hublocate {

inline constexpr int kNone = -1;
inline constexpr const char* kSchemaVersion = "hublocate-1";

// Branches (B), origin ports (S) and destination ports (T). Each list is
// kept sorted; algorithms address nodes by their position.
struct NodeSets {
  std::vector<std::string> branches;
  std::vector<std::string> origin_ports;
  std::vector<std::string> destination_ports;

  friend bool operator==(const NodeSets&, const NodeSets&) = default;
};

struct Parameters {
  double land_container_volume = 80.0;
  double sea_container_volume = 55.0;
  double nvocc_cap = 40.0;
  double dimensional_factor = 300.0;  // kg per m^3
  double penalty = 1e8;               // container price on NVOCC-only relations

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Complete problem datum. Immutable once built; all solvers take it by const
// reference and may share it across threads.
struct Instance {
  NodeSets nodes;
  Grid<double> demand;  // [b][t], m^3
  // [b][r] in km; r < |B| is a branch, r >= |B| the origin port r - |B|.
  // NaN marks a missing entry. The diagonal is 0.
  Grid<double> distance;
  LandCostTable land_costs;
  Grid<std::optional<SeaRate>> sea_rates;  // [s][t]
  std::vector<double> setup_cost;          // e_b
  std::vector<double> hub_consol_cost;     // f_b, per m^3
  std::vector<double> port_consol_cost;    // g_s, per m^3
  Parameters params;

  std::size_t num_branches() const { return nodes.branches.size(); }
  std::size_t num_origin_ports() const { return nodes.origin_ports.size(); }
  std::size_t num_destinations() const {
    return nodes.destination_ports.size();
  }

  double branch_distance(std::size_t b, std::size_t h) const {
    return distance(b, h);
  }
  double port_distance(std::size_t b, std::size_t s) const {
    return distance(b, num_branches() + s);
  }

  bool usable(std::size_t s, std::size_t t) const {
    return sea_rates(s, t).has_value();
  }

  // Empty instance with all tables sized for the given node sets.
  static Instance sized(NodeSets nodes) {
    Instance inst;
    inst.nodes = std::move(nodes);
    const std::size_t nb = inst.num_branches();
    const std::size_t ns = inst.num_origin_ports();
    const std::size_t nt = inst.num_destinations();
    inst.demand = Grid<double>(nb, nt, 0.0);
    inst.distance =
        Grid<double>(nb, nb + ns, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t b = 0; b < nb; ++b) inst.distance(b, b) = 0.0;
    inst.sea_rates = Grid<std::optional<SeaRate>>(ns, nt);
    inst.setup_cost.assign(nb, 0.0);
    inst.hub_consol_cost.assign(nb, 0.0);
    inst.port_consol_cost.assign(ns, 0.0);
    return inst;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    auto same_distance = [](const Grid<double>& x, const Grid<double>& y) {
      if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
      for (std::size_t i = 0; i < x.data().size(); ++i) {
        const double p = x.data()[i];
        const double q = y.data()[i];
        if (!(p == q || (std::isnan(p) && std::isnan(q)))) return false;
      }
      return true;
    };
    return a.nodes == b.nodes && a.demand == b.demand &&
           same_distance(a.distance, b.distance) &&
           a.land_costs == b.land_costs && a.sea_rates == b.sea_rates &&
           a.setup_cost == b.setup_cost &&
           a.hub_consol_cost == b.hub_consol_cost &&
           a.port_consol_cost == b.port_consol_cost && a.params == b.params;
  }
};

inline int index_of(const std::vector<std::string>& ids, const std::string& id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return kNone;
  return static_cast<int>(it - ids.begin());
}

struct ValidationIssue {
  std::string code;
  std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

// Node ids end up inside LP/MPS variable names, so they are restricted to
// ASCII letters and digits.
inline bool valid_node_id(const std::string& id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9');
  });
}

namespace detail {

// Shortest text that reads back as the same double.
inline std::string fmt_num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace detail

inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  auto add = [&](const char* code, std::string message) {
    report.push_back({code, std::move(message)});
  };
  const NodeSets& n = inst.nodes;
  const std::size_t nb = n.branches.size();
  const std::size_t ns = n.origin_ports.size();
  const std::size_t nt = n.destination_ports.size();

  if (nb == 0) add("EMPTY_NODE_SET", "no branches");
  if (ns == 0) add("EMPTY_NODE_SET", "no origin ports");
  if (nt == 0) add("EMPTY_NODE_SET", "no destination ports");

  std::set<std::string> seen;
  for (const auto* ids : {&n.branches, &n.origin_ports, &n.destination_ports}) {
    for (const std::string& id : *ids) {
      if (!valid_node_id(id)) {
        add("INVALID_NODE_ID", "node id '" + id + "' is not alphanumeric");
      }
      if (!seen.insert(id).second) {
        add("DUPLICATE_NODE", "node id '" + id + "' appears more than once");
      }
    }
    if (!std::is_sorted(ids->begin(), ids->end())) {
      add("UNSORTED_NODES", "node ids are not in canonical order");
    }
  }
  for (const std::string& b : n.branches) {
    if (std::binary_search(n.origin_ports.begin(), n.origin_ports.end(), b)) {
      add("BRANCH_IS_PORT", "'" + b + "' is both a branch and an origin port");
    }
  }

  if (inst.demand.rows() != nb || inst.demand.cols() != nt ||
      inst.distance.rows() != nb || inst.distance.cols() != nb + ns ||
      inst.sea_rates.rows() != ns || inst.sea_rates.cols() != nt ||
      inst.setup_cost.size() != nb || inst.hub_consol_cost.size() != nb ||
      inst.port_consol_cost.size() != ns) {
    add("SHAPE_MISMATCH", "data tables do not match the node sets");
    return report;
  }

  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double v = inst.demand(b, t);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        add("NEGATIVE_DEMAND", "demand " + n.branches[b] + " -> " +
                                   n.destination_ports[t] + " is " +
                                   detail::fmt_num(v));
      }
    }
  }

  for (std::size_t b = 0; b < nb; ++b) {
    if (!(inst.setup_cost[b] >= 0.0)) {
      add("NEGATIVE_COST", "setup cost of " + n.branches[b] + " is negative");
    }
    if (!(inst.hub_consol_cost[b] >= 0.0)) {
      add("NEGATIVE_COST",
          "hub consolidation cost of " + n.branches[b] + " is negative");
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    if (!(inst.port_consol_cost[s] >= 0.0)) {
      add("NEGATIVE_COST",
          "port consolidation cost of " + n.origin_ports[s] + " is negative");
    }
  }

  const Parameters& p = inst.params;
  if (!(p.land_container_volume > 0.0)) {
    add("BAD_PARAMETER", "land container volume must be positive");
  }
  if (!(p.sea_container_volume > 0.0)) {
    add("BAD_PARAMETER", "sea container volume must be positive");
  }
  if (!(p.nvocc_cap > 0.0 && p.nvocc_cap <= p.sea_container_volume)) {
    add("BAD_PARAMETER", "nvocc cap must lie in (0, sea container volume]");
  }
  if (!(p.dimensional_factor > 0.0)) {
    add("BAD_PARAMETER", "dimensional factor must be positive");
  }
  if (!(p.penalty > 0.0)) add("BAD_PARAMETER", "penalty must be positive");

  // Land cost table.
  const LandCostTable& lt = inst.land_costs;
  bool table_ok = true;
  if (lt.distance_breaks.size() < 2 ||
      !std::is_sorted(lt.distance_breaks.begin(), lt.distance_breaks.end(),
                      std::less_equal<>())) {
    add("BAD_LAND_TABLE",
        "distance breaks must be at least two strictly ascending values");
    table_ok = false;
  }
  if (lt.volume_breaks.empty() || !(lt.volume_breaks.front() > 0.0) ||
      !std::is_sorted(lt.volume_breaks.begin(), lt.volume_breaks.end(),
                      std::less_equal<>())) {
    add("BAD_LAND_TABLE",
        "volume breaks must be positive and strictly ascending");
    table_ok = false;
  } else if (std::abs(lt.volume_breaks.back() - p.land_container_volume) >
             1e-9 * std::max(1.0, p.land_container_volume)) {
    add("BAD_LAND_TABLE",
        "last volume break must equal the land container volume");
  }
  if (table_ok && (lt.cost.rows() != lt.distance_breaks.size() - 1 ||
                   lt.cost.cols() != lt.volume_breaks.size())) {
    add("BAD_LAND_TABLE", "cost matrix shape does not match the breaks");
    table_ok = false;
  }
  if (table_ok) {
    for (std::size_t d = 0; d < lt.cost.rows(); ++d) {
      for (std::size_t i = 0; i < lt.cost.cols(); ++i) {
        if (!(lt.cost(d, i) >= 0.0)) {
          add("NEGATIVE_COST", "land cost entry is negative");
        }
        if (i > 0 && lt.cost(d, i) < lt.cost(d, i - 1)) {
          add("NON_MONOTONE_LAND_COST",
              "land cost decreases along the volume axis in distance band " +
                  std::to_string(d));
          break;
        }
      }
    }
  }

  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < nb + ns; ++r) {
      if (r == b) continue;
      const std::string& to =
          r < nb ? n.branches[r] : n.origin_ports[r - nb];
      const double d = inst.distance(b, r);
      if (std::isnan(d)) {
        add("MISSING_DISTANCE", "no distance " + n.branches[b] + " -> " + to);
      } else if (!(d >= 0.0) || !std::isfinite(d)) {
        add("NEGATIVE_DISTANCE",
            "distance " + n.branches[b] + " -> " + to + " is negative");
      } else if (table_ok && (d < lt.distance_breaks.front() ||
                              d > lt.distance_breaks.back())) {
        add("DISTANCE_OUT_OF_RANGE", "distance " + n.branches[b] + " -> " +
                                         to + " outside land cost table");
      }
    }
  }

  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& rate = inst.sea_rates(s, t);
      if (!rate) continue;
      if (!rate->has_fcl() && !rate->has_nvocc()) {
        add("EMPTY_SEA_RATE", "sea rate " + n.origin_ports[s] + " -> " +
                                  n.destination_ports[t] + " has no price");
      }
      if ((rate->has_fcl() && !(*rate->fcl_per_container > 0.0)) ||
          (rate->has_nvocc() && !(*rate->nvocc_per_m3 > 0.0))) {
        add("NONPOSITIVE_SEA_RATE", "sea rate " + n.origin_ports[s] + " -> " +
                                        n.destination_ports[t] +
                                        " must be positive");
      }
    }
  }

  for (std::size_t t = 0; t < nt; ++t) {
    bool reachable = false;
    for (std::size_t s = 0; s < ns; ++s) reachable |= inst.usable(s, t);
    if (reachable) continue;
    for (std::size_t b = 0; b < nb; ++b) {
      if (inst.demand(b, t) > 0.0) {
        add("UNREACHABLE_DESTINATION", "destination " +
                                           n.destination_ports[t] +
                                           " has demand but no sea rate");
        break;
      }
    }
  }
  return report;
}

inline void require_valid(const Instance& inst) {
  const ValidationReport report = validate_instance(inst);
  if (!report.empty()) {
    throw InstanceError(report.front().code, report.front().message);
  }
}

// Per-instance cost curves, resolved once: the distance band of every land
// arc and the approximated curve for each band.
class CostCurves {
 public:
  explicit CostCurves(const Instance& inst) : inst_(&inst) {
    const std::size_t nb = inst.num_branches();
    const std::size_t nr = nb + inst.num_origin_ports();
    band_ = Grid<std::size_t>(nb, nr, 0);
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t r = 0; r < nr; ++r) {
        band_(b, r) = inst.land_costs.distance_band(inst.distance(b, r));
      }
    }
    for (std::size_t k = 0; k < inst.land_costs.num_distance_bands(); ++k) {
      curves_.push_back(land_breakpoints_in_band(inst.land_costs, k));
    }
  }

  const Instance& instance() const { return *inst_; }

  // r indexes branches then origin ports, as in Instance::distance.
  const ApproxLandCurve& curve(std::size_t b, std::size_t r) const {
    return curves_[band_(b, r)];
  }
  double land(std::size_t b, std::size_t r, double volume, bool exact) const {
    if (exact) {
      return land_cost_exact_in_band(inst_->land_costs, band_(b, r), volume);
    }
    return land_cost_approx(curve(b, r), volume);
  }
  double sea(std::size_t s, std::size_t t, double volume) const {
    if (volume <= kVolumeTol) return 0.0;
    const Parameters& p = inst_->params;
    return sea_cost(*inst_->sea_rates(s, t), volume, p.sea_container_volume,
                    p.nvocc_cap, p.penalty)
        .cost;
  }
  std::size_t j() const { return curves_.front().j(); }

 private:
  const Instance* inst_;
  Grid<std::size_t> band_;
  std::vector<ApproxLandCurve> curves_;
};

}  // namespace hublocate
