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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hublocate/cost_model.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/exact_oracle.hpp"
#include "hublocate/network_model.hpp"
#include "hublocate/parallel.hpp"
#include "hublocate/solution.hpp"

namespace hublocate {

namespace detail {

inline bool improves(double candidate, double incumbent) {
  return candidate < incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
}

// Cost of the flows of one destination, exact land cost.
class DestinationModel {
 public:
  DestinationModel(const Instance& inst, const CostCurves& curves,
                   std::size_t t)
      : inst_(inst), curves_(curves), t_(t) {
    nb_ = inst.num_branches();
    ns_ = inst.num_origin_ports();
    for (std::size_t b = 0; b < nb_; ++b) {
      if (inst.demand(b, t) > 0.0) shippers_.push_back(static_cast<int>(b));
    }
    for (std::size_t s = 0; s < ns_; ++s) {
      if (inst.usable(s, t)) ports_.push_back(static_cast<int>(s));
    }
  }

  const std::vector<int>& shippers() const { return shippers_; }
  const std::vector<int>& ports() const { return ports_; }
  double volume(int b) const { return inst_.demand(b, t_); }

  // port[b] and route[b] (hub or kNone) are read for shipping branches.
  double cost(const std::vector<int>& port, std::uint32_t hubs,
              const std::vector<int>& route) const {
    arc_port_.assign(nb_ * ns_, 0.0);
    arc_hub_.assign(nb_ * nb_, 0.0);
    port_volume_.assign(ns_, 0.0);
    double total = 0.0;
    for (std::size_t h = 0; h < nb_; ++h) {
      if (hubs & (1u << h)) total += inst_.setup_cost[h];
    }
    for (int b : shippers_) {
      const double v = volume(b);
      const int s = port[b];
      port_volume_[s] += v;
      const int h = route[b];
      if (h != kNone) {
        arc_hub_[b * nb_ + h] += v;
        arc_port_[h * ns_ + s] += v;
        total += inst_.hub_consol_cost[h] * v;
      } else {
        arc_port_[b * ns_ + s] += v;
      }
    }
    for (std::size_t s = 0; s < ns_; ++s) {
      if (port_volume_[s] <= 0.0) continue;
      total += inst_.port_consol_cost[s] * port_volume_[s];
      total += curves_.sea(s, t_, port_volume_[s]);
    }
    for (std::size_t b = 0; b < nb_; ++b) {
      for (std::size_t s = 0; s < ns_; ++s) {
        const double x = arc_port_[b * ns_ + s];
        if (x > 0.0) total += curves_.land(b, nb_ + s, x, true);
      }
      for (std::size_t h = 0; h < nb_; ++h) {
        const double x = arc_hub_[b * nb_ + h];
        if (x > 0.0) total += curves_.land(b, h, x, true);
      }
    }
    return total;
  }

  // Cheapest direct option for one shipment on its own.
  int cheapest_port(int b) const {
    int best = kNone;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int s : ports_) {
      const double v = volume(b);
      const double c = curves_.land(b, nb_ + s, v, true) +
                       inst_.port_consol_cost[s] * v + curves_.sea(s, t_, v);
      if (c < best_cost) {
        best_cost = c;
        best = s;
      }
    }
    return best;
  }

  // Best-response routing: each non-hub shipment goes direct or via one hub.
  double route(const std::vector<int>& port, std::uint32_t hubs,
               std::vector<int>& route_of) const {
    std::vector<int> options = {kNone};
    for (std::size_t h = 0; h < nb_; ++h) {
      if (hubs & (1u << h)) options.push_back(static_cast<int>(h));
    }
    double current = cost(port, hubs, route_of);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int b : shippers_) {
        if (hubs & (1u << b)) continue;
        const int keep = route_of[b];
        int best = keep;
        double best_cost = current;
        for (int o : options) {
          if (o == keep) continue;
          route_of[b] = o;
          const double c = cost(port, hubs, route_of);
          if (improves(c, best_cost)) {
            best_cost = c;
            best = o;
          }
        }
        route_of[b] = best;
        if (best != keep) {
          current = best_cost;
          changed = true;
        }
      }
    }
    return current;
  }

  // Routing from the all-direct start and from each shipment's standalone
  // best hub; the cheaper result is kept.
  double best_routing(const std::vector<int>& port, std::uint32_t hubs,
                      std::vector<int>& route_of) const {
    std::vector<int> direct(nb_, kNone);
    const double c_direct = route(port, hubs, direct);
    std::vector<int> via(nb_, kNone);
    if (hubs != 0) {
      for (int b : shippers_) {
        if (hubs & (1u << b)) continue;
        const double v = volume(b);
        const int s = port[b];
        double best_cost = curves_.land(b, nb_ + s, v, true);
        for (std::size_t h = 0; h < nb_; ++h) {
          if (!(hubs & (1u << h))) continue;
          const double c = inst_.hub_consol_cost[h] * v + curves_.land(b, h, v, true) +
                           curves_.land(h, nb_ + s, v, true);
          if (c < best_cost) {
            best_cost = c;
            via[b] = static_cast<int>(h);
          }
        }
      }
    }
    const double c_via = hubs != 0 ? route(port, hubs, via)
                                   : std::numeric_limits<double>::infinity();
    if (c_via < c_direct) {
      route_of = via;
      return c_via;
    }
    route_of = direct;
    return c_direct;
  }

 private:
  const Instance& inst_;
  const CostCurves& curves_;
  std::size_t t_;
  std::size_t nb_ = 0, ns_ = 0;
  std::vector<int> shippers_;
  std::vector<int> ports_;
  mutable std::vector<double> arc_port_, arc_hub_, port_volume_;
};

}  // namespace detail

struct DestinationResult {
  std::size_t destination = 0;
  std::vector<int> port;   // per branch; kNone without demand
  std::vector<bool> hubs;  // H_t
  std::vector<int> route;  // per branch: hub used, or kNone for direct
  double cost = 0.0;       // exact cost of this destination's flows
  std::size_t iterations = 0;
};

inline DestinationResult solve_single_destination(const Instance& inst,
                                                  const CostCurves& curves,
                                                  std::size_t t,
                                                  std::size_t hub_budget) {
  const std::size_t nb = inst.num_branches();
  if (nb > 31) throw LimitError(static_cast<double>(nb), "too many branches");
  const detail::DestinationModel model(inst, curves, t);
  DestinationResult r;
  r.destination = t;
  r.port.assign(nb, kNone);
  r.route.assign(nb, kNone);
  r.hubs.assign(nb, false);
  for (int b : model.shippers()) r.port[b] = model.cheapest_port(b);
  std::uint32_t hubs = 0;
  double current = model.cost(r.port, hubs, r.route);
  const std::vector<std::uint32_t> sets = detail::ordered_hub_sets(nb, hub_budget);
  while (true) {
    ++r.iterations;
    // Step 1: ports fixed, exhaustive search over hub sets.
    std::uint32_t best_hubs = hubs;
    std::vector<int> best_route = r.route;
    double best = current;
    for (std::uint32_t mask : sets) {
      std::vector<int> route_of;
      const double c = model.best_routing(r.port, mask, route_of);
      if (detail::improves(c, best)) {
        best = c;
        best_hubs = mask;
        best_route = route_of;
      }
    }
    std::vector<int> port = r.port;
    // Step 2: hubs fixed, per-branch best port.
    for (int b : model.shippers()) {
      const int keep = port[b];
      int choice = keep;
      for (int s : model.ports()) {
        if (s == keep) continue;
        port[b] = s;
        std::vector<int> route_of = best_route;
        const double c = model.route(port, best_hubs, route_of);
        if (detail::improves(c, best)) {
          best = c;
          choice = s;
          best_route = route_of;
        }
      }
      port[b] = choice;
    }
    if (!detail::improves(best, current)) break;
    current = best;
    hubs = best_hubs;
    r.port = port;
    r.route = best_route;
  }
  for (std::size_t h = 0; h < nb; ++h) r.hubs[h] = (hubs >> h) & 1u;
  r.cost = current;
  return r;
}

inline DestinationResult solve_single_destination(const Instance& inst,
                                                  std::size_t t,
                                                  std::size_t hub_budget) {
  require_valid(inst);
  return solve_single_destination(inst, CostCurves(inst), t, hub_budget);
}

struct TwoStageResult {
  std::vector<DestinationResult> per_destination;
  Solution merged;              // repaired, feasible
  ViolationReport violations;   // of the plain merge, before repair
  CostBreakdown cost;           // merged, exact land cost
  CostBreakdown approx_cost;    // merged, approximated land cost
};

// Per-destination plans combined into one solution. The plain merge may
// give one branch-port pair several hubs, or route a hub's own volume via
// another hub; both are reported. The repair keeps, per pair, the hub that
// carries the most volume (smallest index on ties) and ships hubs directly.
inline TwoStageResult merge_destinations(const Instance& inst,
                                         std::vector<DestinationResult> parts) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  TwoStageResult out;
  Solution raw = Solution::empty(inst);
  std::vector<std::map<int, double>> via(nb * ns);
  Grid<double> routed(nb, ns, 0.0);
  for (const DestinationResult& d : parts) {
    for (std::size_t b = 0; b < nb; ++b) {
      if (d.hubs[b]) raw.hubs[b] = true;
      const int s = d.port[b];
      if (s == kNone || !(inst.demand(b, d.destination) > 0.0)) continue;
      raw.port_choice(b, d.destination) = s;
      if (d.route[b] != kNone) {
        via[b * ns + s][d.route[b]] += inst.demand(b, d.destination);
        routed(b, s) += inst.demand(b, d.destination);
      }
    }
  }
  Solution fixed = raw;
  const Flows f = compute_flows(inst, raw);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& hubs = via[b * ns + s];
      if (hubs.empty()) continue;
      const double volume = f.port_volume(b, s);
      const double y = std::clamp(1.0 - routed(b, s) / volume, 0.0, 1.0);
      for (const auto& [h, v] : hubs) raw.hub_choice(b, s).push_back(h);
      raw.direct_fraction(b, s) = y;
      if (fixed.hubs[b]) continue;
      int best = kNone;
      double best_volume = -1.0;
      for (const auto& [h, v] : hubs) {
        if (v > best_volume) {
          best = h;
          best_volume = v;
        }
      }
      fixed.set_hub(b, s, best);
      fixed.direct_fraction(b, s) = y;
    }
  }
  out.violations = check_feasibility(inst, raw);
  out.merged = fixed;
  const CostCurves curves(inst);
  out.cost = evaluate_cost(curves, fixed, CostMode::kExact);
  out.approx_cost = evaluate_cost(curves, fixed, CostMode::kApprox);
  out.per_destination = std::move(parts);
  return out;
}

inline TwoStageResult solve_two_stage(const Instance& inst,
                                      std::size_t hub_budget = 2,
                                      int threads = 0) {
  require_valid(inst);
  const CostCurves curves(inst);
  const std::size_t nt = inst.num_destinations();
  std::vector<DestinationResult> parts(nt);
  parallel_blocks(nt, threads, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      parts[t] = solve_single_destination(inst, curves, t, hub_budget);
    }
  });
  return merge_destinations(inst, std::move(parts));
}

struct NoHubResult {
  Solution solution;
  CostBreakdown cost;
  bool proven_optimal = false;
  std::uint64_t nodes = 0;
};

struct NoHubOptions {
  CostMode mode = CostMode::kApprox;
  std::uint64_t node_budget = 20'000'000;
  double time_budget_s = 0.0;  // 0 = unlimited
};

// Best port assignment with every shipment sent directly. Depth-first
// branch and bound over the positive-demand pairs; all cost terms grow with
// volume, so the cost of a partial assignment bounds its completions. The
// budget is only checked once a full assignment exists.
inline NoHubResult solve_no_hubs(const Instance& inst,
                                 const NoHubOptions& opt = {}) {
  require_valid(inst);
  const CostCurves curves(inst);
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const bool exact = opt.mode == CostMode::kExact;
  struct Pair {
    int b, t;
    double v;
    std::vector<int> ports;
  };
  std::vector<Pair> pairs;
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      const double v = inst.demand(b, t);
      if (!(v > 0.0)) continue;
      Pair p{static_cast<int>(b), static_cast<int>(t), v, {}};
      for (std::size_t s = 0; s < ns; ++s) {
        if (inst.usable(s, t)) p.ports.push_back(static_cast<int>(s));
      }
      pairs.push_back(std::move(p));
    }
  }
  // Larger shipments first tighten the bound sooner.
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.v > b.v; });
  std::vector<double> rest_bound(pairs.size() + 1, 0.0);
  for (std::size_t i = pairs.size(); i-- > 0;) {
    double g = std::numeric_limits<double>::infinity();
    for (int s : pairs[i].ports) g = std::min(g, inst.port_consol_cost[s]);
    rest_bound[i] = rest_bound[i + 1] + g * pairs[i].v;
  }
  Grid<double> land(nb, ns, 0.0);
  Grid<double> sea(ns, inst.num_destinations(), 0.0);
  auto delta = [&](const Pair& p, int s) {
    const double old_land = land(p.b, s);
    const double old_sea = sea(s, p.t);
    return inst.port_consol_cost[s] * p.v +
           curves.land(p.b, nb + s, old_land + p.v, exact) -
           curves.land(p.b, nb + s, old_land, exact) +
           curves.sea(s, p.t, old_sea + p.v) - curves.sea(s, p.t, old_sea);
  };
  std::vector<int> choice(pairs.size(), kNone);
  std::vector<int> best_choice;
  double best = std::numeric_limits<double>::infinity();
  NoHubResult result;
  result.proven_optimal = true;
  const auto start = std::chrono::steady_clock::now();
  auto out_of_budget = [&] {
    if (result.nodes >= opt.node_budget) return true;
    if (opt.time_budget_s > 0.0 && (result.nodes & 1023) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
      return el.count() > opt.time_budget_s;
    }
    return false;
  };
  auto dfs = [&](auto&& self, std::size_t i, double partial) -> void {
    if (i == pairs.size()) {
      if (partial < best) {
        best = partial;
        best_choice = choice;
      }
      return;
    }
    const Pair& p = pairs[i];
    std::vector<std::pair<double, int>> order;
    for (int s : p.ports) order.emplace_back(delta(p, s), s);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [d, s] : order) {
      if (!best_choice.empty() && out_of_budget()) {
        result.proven_optimal = false;
        return;
      }
      const double bound = partial + d + rest_bound[i + 1];
      if (!best_choice.empty() &&
          !(bound < best - 1e-9 * std::max(1.0, std::abs(best)))) {
        continue;
      }
      ++result.nodes;
      land(p.b, s) += p.v;
      sea(s, p.t) += p.v;
      choice[i] = s;
      self(self, i + 1, partial + d);
      land(p.b, s) -= p.v;
      sea(s, p.t) -= p.v;
      if (std::abs(land(p.b, s)) < kVolumeTol) land(p.b, s) = 0.0;
      if (std::abs(sea(s, p.t)) < kVolumeTol) sea(s, p.t) = 0.0;
    }
  };
  dfs(dfs, 0, 0.0);
  Solution sol = Solution::empty(inst);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    sol.port_choice(pairs[i].b, pairs[i].t) = best_choice[i];
  }
  result.solution = sol;
  result.cost = evaluate_cost(curves, sol, opt.mode);
  return result;
}

struct LocalSearchOptions {
  std::size_t max_rounds = 100;
  CostMode mode = CostMode::kApprox;
  bool toggle_hub = true;
  bool reassign_port = true;
  bool reassign_hub = true;
  bool adjust_split = true;
  double time_budget_s = 0.0;  // 0 = unlimited
};

namespace detail {

// Direct fractions that put one of the three arcs touched by (b, s) exactly
// on a breakpoint of its approximated cost curve.
inline std::vector<double> split_candidates(const CostCurves& curves,
                                            const Solution& sol,
                                            const Flows& f, std::size_t b,
                                            std::size_t s) {
  const Instance& inst = curves.instance();
  const std::size_t nb = inst.num_branches();
  const int h = sol.hub_of(b, s);
  const double volume = f.port_volume(b, s);
  std::vector<double> out = {0.0, 1.0};
  if (h == kNone || volume <= 0.0) return out;
  const double via = f.via_hub_volume(b, s);
  // Loads of each arc excluding this pair's share, and how the share moves it.
  struct Arc {
    const ApproxLandCurve* curve;
    double other;
    bool grows_with_via;
  };
  const Arc arcs[] = {
      {&curves.curve(b, nb + s), f.arc_to_port(b, s) - f.direct_volume(b, s), false},
      {&curves.curve(b, h), f.arc_to_hub(b, h) - via, true},
      {&curves.curve(h, nb + s), f.arc_to_port(h, s) - via, true},
  };
  for (const Arc& a : arcs) {
    const double cap = a.curve->container_volume();
    const double lo = a.other;
    const double hi = a.other + volume;
    for (double base = std::floor(lo / cap) * cap; base <= hi; base += cap) {
      for (double bp : a.curve->breakpoints) {
        const double load = base + bp;
        if (load < lo || load > hi) continue;
        const double share = (load - a.other) / volume;
        out.push_back(std::clamp(a.grows_with_via ? 1.0 - share : share, 0.0, 1.0));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// First-improvement local search over hub toggles, port reassignments, hub
// reassignments and direct-fraction adjustments.
inline Solution local_search_improve(const Instance& inst, const Solution& start,
                                     const LocalSearchOptions& opt = {}) {
  require_valid(inst);
  {
    ViolationReport report = check_feasibility(inst, start);
    if (!report.feasible()) throw InfeasibleSolutionError(std::move(report));
  }
  const CostCurves curves(inst);
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const std::size_t nt = inst.num_destinations();
  auto cost_of = [&](const Solution& s) {
    return evaluate_flows(curves, s, compute_flows(inst, s), opt.mode).total;
  };
  Solution cur = start;
  double cur_cost = cost_of(cur);
  const auto t0 = std::chrono::steady_clock::now();
  auto expired = [&] {
    if (opt.time_budget_s <= 0.0) return false;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
    return el.count() > opt.time_budget_s;
  };
  auto accept = [&](Solution& cand) {
    const double c = cost_of(cand);
    if (detail::improves(c, cur_cost)) {
      cur = std::move(cand);
      cur_cost = c;
      return true;
    }
    return false;
  };
  for (std::size_t round = 0; round < opt.max_rounds; ++round) {
    bool improved = false;
    if (opt.toggle_hub) {
      for (std::size_t h = 0; h < nb && !expired(); ++h) {
        Solution cand = cur;
        if (cand.hubs[h]) {
          cand.hubs[h] = false;
          for (std::size_t b = 0; b < nb; ++b) {
            for (std::size_t s = 0; s < ns; ++s) {
              if (cand.hub_of(b, s) == static_cast<int>(h)) {
                cand.set_hub(b, s, kNone);
                cand.direct_fraction(b, s) = 1.0;
              }
            }
          }
        } else {
          cand.hubs[h] = true;
          for (std::size_t s = 0; s < ns; ++s) {
            cand.set_hub(h, s, kNone);
            cand.direct_fraction(h, s) = 1.0;
          }
        }
        improved |= accept(cand);
      }
    }
    if (opt.reassign_port) {
      for (std::size_t b = 0; b < nb && !expired(); ++b) {
        for (std::size_t t = 0; t < nt; ++t) {
          if (!(inst.demand(b, t) > 0.0)) continue;
          for (std::size_t s = 0; s < ns; ++s) {
            if (!inst.usable(s, t) || cur.port_choice(b, t) == static_cast<int>(s)) continue;
            Solution cand = cur;
            cand.port_choice(b, t) = static_cast<int>(s);
            improved |= accept(cand);
          }
        }
      }
    }
    if (opt.reassign_hub) {
      for (std::size_t b = 0; b < nb && !expired(); ++b) {
        if (cur.hubs[b]) continue;
        for (std::size_t s = 0; s < ns; ++s) {
          const int now = cur.hub_of(b, s);
          for (int h = -1; h < static_cast<int>(nb); ++h) {
            if (h == now || h == static_cast<int>(b)) continue;
            if (h != kNone && !cur.hubs[h]) continue;
            Solution cand = cur;
            cand.set_hub(b, s, h);
            if (h == kNone) {
              cand.direct_fraction(b, s) = 1.0;
            } else if (now == kNone) {
              cand.direct_fraction(b, s) = 0.0;
            }
            improved |= accept(cand);
          }
        }
      }
    }
    if (opt.adjust_split) {
      for (std::size_t b = 0; b < nb && !expired(); ++b) {
        for (std::size_t s = 0; s < ns; ++s) {
          if (cur.hub_of(b, s) == kNone) continue;
          const Flows f = compute_flows(inst, cur);
          for (double y : detail::split_candidates(curves, cur, f, b, s)) {
            if (y == cur.direct_fraction(b, s)) continue;
            Solution cand = cur;
            cand.direct_fraction(b, s) = y;
            improved |= accept(cand);
          }
        }
      }
    }
    if (!improved || expired()) break;
  }
  return cur;
}

}  // namespace hublocate
