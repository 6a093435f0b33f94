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
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hublocate/cost_model.hpp"
#include "hublocate/detail/simplex.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/network_model.hpp"
#include "hublocate/parallel.hpp"
#include "hublocate/solution.hpp"

namespace hublocate {

namespace detail {

// A land arc whose load is constant + sign * (sum of the listed edge flows).
struct ComponentArc {
  const ApproxLandCurve* curve = nullptr;
  double constant = 0.0;
  double sign = 1.0;
  std::vector<int> edges;
  std::vector<CostPiece> pieces;
};

struct ComponentResult {
  double cost = 0.0;
  std::vector<double> flow;  // per edge, volume routed through the hub
};

struct HullPoint {
  double x;
  double c;
};

inline std::vector<HullPoint> lower_hull(const std::vector<CostPiece>& pieces,
                                         std::size_t lo, std::size_t hi) {
  std::vector<HullPoint> pts;
  for (std::size_t p = lo; p <= hi; ++p) {
    pts.push_back({pieces[p].lo, pieces[p].value_lo});
    pts.push_back({pieces[p].hi, pieces[p].value_hi});
  }
  std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
    return a.x < b.x || (a.x == b.x && a.c < b.c);
  });
  std::vector<HullPoint> hull;
  for (const HullPoint& p : pts) {
    if (!hull.empty() && hull.back().x == p.x) continue;
    while (hull.size() >= 2) {
      const HullPoint& a = hull[hull.size() - 2];
      const HullPoint& b = hull.back();
      const double cross = (b.x - a.x) * (p.c - a.c) - (b.c - a.c) * (p.x - a.x);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

// Cheapest piece in [lo, hi] covering x, or hi + 1 when none does.
inline std::size_t covering_piece(const std::vector<CostPiece>& pieces,
                                  std::size_t lo, std::size_t hi, double x,
                                  double* value) {
  std::size_t best = hi + 1;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t p = lo; p <= hi; ++p) {
    if (x < pieces[p].lo - kVolumeTol || x > pieces[p].hi + kVolumeTol) continue;
    const double v = pieces[p].at(std::clamp(x, pieces[p].lo, pieces[p].hi));
    if (v < best_value) {
      best_value = v;
      best = p;
    }
  }
  *value = best_value;
  return best;
}

// Minimizes linear * sum(flow) + sum over arcs of the approximated land cost
// of the arc load, over 0 <= flow_e <= volume_e. Branch and bound over
// piece ranges; each node is bounded by the LP over lower convex hulls.
inline ComponentResult solve_component(const std::vector<double>& volume,
                                       double linear,
                                       std::vector<ComponentArc> arcs) {
  const std::size_t ne = volume.size();
  const std::size_t na = arcs.size();
  auto true_cost = [&](const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t e = 0; e < ne; ++e) total += linear * w[e];
    for (const ComponentArc& a : arcs) {
      double load = a.constant;
      for (int e : a.edges) load += a.sign * w[e];
      total += land_cost_approx(*a.curve, std::max(0.0, load));
    }
    return total;
  };
  ComponentResult best;
  best.flow.assign(ne, 0.0);
  best.cost = true_cost(best.flow);
  {
    std::vector<double> full(volume);
    const double c = true_cost(full);
    if (c < best.cost) best = {c, full};
  }

  using Ranges = std::vector<std::pair<std::size_t, std::size_t>>;
  Ranges root(na);
  for (std::size_t a = 0; a < na; ++a) root[a] = {0, arcs[a].pieces.size() - 1};
  std::vector<Ranges> stack = {root};
  while (!stack.empty()) {
    const Ranges node = std::move(stack.back());
    stack.pop_back();
    std::vector<std::vector<HullPoint>> hulls(na);
    std::size_t nvars = ne;
    std::vector<std::size_t> offset(na);
    for (std::size_t a = 0; a < na; ++a) {
      hulls[a] = lower_hull(arcs[a].pieces, node[a].first, node[a].second);
      offset[a] = nvars;
      nvars += hulls[a].size();
    }
    LpProblem lp;
    lp.num_vars = nvars;
    lp.cost.assign(nvars, 0.0);
    lp.upper.assign(nvars, std::numeric_limits<double>::infinity());
    for (std::size_t e = 0; e < ne; ++e) {
      lp.cost[e] = linear;
      lp.upper[e] = volume[e];
    }
    for (std::size_t a = 0; a < na; ++a) {
      std::vector<double> load(nvars, 0.0);
      std::vector<double> convex(nvars, 0.0);
      for (std::size_t k = 0; k < hulls[a].size(); ++k) {
        lp.cost[offset[a] + k] = hulls[a][k].c;
        load[offset[a] + k] = hulls[a][k].x;
        convex[offset[a] + k] = 1.0;
      }
      for (int e : arcs[a].edges) load[e] -= arcs[a].sign;
      lp.rows.push_back(std::move(load));
      lp.rhs.push_back(arcs[a].constant);
      lp.rows.push_back(std::move(convex));
      lp.rhs.push_back(1.0);
    }
    const LpResult sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) continue;
    const double tol = 1e-9 * std::max(1.0, std::abs(best.cost));
    if (sol.objective >= best.cost - tol) continue;
    std::vector<double> w(sol.x.begin(), sol.x.begin() + ne);
    for (std::size_t e = 0; e < ne; ++e) w[e] = std::clamp(w[e], 0.0, volume[e]);
    const double c = true_cost(w);
    if (c < best.cost) best = {c, w};

    // Branch on the arc whose hull underestimates its cost the most.
    std::size_t branch_arc = na;
    std::size_t branch_piece = 0;
    double worst_gap = 1e-9 * std::max(1.0, std::abs(sol.objective));
    for (std::size_t a = 0; a < na; ++a) {
      if (node[a].first == node[a].second) continue;
      double load = 0.0;
      double hull_value = 0.0;
      for (std::size_t k = 0; k < hulls[a].size(); ++k) {
        load += sol.x[offset[a] + k] * hulls[a][k].x;
        hull_value += sol.x[offset[a] + k] * hulls[a][k].c;
      }
      double value = 0.0;
      const std::size_t p = covering_piece(arcs[a].pieces, node[a].first,
                                           node[a].second, load, &value);
      if (p > node[a].second) continue;
      const double gap = value - hull_value;
      if (gap > worst_gap) {
        worst_gap = gap;
        branch_arc = a;
        branch_piece = p;
      }
    }
    if (branch_arc == na) continue;
    const auto [lo, hi] = node[branch_arc];
    auto child = [&](std::size_t a_lo, std::size_t a_hi) {
      Ranges r = node;
      r[branch_arc] = {a_lo, a_hi};
      stack.push_back(std::move(r));
    };
    if (branch_piece < hi) child(branch_piece + 1, hi);
    if (branch_piece > lo) child(lo, branch_piece - 1);
    child(branch_piece, branch_piece);
  }
  return best;
}

}  // namespace detail

struct OracleLimits {
  std::size_t max_branches = 6;
  std::size_t max_ports = 4;
  std::size_t max_destinations = 4;
  std::size_t max_hub_set_size = std::numeric_limits<std::size_t>::max();
  double budget = 1e8;  // configurations
  int threads = 0;      // 0 = all cores
};

struct OracleResult {
  Solution solution;
  CostBreakdown cost;        // approximated land cost, the optimized target
  CostBreakdown exact_cost;  // same solution under the exact land cost
  std::uint64_t evaluated = 0;
};

namespace detail {

struct OracleSetup {
  const Instance* inst = nullptr;
  std::vector<std::pair<int, int>> pairs;  // positive-demand (b, t)
  std::vector<std::vector<int>> options;   // usable ports per pair
  std::vector<std::uint32_t> hub_sets;     // masks by size, then lexicographic
  std::uint64_t num_z = 1;
};

inline std::vector<std::uint32_t> ordered_hub_sets(std::size_t nb,
                                                   std::size_t max_size) {
  std::vector<std::uint32_t> sets;
  for (std::size_t k = 0; k <= std::min(nb, max_size); ++k) {
    std::vector<int> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = static_cast<int>(i);
    while (true) {
      std::uint32_t mask = 0;
      for (int i : pick) mask |= 1u << i;
      sets.push_back(mask);
      int i = static_cast<int>(k) - 1;
      while (i >= 0 && pick[i] == static_cast<int>(nb - k) + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (std::size_t q = i + 1; q < k; ++q) pick[q] = pick[q - 1] + 1;
    }
  }
  return sets;
}

inline OracleSetup oracle_setup(const Instance& inst, const OracleLimits& limits) {
  OracleSetup s;
  s.inst = &inst;
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      if (!(inst.demand(b, t) > 0.0)) continue;
      s.pairs.emplace_back(static_cast<int>(b), static_cast<int>(t));
      std::vector<int> opts;
      for (std::size_t p = 0; p < inst.num_origin_ports(); ++p) {
        if (inst.usable(p, t)) opts.push_back(static_cast<int>(p));
      }
      s.options.push_back(std::move(opts));
    }
  }
  s.hub_sets = ordered_hub_sets(inst.num_branches(), limits.max_hub_set_size);
  return s;
}

}  // namespace detail

// Upper bound on the number of configurations enumerate_optimal visits.
inline double oracle_size_estimate(const Instance& inst,
                                   const OracleLimits& limits) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  double num_z = 1.0;
  std::vector<double> edges(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    std::vector<bool> port_used(ns, false);
    std::size_t positive = 0;
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      if (!(inst.demand(b, t) > 0.0)) continue;
      ++positive;
      double usable = 0.0;
      for (std::size_t s = 0; s < ns; ++s) {
        if (inst.usable(s, t)) {
          usable += 1.0;
          port_used[s] = true;
        }
      }
      num_z *= std::max(1.0, usable);
    }
    edges[b] = static_cast<double>(std::min<std::size_t>(
        positive, std::count(port_used.begin(), port_used.end(), true)));
  }
  std::sort(edges.begin(), edges.end());
  double per_z = 0.0;
  for (std::size_t k = 0; k <= std::min(nb, limits.max_hub_set_size); ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < nb - k; ++i) e += edges[i + k];
    double sets = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      sets = sets * static_cast<double>(nb - i) / static_cast<double>(i + 1);
    }
    per_z += sets * std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), e);
  }
  return num_z * per_z;
}

namespace detail {

class OracleWorker {
 public:
  OracleWorker(const OracleSetup& setup, const CostCurves& curves)
      : s_(setup), inst_(*setup.inst), curves_(curves) {
    nb_ = inst_.num_branches();
    ns_ = inst_.num_origin_ports();
    nt_ = inst_.num_destinations();
  }

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    std::uint64_t z = 0;
    std::size_t hub_set = 0;
    std::vector<int> assignment;  // hub per edge
    bool found = false;
  };

  std::vector<int> decode_z(std::uint64_t index) const {
    std::vector<int> ports(s_.pairs.size());
    for (std::size_t p = s_.pairs.size(); p-- > 0;) {
      const std::uint64_t radix = s_.options[p].size();
      ports[p] = s_.options[p][index % radix];
      index /= radix;
    }
    return ports;
  }

  Grid<double> port_volumes(const std::vector<int>& ports) const {
    Grid<double> v(nb_, ns_, 0.0);
    for (std::size_t p = 0; p < s_.pairs.size(); ++p) {
      v(s_.pairs[p].first, ports[p]) += inst_.demand(s_.pairs[p].first, s_.pairs[p].second);
    }
    return v;
  }

  double base_cost(const std::vector<int>& ports, const Grid<double>& v) const {
    Grid<double> sea(ns_, nt_, 0.0);
    for (std::size_t p = 0; p < s_.pairs.size(); ++p) {
      sea(ports[p], s_.pairs[p].second) +=
          inst_.demand(s_.pairs[p].first, s_.pairs[p].second);
    }
    double total = 0.0;
    for (std::size_t s = 0; s < ns_; ++s) {
      double port = 0.0;
      for (std::size_t b = 0; b < nb_; ++b) port += v(b, s);
      total += inst_.port_consol_cost[s] * port;
    }
    for (std::size_t s = 0; s < ns_; ++s) {
      for (std::size_t t = 0; t < nt_; ++t) total += curves_.sea(s, t, sea(s, t));
    }
    return total;
  }

  // Edges (b, s) with positive volume whose branch is not a hub.
  std::vector<std::pair<int, int>> edges(std::uint32_t mask,
                                         const Grid<double>& v) const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t b = 0; b < nb_; ++b) {
      if (mask & (1u << b)) continue;
      for (std::size_t s = 0; s < ns_; ++s) {
        if (v(b, s) > 0.0) out.emplace_back(static_cast<int>(b), static_cast<int>(s));
      }
    }
    return out;
  }

  ComponentResult component(int h, const std::vector<std::pair<int, int>>& edges,
                            const Grid<double>& v, bool memo) {
    std::vector<double> key;
    if (memo) {
      key.reserve(1 + ns_ + 3 * edges.size());
      key.push_back(h);
      for (std::size_t s = 0; s < ns_; ++s) key.push_back(v(h, s));
      for (const auto& [b, s] : edges) {
        key.push_back(b);
        key.push_back(s);
        key.push_back(v(b, s));
      }
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    std::vector<double> volume;
    std::vector<ComponentArc> arcs;
    std::vector<int> branch_arc(nb_, -1);
    std::vector<int> port_arc(ns_, -1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [b, s] = edges[e];
      volume.push_back(v(b, s));
      ComponentArc direct;
      direct.curve = &curves_.curve(b, nb_ + s);
      direct.constant = v(b, s);
      direct.sign = -1.0;
      direct.edges = {static_cast<int>(e)};
      arcs.push_back(std::move(direct));
      if (branch_arc[b] < 0) {
        branch_arc[b] = static_cast<int>(arcs.size());
        ComponentArc to_hub;
        to_hub.curve = &curves_.curve(b, h);
        arcs.push_back(std::move(to_hub));
      }
      arcs[branch_arc[b]].edges.push_back(static_cast<int>(e));
      if (port_arc[s] < 0) {
        port_arc[s] = static_cast<int>(arcs.size());
        ComponentArc to_port;
        to_port.curve = &curves_.curve(h, nb_ + s);
        to_port.constant = v(h, s);
        arcs.push_back(std::move(to_port));
      }
      arcs[port_arc[s]].edges.push_back(static_cast<int>(e));
    }
    double fixed = 0.0;
    for (std::size_t s = 0; s < ns_; ++s) {
      if (port_arc[s] < 0) fixed += curves_.land(h, nb_ + s, v(h, s), false);
    }
    for (ComponentArc& a : arcs) {
      double span = 0.0;
      for (int e : a.edges) span += volume[e];
      const double lo = a.sign > 0 ? a.constant : a.constant - span;
      const double hi = a.sign > 0 ? a.constant + span : a.constant;
      a.pieces = approx_pieces(*a.curve, lo, hi);
    }
    ComponentResult r = solve_component(volume, inst_.hub_consol_cost[h], std::move(arcs));
    r.cost += fixed;
    if (memo) memo_.emplace(std::move(key), r);
    return r;
  }

  void run(std::uint64_t z_begin, std::uint64_t z_end) {
    for (std::uint64_t zi = z_begin; zi < z_end; ++zi) {
      const std::vector<int> ports = decode_z(zi);
      const Grid<double> v = port_volumes(ports);
      const double base = base_cost(ports, v);
      for (std::size_t hs = 0; hs < s_.hub_sets.size(); ++hs) {
        const std::uint32_t mask = s_.hub_sets[hs];
        std::vector<int> hubs;
        double setup = 0.0;
        for (std::size_t b = 0; b < nb_; ++b) {
          if (mask & (1u << b)) {
            hubs.push_back(static_cast<int>(b));
            setup += inst_.setup_cost[b];
          }
        }
        const auto es = edges(mask, v);
        if (hubs.empty()) {
          double total = base;
          for (std::size_t b = 0; b < nb_; ++b) {
            for (std::size_t s = 0; s < ns_; ++s) {
              total += curves_.land(b, nb_ + s, v(b, s), false);
            }
          }
          consider(total, zi, hs, {});
          continue;
        }
        if (es.size() < hubs.size()) continue;
        std::vector<int> digit(es.size(), 0);
        while (true) {
          std::vector<int> count(hubs.size(), 0);
          for (int d : digit) ++count[d];
          if (std::find(count.begin(), count.end(), 0) == count.end()) {
            double total = base + setup;
            for (std::size_t k = 0; k < hubs.size(); ++k) {
              std::vector<std::pair<int, int>> mine;
              for (std::size_t e = 0; e < es.size(); ++e) {
                if (digit[e] == static_cast<int>(k)) mine.push_back(es[e]);
              }
              total += component(hubs[k], mine, v, true).cost;
            }
            consider(total, zi, hs, digit);
          }
          std::size_t i = digit.size();
          while (i > 0 && digit[i - 1] == static_cast<int>(hubs.size()) - 1) {
            digit[i - 1] = 0;
            --i;
          }
          if (i == 0) break;
          ++digit[i - 1];
        }
      }
    }
  }

  const Best& best() const { return best_; }
  std::uint64_t evaluated() const { return evaluated_; }

  Solution build(const Best& b) {
    const std::vector<int> ports = decode_z(b.z);
    const Grid<double> v = port_volumes(ports);
    Solution sol = Solution::empty(inst_);
    for (std::size_t p = 0; p < s_.pairs.size(); ++p) {
      sol.port_choice(s_.pairs[p].first, s_.pairs[p].second) = ports[p];
    }
    const std::uint32_t mask = s_.hub_sets[b.hub_set];
    std::vector<int> hubs;
    for (std::size_t h = 0; h < nb_; ++h) {
      if (mask & (1u << h)) {
        sol.hubs[h] = true;
        hubs.push_back(static_cast<int>(h));
      }
    }
    const auto es = edges(mask, v);
    for (std::size_t k = 0; k < hubs.size(); ++k) {
      std::vector<std::pair<int, int>> mine;
      for (std::size_t e = 0; e < es.size(); ++e) {
        if (b.assignment[e] == static_cast<int>(k)) mine.push_back(es[e]);
      }
      const ComponentResult r = component(hubs[k], mine, v, false);
      for (std::size_t e = 0; e < mine.size(); ++e) {
        const auto [br, s] = mine[e];
        const double volume = v(br, s);
        const double w = r.flow[e];
        if (w <= kVolumeTol) continue;
        sol.set_hub(br, s, hubs[k]);
        sol.direct_fraction(br, s) =
            w >= volume - kVolumeTol ? 0.0 : std::clamp((volume - w) / volume, 0.0, 1.0);
      }
    }
    return sol;
  }

 private:
  void consider(double total, std::uint64_t zi, std::size_t hs,
                const std::vector<int>& assignment) {
    ++evaluated_;
    if (total < best_.cost) {
      best_.cost = total;
      best_.z = zi;
      best_.hub_set = hs;
      best_.assignment = assignment;
      best_.found = true;
    }
  }

  const OracleSetup& s_;
  const Instance& inst_;
  const CostCurves& curves_;
  std::size_t nb_ = 0, ns_ = 0, nt_ = 0;
  std::map<std::vector<double>, ComponentResult> memo_;
  Best best_;
  std::uint64_t evaluated_ = 0;
};

}  // namespace detail

// Global minimum of the approximated-cost objective by enumeration of port
// assignments, hub sets and hub choices; the continuous split of each hub's
// traffic is solved exactly by piecewise branch and bound.
inline OracleResult enumerate_optimal(const Instance& inst,
                                      const OracleLimits& limits = {}) {
  require_valid(inst);
  const double estimate = oracle_size_estimate(inst, limits);
  if (inst.num_branches() > limits.max_branches ||
      inst.num_origin_ports() > limits.max_ports ||
      inst.num_destinations() > limits.max_destinations ||
      inst.num_branches() > 31) {
    throw LimitError(estimate, "instance exceeds oracle size limits");
  }
  if (estimate > limits.budget) {
    throw LimitError(estimate, "oracle would evaluate about " +
                                   detail::fmt_num(estimate) +
                                   " configurations, above the budget of " +
                                   detail::fmt_num(limits.budget));
  }
  const CostCurves curves(inst);
  const detail::OracleSetup setup = detail::oracle_setup(inst, limits);
  std::uint64_t num_z = 1;
  for (const auto& o : setup.options) num_z *= o.size();

  std::vector<detail::OracleWorker::Best> bests(
      static_cast<std::size_t>(resolve_threads(limits.threads)));
  std::vector<std::uint64_t> counts(bests.size(), 0);
  parallel_blocks(num_z, limits.threads,
                  [&](int block, std::size_t begin, std::size_t end) {
                    detail::OracleWorker worker(setup, curves);
                    worker.run(begin, end);
                    bests[block] = worker.best();
                    counts[block] = worker.evaluated();
                  });
  detail::OracleWorker::Best best;
  std::uint64_t evaluated = 0;
  for (std::size_t i = 0; i < bests.size(); ++i) {
    evaluated += counts[i];
    if (bests[i].found && bests[i].cost < best.cost) best = bests[i];
  }
  detail::OracleWorker finisher(setup, curves);
  OracleResult result;
  result.solution = finisher.build(best);
  result.cost = evaluate_cost(curves, result.solution, CostMode::kApprox);
  result.exact_cost = evaluate_cost(curves, result.solution, CostMode::kExact);
  result.evaluated = evaluated;
  return result;
}

}  // namespace hublocate
