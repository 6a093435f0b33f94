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
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hublocate.hpp"

namespace hublocate::testing {

// Land cost from the tariff definition: v = n * cap + u with n maximal.
inline double reference_land_exact(const std::vector<double>& breaks,
                                   const std::vector<double>& row, double v) {
  const double cap = breaks.back();
  if (v <= 1e-12) return 0.0;
  long n = static_cast<long>(std::floor(v / cap + 1e-12));
  double u = v - static_cast<double>(n) * cap;
  if (u < 1e-9) u = 0.0;
  double cost = static_cast<double>(n) * row.back();
  if (u > 0.0) {
    std::size_t k = 0;
    while (k + 1 < breaks.size() && breaks[k] < u - 1e-9) ++k;
    cost += row[k];
  }
  return cost;
}

// Approximated land cost from its definition: linear head on [0, cap/10],
// then the tariff value at the right end of each interval, per container.
inline double reference_land_approx(const std::vector<double>& breaks,
                                    const std::vector<double>& row, double v) {
  const double cap = breaks.back();
  const double head = cap / 10.0;
  auto tariff = [&](double x) {
    std::size_t k = 0;
    while (k + 1 < breaks.size() && breaks[k] < x - 1e-9) ++k;
    return row[k];
  };
  if (v <= 1e-12) return 0.0;
  long n = static_cast<long>(std::floor(v / cap + 1e-12));
  double u = v - static_cast<double>(n) * cap;
  if (u < 1e-9) u = 0.0;
  double cost = static_cast<double>(n) * tariff(cap);
  if (u == 0.0) return cost;
  if (u <= head + 1e-9) return cost + u / head * tariff(head);
  std::vector<double> points = {head};
  for (double b : breaks) {
    if (b > head + 1e-9) points.push_back(b);
  }
  for (double p : points) {
    if (u <= p + 1e-9) return cost + tariff(p);
  }
  return cost + tariff(cap);
}

// Sea cost by enumerating container counts; the NVOCC share is the
// remainder, which is the cheapest admissible u for that count.
inline double reference_sea(std::optional<double> fcl, std::optional<double> nvocc,
                            double v, double u_cont, double u_lim,
                            double penalty) {
  if (v <= 1e-12) return 0.0;
  const double price = fcl ? *fcl : penalty;
  const double lim = nvocc ? u_lim : 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (long n = 0; n <= static_cast<long>(std::ceil(v / u_cont)) + 1; ++n) {
    const double rest = std::max(0.0, v - static_cast<double>(n) * u_cont);
    if (rest > lim + 1e-9) continue;
    best = std::min(best, static_cast<double>(n) * price + (nvocc ? rest * *nvocc : 0.0));
  }
  return best;
}

inline std::vector<double> table_row(const LandCostTable& t, std::size_t band) {
  std::vector<double> row;
  for (std::size_t k = 0; k < t.cost.cols(); ++k) row.push_back(t.cost(band, k));
  return row;
}

// Two volume bands, two distance bands.
inline LandCostTable toy_table() {
  LandCostTable t;
  t.distance_breaks = {0, 100, 1000};
  t.volume_breaks = {40, 80};
  t.cost = Grid<double>(2, 2);
  t.cost(0, 0) = 100;
  t.cost(0, 1) = 150;
  t.cost(1, 0) = 200;
  t.cost(1, 1) = 300;
  return t;
}

inline void set_distance(Instance& inst, const std::string& a,
                         const std::string& b, double km) {
  const NodeSets& n = inst.nodes;
  const int ia = index_of(n.branches, a);
  const int ib = index_of(n.branches, b);
  const std::size_t nb = n.branches.size();
  if (ib != kNone) {
    inst.distance(ia, ib) = km;
    inst.distance(ib, ia) = km;
  } else {
    inst.distance(ia, nb + index_of(n.origin_ports, b)) = km;
  }
}

inline void set_demand(Instance& inst, const std::string& b,
                       const std::string& t, double v) {
  inst.demand(index_of(inst.nodes.branches, b),
              index_of(inst.nodes.destination_ports, t)) = v;
}

inline void set_rate(Instance& inst, const std::string& s, const std::string& t,
                     std::optional<double> fcl, std::optional<double> nvocc) {
  inst.sea_rates(index_of(inst.nodes.origin_ports, s),
                 index_of(inst.nodes.destination_ports, t)) = SeaRate{fcl, nvocc};
}

// Two branches, one origin port, one destination.
inline Instance small_instance() {
  Instance inst = Instance::sized({{"B1", "B2"}, {"S1"}, {"T1"}});
  inst.land_costs = toy_table();
  set_distance(inst, "B1", "B2", 20);
  set_distance(inst, "B1", "S1", 50);
  set_distance(inst, "B2", "S1", 150);
  set_demand(inst, "B1", "T1", 5);
  set_demand(inst, "B2", "T1", 12);
  set_rate(inst, "S1", "T1", 1000.0, 40.0);
  inst.setup_cost = {70, 90};
  inst.hub_consol_cost = {2, 3};
  inst.port_consol_cost = {4};
  return inst;
}

// Flat small-volume tariff: a partly filled container costs nearly as much
// as a full one, so sharing a leg pays off.
inline LandCostTable flat_table() {
  LandCostTable t;
  t.distance_breaks = {0, 100, 2000};
  t.volume_breaks = {10, 80};
  t.cost = Grid<double>(2, 2);
  t.cost(0, 0) = 100;
  t.cost(0, 1) = 110;
  t.cost(1, 0) = 1000;
  t.cost(1, 1) = 1100;
  return t;
}

// B2 sits next to port S1 and consolidates cheaply; B1 and B3 are far from
// both ports but close to B2.
inline Instance consolidation_instance() {
  Instance inst = Instance::sized({{"B1", "B2", "B3"}, {"S1", "S2"}, {"T1"}});
  inst.land_costs = flat_table();
  set_distance(inst, "B1", "B2", 30);
  set_distance(inst, "B1", "B3", 60);
  set_distance(inst, "B2", "B3", 30);
  set_distance(inst, "B1", "S1", 500);
  set_distance(inst, "B1", "S2", 700);
  set_distance(inst, "B2", "S1", 40);
  set_distance(inst, "B2", "S2", 600);
  set_distance(inst, "B3", "S1", 450);
  set_distance(inst, "B3", "S2", 800);
  set_demand(inst, "B1", "T1", 3);
  set_demand(inst, "B2", "T1", 2);
  set_demand(inst, "B3", "T1", 4);
  set_rate(inst, "S1", "T1", 900.0, 40.0);
  set_rate(inst, "S2", "T1", 900.0, 42.0);
  inst.setup_cost = {500, 50, 500};
  inst.hub_consol_cost = {5, 1, 5};
  inst.port_consol_cost = {2, 2};
  return inst;
}

// Per destination a different hub is best for B1 towards the only port:
// B2 for T1 (shares B2's own leg), B3 for T2.
inline Instance split_hub_instance() {
  Instance inst = Instance::sized({{"B1", "B2", "B3"}, {"S1"}, {"T1", "T2"}});
  inst.land_costs = flat_table();
  set_distance(inst, "B1", "B2", 30);
  set_distance(inst, "B1", "B3", 30);
  set_distance(inst, "B2", "B3", 60);
  set_distance(inst, "B1", "S1", 500);
  set_distance(inst, "B2", "S1", 50);
  set_distance(inst, "B3", "S1", 50);
  set_demand(inst, "B1", "T1", 5);
  set_demand(inst, "B2", "T1", 5);
  set_demand(inst, "B1", "T2", 5);
  set_demand(inst, "B3", "T2", 5);
  set_rate(inst, "S1", "T1", 900.0, 40.0);
  set_rate(inst, "S1", "T2", 900.0, 40.0);
  inst.setup_cost = {50, 50, 50};
  inst.hub_consol_cost = {1, 1, 1};
  inst.port_consol_cost = {2};
  return inst;
}

// Random instance whose volumes and breakpoints are whole numbers, so some
// optimal hub split puts every flow on an integer.
inline Instance integer_instance(std::uint64_t seed, std::size_t nb,
                                 std::size_t ns, std::size_t nt,
                                 double density) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  std::vector<std::string> b, s, t;
  for (std::size_t i = 0; i < nb; ++i) b.push_back("B" + std::to_string(i + 1));
  for (std::size_t i = 0; i < ns; ++i) s.push_back("S" + std::to_string(i + 1));
  for (std::size_t i = 0; i < nt; ++i) t.push_back("T" + std::to_string(i + 1));
  Instance inst = Instance::sized({b, s, t});
  inst.params.land_container_volume = 10;
  inst.params.sea_container_volume = 8;
  inst.params.nvocc_cap = 6;
  LandCostTable& lt = inst.land_costs;
  lt.distance_breaks = {0, 50, 150, 1000};
  lt.volume_breaks = {2, 5, 10};
  lt.cost = Grid<double>(3, 3);
  for (std::size_t d = 0; d < 3; ++d) {
    double c = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      c += uni(10, 60) * (1.0 + static_cast<double>(d));
      lt.cost(d, k) = c;
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t r = 0; r < nb + ns; ++r) {
      if (r == i) continue;
      if (r < nb && r < i) {
        inst.distance(i, r) = inst.distance(r, i);
      } else {
        inst.distance(i, r) = uni(5, 300);
      }
    }
  }
  for (std::size_t p = 0; p < ns; ++p) {
    for (std::size_t q = 0; q < nt; ++q) {
      const int kind = p == 0 ? 0 : uni(0, 3);
      const double fcl = uni(60, 200);
      const double nv = uni(8, 30);
      if (kind == 0 || kind == 3) inst.sea_rates(p, q) = SeaRate{fcl, nv};
      if (kind == 1) inst.sea_rates(p, q) = SeaRate{fcl, std::nullopt};
      if (kind == 2) inst.sea_rates(p, q) = SeaRate{std::nullopt, nv};
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    inst.setup_cost[i] = uni(0, 60);
    inst.hub_consol_cost[i] = uni(0, 4);
  }
  for (std::size_t p = 0; p < ns; ++p) inst.port_consol_cost[p] = uni(0, 3);
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t q = 0; q < nt; ++q) {
      if (static_cast<double>(rng() % 1000) < density * 1000) {
        inst.demand(i, q) = uni(1, 4);
      }
    }
  }
  return inst;
}

// Independent objective: flows and all six terms recomputed from scratch
// with the reference cost functions. Hub choice sets must be singletons.
inline double reference_total(const Instance& inst, const Solution& sol,
                              bool exact) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  const std::size_t nt = inst.num_destinations();
  const LandCostTable& lt = inst.land_costs;
  auto land = [&](std::size_t b, std::size_t r, double v) {
    const double d = inst.distance(b, r);
    std::size_t band = 0;
    while (band + 2 < lt.distance_breaks.size() && d >= lt.distance_breaks[band + 1]) ++band;
    const auto row = table_row(lt, band);
    return exact ? reference_land_exact(lt.volume_breaks, row, v)
                 : reference_land_approx(lt.volume_breaks, row, v);
  };
  std::map<std::pair<std::size_t, std::size_t>, double> to_port, to_hub;
  std::vector<double> at_port(ns, 0.0), at_hub(nb, 0.0);
  std::map<std::pair<std::size_t, std::size_t>, double> sea;
  double total = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    if (sol.hubs[b]) total += inst.setup_cost[b];
    for (std::size_t s = 0; s < ns; ++s) {
      double v = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        if (inst.demand(b, t) > 0 && sol.port_choice(b, t) == static_cast<int>(s)) {
          v += inst.demand(b, t);
          sea[{s, t}] += inst.demand(b, t);
        }
      }
      at_port[s] += v;
      const auto& via = sol.hub_choice(b, s);
      const double direct = via.empty() ? v : sol.direct_fraction(b, s) * v;
      to_port[{b, s}] += direct;
      if (!via.empty()) {
        const std::size_t h = via.front();
        to_hub[{b, h}] += v - direct;
        to_port[{h, s}] += v - direct;
        at_hub[h] += v - direct;
      }
    }
  }
  for (std::size_t h = 0; h < nb; ++h) total += inst.hub_consol_cost[h] * at_hub[h];
  for (std::size_t s = 0; s < ns; ++s) total += inst.port_consol_cost[s] * at_port[s];
  for (const auto& [k, v] : to_port) total += land(k.first, nb + k.second, v);
  for (const auto& [k, v] : to_hub) total += land(k.first, k.second, v);
  const Parameters& p = inst.params;
  for (const auto& [k, v] : sea) {
    const SeaRate& r = *inst.sea_rates(k.first, k.second);
    double lim = 0.0;
    if (r.nvocc_per_m3) {
      lim = r.fcl_per_container ? std::min(p.nvocc_cap, *r.fcl_per_container / *r.nvocc_per_m3)
                                : p.nvocc_cap;
    }
    total += reference_sea(r.fcl_per_container, r.nvocc_per_m3, v,
                           p.sea_container_volume, lim, p.penalty);
  }
  return total;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Uniformly random feasible solution.
inline Solution random_solution(const Instance& inst, std::mt19937_64& rng) {
  const std::size_t nb = inst.num_branches();
  const std::size_t ns = inst.num_origin_ports();
  Solution sol = Solution::empty(inst);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      if (!(inst.demand(b, t) > 0.0)) continue;
      std::vector<int> ports;
      for (std::size_t s = 0; s < ns; ++s) {
        if (inst.usable(s, t)) ports.push_back(static_cast<int>(s));
      }
      sol.port_choice(b, t) = ports[rng() % ports.size()];
    }
  }
  for (std::size_t b = 0; b < nb; ++b) sol.hubs[b] = rng() % 3 == 0;
  std::vector<int> hubs;
  for (std::size_t b = 0; b < nb; ++b) {
    if (sol.hubs[b]) hubs.push_back(static_cast<int>(b));
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (sol.hubs[b] || hubs.empty()) continue;
    for (std::size_t s = 0; s < ns; ++s) {
      if (rng() % 2 == 0) continue;
      sol.set_hub(b, s, hubs[rng() % hubs.size()]);
      const int pick = static_cast<int>(rng() % 4);
      sol.direct_fraction(b, s) =
          pick == 0 ? 0.0 : pick == 1 ? 1.0 : static_cast<double>(rng() % 1000) / 1000.0;
    }
  }
  return sol;
}

}  // namespace hublocate::testing
