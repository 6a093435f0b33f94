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
#include <random>
#include <string>
#include <vector>

#include "hublocate/cost_model.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/network_model.hpp"

namespace hublocate {

enum class Profile { kUniform, kConsolidationFavorable, kNvoccOnlyMix };

inline const char* to_string(Profile p) {
  switch (p) {
    case Profile::kUniform: return "uniform";
    case Profile::kConsolidationFavorable: return "consolidation_favorable";
    case Profile::kNvoccOnlyMix: return "nvocc_only_mix";
  }
  return "?";
}

inline Profile parse_profile(const std::string& name) {
  if (name == "uniform") return Profile::kUniform;
  if (name == "consolidation_favorable") return Profile::kConsolidationFavorable;
  if (name == "nvocc_only_mix") return Profile::kNvoccOnlyMix;
  throw Error("unknown profile '" + name + "'");
}

struct GenOptions {
  std::uint64_t seed = 42;
  std::size_t branches = 4;
  std::size_t origin_ports = 2;
  std::size_t destinations = 2;
  double density = 1.0;  // probability that a (branch, destination) pair ships
  Profile profile = Profile::kUniform;
  std::size_t volume_bands = 8;
};

namespace detail {

// Portable draws on top of the standard engine.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

inline double round_to(double x, double step) {
  return std::round(x / step) * step;
}

inline std::vector<std::string> make_ids(char prefix, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(n).size());
  std::vector<std::string> ids;
  for (std::size_t i = 1; i <= n; ++i) {
    std::string num = std::to_string(i);
    ids.push_back(std::string(1, prefix) + std::string(width - num.size(), '0') + num);
  }
  return ids;
}

}  // namespace detail

inline Instance generate(const GenOptions& opt) {
  if (opt.branches < 1 || opt.origin_ports < 1 || opt.destinations < 1) {
    throw Error("generator sizes must be at least 1");
  }
  if (!(opt.density > 0.0 && opt.density <= 1.0)) {
    throw Error("density must lie in (0, 1]");
  }
  if (opt.volume_bands < 1) throw Error("at least one volume band is required");
  detail::Sampler rng(opt.seed);
  const bool consolidate = opt.profile == Profile::kConsolidationFavorable;

  Instance inst = Instance::sized({detail::make_ids('B', opt.branches),
                                   detail::make_ids('S', opt.origin_ports),
                                   detail::make_ids('T', opt.destinations)});
  const std::size_t nb = opt.branches;
  const std::size_t ns = opt.origin_ports;
  const std::size_t nt = opt.destinations;
  const double cap = inst.params.land_container_volume;

  struct Point {
    double x, y;
  };
  std::vector<Point> branch_at(nb);
  std::vector<Point> port_at(ns);
  if (consolidate) {
    const Point center{rng.uniform(50, 150), rng.uniform(50, 150)};
    for (Point& p : branch_at) {
      p = {center.x + rng.uniform(-40, 40), center.y + rng.uniform(-40, 40)};
    }
    for (Point& p : port_at) p = {rng.uniform(380, 480), rng.uniform(380, 480)};
  } else {
    for (Point& p : branch_at) p = {rng.uniform(0, 500), rng.uniform(0, 500)};
    for (Point& p : port_at) p = {rng.uniform(0, 500), rng.uniform(0, 500)};
  }
  auto km = [](Point a, Point b) {
    return std::round(std::hypot(a.x - b.x, a.y - b.y));
  };
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t h = 0; h < nb; ++h) {
      if (h != b) inst.distance(b, h) = km(branch_at[b], branch_at[h]);
    }
    for (std::size_t s = 0; s < ns; ++s) {
      inst.distance(b, nb + s) = km(branch_at[b], port_at[s]);
    }
  }

  LandCostTable& table = inst.land_costs;
  table.distance_breaks = {0, 50, 100, 200, 350, 550, 800};
  const std::size_t bands = opt.volume_bands;
  for (std::size_t i = 1; i <= bands; ++i) {
    const double share = static_cast<double>(i) / static_cast<double>(bands);
    table.volume_breaks.push_back(
        i == bands ? cap : detail::round_to(cap * std::pow(share, 1.5), 0.01));
  }
  table.cost = Grid<double>(table.distance_breaks.size() - 1, bands, 0.0);
  const double concavity = consolidate ? 0.3 : 0.5;
  for (std::size_t d = 0; d + 1 < table.distance_breaks.size(); ++d) {
    const double mid = 0.5 * (table.distance_breaks[d] + table.distance_breaks[d + 1]);
    const double full = 150.0 + (consolidate ? 1.6 : 1.2) * mid;
    double prev = 0.0;
    for (std::size_t i = 0; i < bands; ++i) {
      const double c = detail::round_to(
          full * std::pow(table.volume_breaks[i] / cap, concavity), 0.01);
      prev = std::max(prev, c);
      table.cost(d, i) = prev;
    }
  }

  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double fcl = detail::round_to(rng.uniform(800, 2500), 0.01);
      const double nvocc = detail::round_to(fcl / rng.uniform(15, 45), 0.01);
      double p_both = 0.7, p_fcl = 0.1, p_nvocc = 0.1;
      if (opt.profile == Profile::kNvoccOnlyMix) {
        p_both = 0.25;
        p_fcl = 0.2;
        p_nvocc = 0.45;
      }
      const double r = rng.uniform();
      SeaRate rate;
      if (s == 0 || r < p_both) {
        rate = {fcl, nvocc};
      } else if (r < p_both + p_fcl) {
        rate = {fcl, std::nullopt};
      } else if (r < p_both + p_fcl + p_nvocc) {
        rate = {std::nullopt, nvocc};
      } else {
        continue;
      }
      inst.sea_rates(s, t) = rate;
    }
  }

  for (std::size_t b = 0; b < nb; ++b) {
    inst.setup_cost[b] = detail::round_to(
        consolidate ? rng.uniform(20, 120) : rng.uniform(200, 1500), 0.01);
    inst.hub_consol_cost[b] = detail::round_to(
        consolidate ? rng.uniform(0.5, 2) : rng.uniform(2, 8), 0.01);
  }
  for (std::size_t s = 0; s < ns; ++s) {
    inst.port_consol_cost[s] = detail::round_to(rng.uniform(1, 5), 0.01);
  }
  const double min_volume = consolidate ? 3.0 : 0.1;
  const double max_volume = consolidate ? 15.0 : 30.0;
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (!rng.chance(opt.density)) continue;
      inst.demand(b, t) =
          std::max(0.1, detail::round_to(rng.log_uniform(min_volume, max_volume), 0.1));
    }
  }
  return inst;
}

}  // namespace hublocate
