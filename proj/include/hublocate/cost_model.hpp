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
#include <optional>
#include <string>
#include <vector>

#include "hublocate/errors.hpp"
#include "hublocate/grid.hpp"

namespace hublocate {

// Stepwise land tariff. Distance bands are [d_k, d_{k+1}) except the last,
// which is closed. Volume bands are (w_{i-1}, w_i] with w_{-1} = 0; the last
// volume break is the land container volume.
struct LandCostTable {
  std::vector<double> distance_breaks;
  std::vector<double> volume_breaks;
  Grid<double> cost;  // [distance band][volume band]

  double container_volume() const { return volume_breaks.back(); }
  std::size_t num_distance_bands() const {
    return distance_breaks.size() < 2 ? 0 : distance_breaks.size() - 1;
  }

  std::size_t distance_band(double km) const {
    const std::size_t bands = num_distance_bands();
    if (bands == 0 || !(km >= distance_breaks.front()) ||
        !(km <= distance_breaks.back())) {
      throw RangeError("distance " + std::to_string(km) +
                       " km outside land cost table range");
    }
    auto it = std::upper_bound(distance_breaks.begin(), distance_breaks.end(),
                               km);
    std::size_t band = static_cast<std::size_t>(it - distance_breaks.begin());
    band = band == 0 ? 0 : band - 1;
    return std::min(band, bands - 1);
  }

  // C(x) for 0 <= x <= container volume; C(0) = 0.
  double step_value(std::size_t band, double volume) const {
    if (volume <= kVolumeTol) return 0.0;
    for (std::size_t i = 0; i < volume_breaks.size(); ++i) {
      if (volume <= volume_breaks[i] + kVolumeTol) return cost(band, i);
    }
    return cost(band, volume_breaks.size() - 1);
  }

  friend bool operator==(const LandCostTable&,
                         const LandCostTable&) = default;
};

// v = n * capacity + rest with n maximal. Rests within kVolumeTol of 0 or of
// a full container are snapped.
struct ContainerSplit {
  std::int64_t full = 0;
  double rest = 0.0;
};

inline ContainerSplit split_containers(double volume, double capacity) {
  if (volume <= kVolumeTol) return {};
  double n = std::floor(volume / capacity);
  double rest = volume - n * capacity;
  if (rest >= capacity - kVolumeTol) {
    n += 1;
    rest = 0.0;
  } else if (rest <= kVolumeTol) {
    rest = 0.0;
  }
  return {static_cast<std::int64_t>(n), rest};
}

inline double land_cost_exact_in_band(const LandCostTable& table,
                                      std::size_t band, double volume) {
  const double cap = table.container_volume();
  const ContainerSplit s = split_containers(volume, cap);
  return static_cast<double>(s.full) * table.cost(band, table.volume_breaks.size() - 1) +
         table.step_value(band, s.rest);
}

// Exact stepwise land cost for `volume` m^3 over `dist_km`.
inline double land_cost_exact(const LandCostTable& table, double dist_km,
                              double volume) {
  return land_cost_exact_in_band(table, table.distance_band(dist_km), volume);
}

// Approximated land curve for one distance band: linear from (0, 0) to
// (v0, C0) with v0 = container/10, then constant C_i on (v_{i-1}, v_i].
struct ApproxLandCurve {
  std::vector<double> breakpoints;  // v_0 .. v_j, v_j = container volume
  std::vector<double> values;       // C~_0 .. C~_j

  std::size_t j() const { return breakpoints.size() - 1; }
  double container_volume() const { return breakpoints.back(); }
  double head() const { return breakpoints.front(); }

  friend bool operator==(const ApproxLandCurve&,
                         const ApproxLandCurve&) = default;
};

inline ApproxLandCurve land_breakpoints_in_band(const LandCostTable& table,
                                                std::size_t band) {
  const double cap = table.container_volume();
  const double v0 = cap / 10.0;
  ApproxLandCurve curve;
  curve.breakpoints.push_back(v0);
  for (double b : table.volume_breaks) {
    if (b > v0 + kVolumeTol) curve.breakpoints.push_back(b);
  }
  curve.values.reserve(curve.breakpoints.size());
  for (double v : curve.breakpoints) {
    curve.values.push_back(table.step_value(band, v));
  }
  return curve;
}

inline ApproxLandCurve land_breakpoints(const LandCostTable& table,
                                        double dist_km) {
  return land_breakpoints_in_band(table, table.distance_band(dist_km));
}

// How a volume is carried under the approximated curve; this is exactly the
// minimal assignment of the n / u^(i) step variables in the linearized model.
struct ApproxSplit {
  std::int64_t full = 0;
  double head_fraction = 0.0;  // u^(0), share of v0
  std::size_t step = 0;        // active u^(i), 1 <= i <= j-1; 0 if none
};

inline ApproxSplit split_approx(const ApproxLandCurve& curve, double volume) {
  const ContainerSplit s = split_containers(volume, curve.container_volume());
  ApproxSplit out;
  out.full = s.full;
  if (s.rest == 0.0) return out;
  if (s.rest <= curve.head() + kVolumeTol) {
    out.head_fraction = std::min(1.0, s.rest / curve.head());
    return out;
  }
  for (std::size_t i = 1; i <= curve.j(); ++i) {
    if (s.rest <= curve.breakpoints[i] + kVolumeTol) {
      if (i == curve.j()) {
        out.full += 1;
      } else {
        out.step = i;
      }
      return out;
    }
  }
  out.full += 1;
  return out;
}

inline double land_cost_approx(const ApproxLandCurve& curve, double volume) {
  const ApproxSplit s = split_approx(curve, volume);
  double cost = static_cast<double>(s.full) * curve.values.back() +
                s.head_fraction * curve.values.front();
  if (s.step != 0) cost += curve.values[s.step];
  return cost;
}

// One closed affine piece of the approximated curve. The curve equals the
// minimum over all pieces containing a volume.
struct CostPiece {
  double lo = 0.0;
  double hi = 0.0;
  double value_lo = 0.0;
  double value_hi = 0.0;

  double at(double x) const {
    if (hi <= lo) return value_lo;
    return value_lo + (value_hi - value_lo) * (x - lo) / (hi - lo);
  }
};

// Pieces of the approximated curve intersecting [lo, hi], clipped to it and
// ordered by position.
inline std::vector<CostPiece> approx_pieces(const ApproxLandCurve& curve,
                                            double lo, double hi) {
  std::vector<CostPiece> pieces;
  const double cap = curve.container_volume();
  const double full = curve.values.back();
  const auto first = static_cast<std::int64_t>(std::floor(lo / cap));
  const auto last = static_cast<std::int64_t>(std::floor(hi / cap));
  auto add = [&](CostPiece p) {
    const double a = std::max(p.lo, lo);
    const double b = std::min(p.hi, hi);
    if (a > b) return;
    if (a == b && !pieces.empty() && pieces.back().hi == a) return;
    pieces.push_back({a, b, p.at(a), p.at(b)});
  };
  for (std::int64_t n = std::max<std::int64_t>(0, first); n <= last; ++n) {
    const double base = static_cast<double>(n) * cap;
    const double carried = static_cast<double>(n) * full;
    add({base, base + curve.head(), carried, carried + curve.values.front()});
    for (std::size_t i = 1; i <= curve.j(); ++i) {
      const double value = carried + curve.values[i];
      add({base + curve.breakpoints[i - 1], base + curve.breakpoints[i], value,
           value});
    }
  }
  return pieces;
}

// Ocean rate for one (origin port, destination port) relation.
struct SeaRate {
  std::optional<double> fcl_per_container;
  std::optional<double> nvocc_per_m3;

  bool has_fcl() const { return fcl_per_container.has_value(); }
  bool has_nvocc() const { return nvocc_per_m3.has_value(); }

  // u_lim: largest volume worth giving to the NVOCC.
  double nvocc_limit(double nvocc_cap) const {
    if (!has_nvocc()) return 0.0;
    if (!has_fcl()) return nvocc_cap;
    return std::min(nvocc_cap, *fcl_per_container / *nvocc_per_m3);
  }

  friend bool operator==(const SeaRate&, const SeaRate&) = default;
};

struct SeaCost {
  double cost = 0.0;
  std::int64_t containers = 0;
  double nvocc_volume = 0.0;
};

// min n * price + u * nvocc subject to n * u_cont + u >= volume,
// 0 <= u <= nvocc_limit. Price is the FCL rate, or `penalty` when the
// relation only has an NVOCC rate. Cost ties prefer more containers.
inline SeaCost sea_cost_with_limit(const SeaRate& rate, double volume,
                                   double u_cont, double nvocc_limit,
                                   double penalty) {
  if (volume <= kVolumeTol) return {};
  const double price = rate.has_fcl() ? *rate.fcl_per_container : penalty;
  auto ceil_tol = [](double x) {
    return static_cast<std::int64_t>(std::ceil(x - 1e-12));
  };
  const std::int64_t n_hi = std::max<std::int64_t>(0, ceil_tol((volume - kVolumeTol) / u_cont));
  if (!rate.has_nvocc()) {
    return {static_cast<double>(n_hi) * price, n_hi, 0.0};
  }
  const std::int64_t n_lo = std::max<std::int64_t>(
      0, ceil_tol((volume - nvocc_limit - kVolumeTol) / u_cont));
  SeaCost best;
  bool have = false;
  for (std::int64_t n = n_hi; n >= n_lo; --n) {
    double rest = volume - static_cast<double>(n) * u_cont;
    if (rest <= kVolumeTol) rest = 0.0;
    if (rest > nvocc_limit + kVolumeTol) continue;
    rest = std::min(rest, nvocc_limit);
    const double cost = static_cast<double>(n) * price + rest * *rate.nvocc_per_m3;
    if (!have || cost < best.cost - 1e-9 * std::max(1.0, std::abs(best.cost))) {
      best = {cost, n, rest};
      have = true;
    }
  }
  return best;
}

inline SeaCost sea_cost(const SeaRate& rate, double volume, double u_cont,
                        double nvocc_cap, double penalty) {
  return sea_cost_with_limit(rate, volume, u_cont, rate.nvocc_limit(nvocc_cap),
                             penalty);
}

inline double chargeable_weight(double volume_m3, double kg_per_m3) {
  return volume_m3 * kg_per_m3;
}

}  // namespace hublocate
