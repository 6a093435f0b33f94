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

#include <cstddef>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hublocate/errors.hpp"
#include "hublocate/instance_io.hpp"
#include "hublocate/network_model.hpp"
#include "hublocate/solution.hpp"

namespace hublocate {

inline constexpr const char* kSolutionSchemaVersion = "hublocate-solution-1";

inline io_detail::Json cost_to_json(const CostBreakdown& c, CostMode mode) {
  return {{"mode", to_string(mode)},
          {"setup", c.setup},
          {"hub_consolidation", c.hub_consolidation},
          {"port_consolidation", c.port_consolidation},
          {"land_branch_to_port", c.land_branch_to_port},
          {"land_branch_to_hub", c.land_branch_to_hub},
          {"sea", c.sea},
          {"total", c.total}};
}

inline std::string format_cost_csv(const CostBreakdown& c, CostMode mode) {
  std::ostringstream out;
  out << "mode,setup,hub_consolidation,port_consolidation,land_branch_to_port,"
         "land_branch_to_hub,sea,total\n";
  out << to_string(mode);
  for (double v : {c.setup, c.hub_consolidation, c.port_consolidation,
                   c.land_branch_to_port, c.land_branch_to_hub, c.sea, c.total}) {
    out << ',' << detail::fmt_num(v);
  }
  out << '\n';
  return out.str();
}

inline std::string format_cost_table(const CostBreakdown& c, CostMode mode) {
  std::ostringstream out;
  char line[96];
  const std::pair<const char*, double> rows[] = {
      {"setup", c.setup},
      {"hub_consolidation", c.hub_consolidation},
      {"port_consolidation", c.port_consolidation},
      {"land_branch_to_port", c.land_branch_to_port},
      {"land_branch_to_hub", c.land_branch_to_hub},
      {"sea", c.sea},
      {"total", c.total}};
  out << "cost (" << to_string(mode) << " land cost)\n";
  for (const auto& [name, value] : rows) {
    std::snprintf(line, sizeof(line), "  %-20s %16.4f\n", name, value);
    out << line;
  }
  return out.str();
}

// Canonical solution document. Routing entries are written only where they
// differ from the all-direct default.
inline std::string format_solution(const Instance& inst, const Solution& sol,
                                   const std::optional<CostBreakdown>& cost = {},
                                   CostMode mode = CostMode::kExact) {
  using io_detail::Json;
  check_structure(inst, sol);
  const NodeSets& n = inst.nodes;
  Json root = Json::object();
  root["schema_version"] = kSolutionSchemaVersion;
  Json ports = Json::array();
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      const int s = sol.port_choice(b, t);
      if (s == kNone) continue;
      ports.push_back({{"branch", n.branches[b]},
                       {"destination", n.destination_ports[t]},
                       {"origin_port", n.origin_ports[s]}});
    }
  }
  root["port_choice"] = std::move(ports);
  Json hubs = Json::array();
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    if (sol.hubs[b]) hubs.push_back(n.branches[b]);
  }
  root["hubs"] = std::move(hubs);
  Json routing = Json::array();
  for (std::size_t b = 0; b < inst.num_branches(); ++b) {
    for (std::size_t s = 0; s < inst.num_origin_ports(); ++s) {
      const auto& via = sol.hub_choice(b, s);
      if (via.empty() && sol.direct_fraction(b, s) == 1.0) continue;
      Json list = Json::array();
      for (int h : via) list.push_back(n.branches[h]);
      routing.push_back({{"branch", n.branches[b]},
                         {"origin_port", n.origin_ports[s]},
                         {"direct_fraction", sol.direct_fraction(b, s)},
                         {"via", std::move(list)}});
    }
  }
  root["routing"] = std::move(routing);
  if (cost) root["cost"] = cost_to_json(*cost, mode);
  return root.dump(2) + "\n";
}

inline Solution parse_solution(const Instance& inst, const std::string& document) {
  using namespace io_detail;
  const Json root = parse_text(document);
  const std::string version =
      text(section(root, "schema_version", ""), "schema_version");
  if (version != kSolutionSchemaVersion) {
    throw FormatError("schema_version", "unsupported solution schema '" +
                                            version + "', expected '" +
                                            kSolutionSchemaVersion + "'");
  }
  const NodeSets& n = inst.nodes;
  Solution sol = Solution::empty(inst);
  const Json& ports = section(root, "port_choice", "");
  if (!ports.is_array()) throw FormatError("port_choice", "expected an array");
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const std::string where = "port_choice[" + std::to_string(i) + "]";
    const Json& e = ports[i];
    const int b = lookup(n.branches, text(section(e, "branch", where), where + ".branch"),
                         where + ".branch", "branch");
    const int t = lookup(n.destination_ports,
                         text(section(e, "destination", where), where + ".destination"),
                         where + ".destination", "destination port");
    const int s = lookup(n.origin_ports,
                         text(section(e, "origin_port", where), where + ".origin_port"),
                         where + ".origin_port", "origin port");
    if (sol.port_choice(b, t) != kNone) throw FormatError(where, "duplicate entry");
    sol.port_choice(b, t) = s;
  }
  const std::vector<std::string> hubs = ids(section(root, "hubs", ""), "hubs");
  for (std::size_t i = 0; i < hubs.size(); ++i) {
    sol.hubs[lookup(n.branches, hubs[i], "hubs", "branch")] = true;
  }
  const Json& routing = section(root, "routing", "");
  if (!routing.is_array()) throw FormatError("routing", "expected an array");
  Grid<char> seen(inst.num_branches(), inst.num_origin_ports(), 0);
  for (std::size_t i = 0; i < routing.size(); ++i) {
    const std::string where = "routing[" + std::to_string(i) + "]";
    const Json& e = routing[i];
    const int b = lookup(n.branches, text(section(e, "branch", where), where + ".branch"),
                         where + ".branch", "branch");
    const int s = lookup(n.origin_ports,
                         text(section(e, "origin_port", where), where + ".origin_port"),
                         where + ".origin_port", "origin port");
    if (seen(b, s)) throw FormatError(where, "duplicate entry");
    seen(b, s) = 1;
    sol.direct_fraction(b, s) =
        number(section(e, "direct_fraction", where), where + ".direct_fraction");
    const Json& via = section(e, "via", where);
    if (!via.is_array()) throw FormatError(where + ".via", "expected an array");
    for (std::size_t k = 0; k < via.size(); ++k) {
      const std::string at = where + ".via[" + std::to_string(k) + "]";
      sol.hub_choice(b, s).push_back(lookup(n.branches, text(via[k], at), at, "branch"));
    }
  }
  check_structure(inst, sol);
  return sol;
}

inline Solution load_solution(const Instance& inst, const std::string& path) {
  return parse_solution(inst, read_file(path));
}

inline void save_solution(const Instance& inst, const Solution& sol,
                          const std::string& path,
                          const std::optional<CostBreakdown>& cost = {},
                          CostMode mode = CostMode::kExact) {
  write_file(path, format_solution(inst, sol, cost, mode));
}

}  // namespace hublocate
