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
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hublocate/errors.hpp"
#include "hublocate/network_model.hpp"
#include "json.hpp"

namespace hublocate {

namespace io_detail {

using Json = nlohmann::ordered_json;

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(line_col(text, e.byte), "invalid JSON");
  }
}

inline const Json& section(const Json& j, const char* name,
                           const std::string& where) {
  if (!j.is_object()) throw FormatError(where, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) {
    throw FormatError(where.empty() ? name : where + "." + name,
                      std::string("missing required section '") + name + "'");
  }
  return *it;
}

inline std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where, "expected a number");
  return j.get<double>();
}

inline std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw FormatError(where, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline std::vector<std::string> ids(const Json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(text(j[i], where + "[" + std::to_string(i) + "]"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline int lookup(const std::vector<std::string>& set, const std::string& id,
                  const std::string& where, const char* kind) {
  const int k = index_of(set, id);
  if (k == kNone) {
    throw FormatError(where, std::string("unknown ") + kind + " '" + id + "'");
  }
  return k;
}

inline std::vector<double> per_node(const Json& j,
                                    const std::vector<std::string>& set,
                                    const std::string& where,
                                    const char* kind) {
  if (!j.is_object()) throw FormatError(where, "expected an object");
  std::vector<double> out(set.size(), 0.0);
  std::vector<bool> given(set.size(), false);
  for (const auto& [key, value] : j.items()) {
    const int k = lookup(set, key, join(where, key), kind);
    out[k] = number(value, join(where, key));
    given[k] = true;
  }
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (!given[k]) throw FormatError(where, "no entry for '" + set[k] + "'");
  }
  return out;
}

inline Json per_node_json(const std::vector<double>& values,
                          const std::vector<std::string>& set) {
  Json out = Json::object();
  for (std::size_t k = 0; k < set.size(); ++k) out[set[k]] = values[k];
  return out;
}

}  // namespace io_detail

// Parses the JSON interchange document. Nodes are sorted on load, so the
// in-memory instance is always canonical regardless of file order.
inline Instance parse_instance(const std::string& document) {
  using namespace io_detail;
  const Json root = parse_text(document);
  if (!root.is_object()) throw FormatError("", "top level must be an object");

  const Json& params_j = section(root, "parameters", "");
  const std::string version =
      text(section(params_j, "schema_version", "parameters"),
           "parameters.schema_version");
  if (version != kSchemaVersion) {
    throw FormatError("parameters.schema_version",
                      "schema version mismatch: expected '" +
                          std::string(kSchemaVersion) + "', found '" +
                          version + "'");
  }

  const Json& nodes_j = section(root, "nodes", "");
  NodeSets nodes;
  nodes.branches = ids(section(nodes_j, "branches", "nodes"), "nodes.branches");
  nodes.origin_ports =
      ids(section(nodes_j, "origin_ports", "nodes"), "nodes.origin_ports");
  nodes.destination_ports = ids(section(nodes_j, "destination_ports", "nodes"),
                                "nodes.destination_ports");
  for (const auto* set :
       {&nodes.branches, &nodes.origin_ports, &nodes.destination_ports}) {
    auto dup = std::adjacent_find(set->begin(), set->end());
    if (dup != set->end()) {
      throw InstanceError("DUPLICATE_NODE",
                          "node id '" + *dup + "' appears more than once");
    }
  }

  // Required sections are checked up front so the error names the section.
  for (const char* name : {"demand", "distances", "land_cost_table",
                           "sea_rates", "setup_costs", "consolidation_costs"}) {
    section(root, name, "");
  }

  Instance inst = Instance::sized(nodes);
  const std::size_t nb = inst.num_branches();

  Parameters& p = inst.params;
  p.land_container_volume =
      number(section(params_j, "land_container_volume", "parameters"),
             "parameters.land_container_volume");
  auto optional_param = [&](const char* key, double& target) {
    if (params_j.contains(key)) {
      target = number(params_j[key], join("parameters", key));
    }
  };
  optional_param("sea_container_volume", p.sea_container_volume);
  optional_param("nvocc_cap", p.nvocc_cap);
  optional_param("dimensional_factor", p.dimensional_factor);
  optional_param("penalty", p.penalty);

  const Json& demand_j = root["demand"];
  if (!demand_j.is_array()) throw FormatError("demand", "expected an array");
  Grid<char> seen_demand(nb, inst.num_destinations(), 0);
  for (std::size_t i = 0; i < demand_j.size(); ++i) {
    const std::string where = "demand[" + std::to_string(i) + "]";
    const Json& e = demand_j[i];
    const int b = lookup(nodes.branches,
                         text(section(e, "branch", where), where + ".branch"),
                         where + ".branch", "branch");
    const int t = lookup(
        nodes.destination_ports,
        text(section(e, "destination", where), where + ".destination"),
        where + ".destination", "destination port");
    if (seen_demand(b, t)) throw FormatError(where, "duplicate demand entry");
    seen_demand(b, t) = 1;
    inst.demand(b, t) = number(section(e, "volume", where), where + ".volume");
  }

  const Json& dist_j = root["distances"];
  if (!dist_j.is_array()) throw FormatError("distances", "expected an array");
  for (std::size_t i = 0; i < dist_j.size(); ++i) {
    const std::string where = "distances[" + std::to_string(i) + "]";
    const Json& e = dist_j[i];
    const int b =
        lookup(nodes.branches, text(section(e, "from", where), where + ".from"),
               where + ".from", "branch");
    const std::string to = text(section(e, "to", where), where + ".to");
    int r = index_of(nodes.branches, to);
    if (r == kNone) {
      const int s = index_of(nodes.origin_ports, to);
      if (s == kNone) {
        throw FormatError(where + ".to", "unknown branch or origin port '" +
                                             to + "'");
      }
      r = static_cast<int>(nb) + s;
    }
    if (r == b) throw FormatError(where, "self distance is implicit");
    if (!std::isnan(inst.distance(b, r))) {
      throw FormatError(where, "duplicate distance entry");
    }
    inst.distance(b, r) = number(section(e, "km", where), where + ".km");
  }

  const Json& lt_j = root["land_cost_table"];
  LandCostTable& lt = inst.land_costs;
  lt.distance_breaks =
      numbers(section(lt_j, "distance_breaks", "land_cost_table"),
              "land_cost_table.distance_breaks");
  lt.volume_breaks = numbers(section(lt_j, "volume_breaks", "land_cost_table"),
                             "land_cost_table.volume_breaks");
  const Json& cost_j = section(lt_j, "cost", "land_cost_table");
  if (!cost_j.is_array()) {
    throw FormatError("land_cost_table.cost", "expected an array of rows");
  }
  const std::size_t rows = cost_j.size();
  const std::size_t cols = lt.volume_breaks.size();
  lt.cost = Grid<double>(rows, cols, 0.0);
  for (std::size_t d = 0; d < rows; ++d) {
    const std::string where = "land_cost_table.cost[" + std::to_string(d) + "]";
    const std::vector<double> row = numbers(cost_j[d], where);
    if (row.size() != cols) {
      throw FormatError(where, "row has " + std::to_string(row.size()) +
                                   " entries, expected " +
                                   std::to_string(cols));
    }
    for (std::size_t k = 0; k < cols; ++k) lt.cost(d, k) = row[k];
  }

  const Json& sea_j = root["sea_rates"];
  if (!sea_j.is_array()) throw FormatError("sea_rates", "expected an array");
  for (std::size_t i = 0; i < sea_j.size(); ++i) {
    const std::string where = "sea_rates[" + std::to_string(i) + "]";
    const Json& e = sea_j[i];
    const int s = lookup(
        nodes.origin_ports,
        text(section(e, "origin_port", where), where + ".origin_port"),
        where + ".origin_port", "origin port");
    const int t = lookup(
        nodes.destination_ports,
        text(section(e, "destination", where), where + ".destination"),
        where + ".destination", "destination port");
    if (inst.sea_rates(s, t)) throw FormatError(where, "duplicate sea rate");
    SeaRate rate;
    if (e.contains("fcl_per_container") && !e["fcl_per_container"].is_null()) {
      rate.fcl_per_container =
          number(e["fcl_per_container"], where + ".fcl_per_container");
    }
    if (e.contains("nvocc_per_m3") && !e["nvocc_per_m3"].is_null()) {
      rate.nvocc_per_m3 = number(e["nvocc_per_m3"], where + ".nvocc_per_m3");
    }
    inst.sea_rates(s, t) = rate;
  }

  inst.setup_cost = per_node(root["setup_costs"], nodes.branches,
                             "setup_costs", "branch");
  const Json& consol_j = root["consolidation_costs"];
  inst.hub_consol_cost =
      per_node(section(consol_j, "hubs", "consolidation_costs"), nodes.branches,
               "consolidation_costs.hubs", "branch");
  inst.port_consol_cost =
      per_node(section(consol_j, "ports", "consolidation_costs"),
               nodes.origin_ports, "consolidation_costs.ports", "origin port");
  return inst;
}

// Canonical document: nodes sorted, entries sorted by key, zero demands and
// absent distances omitted. Byte-stable for a given instance.
inline std::string format_instance(const Instance& inst) {
  using io_detail::Json;
  const NodeSets& n = inst.nodes;
  const std::size_t nb = inst.num_branches();
  Json root = Json::object();
  root["nodes"] = {{"branches", n.branches},
                   {"origin_ports", n.origin_ports},
                   {"destination_ports", n.destination_ports}};

  Json demand = Json::array();
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      if (inst.demand(b, t) == 0.0) continue;
      demand.push_back({{"branch", n.branches[b]},
                        {"destination", n.destination_ports[t]},
                        {"volume", inst.demand(b, t)}});
    }
  }
  root["demand"] = std::move(demand);

  std::vector<std::tuple<std::string, std::string, double>> dists;
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < inst.distance.cols(); ++r) {
      if (r == b || std::isnan(inst.distance(b, r))) continue;
      dists.emplace_back(n.branches[b],
                         r < nb ? n.branches[r] : n.origin_ports[r - nb],
                         inst.distance(b, r));
    }
  }
  std::sort(dists.begin(), dists.end());
  Json distances = Json::array();
  for (const auto& [from, to, km] : dists) {
    distances.push_back({{"from", from}, {"to", to}, {"km", km}});
  }
  root["distances"] = std::move(distances);

  const LandCostTable& lt = inst.land_costs;
  Json cost = Json::array();
  for (std::size_t d = 0; d < lt.cost.rows(); ++d) {
    Json row = Json::array();
    for (std::size_t k = 0; k < lt.cost.cols(); ++k) row.push_back(lt.cost(d, k));
    cost.push_back(std::move(row));
  }
  root["land_cost_table"] = {{"distance_breaks", lt.distance_breaks},
                             {"volume_breaks", lt.volume_breaks},
                             {"cost", std::move(cost)}};

  Json sea = Json::array();
  for (std::size_t s = 0; s < inst.num_origin_ports(); ++s) {
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      const auto& rate = inst.sea_rates(s, t);
      if (!rate) continue;
      Json e = {{"origin_port", n.origin_ports[s]},
                {"destination", n.destination_ports[t]}};
      if (rate->fcl_per_container) {
        e["fcl_per_container"] = *rate->fcl_per_container;
      }
      if (rate->nvocc_per_m3) e["nvocc_per_m3"] = *rate->nvocc_per_m3;
      sea.push_back(std::move(e));
    }
  }
  root["sea_rates"] = std::move(sea);

  root["setup_costs"] = io_detail::per_node_json(inst.setup_cost, n.branches);
  root["consolidation_costs"] = {
      {"hubs", io_detail::per_node_json(inst.hub_consol_cost, n.branches)},
      {"ports", io_detail::per_node_json(inst.port_consol_cost, n.origin_ports)}};

  const Parameters& p = inst.params;
  root["parameters"] = {{"schema_version", kSchemaVersion},
                        {"land_container_volume", p.land_container_volume},
                        {"sea_container_volume", p.sea_container_volume},
                        {"nvocc_cap", p.nvocc_cap},
                        {"dimensional_factor", p.dimensional_factor},
                        {"penalty", p.penalty}};
  return root.dump(2) + "\n";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

inline Instance load_instance(const std::string& path) {
  return parse_instance(read_file(path));
}

inline void save_instance(const Instance& inst, const std::string& path) {
  write_file(path, format_instance(inst));
}

}  // namespace hublocate
