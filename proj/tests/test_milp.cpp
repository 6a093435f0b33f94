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


#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hublocate.hpp"
#include "lp_reader.hpp"
#include "support.hpp"

namespace hublocate {
namespace {

// 3 branches, 2 origin ports, 2 destinations; land breakpoints {8, 20, 40, 80}
// so j = 3. Relations: S1-T1 both rates, S1-T2 both, S2-T1 FCL only,
// S2-T2 NVOCC only. B3 ships nothing to T2.
Instance milp_toy() {
  Instance inst = Instance::sized({{"B1", "B2", "B3"}, {"S1", "S2"}, {"T1", "T2"}});
  LandCostTable& t = inst.land_costs;
  t.distance_breaks = {0, 100, 1000};
  t.volume_breaks = {20, 40, 80};
  t.cost = Grid<double>(2, 3);
  const double rows[2][3] = {{90, 120, 160}, {180, 240, 320}};
  for (int d = 0; d < 2; ++d) {
    for (int k = 0; k < 3; ++k) t.cost(d, k) = rows[d][k];
  }
  const double km[3][5] = {{0, 30, 60, 80, 400},
                           {30, 0, 40, 120, 90},
                           {60, 40, 0, 300, 70}};
  for (int b = 0; b < 3; ++b) {
    for (int r = 0; r < 5; ++r) inst.distance(b, r) = km[b][r];
  }
  inst.demand(0, 0) = 6;
  inst.demand(0, 1) = 3.5;
  inst.demand(1, 0) = 12;
  inst.demand(1, 1) = 2;
  inst.demand(2, 0) = 9;
  testing::set_rate(inst, "S1", "T1", 1500.0, 45.0);
  testing::set_rate(inst, "S1", "T2", 1800.0, 50.0);
  testing::set_rate(inst, "S2", "T1", 1400.0, std::nullopt);
  testing::set_rate(inst, "S2", "T2", std::nullopt, 55.0);
  inst.setup_cost = {400, 250, 300};
  inst.hub_consol_cost = {3, 2, 4};
  inst.port_consol_cost = {5, 6};
  return inst;
}

std::map<std::string, std::size_t> family_counts(const MilpModel& m) {
  std::map<std::string, std::size_t> out;
  auto family = [](const std::string& name) { return name.substr(0, name.find('_')); };
  for (const Variable& v : m.variables()) ++out["var:" + family(v.name)];
  for (const Constraint& c : m.constraints()) ++out["row:" + family(c.name)];
  return out;
}

TEST(MilpSize, HandCountedToy) {
  const MilpModel m = build_linearized_model(milp_toy());
  const auto f = family_counts(m);
  // z: T1 has 2 usable ports x 3 shippers, T2 has 2 x 2.
  EXPECT_EQ(f.at("var:z"), 10u);
  EXPECT_EQ(f.at("var:x"), 3u);
  EXPECT_EQ(f.at("var:y"), 18u);
  EXPECT_EQ(f.at("var:vd"), 6u);
  EXPECT_EQ(f.at("var:vh"), 18u);
  EXPECT_EQ(f.at("var:nL"), 15u);
  EXPECT_EQ(f.at("var:uL0"), 15u);
  EXPECT_EQ(f.at("var:uL1") + f.at("var:uL2"), 30u);
  EXPECT_EQ(f.at("var:nS"), 4u);
  EXPECT_EQ(f.at("var:uS"), 3u);
  EXPECT_EQ(m.variables().size(), 122u);
  EXPECT_EQ(f.at("row:c7"), 5u);
  EXPECT_EQ(f.at("row:c8"), 6u);
  EXPECT_EQ(f.at("row:act"), 18u);
  EXPECT_EQ(f.at("row:relay"), 18u);
  EXPECT_EQ(f.at("row:split"), 6u);
  EXPECT_EQ(f.at("row:link"), 18u);
  EXPECT_EQ(f.at("row:landP"), 6u);
  EXPECT_EQ(f.at("row:landH"), 9u);
  EXPECT_EQ(f.at("row:step"), 15u);
  EXPECT_EQ(f.at("row:sea"), 4u);
  EXPECT_EQ(m.constraints().size(), 105u);
  const ModelSize size = expected_model_size(milp_toy());
  EXPECT_EQ(size.variables, 122u);
  EXPECT_EQ(size.constraints, 105u);
  EXPECT_EQ(size.hub_flow_variables, 18u);
}

// Closed forms recomputed from the instance by family.
void expect_closed_form(const Instance& inst) {
  const MilpModel m = build_linearized_model(inst);
  const std::size_t nb = inst.num_branches(), ns = inst.num_origin_ports(),
                    nt = inst.num_destinations();
  std::size_t z = 0, pairs = 0, rel = 0, rel_n = 0;
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t ports = 0;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& r = inst.sea_rates(s, t);
      if (!r || (!r->fcl_per_container && !r->nvocc_per_m3)) continue;
      ++ports;
      ++rel;
      if (r->nvocc_per_m3) ++rel_n;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      if (inst.demand(b, t) > 0) {
        ++pairs;
        z += ports;
      }
    }
  }
  const double head = inst.params.land_container_volume / 10.0;
  std::size_t j = 0;
  for (double v : inst.land_costs.volume_breaks) j += v > head + 1e-9;
  const auto f = family_counts(m);
  std::size_t steps = 0;
  for (const auto& [k, n] : f) {
    if (k.rfind("var:uL", 0) == 0 && k != "var:uL0") steps += n;
  }
  ASSERT_EQ(f.count("var:z") ? f.at("var:z") : 0u, z);
  ASSERT_EQ(f.at("var:vh"), nb * nb * ns);
  ASSERT_EQ(f.at("var:nL") + f.at("var:uL0") + steps, nb * (nb + ns) * (j + 1));
  ASSERT_EQ(f.at("var:nS"), rel);
  ASSERT_EQ(f.count("var:uS") ? f.at("var:uS") : 0u, rel_n);
  ASSERT_EQ(m.variables().size(), z + nb + 2 * nb * nb * ns + nb * ns +
                                      nb * (nb + ns) * (j + 1) + rel + rel_n);
  ASSERT_EQ(m.constraints().size(), pairs + 3 * nb * ns + 3 * nb * nb * ns +
                                        nb * nb + nb * (nb + ns) + rel);
  const ModelSize size = expected_model_size(inst);
  ASSERT_EQ(size.variables, m.variables().size());
  ASSERT_EQ(size.constraints, m.constraints().size());
}

TEST(MilpSize, ClosedFormOnGeneratedInstances) {
  expect_closed_form(milp_toy());
  for (int seed : {3, 8}) {
    GenOptions g;
    g.seed = seed;
    g.branches = 4 + seed % 3;
    g.origin_ports = 3;
    g.destinations = 3;
    g.density = 0.6;
    g.profile = Profile::kNvoccOnlyMix;
    expect_closed_form(generate(g));
  }
}

TEST(MilpSize, HubFlowCountIndependentOfDestinations) {
  for (int seed = 1; seed <= 5; ++seed) {
    GenOptions g;
    g.seed = seed;
    g.branches = 5;
    g.origin_ports = 3;
    g.destinations = 2;
    const Instance a = generate(g);
    g.destinations = 4;
    const Instance b = generate(g);
    const auto fa = family_counts(build_linearized_model(a));
    const auto fb = family_counts(build_linearized_model(b));
    EXPECT_EQ(fa.at("var:vh"), 75u);
    EXPECT_EQ(fa.at("var:vh"), fb.at("var:vh"));
    EXPECT_EQ(expected_model_size(a).hub_flow_variables,
              expected_model_size(b).hub_flow_variables);
  }
}

TEST(MilpModel, Coefficients) {
  const Instance inst = milp_toy();
  const MilpModel m = build_linearized_model(inst);
  const auto& v = m.variables();
  EXPECT_EQ(v[m.find("nS_S2_T2")].objective, inst.params.penalty);
  EXPECT_EQ(v[m.find("nS_S2_T1")].objective, 1400.0);
  EXPECT_EQ(m.find("uS_S2_T1"), kNone);
  EXPECT_EQ(v[m.find("uS_S2_T2")].upper, 40.0);
  // u_lim = min(40, 1500 / 45).
  EXPECT_NEAR(v[m.find("uS_S1_T1")].upper, 1500.0 / 45.0, 1e-12);
  EXPECT_EQ(v[m.find("z_B1_T2_S1")].objective, 5 * 3.5);
  EXPECT_EQ(v[m.find("x_B2")].objective, 250.0);
  EXPECT_EQ(v[m.find("vh_B1_S1_B3")].objective, 4.0);
  // Land arc B2 -> S2 at 90 km: band 0, head value 90, steps 90, 120, 160.
  EXPECT_EQ(v[m.find("uL0_B2_S2")].objective, 90.0);
  EXPECT_EQ(v[m.find("uL1_B2_S2")].objective, 90.0);
  EXPECT_EQ(v[m.find("uL2_B2_S2")].objective, 120.0);
  EXPECT_EQ(v[m.find("nL_B2_S2")].objective, 160.0);
  EXPECT_EQ(v[m.find("nL_B1_S2")].objective, 320.0);
  for (const Constraint& c : m.constraints()) {
    if (c.name == "link_B1_S2_B3") {
      bool found = false;
      for (const auto& [k, coef] : c.terms) {
        if (k == m.find("y_B1_S2_B3")) {
          EXPECT_EQ(coef, -9.5);
          found = true;
        }
      }
      EXPECT_TRUE(found);
    }
  }
}

using testing::ParsedLp;
using testing::read_lp;

void expect_lp_matches(const MilpModel& m, const ParsedLp& lp) {
  const auto& vars = m.variables();
  std::map<std::string, double> obj;
  for (const Variable& v : vars) {
    if (v.objective != 0.0) obj[v.name] = v.objective;
  }
  EXPECT_EQ(lp.rows.at("obj"), obj);
  ASSERT_EQ(lp.rows.size(), m.constraints().size() + 1);
  for (const Constraint& c : m.constraints()) {
    std::map<std::string, double> want;
    for (const auto& [k, coef] : c.terms) {
      if (coef != 0.0) want[vars[k].name] += coef;
    }
    ASSERT_EQ(lp.rows.at(c.name), want) << c.name;
    const auto& [sense, rhs] = lp.sense_rhs.at(c.name);
    EXPECT_EQ(rhs, c.rhs);
    EXPECT_EQ(sense, c.sense == Sense::kLessEqual ? "<="
                     : c.sense == Sense::kEqual   ? "="
                                                  : ">=");
  }
  std::size_t n_int = 0, n_bin = 0;
  for (const Variable& v : vars) {
    if (v.kind == VarKind::kInteger) ++n_int;
    if (v.kind == VarKind::kBinary) ++n_bin;
    if (v.kind == VarKind::kContinuous && std::isfinite(v.upper)) {
      EXPECT_EQ(lp.bounds.at(v.name).second, v.upper);
    }
  }
  EXPECT_EQ(lp.general.size(), n_int);
  EXPECT_EQ(lp.binary.size(), n_bin);
}

TEST(MilpIo, LpReadsBackIntoSameMatrix) {
  const MilpModel m = build_linearized_model(milp_toy());
  const std::string text = emit_lp(m);
  expect_lp_matches(m, read_lp(text));
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) EXPECT_LE(line.size(), 78u) << line;
}

TEST(MilpIo, MpsReadsBackIntoSameMatrix) {
  const MilpModel m = build_linearized_model(milp_toy());
  std::istringstream in(emit_mps(m));
  std::string line, section;
  std::map<std::string, std::map<std::string, double>> cols;
  std::map<std::string, char> types;
  std::map<std::string, double> rhs;
  std::map<std::string, std::string> bound_kind;
  bool integral = false;
  std::size_t n_int = 0;
  while (std::getline(in, line)) {
    std::istringstream toks(line);
    std::vector<std::string> w;
    std::string tok;
    while (toks >> tok) w.push_back(tok);
    if (line[0] != ' ') {
      section = w[0];
      continue;
    }
    if (section == "ROWS") {
      types[w[1]] = w[0][0];
    } else if (section == "COLUMNS") {
      if (w[1] == "'MARKER'") {
        integral = w[2] == "'INTORG'";
        continue;
      }
      if (!cols.count(w[0]) && integral) ++n_int;
      cols[w[0]][w[1]] += std::stod(w[2]);
    } else if (section == "RHS") {
      rhs[w[1]] = std::stod(w[2]);
    } else if (section == "BOUNDS") {
      bound_kind[w[2]] = w[0];
    }
  }
  const auto& vars = m.variables();
  ASSERT_EQ(cols.size(), vars.size());
  std::size_t want_int = 0;
  for (const Variable& v : vars) {
    want_int += v.kind != VarKind::kContinuous;
    if (v.kind == VarKind::kBinary) {
      EXPECT_EQ(bound_kind.at(v.name), "BV");
    } else if (v.kind == VarKind::kInteger) {
      EXPECT_EQ(bound_kind.at(v.name), "PL");
    }
    double o = cols.at(v.name).count("obj") ? cols.at(v.name).at("obj") : 0.0;
    EXPECT_EQ(o, v.objective) << v.name;
  }
  EXPECT_EQ(n_int, want_int);
  EXPECT_EQ(types.size(), m.constraints().size() + 1);
  for (const Constraint& c : m.constraints()) {
    for (const auto& [k, coef] : c.terms) {
      EXPECT_EQ(cols.at(vars[k].name).at(c.name), coef);
    }
    EXPECT_EQ(rhs.count(c.name) ? rhs.at(c.name) : 0.0, c.rhs);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(MilpIo, GoldenFilesAreByteStable) {
  const MilpModel m = build_linearized_model(milp_toy());
  const std::string lp_path = std::string(HUBLOCATE_TEST_DIR) + "/golden/toy.lp";
  const std::string mps_path = std::string(HUBLOCATE_TEST_DIR) + "/golden/toy.mps";
  if (std::getenv("HUBLOCATE_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(lp_path, std::ios::binary) << emit_lp(m);
    std::ofstream(mps_path, std::ios::binary) << emit_mps(m);
  }
  const std::string lp = read_text(lp_path);
  const std::string mps = read_text(mps_path);
  ASSERT_FALSE(lp.empty());
  ASSERT_FALSE(mps.empty());
  EXPECT_EQ(emit_lp(m), lp);
  EXPECT_EQ(emit_mps(m), mps);
  EXPECT_EQ(emit_lp(build_linearized_model(milp_toy())), emit_lp(m));
  expect_lp_matches(m, read_lp(lp));
}

TEST(MilpEncode, BijectionOnRandomSolutions) {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int seed = 1; checked < 100; ++seed) {
    GenOptions g;
    g.seed = seed;
    g.branches = 2 + seed % 4;
    g.origin_ports = 1 + seed % 3;
    g.destinations = 1 + seed % 3;
    g.profile = static_cast<Profile>(seed % 3);
    const Instance inst = generate(g);
    const MilpModel m = build_linearized_model(inst);
    for (int k = 0; k < 10; ++k, ++checked) {
      const Solution sol = canonicalize(inst, testing::random_solution(inst, rng));
      const std::vector<double> x = encode_solution(inst, m, sol);
      ASSERT_LE(max_residual(m, x).value, 1e-9) << max_residual(m, x).where;
      const double approx = testing::reference_total(inst, sol, false);
      ASSERT_TRUE(testing::close_rel(objective_value(m, x), approx, 1e-9));
      const Solution back = decode_solution(inst, m, x);
      ASSERT_EQ(back.port_choice, sol.port_choice);
      ASSERT_EQ(back.hubs, sol.hubs);
      ASSERT_EQ(back.hub_choice, sol.hub_choice);
      for (std::size_t i = 0; i < sol.direct_fraction.data().size(); ++i) {
        ASSERT_NEAR(back.direct_fraction.data()[i], sol.direct_fraction.data()[i], 1e-12);
      }
      ASSERT_EQ(encode_solution(inst, m, back).size(), x.size());
    }
  }
}

TEST(MilpDecode, AllDirectThroughValuesFile) {
  const Instance inst = milp_toy();
  const MilpModel m = build_linearized_model(inst);
  Solution sol = Solution::empty(inst);
  sol.port_choice(0, 0) = 0;
  sol.port_choice(0, 1) = 1;
  sol.port_choice(1, 0) = 1;
  sol.port_choice(1, 1) = 0;
  sol.port_choice(2, 0) = 0;
  const std::vector<double> x = encode_solution(inst, m, sol);
  const std::vector<double> parsed = parse_values(m, format_values(m, x));
  const Solution back = decode_solution(inst, m, parsed);
  EXPECT_EQ(back, sol);
  EXPECT_NEAR(objective_value(m, parsed),
              evaluate_cost(inst, sol, CostMode::kApprox).total, 1e-9);
}

TEST(MilpDecode, Rejections) {
  const Instance inst = milp_toy();
  const MilpModel m = build_linearized_model(inst);
  Solution sol = Solution::empty(inst);
  for (std::size_t b = 0; b < 3; ++b) {
    sol.port_choice(b, 0) = 0;
    if (b < 2) sol.port_choice(b, 1) = 0;
  }
  const std::vector<double> good = encode_solution(inst, m, sol);
  std::vector<double> frac = good;
  frac[m.find("x_B1")] = 0.5;
  EXPECT_THROW(decode_solution(inst, m, frac), DecodeError);
  std::vector<double> broken = good;
  broken[m.find("z_B1_T1_S1")] = 0.0;
  EXPECT_THROW(decode_solution(inst, m, broken), DecodeError);
  std::vector<double> near = good;
  near[m.find("vd_B1_S1")] += 5e-5;
  EXPECT_NO_THROW(decode_solution(inst, m, near));
  EXPECT_THROW(decode_solution(inst, m, std::vector<double>(3, 0.0)), DecodeError);
  EXPECT_THROW(parse_values(m, "x_B9 1\n"), DecodeError);
  EXPECT_THROW(parse_values(m, "x_B1 1\nx_B1 0\n"), DecodeError);
  EXPECT_THROW(parse_values(m, "x_B1\n"), FormatError);
  const std::vector<double> sparse = parse_values(m, "# comment\n\nx_B2 1\n");
  EXPECT_EQ(sparse[m.find("x_B2")], 1.0);
  EXPECT_EQ(sparse[m.find("x_B1")], 0.0);
}

}  // namespace
}  // namespace hublocate
