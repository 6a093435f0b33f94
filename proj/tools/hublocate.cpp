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


#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hublocate.hpp"
#include "json.hpp"

namespace {

using hublocate::CostBreakdown;
using hublocate::CostMode;
using hublocate::Instance;
using hublocate::Solution;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitLimit = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CostMode parse_mode(const std::string& mode) {
  return mode == "approx" ? CostMode::kApprox : CostMode::kExact;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    hublocate::write_file(path, text);
  }
}

Json violations_json(const hublocate::ViolationReport& r) {
  Json out = Json::array();
  for (const auto& v : r.violations) {
    out.push_back({{"constraint", hublocate::to_string(v.constraint)},
                   {"indices", v.indices},
                   {"description", v.description}});
  }
  return out;
}

void print_violations(const hublocate::ViolationReport& r) {
  for (const auto& v : r.violations) {
    std::cout << hublocate::to_string(v.constraint) << ": " << v.description << "\n";
  }
}

int hub_count(const Solution& sol) {
  int n = 0;
  for (bool h : sol.hubs) n += h ? 1 : 0;
  return n;
}

struct Options {
  int threads = 0;
  bool json = false;

  std::string instance, output, model, values, solution_a, solution_b;

  std::uint64_t seed = 42;
  std::size_t branches = 4, ports = 2, dests = 2, bands = 8;
  double density = 1.0;
  std::string profile = "uniform";

  std::string method = "two-stage";
  std::size_t hub_budget = 2;
  double time_budget = 0.0;

  std::string mode = "exact";
  std::string format = "table";
};

int cmd_validate(const Options& o) {
  const Instance inst = hublocate::parse_instance(hublocate::read_file(o.instance));
  const auto report = hublocate::validate_instance(inst);
  if (o.json) {
    Json issues = Json::array();
    for (const auto& i : report) issues.push_back({{"code", i.code}, {"message", i.message}});
    std::cout << Json{{"valid", report.empty()}, {"issues", issues}}.dump(2) << "\n";
  } else if (report.empty()) {
    std::cout << "valid\n";
  } else {
    for (const auto& i : report) std::cout << i.code << ": " << i.message << "\n";
  }
  return report.empty() ? kExitOk : kExitInvalid;
}

int cmd_gen(const Options& o) {
  hublocate::GenOptions g;
  g.seed = o.seed;
  g.branches = o.branches;
  g.origin_ports = o.ports;
  g.destinations = o.dests;
  g.density = o.density;
  g.profile = hublocate::parse_profile(o.profile);
  g.volume_bands = o.bands;
  emit(hublocate::format_instance(hublocate::generate(g)), o.output);
  return kExitOk;
}

int cmd_solve(const Options& o) {
  const Instance inst = hublocate::load_instance(o.instance);
  hublocate::require_valid(inst);
  const hublocate::CostCurves curves(inst);
  Solution sol;
  Json extra = Json::object();
  if (o.method == "two-stage" || o.method == "local-search") {
    const auto r = hublocate::solve_two_stage(inst, o.hub_budget, o.threads);
    sol = r.merged;
    extra["violations"] = violations_json(r.violations);
    if (o.method == "local-search") {
      hublocate::LocalSearchOptions ls;
      ls.time_budget_s = o.time_budget;
      sol = hublocate::local_search_improve(inst, sol, ls);
    } else if (!o.json) {
      print_violations(r.violations);
    }
  } else if (o.method == "no-hub") {
    hublocate::NoHubOptions nh;
    nh.time_budget_s = o.time_budget;
    const auto r = hublocate::solve_no_hubs(inst, nh);
    sol = r.solution;
    extra["proven_optimal"] = r.proven_optimal;
  } else if (o.method == "oracle") {
    hublocate::OracleLimits limits;
    limits.threads = o.threads;
    const auto r = hublocate::enumerate_optimal(inst, limits);
    sol = r.solution;
    extra["evaluated"] = r.evaluated;
  } else {
    throw UsageError("unknown method '" + o.method + "'");
  }
  const CostBreakdown exact = hublocate::evaluate_cost(curves, sol, CostMode::kExact);
  const CostBreakdown approx = hublocate::evaluate_cost(curves, sol, CostMode::kApprox);
  if (!o.output.empty()) hublocate::save_solution(inst, sol, o.output, exact, CostMode::kExact);
  if (o.json) {
    Json out = {{"method", o.method},
                {"hubs", hub_count(sol)},
                {"cost_exact", hublocate::cost_to_json(exact, CostMode::kExact)},
                {"cost_approx", hublocate::cost_to_json(approx, CostMode::kApprox)}};
    out.update(extra);
    std::cout << out.dump(2) << "\n";
  } else {
    std::printf("method %s: %d hub(s), total %.6f exact, %.6f approx\n",
                o.method.c_str(), hub_count(sol), exact.total, approx.total);
    if (extra.contains("proven_optimal") && !extra["proven_optimal"].get<bool>()) {
      std::printf("budget exhausted before optimality was proven\n");
    }
  }
  return kExitOk;
}

int cmd_build_milp(const Options& o) {
  const Instance inst = hublocate::load_instance(o.instance);
  const hublocate::MilpModel m = hublocate::build_linearized_model(inst);
  if (ends_with(o.output, ".lp")) {
    emit(hublocate::emit_lp(m), o.output);
  } else if (ends_with(o.output, ".mps")) {
    emit(hublocate::emit_mps(m), o.output);
  } else {
    throw UsageError("output file must end in .lp or .mps");
  }
  if (o.json) {
    std::cout << Json{{"variables", m.variables().size()},
                      {"constraints", m.constraints().size()}}.dump(2) << "\n";
  } else {
    std::printf("%zu variables, %zu constraints\n", m.variables().size(),
                m.constraints().size());
  }
  return kExitOk;
}

int cmd_decode(const Options& o) {
  const Instance inst = hublocate::load_instance(o.instance);
  const hublocate::MilpModel m = hublocate::build_linearized_model(inst);
  const std::string model_text = hublocate::read_file(o.model);
  std::string expected;
  if (ends_with(o.model, ".lp")) {
    expected = hublocate::emit_lp(m);
  } else if (ends_with(o.model, ".mps")) {
    expected = hublocate::emit_mps(m);
  } else {
    throw UsageError("model file must end in .lp or .mps");
  }
  if (model_text != expected) {
    std::cerr << "error: model file was not built from this instance\n";
    return kExitInvalid;
  }
  const auto values = hublocate::parse_values(m, hublocate::read_file(o.values));
  const Solution sol = hublocate::decode_solution(inst, m, values);
  const auto report = hublocate::check_feasibility(inst, sol);
  if (!report.feasible()) {
    print_violations(report);
    return kExitInvalid;
  }
  const CostBreakdown approx = hublocate::evaluate_cost(inst, sol, CostMode::kApprox);
  emit(hublocate::format_solution(inst, sol, approx, CostMode::kApprox), o.output);
  if (!o.output.empty() && o.output != "-") {
    std::printf("decoded: objective %.6f, total %.6f approx\n",
                hublocate::objective_value(m, values), approx.total);
  }
  return kExitOk;
}

int cmd_evaluate(const Options& o) {
  const Instance inst = hublocate::load_instance(o.instance);
  hublocate::require_valid(inst);
  const Solution sol = hublocate::load_solution(inst, o.solution_a);
  const auto report = hublocate::check_feasibility(inst, sol);
  const std::string format = o.json ? "json" : o.format;
  if (!report.feasible()) {
    if (format == "json") {
      std::cout << Json{{"feasible", false}, {"violations", violations_json(report)}}
                       .dump(2)
                << "\n";
    } else {
      print_violations(report);
    }
    return kExitInvalid;
  }
  const CostMode mode = parse_mode(o.mode);
  const CostBreakdown c = hublocate::evaluate_cost(inst, sol, mode);
  if (format == "json") {
    std::cout << hublocate::cost_to_json(c, mode).dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << hublocate::format_cost_csv(c, mode);
  } else {
    std::cout << hublocate::format_cost_table(c, mode);
  }
  return kExitOk;
}

int cmd_compare(const Options& o) {
  const Instance inst = hublocate::load_instance(o.instance);
  hublocate::require_valid(inst);
  const CostMode mode = parse_mode(o.mode);
  const Solution a = hublocate::load_solution(inst, o.solution_a);
  const Solution b = hublocate::load_solution(inst, o.solution_b);
  for (const Solution* s : {&a, &b}) {
    const auto report = hublocate::check_feasibility(inst, *s);
    if (!report.feasible()) {
      print_violations(report);
      return kExitInvalid;
    }
  }
  const CostBreakdown ca = hublocate::evaluate_cost(inst, a, mode);
  const CostBreakdown cb = hublocate::evaluate_cost(inst, b, mode);
  const double improvement =
      ca.total > 0.0 ? 100.0 * (ca.total - cb.total) / ca.total : 0.0;
  const double share_a = hublocate::hub_volume_share(inst, a);
  const double share_b = hublocate::hub_volume_share(inst, b);
  const std::pair<const char*, double> deltas[] = {
      {"setup", cb.setup - ca.setup},
      {"hub_consolidation", cb.hub_consolidation - ca.hub_consolidation},
      {"port_consolidation", cb.port_consolidation - ca.port_consolidation},
      {"land_branch_to_port", cb.land_branch_to_port - ca.land_branch_to_port},
      {"land_branch_to_hub", cb.land_branch_to_hub - ca.land_branch_to_hub},
      {"sea", cb.sea - ca.sea},
      {"total", cb.total - ca.total}};
  if (o.json) {
    Json d = Json::object();
    for (const auto& [name, v] : deltas) d[name] = v;
    std::cout << Json{{"mode", hublocate::to_string(mode)},
                      {"a", hublocate::cost_to_json(ca, mode)},
                      {"b", hublocate::cost_to_json(cb, mode)},
                      {"delta", d},
                      {"improvement_percent", improvement},
                      {"hub_volume_share_a", share_a},
                      {"hub_volume_share_b", share_b}}
                     .dump(2)
              << "\n";
  } else {
    std::printf("%-20s %16s %16s %16s\n", "term", "A", "B", "B - A");
    const double va[] = {ca.setup, ca.hub_consolidation, ca.port_consolidation,
                         ca.land_branch_to_port, ca.land_branch_to_hub, ca.sea, ca.total};
    const double vb[] = {cb.setup, cb.hub_consolidation, cb.port_consolidation,
                         cb.land_branch_to_port, cb.land_branch_to_hub, cb.sea, cb.total};
    for (std::size_t i = 0; i < 7; ++i) {
      std::printf("%-20s %16.4f %16.4f %16.4f\n", deltas[i].first, va[i], vb[i],
                  deltas[i].second);
    }
    std::printf("improvement of B over A: %.4f %%\n", improvement);
    std::printf("volume via hubs: A %.2f %%, B %.2f %%\n", 100.0 * share_a,
                100.0 * share_b);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hub location and port assignment for LCL ocean freight"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")
      ->envname("HUBLOCATE_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json", o.json, "Machine-readable JSON on stdout");

  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", o.instance)->required();

  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--seed", o.seed);
  gen->add_option("--branches", o.branches)->check(CLI::PositiveNumber);
  gen->add_option("--ports", o.ports)->check(CLI::PositiveNumber);
  gen->add_option("--dests", o.dests)->check(CLI::PositiveNumber);
  gen->add_option("--density", o.density)->check(CLI::Range(1e-9, 1.0));
  gen->add_option("--profile", o.profile)
      ->check(CLI::IsMember({"uniform", "consolidation_favorable", "nvocc_only_mix"}));
  gen->add_option("--bands", o.bands, "Volume bands per container (8 or 63 typical)")
      ->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", o.output);

  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("--method", o.method)
      ->check(CLI::IsMember({"two-stage", "no-hub", "local-search", "oracle"}));
  solve->add_option("--hub-budget", o.hub_budget);
  solve->add_option("--time-budget", o.time_budget, "Seconds, 0 = unlimited")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("instance", o.instance)->required();
  solve->add_option("-o,--output", o.output);

  auto* build = app.add_subcommand("build-milp", "Write the linearized MILP");
  build->add_option("instance", o.instance)->required();
  build->add_option("-o,--output", o.output)->required();

  auto* decode = app.add_subcommand("decode", "Read external solver values back");
  decode->add_option("instance", o.instance)->required();
  decode->add_option("model", o.model)->required();
  decode->add_option("values", o.values)->required();
  decode->add_option("-o,--output", o.output);

  auto* evaluate = app.add_subcommand("evaluate", "Cost breakdown of a solution");
  evaluate->add_option("--mode", o.mode)->check(CLI::IsMember({"exact", "approx"}));
  evaluate->add_option("--format", o.format)->check(CLI::IsMember({"table", "json", "csv"}));
  evaluate->add_option("instance", o.instance)->required();
  evaluate->add_option("solution", o.solution_a)->required();

  auto* compare = app.add_subcommand("compare", "Compare two solutions");
  compare->add_option("--mode", o.mode)->check(CLI::IsMember({"exact", "approx"}));
  compare->add_option("instance", o.instance)->required();
  compare->add_option("a", o.solution_a)->required();
  compare->add_option("b", o.solution_b)->required();

  for (auto* sub : {validate, gen, solve, build, decode, evaluate, compare}) {
    sub->add_flag("--json", o.json, "Machine-readable JSON on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*gen) return cmd_gen(o);
    if (*solve) return cmd_solve(o);
    if (*build) return cmd_build_milp(o);
    if (*decode) return cmd_decode(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*compare) return cmd_compare(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hublocate::LimitError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitLimit;
  } catch (const hublocate::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
