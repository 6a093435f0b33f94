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


#include <set>

#include <gtest/gtest.h>

#include "hublocate.hpp"

namespace hublocate {
namespace {

GenOptions options(std::uint64_t seed, Profile profile = Profile::kUniform) {
  GenOptions g;
  g.seed = seed;
  g.profile = profile;
  return g;
}

std::size_t relations(const Instance& inst) {
  std::size_t n = 0;
  for (double v : inst.demand.data()) n += v > 0.0;
  return n;
}

TEST(Gen, SameSeedSameInstance) {
  for (Profile p : {Profile::kUniform, Profile::kConsolidationFavorable,
                    Profile::kNvoccOnlyMix}) {
    const Instance a = generate(options(11, p));
    const Instance b = generate(options(11, p));
    EXPECT_EQ(a, b);
    EXPECT_EQ(format_instance(a), format_instance(b));
    EXPECT_FALSE(generate(options(12, p)) == a);
  }
}

TEST(Gen, InstancesAreValid) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GenOptions g = options(seed, static_cast<Profile>(seed % 3));
    g.branches = 1 + seed % 9;
    g.origin_ports = 1 + seed % 4;
    g.destinations = 1 + seed % 5;
    g.density = 0.3 + 0.1 * static_cast<double>(seed % 8);
    g.volume_bands = 1 + seed % 10;
    const Instance inst = generate(g);
    ASSERT_TRUE(validate_instance(inst).empty()) << seed;
    ASSERT_EQ(parse_instance(format_instance(inst)), inst);
    for (std::size_t t = 0; t < inst.num_destinations(); ++t) {
      ASSERT_TRUE(inst.usable(0, t));
    }
  }
}

TEST(Gen, IdsAndTariffShape) {
  GenOptions g = options(5);
  g.branches = 12;
  const Instance inst = generate(g);
  EXPECT_EQ(inst.nodes.branches.front(), "B01");
  EXPECT_EQ(inst.nodes.branches.back(), "B12");
  EXPECT_EQ(inst.nodes.origin_ports.front(), "S01");
  EXPECT_EQ(inst.nodes.destination_ports.back(), "T02");
  const LandCostTable& t = inst.land_costs;
  EXPECT_EQ(t.volume_breaks.size(), 8u);
  EXPECT_EQ(t.volume_breaks.back(), inst.params.land_container_volume);
  for (std::size_t d = 0; d < t.cost.rows(); ++d) {
    for (std::size_t k = 1; k < t.cost.cols(); ++k) {
      EXPECT_LE(t.cost(d, k - 1), t.cost(d, k));
    }
  }
}

TEST(Gen, FirstClassScaleRelationCount) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GenOptions g = options(seed);
    g.branches = 20;
    g.origin_ports = 3;
    g.destinations = 5;
    g.density = 0.5;
    const std::size_t n = relations(generate(g));
    EXPECT_GE(n, 35u) << seed;
    EXPECT_LE(n, 75u) << seed;
  }
}

TEST(Gen, ConsolidationProfileRewardsHubs) {
  GenOptions g = options(7, Profile::kConsolidationFavorable);
  const Instance inst = generate(g);
  for (double v : inst.demand.data()) {
    if (v > 0.0) {
      EXPECT_GE(v, 3.0);
      EXPECT_LE(v, 15.0);
    }
  }
  const OracleResult best = enumerate_optimal(inst);
  EXPECT_GT(hub_volume_share(inst, best.solution), 0.0);
  EXPECT_LT(best.cost.total, solve_no_hubs(inst).cost.total);
}

TEST(Gen, NvoccOnlyMixHasPenaltyRelations) {
  std::size_t nvocc_only = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenOptions g = options(seed, Profile::kNvoccOnlyMix);
    g.origin_ports = 4;
    g.destinations = 4;
    const Instance inst = generate(g);
    for (const auto& r : inst.sea_rates.data()) {
      nvocc_only += r && !r->has_fcl() && r->has_nvocc();
    }
  }
  EXPECT_GT(nvocc_only, 10u);
}

TEST(Gen, ProfileNames) {
  for (Profile p : {Profile::kUniform, Profile::kConsolidationFavorable,
                    Profile::kNvoccOnlyMix}) {
    EXPECT_EQ(parse_profile(to_string(p)), p);
  }
  EXPECT_THROW(parse_profile("dense"), Error);
}

TEST(Gen, RejectsBadOptions) {
  GenOptions g;
  g.branches = 0;
  EXPECT_THROW(generate(g), Error);
  g = GenOptions{};
  g.density = 0.0;
  EXPECT_THROW(generate(g), Error);
  g.density = 1.5;
  EXPECT_THROW(generate(g), Error);
}

}  // namespace
}  // namespace hublocate
