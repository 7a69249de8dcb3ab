#include <doctest.h>

#include <memory>

#include "lcoal/engine.hpp"
#include "lcoal/rng.hpp"

using namespace lcoal;

namespace {

SimulationConfig config(const LambdaMeasure& m, GeographySpec geo, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.kernel = make_kernel(m);
  cfg.merge_law = std::make_shared<MergeLaw>(cfg.kernel);
  cfg.geography = std::make_shared<const GeographySpec>(std::move(geo));
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 1;
  cfg.seed = seed;
  return cfg;
}

struct RestrictionObserver : CoupledObserver {
  int m = 0;
  long states = 0, mismatches = 0;
  void on_state(double, const Simulator& driver, const std::vector<LabeledPartition>& variants,
                const std::vector<int>&) override {
    ++states;
    if (!(restrict_partition(driver.partition(), m) == variants[0])) ++mismatches;
  }
};

struct DominationObserver : CoupledObserver {
  long states = 0, violations = 0, inequalities = 0;
  void on_state(double, const Simulator& driver, const std::vector<LabeledPartition>&,
                const std::vector<int>& counts) override {
    ++states;
    if (driver.alive_blocks() > counts[0]) ++violations;
    if (driver.alive_blocks() != counts[1]) ++inequalities;
  }
  bool wants_partitions() const override { return false; }
};

}  // namespace

TEST_CASE("restricted starts follow the restricted full trajectory") {
  const auto full = LabeledPartition::singletons({0, 1, 2, 0, 1, 2});
  for (const auto& m : {LambdaMeasure::kingman(), LambdaMeasure::beta(0.5, 1.5), LambdaMeasure::lebesgue()}) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto cfg = config(m, GeographySpec::complete_graph(3), derive_seed(31, s));
      RestrictionObserver obs;
      obs.m = 3;
      const auto recs = coupled_simulate(full, {{restrict_partition(full, 3), {}}}, cfg, &obs);
      CHECK(obs.states > 1);
      CHECK(obs.mismatches == 0);
      CHECK(restrict_partition(recs[0].final_partition, 3) == recs[1].final_partition);
    }
  }
}

TEST_CASE("class split dominates the unrestricted count") {
  const auto full = LabeledPartition::per_site(6, 1);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto cfg = config(LambdaMeasure::kingman(), GeographySpec::single_site(), derive_seed(32, s));
    DominationObserver obs;
    coupled_simulate(full, {{full, {0, 0, 0, 1, 1, 1}}, {full, {}}}, cfg, &obs);
    CHECK(obs.states > 1);
    CHECK(obs.violations == 0);
    CHECK(obs.inequalities == 0);
  }
}

TEST_CASE("a single variant reproduces simulate") {
  const auto start = LabeledPartition::per_site(3, 27);
  auto cfg = config(LambdaMeasure::beta(1.5, 0.5), build_torus(1, WalkSpec::simple(3)), 5);
  const auto recs = coupled_simulate(start, {{start, {}}}, cfg);
  const auto plain = simulate(start, cfg);
  CHECK(trajectory_jsonl(recs[0], "") == trajectory_jsonl(plain, ""));
  CHECK(recs[1].final_partition == plain.final_partition);
  CHECK(recs[1].alive_blocks == plain.alive_blocks);
}

TEST_CASE("incompatible variants") {
  const auto full = LabeledPartition::singletons({0, 1, 0});
  auto cfg = config(LambdaMeasure::kingman(), GeographySpec::complete_graph(2), 1);
  const auto expect_incompatible = [&](const CoupledVariant& v) {
    try {
      coupled_simulate(full, {v}, cfg);
      FAIL("expected INCOMPATIBLE_VARIANTS");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IncompatibleVariants);
    }
  };
  expect_incompatible({LabeledPartition(3, {{{1, 2}, 0}, {{3}, 0}}), {}});
  expect_incompatible({LabeledPartition::singletons({1, 1, 0}), {}});
  expect_incompatible({LabeledPartition::singletons({0, 1, 0, 0}), {}});
  expect_incompatible({full, {0, 1}});
}
