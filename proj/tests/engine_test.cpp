#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>
#include <string>

#include "lcoal/engine.hpp"
#include "lcoal/rng.hpp"
#include "lcoal/stats.hpp"

using namespace lcoal;

namespace {

SimulationConfig base(const LambdaMeasure& m, GeographySpec geo) {
  SimulationConfig cfg;
  cfg.kernel = make_kernel(m);
  cfg.merge_law = std::make_shared<MergeLaw>(cfg.kernel);
  cfg.geography = std::make_shared<const GeographySpec>(std::move(geo));
  return cfg;
}

LabeledPartition at_sites(std::vector<int> sites) { return LabeledPartition::singletons(sites); }

}  // namespace

TEST_CASE("atom at one collapses everything in one event") {
  auto cfg = base(LambdaMeasure::atom(1.0), GeographySpec::single_site());
  cfg.stop = StopRule::Absorbed;
  std::vector<double> times;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    cfg.seed = derive_seed(9, s);
    const auto r = simulate(LabeledPartition::per_site(5, 1), cfg);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].k == 5);
    CHECK(r.alive_blocks == 1);
    times.push_back(r.events[0].time);
  }
  const double d = ks_statistic(times, [](double t) { return 1.0 - std::exp(-t); });
  CHECK(ks_pvalue(d, 2000) > 0.01);
}

TEST_CASE("Kingman absorption time") {
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::single_site());
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 1;
  cfg.record_events = false;
  std::vector<double> t;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    cfg.seed = derive_seed(1, s);
    t.push_back(simulate(LabeledPartition::per_site(10, 1), cfg).end_time);
  }
  const auto e = mean_estimate(t);
  CHECK(std::fabs(e.mean - 1.8) <= 3 * e.standard_error);
}

TEST_CASE("blocks at distinct sites never merge without meeting") {
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::from_rows({{{1, 1.0}}, {{0, 1.0}}}));
  cfg.horizon = 1e-6;
  for (std::uint64_t s = 0; s < 200; ++s) {
    cfg.seed = s;
    const auto r = simulate(at_sites({0, 1}), cfg);
    for (const auto& e : r.events) CHECK(e.kind != EventKind::Merge);
    CHECK(r.alive_blocks == 2);
  }
  cfg.migration = false;
  cfg.horizon = 50.0;
  const auto r = simulate(at_sites({0, 1}), cfg);
  CHECK(r.events.empty());
  CHECK(r.alive_blocks == 2);
}

TEST_CASE("first merge picks a uniform pair") {
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::single_site());
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 4;
  std::vector<double> counts(10, 0.0);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    cfg.seed = derive_seed(4, s);
    const auto r = simulate(LabeledPartition::per_site(5, 1), cfg);
    REQUIRE(r.events.size() == 1);
    const int a = r.events[0].blocks[0], b = r.events[0].blocks[1];
    int idx = 0;
    for (int i = 1; i <= 5; ++i)
      for (int j = i + 1; j <= 5; ++j, ++idx)
        if (i == std::min(a, b) && j == std::max(a, b)) counts[static_cast<std::size_t>(idx)] += 1;
  }
  CHECK(chi_square_test(counts, std::vector<double>(10, 0.1)).p_value > 0.01);
}

TEST_CASE("multiple-merger subsets are exchangeable") {
  auto cfg = base(LambdaMeasure::atom(0.6), GeographySpec::single_site());
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 4;
  // Count how often each element takes part in the first merge.
  std::vector<double> hits(5, 0.0);
  for (std::uint64_t s = 0; s < 6000; ++s) {
    cfg.seed = derive_seed(8, s);
    const auto r = simulate(LabeledPartition::per_site(5, 1), cfg);
    for (int m : r.events.front().blocks) hits[static_cast<std::size_t>(m - 1)] += 1;
  }
  CHECK(chi_square_test(hits, std::vector<double>(5, 0.2)).p_value > 0.01);
}

TEST_CASE("holding time at a frozen configuration") {
  // Three blocks at site 0 and one at site 1 of a two-site graph:
  // lambda_3 + lambda_1 + 4 migration = 3 + 0 + 4 = 7.
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::complete_graph(2));
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 1;
  std::vector<double> t;
  for (std::uint64_t s = 0; s < 3000; ++s) {
    cfg.seed = derive_seed(12, s);
    t.push_back(simulate(at_sites({0, 0, 0, 1}), cfg).events.front().time);
  }
  const double d = ks_statistic(t, [](double x) { return 1.0 - std::exp(-7.0 * x); });
  CHECK(ks_pvalue(d, static_cast<long>(t.size())) > 0.01);
}

TEST_CASE("killing without coalescence") {
  SimulationConfig cfg;
  cfg.geography = std::make_shared<const GeographySpec>(GeographySpec::single_site());
  cfg.killing = true;
  cfg.migration = false;
  const double T = 0.7;
  cfg.horizon = T;
  std::vector<double> killed;
  for (std::uint64_t s = 0; s < 3000; ++s) {
    cfg.seed = derive_seed(21, s);
    const auto r = simulate(LabeledPartition::per_site(20, 1), cfg);
    for (const auto& e : r.events) CHECK(e.kind == EventKind::Kill);
    killed.push_back(20.0 - r.alive_blocks);
  }
  const auto e = mean_estimate(killed);
  CHECK(std::fabs(e.mean - 20.0 * (1.0 - std::exp(-T))) <= 3 * e.standard_error);
}

TEST_CASE("merge sizes account for gamma") {
  const auto m = LambdaMeasure::lebesgue();
  auto cfg = base(m, GeographySpec::single_site());
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 19;
  std::vector<double> drop;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    cfg.seed = derive_seed(5, s);
    const auto r = simulate(LabeledPartition::per_site(20, 1), cfg);
    drop.push_back(r.events.front().k - 1.0);
  }
  const auto e = mean_estimate(drop);
  const double lam = cfg.kernel->lambda_total(20).value, gam = cfg.kernel->gamma_total(20).value;
  CHECK(std::fabs(e.mean * lam - gam) <= 3 * e.standard_error * lam);
}

TEST_CASE("trajectory invariants") {
  auto cfg = base(LambdaMeasure::beta(0.5, 1.5), build_torus(1, WalkSpec::simple(3)));
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 3;
  cfg.record_site_series = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    const auto r = simulate(LabeledPartition::per_site(3, 27), cfg);
    int blocks = 81;
    double t = 0;
    for (const auto& e : r.events) {
      CHECK(e.time > t);
      t = e.time;
      if (e.kind == EventKind::Merge) {
        CHECK(e.blocks_after == blocks - (e.k - 1));
        CHECK(static_cast<int>(e.blocks.size()) == e.k);
      } else {
        CHECK(e.blocks_after == blocks);
      }
      blocks = e.blocks_after;
    }
    CHECK(blocks == r.alive_blocks);
    CHECK(r.alive_blocks <= 3);
    CHECK(r.predicate_hit);
    CHECK(r.final_partition.size() == static_cast<std::size_t>(r.alive_blocks));
  }
}

TEST_CASE("probes") {
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::single_site());
  cfg.probe_times = {0.0, 0.01, 0.1, 100.0};
  cfg.horizon = 0.2;
  cfg.seed = 3;
  const auto r = simulate(LabeledPartition::per_site(50, 1), cfg);
  REQUIRE(r.probe_counts.size() == 4);
  CHECK(r.probe_counts[0] == 50);
  CHECK(r.probe_counts[1] >= r.probe_counts[2]);
  CHECK(r.probe_counts[3] == -1);
}

TEST_CASE("budget overrun keeps the partial trajectory") {
  auto cfg = base(LambdaMeasure::kingman(), build_torus(2, WalkSpec::simple(3)));
  cfg.event_budget = 10;
  cfg.seed = 1;
  try {
    simulate(LabeledPartition::per_site(5, 125), cfg);
    FAIL("expected BUDGET_EXCEEDED");
  } catch (const BudgetExceededError& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
    CHECK(e.partial().events.size() == 10);
  }
}

TEST_CASE("deadlock") {
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::complete_graph(2));
  cfg.migration = false;
  cfg.stop = StopRule::BlocksAtMost;
  cfg.stop_blocks = 1;
  try {
    simulate(at_sites({0, 1}), cfg);
    FAIL("expected ZERO_RATE_DEADLOCK");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroRateDeadlock);
  }
  cfg.stop = StopRule::Absorbed;
  const auto r = simulate(at_sites({0, 1}), cfg);
  CHECK(r.absorbed);
}

TEST_CASE("same seed, same trajectory") {
  auto cfg = base(LambdaMeasure::beta(1.5, 0.5), build_torus(1, WalkSpec::simple(3)));
  cfg.horizon = 3.0;
  cfg.seed = 77;
  const auto a = simulate(LabeledPartition::per_site(4, 27), cfg);
  const auto b = simulate(LabeledPartition::per_site(4, 27), cfg);
  CHECK(trajectory_jsonl(a, "h") == trajectory_jsonl(b, "h"));
  cfg.seed = 78;
  CHECK(trajectory_jsonl(simulate(LabeledPartition::per_site(4, 27), cfg), "h") != trajectory_jsonl(a, "h"));
}

TEST_CASE("serialization") {
  auto cfg = base(LambdaMeasure::kingman(), GeographySpec::single_site());
  cfg.stop = StopRule::BlocksAtMost;
  cfg.seed = 2;
  const auto r = simulate(LabeledPartition::per_site(4, 1), cfg);
  const auto jl = trajectory_jsonl(r, "abc123");
  std::istringstream in(jl);
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line.find("\"config_hash\":\"abc123\"") != std::string::npos);
  ++lines;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == static_cast<int>(r.events.size()) + 2);
  const auto csv = trajectory_csv(r);
  CHECK(csv.rfind("time,blocks\n", 0) == 0);
}
