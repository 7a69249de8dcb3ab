#include <doctest.h>

#include <cmath>

#include "lcoal/error.hpp"
#include "lcoal/kingman.hpp"
#include "lcoal/stats.hpp"

using namespace lcoal;

namespace {

double mean_of(const std::vector<double>& p) {
  double m = 0;
  for (std::size_t k = 0; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
  return m;
}

double sum_of(const std::vector<double>& p) {
  double s = 0;
  for (double x : p) s += x;
  return s;
}

}  // namespace

TEST_CASE("death chain from small starts") {
  // Two blocks merge at rate 1.
  const auto two = death_chain_law(2, 0.7);
  CHECK(two.probs[2] == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
  CHECK(two.probs[1] == doctest::Approx(1 - std::exp(-0.7)).epsilon(1e-12));
  // Three blocks: P(3) = e^{-3t}, P(2) = 3/2 (e^{-t} - e^{-3t}).
  const double t = 0.4;
  const auto three = death_chain_law(3, t);
  CHECK(three.probs[3] == doctest::Approx(std::exp(-3 * t)).epsilon(1e-12));
  CHECK(three.probs[2] == doctest::Approx(1.5 * (std::exp(-t) - std::exp(-3 * t))).epsilon(1e-12));
  CHECK(sum_of(death_chain_law(500, 0.05).probs) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("entrance law at large and small times") {
  CHECK(kingman_entrance_reference(20.0).probs[1] > 0.99);
  EntranceOptions chain;
  chain.method = EntranceMethod::DeathChain;
  CHECK(kingman_entrance_reference(20.0, chain).probs[1] > 0.99);
  EntranceOptions sim;
  sim.method = EntranceMethod::SimulateFrom;
  sim.n0 = 100 * 200;
  sim.replicas = 2000;
  sim.cross_check = false;
  const auto law = kingman_entrance_reference(0.01, sim);
  CHECK(std::fabs(mean_of(law.probs) - 200.0) <= 0.05 * 200.0);
}

TEST_CASE("series and death chain agree") {
  for (double t : {0.2, 0.5, 1.0, 3.0}) {
    const auto series = entrance_law_series(t);
    EntranceOptions chain;
    chain.method = EntranceMethod::DeathChain;
    chain.cross_check = false;
    const auto dc = kingman_entrance_reference(t, chain);
    CAPTURE(t);
    CHECK(total_variation(series.probs, dc.probs) <= 2e-3);
    CHECK(sum_of(series.probs) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("tail probabilities decrease in time") {
  std::vector<double> prev;
  for (double t : {0.1, 0.2, 0.4, 0.8, 1.6}) {
    const auto p = entrance_law_series(t).probs;
    std::vector<double> tail(p.size() + 1, 0.0);
    for (std::size_t k = p.size(); k-- > 0;) tail[k] = tail[k + 1] + p[k];
    for (std::size_t k = 1; k < std::min(prev.size(), tail.size()); ++k) CHECK(tail[k] <= prev[k] + 1e-9);
    prev = tail;
  }
}

TEST_CASE("series truncation is reported at tiny times") {
  try {
    entrance_law_series(1e-4, 1e-12, 40);
    FAIL("expected TRUNCATION_UNSTABLE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationUnstable);
  }
}

TEST_CASE("stable start size") {
  const int n0 = stable_start_size(0.5, 1e-3);
  CHECK(n0 >= 40);
  const double tv = total_variation(death_chain_law(n0, 0.5).probs, death_chain_law(2 * n0, 0.5).probs);
  CHECK(tv < 1e-3);
}

TEST_CASE("two-time law") {
  const auto j = kingman_two_time_law(0.5, 1.0);
  double s = 0;
  for (std::size_t a = 0; a < j.size(); ++a)
    for (std::size_t b = 0; b < j[a].size(); ++b) {
      s += j[a][b];
      if (b > a) CHECK(j[a][b] == 0.0);
    }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
  // Marginal at t2 equals the entrance law at t2.
  const auto p2 = entrance_law_series(1.0).probs;
  for (std::size_t b = 1; b < std::min<std::size_t>(p2.size(), 8); ++b) {
    double m = 0;
    for (const auto& row : j)
      if (b < row.size()) m += row[b];
    CHECK(m == doctest::Approx(p2[b]).epsilon(1e-6));
  }
}
