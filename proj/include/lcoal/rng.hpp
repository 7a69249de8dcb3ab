#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace lcoal {

std::uint64_t splitmix64(std::uint64_t& state);
// Seed of stream `index` under master seed `master` (counter-based split).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }
  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  // Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 eng_;
};

// Walker/Vose alias table over nonnegative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace lcoal
