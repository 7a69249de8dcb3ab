#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "lcoal/rates.hpp"

namespace lcoal {

// Cumulative merge-size laws for b = 2..capacity, derived from one quadrature
// row at b = capacity by the downward Pascal recursion
//   mu_{b,k} = (mu_{b+1,k} (b+1-k) + mu_{b+1,k+1} (k+1)) / (b+1).
class MergeLawTable {
 public:
  MergeLawTable(const RateKernel& kernel, int capacity);

  int capacity() const { return cap_; }
  // Merge size k in [2, b] for a uniform draw u in [0,1).
  int sample(int b, double u) const;
  double probability(int b, int k) const;

 private:
  const double* cdf(int b) const { return cdf_.data() + offset_[static_cast<std::size_t>(b)]; }

  int cap_;
  std::vector<double> cdf_;
  std::vector<std::size_t> offset_;
};

// Shared, lazily grown view of the merge laws of one kernel.
class MergeLaw {
 public:
  explicit MergeLaw(KernelPtr kernel, int initial_capacity = 32);

  bool binary_only() const { return binary_only_; }
  // Table covering b; grows (geometrically) when needed. Thread safe.
  std::shared_ptr<const MergeLawTable> table_for(int b);

 private:
  KernelPtr kernel_;
  bool binary_only_;
  std::mutex mu_;
  std::shared_ptr<const MergeLawTable> table_;
};

}  // namespace lcoal
