#include "lcoal/merge_table.hpp"

#include <algorithm>

#include "lcoal/error.hpp"
#include "lcoal/simd/kernels.hpp"

namespace lcoal {

namespace {
constexpr int kMaxCapacity = 20000;
}

MergeLawTable::MergeLawTable(const RateKernel& kernel, int capacity) : cap_(std::max(capacity, 2)) {
  if (cap_ > kMaxCapacity)
    throw Error(ErrorCode::SizeOverflow, "merge law table beyond " + std::to_string(kMaxCapacity) + " blocks");
  offset_.assign(static_cast<std::size_t>(cap_) + 1, 0);
  std::size_t total = 0;
  for (int b = 2; b <= cap_; ++b) {
    offset_[static_cast<std::size_t>(b)] = total;
    total += static_cast<std::size_t>(b - 1);
  }
  cdf_.resize(total);

  std::vector<double> upper = kernel.merge_row(cap_);
  upper.push_back(0.0);
  std::vector<double> lower(upper.size(), 0.0);
  for (int b = cap_; b >= 2; --b) {
    double* out = cdf_.data() + offset_[static_cast<std::size_t>(b)];
    long double acc = 0.0L;
    for (int k = 2; k <= b; ++k) acc += upper[static_cast<std::size_t>(k)];
    if (!(acc > 0.0L)) throw Error(ErrorCode::ZeroTotalRate, "merge size law with zero total rate");
    long double run = 0.0L;
    for (int k = 2; k <= b; ++k) {
      run += upper[static_cast<std::size_t>(k)];
      out[k - 2] = static_cast<double>(run / acc);
    }
    out[b - 2] = 1.0;
    if (b > 2) {
      simd::pascal_down(upper.data(), lower.data(), static_cast<std::size_t>(b - 1));
      lower[static_cast<std::size_t>(b)] = 0.0;
      std::swap(upper, lower);
    }
  }
}

int MergeLawTable::sample(int b, double u) const {
  const double* c = cdf(b);
  const double* it = std::upper_bound(c, c + (b - 1), u);
  const int k = static_cast<int>(it - c) + 2;
  return std::min(k, b);
}

double MergeLawTable::probability(int b, int k) const {
  const double* c = cdf(b);
  return k == 2 ? c[0] : c[k - 2] - c[k - 3];
}

MergeLaw::MergeLaw(KernelPtr kernel, int initial_capacity)
    : kernel_(std::move(kernel)), binary_only_(kernel_->measure().pairwise_only()) {
  if (!binary_only_) table_ = std::make_shared<const MergeLawTable>(*kernel_, std::max(initial_capacity, 2));
}

std::shared_ptr<const MergeLawTable> MergeLaw::table_for(int b) {
  std::lock_guard lock(mu_);
  if (!table_ || table_->capacity() < b) {
    const int cap = std::max(b, table_ ? std::min(2 * table_->capacity(), kMaxCapacity) : 2);
    table_ = std::make_shared<const MergeLawTable>(*kernel_, cap);
  }
  return table_;
}

}  // namespace lcoal
