#pragma once

#include <vector>

namespace lcoal {

// Label of killed blocks.
inline constexpr int kCemetery = -1;

struct LabeledBlock {
  std::vector<int> elements;  // sorted, elements of [n] are 1-based
  int site = 0;
};

// Partition of [n] with one site label per block, blocks ordered by least element.
class LabeledPartition {
 public:
  LabeledPartition() = default;
  // Sorts elements and blocks; throws VALIDATION_ERROR unless the blocks partition [n].
  LabeledPartition(int n, std::vector<LabeledBlock> blocks);

  // Singleton blocks {e} at sites[e-1].
  static LabeledPartition singletons(const std::vector<int>& sites);
  // n singletons per site, element e at site (e-1) mod sites.
  static LabeledPartition per_site(int n_per_site, int sites);

  int n() const { return n_; }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<LabeledBlock>& blocks() const { return blocks_; }
  std::size_t alive_count() const;
  // Labels inside [0, sites) or the cemetery when allowed.
  void validate_labels(int sites, bool allow_cemetery) const;

  bool operator==(const LabeledPartition& other) const;

 private:
  int n_ = 0;
  std::vector<LabeledBlock> blocks_;
};

LabeledPartition restrict_partition(const LabeledPartition& pi, int m);
// 2^{-m} for the smallest m whose labeled restrictions differ, 0 if equal.
double partition_distance(const LabeledPartition& a, const LabeledPartition& b);

}  // namespace lcoal
