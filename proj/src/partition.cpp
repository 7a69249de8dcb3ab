#include "lcoal/partition.hpp"

#include <algorithm>
#include <cmath>

#include "lcoal/error.hpp"

namespace lcoal {

LabeledPartition::LabeledPartition(int n, std::vector<LabeledBlock> blocks) : n_(n) {
  if (n < 0) throw Error(ErrorCode::ValidationError, "ground set size must be >= 0");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (auto& b : blocks) {
    if (b.elements.empty()) throw Error(ErrorCode::ValidationError, "partition blocks must be nonempty");
    std::sort(b.elements.begin(), b.elements.end());
    for (int e : b.elements) {
      if (e < 1 || e > n) throw Error(ErrorCode::ValidationError, "element " + std::to_string(e) + " outside [n]");
      if (seen[static_cast<std::size_t>(e)]) throw Error(ErrorCode::ValidationError, "element " + std::to_string(e) + " in two blocks");
      seen[static_cast<std::size_t>(e)] = 1;
    }
  }
  for (int e = 1; e <= n; ++e)
    if (!seen[static_cast<std::size_t>(e)]) throw Error(ErrorCode::ValidationError, "element " + std::to_string(e) + " missing");
  std::sort(blocks.begin(), blocks.end(),
            [](const LabeledBlock& x, const LabeledBlock& y) { return x.elements.front() < y.elements.front(); });
  blocks_ = std::move(blocks);
}

LabeledPartition LabeledPartition::singletons(const std::vector<int>& sites) {
  std::vector<LabeledBlock> blocks;
  for (std::size_t i = 0; i < sites.size(); ++i) blocks.push_back({{static_cast<int>(i) + 1}, sites[i]});
  return LabeledPartition(static_cast<int>(sites.size()), std::move(blocks));
}

LabeledPartition LabeledPartition::per_site(int n_per_site, int sites) {
  if (n_per_site < 0 || sites < 1) throw Error(ErrorCode::InvalidArgument, "per_site needs n >= 0 and sites >= 1");
  std::vector<int> labels(static_cast<std::size_t>(n_per_site) * static_cast<std::size_t>(sites));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(sites));
  return singletons(labels);
}

std::size_t LabeledPartition::alive_count() const {
  return static_cast<std::size_t>(std::count_if(blocks_.begin(), blocks_.end(),
                                                 [](const LabeledBlock& b) { return b.site != kCemetery; }));
}

void LabeledPartition::validate_labels(int sites, bool allow_cemetery) const {
  for (const auto& b : blocks_) {
    if (b.site == kCemetery && allow_cemetery) continue;
    if (b.site < 0 || b.site >= sites)
      throw Error(ErrorCode::ValidationError, "block label " + std::to_string(b.site) + " is not a site");
  }
}

bool LabeledPartition::operator==(const LabeledPartition& o) const {
  if (n_ != o.n_ || blocks_.size() != o.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].site != o.blocks_[i].site || blocks_[i].elements != o.blocks_[i].elements) return false;
  return true;
}

LabeledPartition restrict_partition(const LabeledPartition& pi, int m) {
  if (m < 1 || m > pi.n()) throw Error(ErrorCode::InvalidArgument, "restriction level must be in [1, n]");
  std::vector<LabeledBlock> out;
  for (const auto& b : pi.blocks()) {
    LabeledBlock r{{}, b.site};
    for (int e : b.elements)
      if (e <= m) r.elements.push_back(e);
    if (!r.elements.empty()) out.push_back(std::move(r));
  }
  return LabeledPartition(m, std::move(out));
}

double partition_distance(const LabeledPartition& a, const LabeledPartition& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::GroundSetMismatch, "partitions of different ground sets");
  const auto n = static_cast<std::size_t>(a.n());
  // For each element: least element of its block and the block label. The
  // restrictions to [m] agree iff these agree for every element <= m.
  auto describe = [n](const LabeledPartition& p) {
    std::vector<std::pair<int, int>> d(n + 1);
    for (const auto& blk : p.blocks())
      for (int e : blk.elements) d[static_cast<std::size_t>(e)] = {blk.elements.front(), blk.site};
    return d;
  };
  const auto da = describe(a), db = describe(b);
  for (std::size_t e = 1; e <= n; ++e)
    if (da[e] != db[e]) return std::ldexp(1.0, -static_cast<int>(e));
  return 0.0;
}

}  // namespace lcoal
