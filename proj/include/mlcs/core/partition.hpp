#pragma once

#include <vector>

#include "mlcs/core/types.hpp"

namespace mlcs {

// Boundaries B_1 < ... < B_r; level k (0-based) covers [B_{k-1}, B_k) with B_{-1} = 0.
class LevelPartition {
 public:
  LevelPartition() = default;
  explicit LevelPartition(std::vector<Index> boundaries);

  static LevelPartition uniform(Index total, Index levels);

  Index levels() const { return b_.size(); }
  Index total() const { return b_.empty() ? 0 : b_.back(); }
  Index begin(Index k) const { return k == 0 ? 0 : b_[k - 1]; }
  Index end(Index k) const { return b_[k]; }
  Index size(Index k) const { return end(k) - begin(k); }
  Index level_of(Index i) const;
  const std::vector<Index>& boundaries() const { return b_; }

  // Throws PartitionOutOfRange if total() exceeds limit.
  void check_within(Index limit, const char* what) const;

  bool operator==(const LevelPartition&) const = default;

 private:
  std::vector<Index> b_;
};

}  // namespace mlcs
