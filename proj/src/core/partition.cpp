#include "mlcs/core/partition.hpp"

#include <algorithm>
#include <string>

namespace mlcs {

LevelPartition::LevelPartition(std::vector<Index> boundaries) : b_(std::move(boundaries)) {
  if (b_.empty()) throw Error(Errc::InvalidParams, "partition needs at least one level");
  Index prev = 0;
  for (Index v : b_) {
    if (v <= prev) throw Error(Errc::InvalidParams, "partition boundaries must be strictly increasing and positive");
    prev = v;
  }
}

LevelPartition LevelPartition::uniform(Index total, Index levels) {
  if (levels == 0 || total % levels != 0) {
    throw Error(Errc::InvalidParams, "uniform partition: levels must divide total");
  }
  std::vector<Index> b;
  for (Index k = 1; k <= levels; ++k) b.push_back(k * (total / levels));
  return LevelPartition(b);
}

Index LevelPartition::level_of(Index i) const {
  if (i >= total()) throw Error(Errc::IndexOutOfRange, "index " + std::to_string(i) + " beyond partition");
  return static_cast<Index>(std::upper_bound(b_.begin(), b_.end(), i) - b_.begin());
}

void LevelPartition::check_within(Index limit, const char* what) const {
  if (total() > limit) {
    throw Error(Errc::PartitionOutOfRange, std::string(what) + " partition ends at " +
                                               std::to_string(total()) + " but dimension is " +
                                               std::to_string(limit));
  }
}

}  // namespace mlcs
