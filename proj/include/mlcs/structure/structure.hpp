#pragma once

#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "mlcs/core/partition.hpp"

namespace mlcs {

// Dyadic scale levels of a J-level wavelet decomposition. Level 0 is the
// approximation band, levels 1..J the detail scales from coarse to fine. In 2D
// each level holds all three subbands of one scale.
LevelPartition wavelet_levels(Index n, int depth, int dimension);

std::vector<Index> sparsity_in_levels(std::span<const double> magnitudes, const LevelPartition& mpart,
                                      double threshold);
std::vector<Index> sparsity_in_levels(std::span<const cplx> x, const LevelPartition& mpart, double threshold);

// Smallest K per level with ||top-K of level||_2 >= eps ||level||_2. Ties go
// to the lower index; an all-zero level gives 0.
std::vector<Index> effective_sparsity(std::span<const double> magnitudes, const LevelPartition& mpart,
                                      double eps);
std::vector<Index> effective_sparsity(std::span<const cplx> x, const LevelPartition& mpart, double eps);

// l1 norm left after keeping the s_k largest entries of every level.
double best_approx_error(std::span<const double> magnitudes, std::span<const Index> s,
                         const LevelPartition& mpart);
double best_approx_error(std::span<const cplx> x, std::span<const Index> s, const LevelPartition& mpart);

struct SparsityProfile {
  LevelPartition mpart;
  std::vector<Index> s;
  std::map<double, std::vector<Index>> s_eff;
  double sigma = 0.0;
};

SparsityProfile sparsity_profile(std::span<const double> magnitudes, const LevelPartition& mpart,
                                 const std::vector<double>& eps_list, double threshold);

// CSV with header level,epsilon,s_k,level_size,ratio. Levels are 1-based.
void write_sparsity_csv(std::ostream& os, const SparsityProfile& p);

}  // namespace mlcs
