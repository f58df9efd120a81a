#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "mlcs/core/partition.hpp"
#include "mlcs/linops/operator.hpp"

namespace mlcs {

// max_ij |u_ij|^2
double global_coherence(const LinearOperator& U);

enum class Side { Rows, Cols };

// Coherence after removing the first K rows (or columns).
double tail_coherence(const LinearOperator& U, Index K, Side side);

struct CoherenceProfile {
  double global = 0.0;
  std::map<Index, double> tail_rows;
  std::map<Index, double> tail_cols;
  Eigen::MatrixXd local;              // r x r
  std::optional<Eigen::VectorXd> local_inf;
};

// Local coherences mu_{N,M}(k,l). With include_inf, U must have more columns
// than M_r; the infinity column uses every column from M_{r-1} on.
CoherenceProfile local_coherence(const LinearOperator& U, const LevelPartition& npart,
                                 const LevelPartition& mpart, bool include_inf);

void write_profile_csv(std::ostream& os, const CoherenceProfile& p);
void write_profile_json(std::ostream& os, const CoherenceProfile& p);

enum class RelSparsityMode { Exact, Greedy };

struct RelSparsityOptions {
  double budget = 2e6;
  // Phase grid used when U has complex entries.
  int phase_grid = 4;
};

std::vector<double> relative_sparsity(const LinearOperator& U, const LevelPartition& npart,
                                      const LevelPartition& mpart, const std::vector<Index>& s,
                                      RelSparsityMode mode, const RelSparsityOptions& opts = {});

enum class KappaMode { Exact, Bound };

Eigen::MatrixXd kappa(const LinearOperator& U, const LevelPartition& npart, const LevelPartition& mpart,
                      const std::vector<Index>& s, KappaMode mode);

enum class Strength { Weak, Strong };

struct BalancingResult {
  bool satisfied = false;
  double residual_weak = 0.0;
  double residual_strong = 0.0;
  double threshold = 0.0;
};

struct BalancingOptions {
  // Columns considered for the strong check; 0 means 4*M.
  Index truncation = 0;
  // Compute the weak residual through operator applications instead of a dense product.
  bool via_operator = false;
};

BalancingResult balancing_check(const LinearOperator& U, Index N, double K, Index M, Index s,
                                Strength strength, const BalancingOptions& opts = {});

// Returns a 1-based index as in the definition. Columns are scanned up to
// search_limit (exclusive, 0-based). The candidate is accepted when either
// every column was scanned, or the scan extends at least as far past the
// candidate as the candidate itself and the running maximum over the second
// half of that tail does not exceed the one over the first half.
Index m_tilde(const LinearOperator& U, Index N, double K, Index s, Index search_limit);

struct Allocation {
  std::vector<Index> m;
  std::vector<bool> infeasible;
  Index total() const;
};

// Per-level sample counts from the multilevel recovery conditions with absolute
// constant constant_c: m_k >= C * Delta_k * ln(1/eps) * (sum_l mu(k,l) s_l) * ln N
// and m_k >= C * mhat_k * ln(1/eps) * ln N, where mhat spreads the weighted
// budget over levels in proportion to 1/max_l mu(k,l).
Allocation allocate_samples(const CoherenceProfile& profile, const std::vector<double>& S,
                            const std::vector<Index>& s, const LevelPartition& npart, double epsilon,
                            double constant_c = 1.0);

}  // namespace mlcs
