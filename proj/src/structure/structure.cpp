#include "mlcs/structure/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mlcs {

namespace {

void check_len(Index len, const LevelPartition& p) {
  if (len != p.total()) {
    throw Error(Errc::DimensionMismatch, "vector length " + std::to_string(len) +
                                             " does not match partition total " + std::to_string(p.total()));
  }
}

// Level magnitudes sorted decreasingly, ties by lower index.
std::vector<double> sorted_level(std::span<const double> m, Index b, Index e) {
  std::vector<Index> idx(e - b);
  std::iota(idx.begin(), idx.end(), b);
  std::stable_sort(idx.begin(), idx.end(), [&](Index i, Index j) { return std::abs(m[i]) > std::abs(m[j]); });
  std::vector<double> out(idx.size());
  for (Index k = 0; k < idx.size(); ++k) out[k] = std::abs(m[idx[k]]);
  return out;
}

}  // namespace

LevelPartition wavelet_levels(Index n, int depth, int dimension) {
  if (!is_power_of_two(n)) throw Error(Errc::InvalidDepth, "size must be a power of 2");
  if (dimension != 1 && dimension != 2) throw Error(Errc::InvalidParams, "dimension must be 1 or 2");
  if (depth < 0 || (Index{1} << depth) > n) {
    throw Error(Errc::InvalidDepth, "depth " + std::to_string(depth) + " exceeds log2(" + std::to_string(n) + ")");
  }
  std::vector<Index> b;
  Index side = n >> depth;
  for (int j = 0; j <= depth; ++j, side *= 2) b.push_back(dimension == 1 ? side : side * side);
  return LevelPartition(b);
}

std::vector<Index> sparsity_in_levels(std::span<const double> m, const LevelPartition& p, double threshold) {
  check_len(m.size(), p);
  std::vector<Index> s(p.levels(), 0);
  for (Index k = 0; k < p.levels(); ++k)
    for (Index i = p.begin(k); i < p.end(k); ++i)
      if (std::abs(m[i]) > threshold) ++s[k];
  return s;
}

std::vector<Index> sparsity_in_levels(std::span<const cplx> x, const LevelPartition& p, double threshold) {
  return sparsity_in_levels(modulus(x), p, threshold);
}

std::vector<Index> effective_sparsity(std::span<const double> m, const LevelPartition& p, double eps) {
  check_len(m.size(), p);
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(Errc::InvalidParams, "epsilon must lie in (0, 1]");
  std::vector<Index> out(p.levels(), 0);
  for (Index k = 0; k < p.levels(); ++k) {
    const auto v = sorted_level(m, p.begin(k), p.end(k));
    double total = 0.0;
    for (double a : v) total += a * a;
    if (total == 0.0) continue;
    const double target = eps * std::sqrt(total);
    double acc = 0.0;
    Index K = 0;
    // eps = 1 must count exactly the nonzeros despite rounding in the sums.
    if (eps == 1.0) {
      K = static_cast<Index>(std::count_if(v.begin(), v.end(), [](double a) { return a != 0.0; }));
    } else {
      while (K < v.size() && std::sqrt(acc) < target) acc += v[K] * v[K], ++K;
    }
    out[k] = K;
  }
  return out;
}

std::vector<Index> effective_sparsity(std::span<const cplx> x, const LevelPartition& p, double eps) {
  return effective_sparsity(modulus(x), p, eps);
}

double best_approx_error(std::span<const double> m, std::span<const Index> s, const LevelPartition& p) {
  check_len(m.size(), p);
  if (s.size() != p.levels()) throw Error(Errc::DimensionMismatch, "one sparsity per level required");
  double err = 0.0;
  for (Index k = 0; k < p.levels(); ++k) {
    if (s[k] > p.size(k)) throw Error(Errc::InvalidParams, "s_k exceeds level size");
    const auto v = sorted_level(m, p.begin(k), p.end(k));
    for (Index i = s[k]; i < v.size(); ++i) err += v[i];
  }
  return err;
}

double best_approx_error(std::span<const cplx> x, std::span<const Index> s, const LevelPartition& p) {
  return best_approx_error(modulus(x), s, p);
}

SparsityProfile sparsity_profile(std::span<const double> m, const LevelPartition& p,
                                 const std::vector<double>& eps_list, double threshold) {
  SparsityProfile out;
  out.mpart = p;
  out.s = sparsity_in_levels(m, p, threshold);
  for (double e : eps_list) out.s_eff[e] = effective_sparsity(m, p, e);
  out.sigma = best_approx_error(m, out.s, p);
  return out;
}

void write_sparsity_csv(std::ostream& os, const SparsityProfile& p) {
  os << "level,epsilon,s_k,level_size,ratio\n";
  for (const auto& [eps, s] : p.s_eff) {
    for (Index k = 0; k < s.size(); ++k) {
      const Index size = p.mpart.size(k);
      os << (k + 1) << ',' << eps << ',' << s[k] << ',' << size << ','
         << static_cast<double>(s[k]) / static_cast<double>(size) << '\n';
    }
  }
}

}  // namespace mlcs
