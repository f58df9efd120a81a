#include "mlcs/sampling/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlcs/core/rng.hpp"

namespace mlcs {

namespace {

// First m entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<Index> draw_without_replacement(Index n, Index m, Rng& rng) {
  std::vector<Index> pool(n);
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    const Index j = i + static_cast<Index>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

double region_radius(const DensityParams& p, Index k) {
  const double n1 = static_cast<double>(p.n - 1);
  const double kk = static_cast<double>(k);
  switch (p.radii) {
    case RadiusConvention::Literal:
      return k == 0 ? p.m_radius : kk * (1.0 - p.m_radius) / n1;
    case RadiusConvention::Shifted:
      return p.m_radius + kk * (1.0 - p.m_radius) / n1;
    case RadiusConvention::Inscribed:
      break;
  }
  return std::max(p.m_radius, kk / n1);
}

void validate(const DensityParams& p) {
  if (p.n < 2) throw Error(Errc::InvalidParams, "density map needs n >= 2");
  if (!(p.m_radius >= 0.0 && p.m_radius < 1.0)) throw Error(Errc::InvalidParams, "m_radius must lie in [0, 1)");
  if (!(p.a > 0.0)) throw Error(Errc::InvalidParams, "a must be positive");
  if (!(p.b >= 0.0)) throw Error(Errc::InvalidParams, "b must be non-negative");
  if (p.N < 2 || p.N % 2 != 0) throw Error(Errc::InvalidParams, "side length must be even");
}

std::vector<Index> region_counts(const DensityParams& p) {
  const auto reg = region_map(p);
  std::vector<Index> counts(p.n + 1, 0);
  for (Index r : reg) ++counts[r];
  return counts;
}

double fraction_from_counts(const std::vector<Index>& counts, Index n, double a, double b, Index total) {
  const auto prof = gg_profile(n, a, b);
  double f = 0.0;
  for (Index k = 0; k < counts.size(); ++k) f += prof[k] * static_cast<double>(counts[k]);
  return f / static_cast<double>(total);
}

}  // namespace

std::vector<Index> SampleSet::counts_per_level(Index levels) const {
  std::vector<Index> c(levels, 0);
  for (Index l : level_of) ++c.at(l);
  return c;
}

SampleSet uniform_scheme(Index n_total, Index m, std::uint64_t seed) {
  if (m > n_total) throw Error(Errc::TooManySamples, std::to_string(m) + " samples requested from " + std::to_string(n_total));
  Rng rng(seed);
  SampleSet s;
  s.indices = draw_without_replacement(n_total, m, rng);
  s.scheme = "uniform";
  s.seed = seed;
  s.total = n_total;
  return s;
}

SampleSet multilevel_scheme(const LevelPartition& npart, const std::vector<Index>& m, std::uint64_t seed) {
  if (m.size() != npart.levels()) throw Error(Errc::DimensionMismatch, "one sample count per level required");
  SampleSet s;
  s.scheme = "multilevel";
  s.seed = seed;
  s.total = npart.total();
  for (Index k = 0; k < npart.levels(); ++k) {
    if (m[k] > npart.size(k)) {
      throw Error(Errc::TooManySamples, "level " + std::to_string(k + 1) + ": " + std::to_string(m[k]) +
                                            " samples requested from " + std::to_string(npart.size(k)));
    }
    Rng rng(derive_seed(seed, k));
    for (Index i : draw_without_replacement(npart.size(k), m[k], rng)) {
      s.indices.push_back(npart.begin(k) + i);
      s.level_of.push_back(k);
    }
  }
  return s;
}

SampleSet bernoulli_multilevel(const LevelPartition& npart, const std::vector<Index>& m, std::uint64_t seed) {
  if (m.size() != npart.levels()) throw Error(Errc::DimensionMismatch, "one sample count per level required");
  SampleSet s;
  s.scheme = "bernoulli";
  s.seed = seed;
  s.total = npart.total();
  for (Index k = 0; k < npart.levels(); ++k) {
    if (m[k] > npart.size(k)) throw Error(Errc::TooManySamples, "level " + std::to_string(k + 1) + " oversampled");
    const double q = static_cast<double>(m[k]) / static_cast<double>(npart.size(k));
    Rng rng(derive_seed(seed, k));
    for (Index i = npart.begin(k); i < npart.end(k); ++i) {
      if (rng.uniform01() < q) {
        s.indices.push_back(i);
        s.level_of.push_back(k);
      }
    }
  }
  return s;
}

std::vector<double> gg_profile(Index n, double a, double b) {
  std::vector<double> p(n + 1);
  for (Index k = 0; k <= n; ++k) p[k] = std::exp(-std::pow(b * static_cast<double>(k) / static_cast<double>(n), a));
  return p;
}

std::vector<Index> region_map(const DensityParams& p) {
  validate(p);
  const Index N = p.N;
  std::vector<double> radii(p.n);
  for (Index k = 0; k < p.n; ++k) radii[k] = region_radius(p, k);
  std::vector<Index> reg(N * N);
  const double half = static_cast<double>(N / 2);
  for (Index r = 0; r < N; ++r) {
    for (Index c = 0; c < N; ++c) {
      double x, y;
      if (p.geometry == MapGeometry::Circles) {
        // Operator row r holds frequency r for r < N/2 and r - N otherwise.
        x = (static_cast<double>(r) - (r < N / 2 ? 0.0 : static_cast<double>(N))) / half;
        y = (static_cast<double>(c) - (c < N / 2 ? 0.0 : static_cast<double>(N))) / half;
      } else {
        x = static_cast<double>(r) / static_cast<double>(N);
        y = static_cast<double>(c) / static_cast<double>(N);
      }
      const double rho = std::sqrt(x * x + y * y);
      // Boundary pixels belong to the inner region.
      const auto it = std::lower_bound(radii.begin(), radii.end(), rho);
      reg[r * N + c] = static_cast<Index>(it - radii.begin());
    }
  }
  return reg;
}

double DensityMap2D::fraction() const {
  const auto on = std::count(mask.begin(), mask.end(), std::uint8_t{1});
  return static_cast<double>(on) / static_cast<double>(mask.size());
}

std::vector<std::uint8_t> DensityMap2D::display_mask() const {
  if (params.geometry == MapGeometry::Quadrant) return mask;
  const Index N = params.N;
  std::vector<std::uint8_t> out(N * N);
  for (Index r = 0; r < N; ++r)
    for (Index c = 0; c < N; ++c) out[((r + N / 2) % N) * N + (c + N / 2) % N] = mask[r * N + c];
  return out;
}

SampleSet DensityMap2D::to_sample_set() const {
  SampleSet s;
  s.scheme = "gg_density";
  s.seed = seed;
  s.total = mask.size();
  const auto reg = region_map(params);
  for (Index i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      s.indices.push_back(i);
      s.level_of.push_back(reg[i]);
    }
  }
  return s;
}

DensityMap2D gg_density_map(const DensityParams& params, std::uint64_t seed) {
  validate(params);
  DensityMap2D d;
  d.params = params;
  d.seed = seed;
  d.p = gg_profile(params.n, params.a, params.b);
  const auto reg = region_map(params);
  std::vector<std::vector<Index>> members(params.n + 1);
  for (Index i = 0; i < reg.size(); ++i) members[reg[i]].push_back(i);
  d.mask.assign(reg.size(), 0);
  d.region_size.resize(params.n + 1);
  d.region_sampled.resize(params.n + 1);
  for (Index k = 0; k <= params.n; ++k) {
    const Index size = members[k].size();
    const auto take = static_cast<Index>(std::llround(d.p[k] * static_cast<double>(size)));
    Rng rng(derive_seed(seed, k));
    for (Index t : draw_without_replacement(size, std::min(take, size), rng)) d.mask[members[k][t]] = 1;
    d.region_size[k] = size;
    d.region_sampled[k] = std::min(take, size);
  }
  return d;
}

double expected_fraction(const DensityParams& params) {
  return fraction_from_counts(region_counts(params), params.n, params.a, params.b, params.N * params.N);
}

double calibrate_b(DensityParams params, double target_p, double tolerance) {
  validate(params);
  if (!(target_p > 0.0 && target_p <= 1.0)) throw Error(Errc::InvalidParams, "target fraction must lie in (0, 1]");
  const auto counts = region_counts(params);
  const Index total = params.N * params.N;
  const double floor_frac = static_cast<double>(counts[0]) / static_cast<double>(total);
  if (target_p <= floor_frac) {
    throw Error(Errc::Unreachable, "target " + std::to_string(target_p) + " is not above the fully sampled centre " +
                                       std::to_string(floor_frac));
  }
  auto f = [&](double b) { return fraction_from_counts(counts, params.n, params.a, b, total); };
  if (f(0.0) - target_p <= tolerance) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (f(hi) > target_p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(Errc::Unreachable, "no b reaches the target fraction");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v - target_p) <= tolerance * 1e-3 || hi - lo <= 1e-12 * hi) return mid;
    if (v > target_p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string radius_convention_name(RadiusConvention c) {
  switch (c) {
    case RadiusConvention::Inscribed: return "inscribed";
    case RadiusConvention::Literal: return "literal";
    case RadiusConvention::Shifted: return "shifted";
  }
  return "inscribed";
}

RadiusConvention radius_convention_from_name(const std::string& s) {
  if (s == "inscribed") return RadiusConvention::Inscribed;
  if (s == "literal") return RadiusConvention::Literal;
  if (s == "shifted") return RadiusConvention::Shifted;
  throw Error(Errc::InvalidParams, "unknown radius convention '" + s + "'");
}

}  // namespace mlcs
