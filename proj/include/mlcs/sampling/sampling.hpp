#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlcs/core/partition.hpp"

namespace mlcs {

struct SampleSet {
  std::vector<Index> indices;   // sorted, distinct, 0-based
  std::vector<Index> level_of;  // parallel to indices; empty when not level based
  std::string scheme;
  std::uint64_t seed = 0;
  Index total = 0;              // size of the index universe

  Index size() const { return indices.size(); }
  std::vector<Index> counts_per_level(Index levels) const;
};

SampleSet uniform_scheme(Index n_total, Index m, std::uint64_t seed);

// Level k is drawn from Rng(derive_seed(seed, k)).
SampleSet multilevel_scheme(const LevelPartition& npart, const std::vector<Index>& m, std::uint64_t seed);
SampleSet bernoulli_multilevel(const LevelPartition& npart, const std::vector<Index>& m, std::uint64_t seed);

enum class MapGeometry { Circles, Quadrant };

// How the n-1 circle radii are laid out on the normalized plane. Inscribed
// means r_0 = m_radius and r_k = max(m_radius, k/(n-1)), so the last circle is
// the inscribed unit circle. Literal uses r_k = k(1-m_radius)/(n-1) for k > 0.
// Shifted uses r_k = m_radius + k(1-m_radius)/(n-1).
enum class RadiusConvention { Inscribed, Literal, Shifted };

struct DensityParams {
  Index N = 0;
  Index n = 0;
  double m_radius = 0.0;
  double a = 1.0;
  double b = 1.0;
  MapGeometry geometry = MapGeometry::Circles;
  RadiusConvention radii = RadiusConvention::Inscribed;
};

struct DensityMap2D {
  DensityParams params;
  std::uint64_t seed = 0;
  std::vector<double> p;              // region fractions, n+1 entries
  std::vector<Index> region_size;     // pixels per region
  std::vector<Index> region_sampled;  // sampled pixels per region
  // Row-major N×N in operator index order: for circles the DFT layout with
  // the zero frequency at (0,0), for the quadrant the sequency index itself.
  std::vector<std::uint8_t> mask;

  double fraction() const;
  // Mask with the zero frequency moved to the centre (identity for quadrant maps).
  std::vector<std::uint8_t> display_mask() const;
  SampleSet to_sample_set() const;
};

// Region id (0..n) of every pixel, row-major in operator index order.
std::vector<Index> region_map(const DensityParams& params);

// p_k = exp(-(b k / n)^a), strictly decreasing for b > 0.
std::vector<double> gg_profile(Index n, double a, double b);

DensityMap2D gg_density_map(const DensityParams& params, std::uint64_t seed);

// Sum_k p_k S_k with S_k the area fraction of region k.
double expected_fraction(const DensityParams& params);

double calibrate_b(DensityParams params, double target_p, double tolerance = 1e-4);

std::string radius_convention_name(RadiusConvention c);
RadiusConvention radius_convention_from_name(const std::string& s);

}  // namespace mlcs
