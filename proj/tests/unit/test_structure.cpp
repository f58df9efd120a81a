#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "mlcs/structure/structure.hpp"

using namespace mlcs;
using namespace mlcs::test;

TEST(Structure, WaveletLevels1d) {
  EXPECT_EQ(wavelet_levels(8, 3, 1).boundaries(), (std::vector<Index>{1, 2, 4, 8}));
  std::vector<Index> b{4};
  for (Index v = 8; v <= 1024; v *= 2) b.push_back(v);
  EXPECT_EQ(wavelet_levels(1024, 8, 1).boundaries(), b);
}

TEST(Structure, WaveletLevels2d) {
  EXPECT_EQ(wavelet_levels(4, 1, 2).boundaries(), (std::vector<Index>{4, 16}));
  EXPECT_EQ(wavelet_levels(8, 2, 2).boundaries(), (std::vector<Index>{4, 16, 64}));
}

TEST(Structure, WaveletLevelsInvalidDepth) {
  try {
    wavelet_levels(8, 4, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidDepth);
  }
}

TEST(Structure, SparsityInLevels) {
  const RVec x{1, 0, 0.5, 0};
  const LevelPartition p({2, 4});
  EXPECT_EQ(sparsity_in_levels(std::span<const double>(x), p, 0.0), (std::vector<Index>{1, 1}));
  EXPECT_EQ(sparsity_in_levels(std::span<const double>(x), p, 0.6), (std::vector<Index>{1, 0}));
  const RVec z(4, 0.0);
  EXPECT_EQ(sparsity_in_levels(std::span<const double>(z), p, 0.0), (std::vector<Index>{0, 0}));
}

TEST(Structure, EffectiveSparsityHandExample) {
  const RVec x{3, 4};
  const LevelPartition p({2});
  EXPECT_EQ(effective_sparsity(std::span<const double>(x), p, 0.8), (std::vector<Index>{1}));
  EXPECT_EQ(effective_sparsity(std::span<const double>(x), p, 0.81), (std::vector<Index>{2}));
}

TEST(Structure, EffectiveSparsityAtOneCountsNonzeros) {
  const RVec x{0, 2, 0, 0, 1e-30, 3, 0, 0};
  const LevelPartition p({4, 8});
  EXPECT_EQ(effective_sparsity(std::span<const double>(x), p, 1.0), (std::vector<Index>{1, 2}));
}

TEST(Structure, EffectiveSparsityZeroLevel) {
  const RVec x{0, 0, 1, 2};
  EXPECT_EQ(effective_sparsity(std::span<const double>(x), LevelPartition({2, 4}), 0.9), (std::vector<Index>{0, 2}));
}

TEST(Structure, BestApproxError) {
  const RVec x{3, 1, 2};
  const std::vector<Index> s{2};
  EXPECT_DOUBLE_EQ(best_approx_error(std::span<const double>(x), s, LevelPartition({3})), 1.0);
  const std::vector<Index> full{3};
  EXPECT_DOUBLE_EQ(best_approx_error(std::span<const double>(x), full, LevelPartition({3})), 0.0);
}

TEST(Structure, BestApproxMatchesBruteForce) {
  const LevelPartition p({5, 12});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RVec x = random_rvec(12, seed);
    for (Index s0 = 0; s0 <= 5; ++s0)
      for (Index s1 : {0u, 2u, 4u, 7u}) {
        // Minimize the l1 residual over every support with s0 entries in level 0 and s1 in level 1.
        double best = 1e300;
        for (unsigned mask = 0; mask < (1u << 12); ++mask) {
          if (Index(__builtin_popcount(mask & 0x1f)) != s0 || Index(__builtin_popcount(mask >> 5)) != s1) continue;
          double r = 0.0;
          for (Index i = 0; i < 12; ++i)
            if (!(mask >> i & 1)) r += std::abs(x[i]);
          best = std::min(best, r);
        }
        const std::vector<Index> s{s0, s1};
        EXPECT_NEAR(best_approx_error(std::span<const double>(x), s, p), best, 1e-12);
      }
  }
}

TEST(StructureProperty, Monotonicity) {
  const LevelPartition p({8, 24, 64});
  const RVec x = random_rvec(64, 42);
  std::vector<Index> prev(3, 0);
  for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0}) {
    const auto s = effective_sparsity(std::span<const double>(x), p, eps);
    for (Index k = 0; k < 3; ++k) {
      EXPECT_GE(s[k], prev[k]);
      EXPECT_LE(s[k], p.size(k));
    }
    prev = s;
  }
  double last = 1e300;
  for (Index t = 0; t <= 8; ++t) {
    const std::vector<Index> s{t, 2 * t, 5 * t};
    const double e = best_approx_error(std::span<const double>(x), s, p);
    EXPECT_LE(e, last);
    last = e;
  }
  const std::vector<Index> zero{0, 0, 0};
  double l1 = 0;
  for (double v : x) l1 += std::abs(v);
  EXPECT_NEAR(best_approx_error(std::span<const double>(x), zero, p), l1, 1e-12);
  const auto s0 = sparsity_in_levels(std::span<const double>(x), p, 0.0);
  EXPECT_EQ(s0[0] + s0[1] + s0[2], 64u);
}

TEST(Structure, ProfileCsv) {
  const RVec x{3, 4, 0, 1, 0, 0, 2, 0};
  const auto prof = sparsity_profile(x, LevelPartition({2, 8}), {0.5, 1.0}, 0.0);
  EXPECT_EQ(prof.s, (std::vector<Index>{2, 2}));
  std::ostringstream os;
  write_sparsity_csv(os, prof);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,epsilon,s_k,level_size,ratio");
  EXPECT_NE(csv.find("2,1,2,6,"), std::string::npos);
}
