#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "mlcs/core/rng.hpp"
#include "mlcs/core/types.hpp"

namespace mlcs::test {

inline CVec random_cvec(Index n, std::uint64_t seed) {
  Rng rng(seed);
  CVec x(n);
  for (auto& v : x) v = cplx(rng.normal(), rng.normal());
  return x;
}

inline RVec random_rvec(Index n, std::uint64_t seed) {
  Rng rng(seed);
  RVec x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

inline double rel_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

inline Eigen::MatrixXcd dft_matrix(Index n) {
  Eigen::MatrixXcd F(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j)
      F(k, j) = std::polar(1.0 / std::sqrt(double(n)), -2.0 * std::numbers::pi * double((k * j) % n) / double(n));
  return F;
}

// Sylvester Hadamard with rows sorted by number of sign changes.
inline Eigen::MatrixXd sequency_hadamard(Index n) {
  Eigen::MatrixXd H(1, 1);
  H(0, 0) = 1.0;
  while (Index(H.rows()) < n) {
    const auto m = H.rows();
    Eigen::MatrixXd G(2 * m, 2 * m);
    G << H, H, H, -H;
    H = G;
  }
  std::vector<std::pair<int, Index>> order;
  for (Index r = 0; r < n; ++r) {
    int changes = 0;
    for (Index c = 1; c < n; ++c) changes += H(r, c) != H(r, c - 1);
    order.push_back({changes, r});
  }
  std::sort(order.begin(), order.end());
  Eigen::MatrixXd S(n, n);
  for (Index r = 0; r < n; ++r) S.row(r) = H.row(order[r].second) / std::sqrt(double(n));
  return S;
}

inline Eigen::VectorXcd to_eigen(std::span<const cplx> x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), Eigen::Index(x.size()));
}

}  // namespace mlcs::test
