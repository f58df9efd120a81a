#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mlcs/solver/solver.hpp"

namespace mlcs {

namespace {

template <class F>
void for_each_subset(int n, int k, F&& f) {
  std::vector<int> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    f(c);
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

OracleResult oracle_bp_small(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double delta, int s_max) {
  const auto n = static_cast<int>(A.cols());
  if (n > 32 || s_max > 6 || s_max < 0) throw Error(Errc::InvalidParams, "oracle limited to 32 columns and s_max <= 6");
  if (y.size() != A.rows()) throw Error(Errc::DimensionMismatch, "y does not match A");
  OracleResult best;
  best.xi = Eigen::VectorXd::Zero(n);
  const double ny = y.norm();
  if (ny <= delta) return best;
  best.objective = std::numeric_limits<double>::infinity();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  const int kmax = std::min(s_max, static_cast<int>(lu.rank()));
  const double tol = 1e-11 * std::max(1.0, ny);

  for (int k = 1; k <= kmax; ++k) {
    for_each_subset(n, k, [&](const std::vector<int>& T) {
      Eigen::MatrixXd AT(A.rows(), k);
      for (int t = 0; t < k; ++t) AT.col(t) = A.col(T[static_cast<std::size_t>(t)]);
      const Eigen::MatrixXd G = AT.transpose() * AT;
      Eigen::FullPivLU<Eigen::MatrixXd> glu(G);
      if (glu.rank() < k || glu.rcond() < 1e-12) return;
      const Eigen::MatrixXd Ginv = glu.inverse();
      const Eigen::VectorXd aty = AT.transpose() * y;
      auto consider = [&](const Eigen::VectorXd& xT) {
        const double obj = xT.cwiseAbs().sum();
        if (obj < best.objective) {
          best.objective = obj;
          best.xi.setZero();
          for (int t = 0; t < k; ++t) best.xi(T[static_cast<std::size_t>(t)]) = xT(t);
        }
      };
      if (delta == 0.0) {
        const Eigen::VectorXd xT = Ginv * aty;
        if ((AT * xT - y).norm() <= tol) consider(xT);
        return;
      }
      const Eigen::VectorXd perp = y - AT * (Ginv * aty);
      const double slack = delta * delta - perp.squaredNorm();
      if (slack <= 0.0) return;
      Eigen::VectorXd sigma(k);
      for (unsigned mask = 0; mask < (1u << k); ++mask) {
        for (int t = 0; t < k; ++t) sigma(t) = (mask >> t) & 1u ? -1.0 : 1.0;
        const double q = sigma.dot(Ginv * sigma);
        const double lambda = std::sqrt(slack / q);
        const Eigen::VectorXd xT = Ginv * (aty - lambda * sigma);
        bool ok = true;
        for (int t = 0; t < k && ok; ++t) ok = xT(t) * sigma(t) > 0.0;
        if (!ok) continue;
        const Eigen::VectorXd corr = A.transpose() * (y - AT * xT);
        if (corr.cwiseAbs().maxCoeff() <= lambda * (1.0 + 1e-9)) consider(xT);
      }
    });
  }
  if (!std::isfinite(best.objective)) {
    throw Error(Errc::BudgetExceeded, "no minimizer with support up to " + std::to_string(kmax));
  }
  return best;
}

}  // namespace mlcs
