#include "mlcs/coherence/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numeric>
#include <string>

#include <json.hpp>

namespace mlcs {

namespace {

// Calls f(j, column) for j in [c0, c1). Columns are independent so the scan
// runs in parallel; f must only write per-column state.
template <class F>
void for_columns(const LinearOperator& U, Index c0, Index c1, F&& f) {
  const auto n = static_cast<std::ptrdiff_t>(c1 - c0);
#pragma omp parallel
  {
    CVec col(U.rows());
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      const Index j = c0 + static_cast<Index>(t);
      U.column(j, col);
      f(j, col);
    }
  }
}

Eigen::MatrixXcd dense_block(const LinearOperator& U, Index r0, Index r1, Index c0, Index c1) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(r1 - r0), static_cast<Eigen::Index>(c1 - c0));
  for_columns(U, c0, c1, [&](Index j, const CVec& col) {
    for (Index i = r0; i < r1; ++i) m(static_cast<Eigen::Index>(i - r0), static_cast<Eigen::Index>(j - c0)) = col[i];
  });
  return m;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Eigen::MatrixXcd g = m.rows() < m.cols() ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double max_abs_row_sum(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double binom(Index n, Index k) {
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

bool next_combination(std::vector<Index>& c, Index n) {
  const Index k = c.size();
  for (Index i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

void check_s(const std::vector<Index>& s, const LevelPartition& mpart) {
  if (s.size() != mpart.levels()) throw Error(Errc::DimensionMismatch, "one sparsity per level required");
  for (Index l = 0; l < s.size(); ++l)
    if (s[l] > mpart.size(l)) throw Error(Errc::InvalidParams, "s_l exceeds level size at level " + std::to_string(l + 1));
}

// Enumerates every support with exactly s_l entries in level l and calls visit(support).
template <class F>
void for_supports(const LevelPartition& mpart, const std::vector<Index>& s, F&& visit) {
  const Index r = mpart.levels();
  std::vector<std::vector<Index>> combo(r);
  for (Index l = 0; l < r; ++l) {
    combo[l].resize(s[l]);
    std::iota(combo[l].begin(), combo[l].end(), Index{0});
  }
  std::vector<Index> support;
  while (true) {
    support.clear();
    for (Index l = 0; l < r; ++l)
      for (Index c : combo[l]) support.push_back(mpart.begin(l) + c);
    visit(support);
    Index l = r;
    while (l-- > 0) {
      if (next_combination(combo[l], mpart.size(l))) break;
      std::iota(combo[l].begin(), combo[l].end(), Index{0});
    }
    if (l == static_cast<Index>(-1)) break;
  }
}

}  // namespace

double global_coherence(const LinearOperator& U) { return tail_coherence(U, 0, Side::Rows); }

double tail_coherence(const LinearOperator& U, Index K, Side side) {
  const Index dim = side == Side::Rows ? U.rows() : U.cols();
  if (K >= dim) throw Error(Errc::IndexOutOfRange, "tail index " + std::to_string(K) + " >= " + std::to_string(dim));
  const Index c0 = side == Side::Cols ? K : 0;
  const Index r0 = side == Side::Rows ? K : 0;
  std::vector<double> colmax(U.cols(), 0.0);
  for_columns(U, c0, U.cols(), [&](Index j, const CVec& col) {
    double m = 0.0;
    for (Index i = r0; i < col.size(); ++i) m = std::max(m, std::norm(col[i]));
    colmax[j] = m;
  });
  return *std::max_element(colmax.begin(), colmax.end());
}

CoherenceProfile local_coherence(const LinearOperator& U, const LevelPartition& npart,
                                 const LevelPartition& mpart, bool include_inf) {
  npart.check_within(U.rows(), "sampling");
  mpart.check_within(U.cols(), "sparsity");
  if (include_inf && U.cols() <= mpart.total()) {
    throw Error(Errc::PartitionOutOfRange, "infinity column requires columns beyond M_r");
  }
  const Index r = npart.levels();
  const Index q = mpart.levels();
  const Index split = q >= 2 ? mpart.begin(q - 1) : 0;
  // Per column: max |u_ij|^2 for each row band.
  Eigen::MatrixXd colband(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(U.cols()));
  double global = 0.0;
  std::vector<double> colglobal(U.cols(), 0.0);
  for_columns(U, 0, U.cols(), [&](Index j, const CVec& col) {
    double g = 0.0;
    for (Index k = 0; k < r; ++k) {
      double m = 0.0;
      for (Index i = npart.begin(k); i < npart.end(k); ++i) m = std::max(m, std::norm(col[i]));
      colband(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = m;
    }
    for (const cplx& v : col) g = std::max(g, std::norm(v));
    colglobal[j] = g;
  });
  global = *std::max_element(colglobal.begin(), colglobal.end());

  CoherenceProfile p;
  p.global = global;
  p.local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q));
  if (include_inf) p.local_inf = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r));
  for (Index k = 0; k < r; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double row = colband.row(kk).maxCoeff();
    for (Index l = 0; l < q; ++l) {
      const double blk = colband.row(kk)
                             .segment(static_cast<Eigen::Index>(mpart.begin(l)), static_cast<Eigen::Index>(mpart.size(l)))
                             .maxCoeff();
      p.local(kk, static_cast<Eigen::Index>(l)) = std::sqrt(blk * row);
    }
    if (include_inf) {
      const double tail = colband.row(kk)
                              .segment(static_cast<Eigen::Index>(split), static_cast<Eigen::Index>(U.cols() - split))
                              .maxCoeff();
      (*p.local_inf)(kk) = std::sqrt(tail * row);
    }
  }
  return p;
}

void write_profile_csv(std::ostream& os, const CoherenceProfile& p) {
  os << "k,l,mu\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < p.local.rows(); ++k) {
    for (Eigen::Index l = 0; l < p.local.cols(); ++l) os << k + 1 << ',' << l + 1 << ',' << p.local(k, l) << '\n';
    if (p.local_inf) os << k + 1 << ",inf," << (*p.local_inf)(k) << '\n';
  }
}

void write_profile_json(std::ostream& os, const CoherenceProfile& p) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["global"] = p.global;
  auto tails = [](const std::map<Index, double>& m) {
    auto arr = nlohmann::json::array();
    for (const auto& [K, v] : m) arr.push_back({{"K", K}, {"mu", v}});
    return arr;
  };
  j["tail_rows"] = tails(p.tail_rows);
  j["tail_cols"] = tails(p.tail_cols);
  auto local = nlohmann::json::array();
  for (Eigen::Index k = 0; k < p.local.rows(); ++k) {
    auto row = nlohmann::json::array();
    for (Eigen::Index l = 0; l < p.local.cols(); ++l) row.push_back(p.local(k, l));
    local.push_back(row);
  }
  j["local"] = local;
  if (p.local_inf) {
    auto inf = nlohmann::json::array();
    for (Eigen::Index k = 0; k < p.local_inf->size(); ++k) inf.push_back((*p.local_inf)(k));
    j["local_inf"] = inf;
  }
  os << j.dump(2) << '\n';
}

std::vector<double> relative_sparsity(const LinearOperator& U, const LevelPartition& npart,
                                      const LevelPartition& mpart, const std::vector<Index>& s,
                                      RelSparsityMode mode, const RelSparsityOptions& opts) {
  npart.check_within(U.rows(), "sampling");
  mpart.check_within(U.cols(), "sparsity");
  check_s(s, mpart);
  const Index r = npart.levels();
  const Index total_s = std::accumulate(s.begin(), s.end(), Index{0});
  std::vector<double> S(r, 0.0);
  if (total_s == 0) return S;
  const Eigen::MatrixXcd D = dense_block(U, 0, npart.total(), 0, mpart.total());

  if (mode == RelSparsityMode::Greedy) {
    for (Index k = 0; k < r; ++k) {
      double acc = 0.0;
      for (Index l = 0; l < mpart.levels(); ++l) {
        if (s[l] == 0) continue;
        const auto blk = D.block(static_cast<Eigen::Index>(npart.begin(k)), static_cast<Eigen::Index>(mpart.begin(l)),
                                 static_cast<Eigen::Index>(npart.size(k)), static_cast<Eigen::Index>(mpart.size(l)));
        acc += spectral_norm(blk) * std::sqrt(static_cast<double>(s[l]));
      }
      S[k] = std::min(acc * acc, static_cast<double>(total_s));
    }
    return S;
  }

  const bool real = D.imag().cwiseAbs().maxCoeff() == 0.0;
  const int Q = real ? 2 : std::max(2, opts.phase_grid);
  double count = std::pow(static_cast<double>(Q), static_cast<double>(total_s - 1));
  for (Index l = 0; l < mpart.levels(); ++l) count *= binom(mpart.size(l), s[l]);
  if (count > opts.budget) {
    throw Error(Errc::BudgetExceeded, "exact relative sparsity needs " + std::to_string(count) +
                                          " evaluations, budget is " + std::to_string(opts.budget));
  }

  const auto rows = static_cast<Eigen::Index>(npart.total());
  std::vector<cplx> phases(static_cast<Index>(Q));
  for (int q = 0; q < Q; ++q) phases[static_cast<Index>(q)] = std::polar(1.0, 2.0 * M_PI * q / Q);
  std::vector<std::vector<Index>> best_support(r);
  std::vector<std::vector<cplx>> best_eta(r);

  auto evaluate = [&](const Eigen::VectorXcd& b, const std::vector<Index>& support, const std::vector<int>& digit) {
    for (Index k = 0; k < r; ++k) {
      const double v = b.segment(static_cast<Eigen::Index>(npart.begin(k)), static_cast<Eigen::Index>(npart.size(k)))
                           .squaredNorm();
      if (v > S[k]) {
        S[k] = v;
        best_support[k] = support;
        best_eta[k].resize(support.size());
        for (Index t = 0; t < support.size(); ++t) best_eta[k][t] = phases[static_cast<Index>(digit[t])];
      }
    }
  };

  for_supports(mpart, s, [&](const std::vector<Index>& support) {
    const Index n = support.size();
    std::vector<int> digit(n, 0);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(rows);
    for (Index c : support) b += D.col(static_cast<Eigen::Index>(c));
    evaluate(b, support, digit);
    // Reflected Q-ary Gray code over entries 1..n-1; the first stays fixed
    // because a global phase does not change the objective.
    std::vector<int> dir(n, 1);
    while (true) {
      Index t = 1;
      while (t < n) {
        const int nd = digit[t] + dir[t];
        if (nd >= 0 && nd < Q) break;
        dir[t] = -dir[t];
        ++t;
      }
      if (t >= n) break;
      const cplx old = phases[static_cast<Index>(digit[t])];
      digit[t] += dir[t];
      b += (phases[static_cast<Index>(digit[t])] - old) * D.col(static_cast<Eigen::Index>(support[t]));
      evaluate(b, support, digit);
    }
  });

  if (!real) {
    // Ascent eta <- phase(G eta) never decreases eta* G eta for PSD G.
    for (Index k = 0; k < r; ++k) {
      if (best_support[k].empty()) continue;
      const Index n = best_support[k].size();
      Eigen::MatrixXcd B(static_cast<Eigen::Index>(npart.size(k)), static_cast<Eigen::Index>(n));
      for (Index t = 0; t < n; ++t)
        B.col(static_cast<Eigen::Index>(t)) =
            D.col(static_cast<Eigen::Index>(best_support[k][t]))
                .segment(static_cast<Eigen::Index>(npart.begin(k)), static_cast<Eigen::Index>(npart.size(k)));
      const Eigen::MatrixXcd G = B.adjoint() * B;
      Eigen::VectorXcd eta(static_cast<Eigen::Index>(n));
      for (Index t = 0; t < n; ++t) eta(static_cast<Eigen::Index>(t)) = best_eta[k][t];
      for (int it = 0; it < 200; ++it) {
        Eigen::VectorXcd g = G * eta;
        for (Eigen::Index t = 0; t < g.size(); ++t) eta(t) = std::abs(g(t)) > 0 ? g(t) / std::abs(g(t)) : eta(t);
        const double v = (eta.adjoint() * G * eta)(0).real();
        if (v <= S[k] * (1.0 + 1e-15)) {
          S[k] = std::max(S[k], v);
          break;
        }
        S[k] = v;
      }
    }
  }
  return S;
}

Eigen::MatrixXd kappa(const LinearOperator& U, const LevelPartition& npart, const LevelPartition& mpart,
                      const std::vector<Index>& s, KappaMode mode) {
  npart.check_within(U.rows(), "sampling");
  mpart.check_within(U.cols(), "sparsity");
  check_s(s, mpart);
  const Index r = npart.levels(), q = mpart.levels();
  const Eigen::MatrixXcd D = dense_block(U, 0, npart.total(), 0, U.cols());
  const Eigen::MatrixXd A = D.cwiseAbs();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q));
  for (Index k = 0; k < r; ++k) {
    const auto r0 = static_cast<Eigen::Index>(npart.begin(k));
    const auto nr = static_cast<Eigen::Index>(npart.size(k));
    const double row_mu = A.middleRows(r0, nr).cwiseAbs2().maxCoeff();
    for (Index l = 0; l < q; ++l) {
      const auto c0 = static_cast<Eigen::Index>(mpart.begin(l));
      const auto nc = static_cast<Eigen::Index>(mpart.size(l));
      if (s[l] == 0) continue;
      const auto blk = A.block(r0, c0, nr, nc);
      if (mode == KappaMode::Exact) {
        // The l-infinity maximum aligns phases in one row over its s_l largest entries.
        double best = 0.0;
        std::vector<double> v(static_cast<Index>(nc));
        for (Eigen::Index i = 0; i < nr; ++i) {
          for (Eigen::Index j = 0; j < nc; ++j) v[static_cast<Index>(j)] = blk(i, j);
          std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(s[l]), v.end(), std::greater<>());
          best = std::max(best, std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(s[l]), 0.0));
        }
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = best * std::sqrt(row_mu);
      } else {
        const double blk_mu = blk.cwiseAbs2().maxCoeff();
        const double mu_kl = std::sqrt(blk_mu * row_mu);
        const double nrm = spectral_norm(D.block(r0, c0, nr, nc));
        const double sl = static_cast<double>(s[l]);
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = std::min(mu_kl * sl, std::sqrt(sl * row_mu) * nrm);
      }
    }
  }
  return out;
}

BalancingResult balancing_check(const LinearOperator& U, Index N, double K, Index M, Index s, Strength strength,
                                const BalancingOptions& opts) {
  if (N > U.rows() || M > U.cols() || N == 0 || M == 0) {
    throw Error(Errc::PartitionOutOfRange, "balancing check needs 0 < N <= rows and 0 < M <= cols");
  }
  if (K < 1.0 || s == 0) throw Error(Errc::InvalidParams, "balancing check needs K >= 1 and s >= 1");
  Index width = M;
  if (strength == Strength::Strong) {
    width = std::min(opts.truncation == 0 ? 4 * M : opts.truncation, U.cols());
    if (width <= M) throw Error(Errc::TruncationTooSmall, "strong balancing needs columns beyond M");
  }
  Eigen::MatrixXcd G;  // (U* P_N U) restricted to rows [0, width), columns [0, M)
  if (opts.via_operator) {
    G.resize(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(M));
    CVec col(U.rows()), back(U.cols());
    for (Index j = 0; j < M; ++j) {
      U.column(j, col);
      std::fill(col.begin() + static_cast<std::ptrdiff_t>(N), col.end(), cplx(0.0));
      U.adjoint(col, back);
      for (Index i = 0; i < width; ++i) G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = back[i];
    }
  } else {
    const Eigen::MatrixXcd B = dense_block(U, 0, N, 0, width);
    G = B.adjoint() * B.leftCols(static_cast<Eigen::Index>(M));
  }
  BalancingResult res;
  Eigen::MatrixXcd top = G.topRows(static_cast<Eigen::Index>(M));
  top -= Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  res.residual_weak = max_abs_row_sum(top);
  res.threshold = 0.125 / std::sqrt(std::log2(4.0 * std::sqrt(static_cast<double>(s)) * K * static_cast<double>(M)));
  res.satisfied = res.residual_weak <= res.threshold;
  if (strength == Strength::Strong) {
    res.residual_strong = max_abs_row_sum(G.bottomRows(static_cast<Eigen::Index>(width - M)));
    res.satisfied = res.satisfied && res.residual_strong <= 0.125;
  }
  return res;
}

Index m_tilde(const LinearOperator& U, Index N, double K, Index s, Index search_limit) {
  if (N == 0 || N > U.rows()) throw Error(Errc::PartitionOutOfRange, "m_tilde needs 0 < N <= rows");
  if (K < 1.0 || s == 0) throw Error(Errc::InvalidParams, "m_tilde needs K >= 1 and s >= 1");
  const Index scanned = std::min(search_limit, U.cols());
  const double tau = 1.0 / (32.0 * K * std::sqrt(static_cast<double>(s)));
  std::vector<double> c(scanned, 0.0);
  for_columns(U, 0, scanned, [&](Index j, const CVec& col) {
    double acc = 0.0;
    for (Index i = 0; i < N; ++i) acc += std::norm(col[i]);
    c[j] = std::sqrt(acc);
  });
  Index cand = 1;
  for (Index j = scanned; j-- > 0;) {
    if (c[j] > tau) {
      cand = j + 2;
      break;
    }
  }
  if (scanned == U.cols()) return cand;
  const Index start = cand - 1;
  if (start >= scanned || scanned - start < start) {
    throw Error(Errc::NotFoundWithinLimit, "tail condition not established within " + std::to_string(scanned) + " columns");
  }
  const Index mid = start + (scanned - start) / 2;
  const double first = *std::max_element(c.begin() + static_cast<std::ptrdiff_t>(start), c.begin() + static_cast<std::ptrdiff_t>(mid));
  const double second = *std::max_element(c.begin() + static_cast<std::ptrdiff_t>(mid), c.end());
  if (second > first) {
    throw Error(Errc::NotFoundWithinLimit, "column norms not decaying at the end of the scan");
  }
  return cand;
}

Index Allocation::total() const { return std::accumulate(m.begin(), m.end(), Index{0}); }

Allocation allocate_samples(const CoherenceProfile& profile, const std::vector<double>& S, const std::vector<Index>& s,
                            const LevelPartition& npart, double epsilon, double constant_c) {
  const Index r = npart.levels();
  const auto& mu = profile.local;
  if (static_cast<Index>(mu.rows()) != r || S.size() != r || static_cast<Index>(mu.cols()) != s.size()) {
    throw Error(Errc::DimensionMismatch, "profile, S and s must match the partitions");
  }
  if (!(epsilon > 0.0 && epsilon <= std::exp(-1.0) + 1e-15)) throw Error(Errc::InvalidParams, "epsilon must lie in (0, 1/e]");
  if (!(constant_c > 0.0)) throw Error(Errc::InvalidParams, "constant C must be positive");
  Allocation a;
  a.m.assign(r, 0);
  a.infeasible.assign(r, false);
  const double total_s = static_cast<double>(std::accumulate(s.begin(), s.end(), Index{0}));
  if (total_s == 0.0) return a;
  const double log_eps = std::log(1.0 / epsilon);
  const double log_n = std::log(static_cast<double>(npart.total()));

  // Dual weights t_k = tau / (mu*_k S_k) with tau scaled so the worst admissible st exactly meets the bound.
  std::vector<double> wbar(r, 0.0);
  for (Index k = 0; k < r; ++k) {
    const double mstar = mu.row(static_cast<Eigen::Index>(k)).maxCoeff();
    wbar[k] = (mstar > 0.0 && S[k] > 0.0) ? 1.0 / (mstar * S[k]) : 0.0;
  }
  double fmax = 0.0;
  for (Eigen::Index l = 0; l < mu.cols(); ++l) {
    std::vector<std::pair<double, Index>> coef;
    for (Index k = 0; k < r; ++k) coef.emplace_back(wbar[k] * mu(static_cast<Eigen::Index>(k), l), k);
    std::sort(coef.begin(), coef.end(), std::greater<>());
    double left = total_s, f = 0.0;
    for (const auto& [cval, k] : coef) {
      if (left <= 0.0 || cval <= 0.0) break;
      const double take = std::min(left, S[k]);
      f += cval * take;
      left -= take;
    }
    fmax = std::max(fmax, f);
  }
  const double lambda = fmax > 0.0 ? 1.0 / (constant_c * fmax) : 0.0;

  for (Index k = 0; k < r; ++k) {
    const double delta = static_cast<double>(npart.size(k));
    double weighted = 0.0;
    for (Index l = 0; l < s.size(); ++l) weighted += mu(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * static_cast<double>(s[l]);
    const double cond_local = constant_c * delta * log_eps * weighted * log_n;
    const double mhat = (wbar[k] > 0.0 && fmax > 0.0) ? delta / (1.0 + lambda * wbar[k]) : 0.0;
    const double cond_hat = constant_c * mhat * log_eps * log_n;
    const double need = std::ceil(std::max(cond_local, cond_hat) * (1.0 - 1e-12));
    if (need > delta) {
      a.m[k] = npart.size(k);
      a.infeasible[k] = true;
    } else {
      a.m[k] = static_cast<Index>(need);
    }
  }
  return a;
}

}  // namespace mlcs
