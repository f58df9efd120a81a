#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "mlcs/linops/operators.hpp"
#include "mlcs/linops/spec.hpp"
#include "mlcs/solver/solver.hpp"

using namespace mlcs;
using namespace mlcs::test;

namespace {

double l1(std::span<const cplx> v) {
  double s = 0;
  for (auto z : v) s += std::abs(z);
  return s;
}

double residual(const LinearOperator& A, std::span<const cplx> x, std::span<const cplx> y) {
  CVec r(A.rows());
  A.apply(x, r);
  double s = 0;
  for (Index i = 0; i < r.size(); ++i) s += std::norm(r[i] - y[i]);
  return std::sqrt(s);
}

struct RealInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd x, y;
};

RealInstance gaussian_instance(Index m, Index n, Index k, std::uint64_t seed) {
  Rng rng(seed);
  RealInstance in;
  in.A.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) in.A(i, j) = rng.normal() / std::sqrt(double(m));
  in.x = Eigen::VectorXd::Zero(n);
  for (Index t = 0; t < k; ++t) in.x(rng.below(n)) = rng.normal();
  in.y = in.A * in.x;
  return in;
}

BPProblem problem_from(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double delta, int iters) {
  BPProblem p;
  p.measurement = make_op<DenseMatrixOp>(A.cast<cplx>());
  p.y.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) p.y[i] = y(i);
  p.delta = delta;
  p.opts.max_iters = iters;
  p.opts.tol_primal = 1e-9;
  return p;
}

}  // namespace

TEST(Solver, FullSamplingInverts) {
  auto U = build_operator(OperatorSpec::compose(OperatorSpec::dft1d(64), OperatorSpec::dwt(4, 3, 64)));
  const CVec x = random_cvec(64, 1);
  BPProblem p;
  p.y.resize(64);
  U->apply(x, p.y);
  p.measurement = U;
  const auto r = solve_bpdn(p);
  EXPECT_LT(rel_diff(r.xi, x), 1e-8);
  EXPECT_TRUE(r.converged);
}

TEST(Solver, Dft4OneSparseAnyThreeRows) {
  const Eigen::MatrixXcd F = dft_matrix(4);
  for (Index drop = 0; drop < 4; ++drop) {
    std::vector<Index> rows;
    for (Index i = 0; i < 4; ++i)
      if (i != drop) rows.push_back(i);
    Eigen::MatrixXcd A(3, 4);
    for (Index t = 0; t < 3; ++t) A.row(t) = F.row(rows[t]);
    // Dual certificate on T = {1}: v = A_T / ||A_T||^2 gives A_T^* v = 1.
    const Eigen::VectorXcd aT = A.col(1);
    const Eigen::VectorXcd v = aT / aT.squaredNorm();
    for (Index j : {0u, 2u, 3u}) ASSERT_LT(std::abs(A.col(j).dot(v)), 1.0);

    BPProblem p;
    p.measurement = make_op<RowSubsetOp>(build_operator(OperatorSpec::dft1d(4)), rows);
    const CVec x{0.0, 1.0, 0.0, 0.0};
    p.y.resize(3);
    p.measurement->apply(x, p.y);
    p.opts.max_iters = 5000;
    const auto r = solve_bpdn(p);
    EXPECT_LT(rel_diff(r.xi, x), 1e-6) << drop;
  }
}

TEST(Solver, NoisyInstancesFeasibleAndClose) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto in = gaussian_instance(6, 16, 1 + seed % 2, 300 + seed);
    Rng rng(seed);
    Eigen::VectorXd z(6);
    for (auto& v : z) v = 0.01 * rng.normal();
    const Eigen::VectorXd y = in.y + z;
    auto p = problem_from(in.A, y, z.norm(), 20000);
    const auto r = solve_bpdn(p);
    const auto oracle = oracle_bp_small(in.A, y, p.delta, 6);
    EXPECT_LE(r.feas_residual, p.delta + 1e-8) << seed;
    EXPECT_NEAR(residual(*p.measurement, r.xi, p.y), r.feas_residual, 1e-12);
    EXPECT_NEAR(r.objective, oracle.objective, 1e-5 * std::max(1.0, oracle.objective)) << seed;
    // x itself is feasible, so both solutions lie in the same ball and have l1 norm at most ||x||_1.
    CVec xc(in.x.size());
    for (Eigen::Index i = 0; i < in.x.size(); ++i) xc[i] = in.x(i);
    EXPECT_LE(r.objective, l1(xc) + 1e-6) << seed;
    double err = 0;
    for (Index i = 0; i < xc.size(); ++i) err += std::norm(r.xi[i] - xc[i]);
    EXPECT_LE(std::sqrt(err), 2.0 * l1(xc) + 1e-6) << seed;
  }
}

TEST(SolverProperty, MatchesOracleOnSmallInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index n = 8 + seed % 9, m = 3 + seed % 3;
    auto in = gaussian_instance(m, n, 1 + seed % 3, 1000 + seed);
    const double delta = seed % 2 ? 0.05 * in.y.norm() : 0.0;
    const auto oracle = oracle_bp_small(in.A, in.y, delta, int(m));
    auto p = problem_from(in.A, in.y, delta, 20000);
    const auto r = solve_bpdn(p);
    EXPECT_LE(oracle.objective, r.objective + 1e-5) << seed;
    EXPECT_GE(oracle.objective, -1e-9) << seed;
    EXPECT_NEAR(r.objective, oracle.objective, 1e-5 * std::max(1.0, oracle.objective)) << seed;
    EXPECT_LE(r.feas_residual, delta + 1e-8) << seed;
  }
}

TEST(Oracle, TrivialCases) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd y = (Eigen::VectorXd(5) << 1, -2, 0, 0.5, 0).finished();
  const auto a = oracle_bp_small(I, y, 0.0, 5);
  EXPECT_LT((a.xi - y).norm(), 1e-12);
  const auto b = oracle_bp_small(I, Eigen::VectorXd::Zero(5), 0.0, 3);
  EXPECT_EQ(b.objective, 0.0);
  EXPECT_EQ(b.xi.norm(), 0.0);
  EXPECT_THROW(oracle_bp_small(Eigen::MatrixXd::Zero(2, 40), Eigen::VectorXd::Zero(2), 0.0, 1), Error);
}

TEST(Solver, ScalingEquivariance) {
  auto in = gaussian_instance(10, 20, 2, 77);
  const double delta = 0.02 * in.y.norm();
  const auto r1 = solve_bpdn(problem_from(in.A, in.y, delta, 20000));
  const double c = 7.5;
  const auto r2 = solve_bpdn(problem_from(in.A, c * in.y, c * delta, 20000));
  CVec scaled(r1.xi.size());
  for (Index i = 0; i < scaled.size(); ++i) scaled[i] = c * r1.xi[i];
  EXPECT_LT(rel_diff(r2.xi, scaled), 1e-6);
}

TEST(Solver, TraceObjectiveMonotone) {
  auto in = gaussian_instance(10, 20, 3, 5);
  auto p = problem_from(in.A, in.y, 0.0, 500);
  p.opts.record_trace = true;
  const auto r = solve_bpdn(p);
  ASSERT_FALSE(r.trace.empty());
  for (Index i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i].objective, r.trace[i - 1].objective + 1e-12);
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  EXPECT_EQ(os.str().rfind("iter,objective,feasibility\n", 0), 0u);
}

TEST(Solver, Deterministic) {
  auto in = gaussian_instance(10, 20, 3, 8);
  const auto a = solve_bpdn(problem_from(in.A, in.y, 0.01, 300));
  const auto b = solve_bpdn(problem_from(in.A, in.y, 0.01, 300));
  ASSERT_EQ(a.xi.size(), b.xi.size());
  for (Index i = 0; i < a.xi.size(); ++i) EXPECT_EQ(a.xi[i], b.xi[i]);
}

TEST(Solver, DimensionMismatch) {
  BPProblem p;
  p.measurement = build_operator(OperatorSpec::dft1d(8));
  p.y.assign(7, 0.0);
  try {
    solve_bpdn(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Solver, OptionsJsonRoundtrip) {
  SolverOptions o;
  o.max_iters = 123;
  o.tol_primal = 1e-4;
  o.seed = 9;
  o.gamma_rel = 0.5;
  o.method = SolverMethod::PrimalDual;
  const auto back = solver_options_from_json(solver_options_to_json(o));
  EXPECT_EQ(back.max_iters, 123);
  EXPECT_EQ(back.tol_primal, 1e-4);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.gamma_rel, 0.5);
  EXPECT_EQ(back.method, SolverMethod::PrimalDual);
}

TEST(Flip, ZeroSignal) {
  auto U = build_operator(OperatorSpec::compose(OperatorSpec::dft1d(32), OperatorSpec::dwt(4, 2, 32)));
  const auto S = uniform_scheme(32, 12, 3);
  const CVec x(32, 0.0);
  const auto f = flip_reconstruct(U, x, S, 0.0);
  EXPECT_EQ(l1(f.z1), 0.0);
  EXPECT_EQ(l1(f.z2), 0.0);
}

TEST(Flip, FullSamplingRecoversBoth) {
  auto U = build_operator(OperatorSpec::compose(OperatorSpec::dft1d(32), OperatorSpec::dwt(4, 2, 32)));
  const auto S = uniform_scheme(32, 32, 3);
  const CVec x = random_cvec(32, 4);
  const auto f = flip_reconstruct(U, x, S, 0.0);
  EXPECT_LT(rel_diff(f.z1, x), 1e-8);
  EXPECT_LT(rel_diff(f.z2, x), 1e-8);
}
