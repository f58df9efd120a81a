#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlcs/linops/operator.hpp"
#include "mlcs/sampling/sampling.hpp"

namespace mlcs {

enum class SolverMethod { Auto, DouglasRachford, PrimalDual };

struct SolverOptions {
  int max_iters = 2000;
  // Relative duality gap (primal - dual) / primal.
  double tol_primal = 1e-6;
  // Absolute; a negative value means 1e-9 * ||y||.
  double tol_feas = -1.0;
  std::uint64_t seed = 0;
  SolverMethod method = SolverMethod::Auto;
  // Douglas-Rachford step gamma = gamma_rel * ||A* y||_inf.
  double gamma_rel = 0.1;
  // Primal-dual step ratio tau/sigma relative to ||A* y||_inf.
  double pd_ratio = 1.0;
  bool record_trace = false;
};

nlohmann::json solver_options_to_json(const SolverOptions& o);
SolverOptions solver_options_from_json(const nlohmann::json& j);

struct BPProblem {
  OperatorPtr measurement;  // P_Omega U
  CVec y;
  double delta = 0.0;
  SolverOptions opts;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;    // best feasible objective so far
  double feasibility = 0.0;  // ||A x - y|| of the current iterate
};

struct SolveResult {
  CVec xi;
  double objective = 0.0;
  double feas_residual = 0.0;
  double gap = 0.0;
  int iters = 0;
  bool converged = false;
  std::string method;
  std::vector<TraceRow> trace;
};

// min ||eta||_1 subject to ||A eta - y||_2 <= delta.
SolveResult solve_bpdn(const BPProblem& problem);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

struct OracleResult {
  Eigen::VectorXd xi;
  double objective = 0.0;
};

// Exact minimizer for small real problems. Every support of size up to
// min(s_max, rank) is tried. With delta = 0 each full-rank support is solved
// exactly and the smallest l1 norm wins. With delta > 0 every sign pattern on
// the support gives a closed-form KKT candidate whose sign consistency and
// off-support optimality are checked.
OracleResult oracle_bp_small(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double delta, int s_max);

struct FlipResult {
  CVec z1;
  CVec z2;
  SolveResult unflipped;
  SolveResult flipped;
};

// z1 solves with data from x, z2 is the flip of the solution with data from flip(x).
FlipResult flip_reconstruct(const OperatorPtr& U, std::span<const cplx> x, const SampleSet& sample, double delta,
                            const SolverOptions& opts = {});

}  // namespace mlcs
