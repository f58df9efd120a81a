#include "mlcs/solver/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "mlcs/core/rng.hpp"
#include "mlcs/linops/operators.hpp"

namespace mlcs {

namespace {

double re_dot(std::span<const cplx> a, std::span<const cplx> b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

void soft_threshold(std::span<const cplx> in, std::span<cplx> out, double thr) {
  for (Index i = 0; i < in.size(); ++i) {
    const double m = std::abs(in[i]);
    out[i] = m > thr ? in[i] * (1.0 - thr / m) : cplx(0.0);
  }
}

double power_norm(const LinearOperator& A, std::uint64_t seed, int iters) {
  Rng rng(seed);
  CVec x(A.cols());
  for (auto& v : x) v = cplx(rng.normal(), rng.normal());
  double lam = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double n = norm2(x);
    if (n == 0.0) return 0.0;
    for (auto& v : x) v /= n;
    CVec ax = A.apply(x);
    x = A.adjoint(ax);
    lam = norm2(x);
  }
  return std::sqrt(lam);
}

// A^+ y = A* (A A*)^{-1} y by conjugate gradients. Empty if CG stalls.
CVec pinv_apply(const LinearOperator& A, std::span<const cplx> y, double tol) {
  const Index m = A.rows();
  CVec w(m, 0.0), r(y.begin(), y.end()), p = r, q(m);
  double rr = re_dot(r, r);
  for (int it = 0; it < 4 * static_cast<int>(m) + 50 && std::sqrt(rr) > tol; ++it) {
    q = A.apply(A.adjoint(p));
    const double pq = re_dot(p, q);
    if (!(pq > 0.0)) return {};
    const double alpha = rr / pq;
    for (Index i = 0; i < m; ++i) {
      w[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rr2 = re_dot(r, r);
    for (Index i = 0; i < m; ++i) p[i] = r[i] + (rr2 / rr) * p[i];
    rr = rr2;
  }
  if (std::sqrt(rr) > tol) return {};
  return A.adjoint(w);
}

// Dual value of u = A sgn(x), rescaled to ||A* u||_inf = 1. Exact when A is unitary.
double sign_dual(const LinearOperator& A, std::span<const cplx> y, double delta, std::span<const cplx> x, CVec& u,
                 CVec& g) {
  CVec s(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x[i]);
    s[i] = m > 0.0 ? x[i] / m : cplx(0.0);
  }
  A.apply(s, u);
  A.adjoint(u, g);
  const double ginf = norm_inf(g);
  if (!(ginf > 0.0)) return -std::numeric_limits<double>::infinity();
  return (re_dot(y, u) - delta * norm2(u)) / ginf;
}

SolveResult trivial_zero(Index n, double ny) {
  SolveResult r;
  r.xi.assign(n, 0.0);
  r.feas_residual = ny;
  r.converged = true;
  r.method = "trivial";
  return r;
}

SolveResult solve_dr(const LinearOperator& A, std::span<const cplx> y, double delta, const SolverOptions& o,
                     double tol_feas) {
  const Index n = A.cols();
  const Index m = A.rows();
  SolveResult res;
  res.method = "douglas_rachford";
  CVec z = A.adjoint(y);
  const double scale = norm_inf(z);
  const double gamma = o.gamma_rel * scale;
  CVec az(m), r(m), ahr(n), x(n), w(n), best(n), su(m), sg(n);
  double best_obj = std::numeric_limits<double>::infinity();
  double best_dual = -std::numeric_limits<double>::infinity();
  double best_feas = 0.0;
  int it = 0;
  for (it = 1; it <= o.max_iters; ++it) {
    A.apply(z, az);
    for (Index i = 0; i < m; ++i) r[i] = az[i] - y[i];
    const double nr = norm2(r);
    const double t = nr > delta ? 1.0 - delta / nr : 0.0;
    if (t > 0.0) {
      A.adjoint(r, ahr);
      for (Index i = 0; i < n; ++i) x[i] = z[i] - t * ahr[i];
    } else {
      std::fill(ahr.begin(), ahr.end(), cplx(0.0));
      std::copy(z.begin(), z.end(), x.begin());
    }
    const double feas = std::min(nr, delta);
    const double obj = norm1(x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
      best_feas = feas;
    }
    // Dual point v = -t r / gamma, scaled so ||A* v||_inf <= 1.
    if (t > 0.0) {
      const double ginf = t * norm_inf(ahr) / gamma;
      const double dual = (-t / gamma) * (re_dot(y, r) + delta * nr) / std::max(1.0, ginf);
      best_dual = std::max(best_dual, dual);
    }
    if (it == 1 || it % 10 == 0) best_dual = std::max(best_dual, sign_dual(A, y, delta, best, su, sg));
    const double gap = (best_obj - best_dual) / std::max(best_obj, std::numeric_limits<double>::min());
    if (o.record_trace) res.trace.push_back({it, best_obj, feas});
    res.gap = gap;
    if (gap <= o.tol_primal && best_feas <= delta + tol_feas) {
      res.converged = true;
      break;
    }
    for (Index i = 0; i < n; ++i) w[i] = 2.0 * x[i] - z[i];
    soft_threshold(w, w, gamma);
    for (Index i = 0; i < n; ++i) z[i] += w[i] - x[i];
  }
  res.iters = std::min(it, o.max_iters);
  res.xi = std::move(best);
  res.objective = best_obj;
  return res;
}

SolveResult solve_pd(const LinearOperator& A, std::span<const cplx> y, double delta, const SolverOptions& o,
                     double tol_feas) {
  const Index n = A.cols();
  const Index m = A.rows();
  SolveResult res;
  res.method = "primal_dual";
  const double L = 1.01 * power_norm(A, o.seed, 60);
  CVec aty = A.adjoint(y);
  double rho = o.pd_ratio * norm_inf(aty);
  if (rho <= 0.0) rho = 1.0;
  const double tau = 0.99 * rho / L;
  const double sigma = 0.99 / (rho * L);
  CVec x(n, 0.0), xn(n), v(m, 0.0), q(m), ahv(n), ax(m, 0.0), axn(m), axbar(m, 0.0), best, res_v(m);
  // Iterates approach the constraint from outside. Every few iterations the
  // iterate is moved onto the constraint by x - c A^+ (A x - y).
  auto restore = [&](double feas, double& best_obj, double& best_feas) {
    const double target = delta + 0.5 * tol_feas;
    const double c = 1.0 - target / feas;
    for (Index i = 0; i < m; ++i) res_v[i] = c * (ax[i] - y[i]);
    const CVec corr = pinv_apply(A, res_v, 1e-3 * tol_feas);
    if (corr.empty()) return;
    CVec cand(x);
    for (Index i = 0; i < n; ++i) cand[i] -= corr[i];
    const CVec ac = A.apply(cand);
    double f = 0.0;
    for (Index i = 0; i < m; ++i) f += std::norm(ac[i] - y[i]);
    f = std::sqrt(f);
    const double obj = norm1(cand);
    if (f <= delta + tol_feas && obj < best_obj) {
      best_obj = obj;
      best = std::move(cand);
      best_feas = f;
    }
  };
  double best_obj = std::numeric_limits<double>::infinity();
  double best_dual = -std::numeric_limits<double>::infinity();
  double best_feas = std::numeric_limits<double>::infinity();
  int it = 0;
  for (it = 1; it <= o.max_iters; ++it) {
    for (Index i = 0; i < m; ++i) q[i] = v[i] + sigma * axbar[i];
    // prox of sigma F*: q - sigma * P_ball(q / sigma), ball centred at y with radius delta.
    double dn = 0.0;
    for (Index i = 0; i < m; ++i) dn += std::norm(q[i] / sigma - y[i]);
    dn = std::sqrt(dn);
    const double shrink = dn > delta ? delta / dn : 1.0;
    for (Index i = 0; i < m; ++i) {
      const cplx w = q[i] / sigma;
      const cplx proj = y[i] + (w - y[i]) * shrink;
      v[i] = q[i] - sigma * proj;
    }
    A.adjoint(v, ahv);
    for (Index i = 0; i < n; ++i) xn[i] = x[i] - tau * ahv[i];
    soft_threshold(xn, xn, tau);
    A.apply(xn, axn);
    for (Index i = 0; i < m; ++i) axbar[i] = 2.0 * axn[i] - ax[i];
    x.swap(xn);
    ax.swap(axn);

    double feas = 0.0;
    for (Index i = 0; i < m; ++i) feas += std::norm(ax[i] - y[i]);
    feas = std::sqrt(feas);
    const double obj = norm1(x);
    if (feas <= delta + tol_feas && obj < best_obj) {
      best_obj = obj;
      best = x;
      best_feas = feas;
    } else if (feas > delta + tol_feas && (it % 50 == 0 || it == o.max_iters)) {
      restore(feas, best_obj, best_feas);
    }
    // Dual point u = -v, scaled so ||A* u||_inf <= 1.
    const double ginf = norm_inf(ahv);
    const double dual = (-re_dot(y, v) - delta * norm2(v)) / std::max(1.0, ginf);
    best_dual = std::max(best_dual, dual);
    if (o.record_trace) res.trace.push_back({it, best_obj, feas});
    if (std::isfinite(best_obj)) {
      res.gap = (best_obj - best_dual) / std::max(best_obj, std::numeric_limits<double>::min());
      if (res.gap <= o.tol_primal) {
        res.converged = true;
        break;
      }
    } else {
      res.gap = std::numeric_limits<double>::infinity();
    }
  }
  res.iters = std::min(it, o.max_iters);
  if (std::isfinite(best_obj)) {
    res.xi = std::move(best);
    res.objective = best_obj;
    res.feas_residual = best_feas;
  } else {
    res.xi = std::move(x);
    res.objective = norm1(res.xi);
  }
  return res;
}

}  // namespace

nlohmann::json solver_options_to_json(const SolverOptions& o) {
  nlohmann::json j;
  j["max_iters"] = o.max_iters;
  j["tol_primal"] = o.tol_primal;
  j["tol_feas"] = o.tol_feas;
  j["seed"] = o.seed;
  j["method"] = o.method == SolverMethod::Auto ? "auto" : o.method == SolverMethod::DouglasRachford ? "douglas_rachford" : "primal_dual";
  j["gamma_rel"] = o.gamma_rel;
  j["pd_ratio"] = o.pd_ratio;
  return j;
}

SolverOptions solver_options_from_json(const nlohmann::json& j) {
  SolverOptions o;
  o.max_iters = j.value("max_iters", o.max_iters);
  o.tol_primal = j.value("tol_primal", o.tol_primal);
  o.tol_feas = j.value("tol_feas", o.tol_feas);
  o.seed = j.value("seed", o.seed);
  o.gamma_rel = j.value("gamma_rel", o.gamma_rel);
  o.pd_ratio = j.value("pd_ratio", o.pd_ratio);
  const std::string m = j.value("method", std::string("auto"));
  if (m == "auto") {
    o.method = SolverMethod::Auto;
  } else if (m == "douglas_rachford") {
    o.method = SolverMethod::DouglasRachford;
  } else if (m == "primal_dual") {
    o.method = SolverMethod::PrimalDual;
  } else {
    throw Error(Errc::ConfigError, "unknown solver method '" + m + "'");
  }
  if (o.max_iters <= 0) throw Error(Errc::ConfigError, "max_iters must be positive");
  return o;
}

SolveResult solve_bpdn(const BPProblem& p) {
  if (!p.measurement) throw Error(Errc::InvalidParams, "problem has no measurement operator");
  const LinearOperator& A = *p.measurement;
  if (p.y.size() != A.rows()) {
    throw Error(Errc::DimensionMismatch, "y has length " + std::to_string(p.y.size()) + ", operator has " +
                                             std::to_string(A.rows()) + " rows");
  }
  if (p.delta < 0.0) throw Error(Errc::InvalidParams, "delta must be non-negative");
  const double ny = norm2(p.y);
  const double tol_feas = p.opts.tol_feas < 0.0 ? 1e-9 * ny : p.opts.tol_feas;
  if (ny <= p.delta) return trivial_zero(A.cols(), ny);
  SolverMethod method = p.opts.method;
  if (method == SolverMethod::Auto) {
    method = A.has_orthonormal_rows() ? SolverMethod::DouglasRachford : SolverMethod::PrimalDual;
  }
  if (method == SolverMethod::DouglasRachford && !A.has_orthonormal_rows()) {
    throw Error(Errc::InvalidParams, "Douglas-Rachford path needs an operator with orthonormal rows");
  }
  SolveResult r = method == SolverMethod::DouglasRachford ? solve_dr(A, p.y, p.delta, p.opts, tol_feas)
                                                          : solve_pd(A, p.y, p.delta, p.opts, tol_feas);
  CVec ax = A.apply(r.xi);
  double f = 0.0;
  for (Index i = 0; i < ax.size(); ++i) f += std::norm(ax[i] - p.y[i]);
  r.feas_residual = std::sqrt(f);
  r.converged = r.converged && r.feas_residual <= p.delta + tol_feas;
  return r;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iter,objective,feasibility\n" << std::setprecision(17);
  for (const auto& t : trace) os << t.iter << ',' << t.objective << ',' << t.feasibility << '\n';
}

FlipResult flip_reconstruct(const OperatorPtr& U, std::span<const cplx> x, const SampleSet& sample, double delta,
                            const SolverOptions& opts) {
  if (x.size() != U->cols()) throw Error(Errc::DimensionMismatch, "coefficient vector does not match operator");
  auto A = make_op<RowSubsetOp>(U, sample.indices);
  FlipResult out;
  BPProblem p{A, A->apply(x), delta, opts};
  out.unflipped = solve_bpdn(p);
  out.z1 = out.unflipped.xi;
  const CVec xf = flip_vector(x);
  p.y = A->apply(xf);
  out.flipped = solve_bpdn(p);
  out.z2 = flip_vector(std::span<const cplx>(out.flipped.xi));
  return out;
}

}  // namespace mlcs
