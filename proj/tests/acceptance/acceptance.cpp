// One PASS/FAIL line per criterion. Run with criterion numbers to select a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "mlcs/coherence/coherence.hpp"
#include "mlcs/continuum/continuum.hpp"
#include "mlcs/core/rng.hpp"
#include "mlcs/harness/experiments.hpp"
#include "mlcs/linops/operators.hpp"
#include "mlcs/linops/spec.hpp"
#include "mlcs/sampling/sampling.hpp"
#include "mlcs/solver/solver.hpp"
#include "mlcs/structure/structure.hpp"

using namespace mlcs;
using json = nlohmann::json;

namespace {

// Pinned thresholds.
constexpr double kBarrierSpread = 0.10;
constexpr double kBarrierFloor = 0.1;
constexpr double kBarrierSeconds = 30.0;
constexpr double kSlopeLo = -1.3, kSlopeHi = -0.7;
constexpr double kSlopeSeconds = 120.0;
constexpr double kFlipRatio = 1.5;
constexpr int kFlipSeedsNeeded = 4;
constexpr double kFlipSeconds = 600.0;
constexpr int kFlipIters = 300;
constexpr double kRipBand = 0.15;
constexpr int kRipIters = 300;
constexpr double kUniformRatio = 0.5;
constexpr double kUniformSeconds = 900.0;
constexpr int kUniformIters = 300;
constexpr double kSharpSeconds = 60.0;
constexpr double kSavingBand = 0.10;
constexpr double kInversionMax = 0.05;
constexpr double kOracleObjTol = 1e-5;
constexpr double kOracleFeasTol = 1e-8;
constexpr double kOracleSeconds = 120.0;
constexpr int kOracleIters = 200000;
constexpr double kResolutionSeconds = 1800.0;
constexpr int kResolutionIters = 300;
constexpr double kRoundtripTol = 1e-10;
constexpr double kFwhtSeconds = 1.0;
constexpr double kReferenceB = 4.2539;
constexpr double kCalibBand = 0.02;
constexpr double kMaskBand = 0.005;

const std::string kData = MLCS_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0, den = 0;
  for (Index i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

CVec random_cvec(Index n, std::uint64_t seed) {
  Rng rng(seed);
  CVec x(n);
  for (auto& v : x) v = cplx(rng.normal(), rng.normal());
  return x;
}

Outcome coherence_barrier() {
  Stopwatch sw;
  double lo = 1e300, hi = 0;
  std::string vals;
  for (Index n = 64; n <= 1024; n *= 2) {
    const int levels = int(log2_exact(n)) - 3;
    auto U = build_operator(OperatorSpec::compose(OperatorSpec::dft1d(n), OperatorSpec::dwt(4, levels, n)));
    const double mu = global_coherence(*U);
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
    vals += fmt(" %.4f", mu);
  }
  const double spread = (hi - lo) / lo, t = sw.seconds();
  return {spread < kBarrierSpread && lo >= kBarrierFloor && t < kBarrierSeconds,
          fmt("mu =%s, spread %.3f, %.1f s", vals.c_str(), spread, t)};
}

Outcome asymptotic_incoherence() {
  Stopwatch sw;
  const auto sys = make_wavelet_system(1);
  const auto g = make_grid(sys, 12);
  const ContinuumOp U(g, sys, 8192, g.max_cols());
  std::vector<double> lx, ly;
  for (Index K = 16; K <= 1024; K *= 2) {
    lx.push_back(std::log(double(K)));
    ly.push_back(std::log(tail_coherence(U, K, Side::Rows)));
  }
  const double n = lx.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Index i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx), t = sw.seconds();
  return {slope >= kSlopeLo && slope <= kSlopeHi && t < kSlopeSeconds, fmt("slope %.4f, %.1f s", slope, t)};
}

json flip_config(const std::string& sensing, Index size, int family, const std::string& image, int iters) {
  json j = {{"schema_version", 1},
            {"experiment", "flip_test"},
            {"sensing", sensing},
            {"wavelet", {{"family", family}, {"levels", 0}}},
            {"image", {{"path", image}}},
            {"size", size},
            {"seeds", {1, 2, 3, 4, 5}},
            {"solver", {{"max_iters", iters}}},
            {"write_images", false}};
  if (sensing == "dft") j["schemes"] = {{{"id", "gg15"}, {"type", "gg"}, {"fraction", 0.15}}};
  if (sensing == "bernoulli") j["sensing_fraction"] = 0.25;
  return j;
}

std::vector<std::pair<double, double>> flip_pairs(const ExperimentResult& r) {
  std::map<std::uint64_t, std::pair<double, double>> by_seed;
  for (const auto& rec : r.records) (rec.variant == "flipped" ? by_seed[rec.seed].second : by_seed[rec.seed].first) = rec.rel_error;
  std::vector<std::pair<double, double>> out;
  for (const auto& [s, p] : by_seed) out.push_back(p);
  return out;
}

Outcome flip_test() {
  Stopwatch sw;
  const auto r = run_flip_test(config_from_json(flip_config("dft", 256, 6, kData + "/camera_512.pgm", kFlipIters)));
  int good = 0;
  std::string vals;
  for (auto [u, f] : flip_pairs(r)) {
    good += f >= kFlipRatio * u;
    vals += fmt(" %.2f", f / u);
  }
  const double t = sw.seconds();
  return {good >= kFlipSeedsNeeded && t < kFlipSeconds, fmt("flip/unflip =%s, %d of 5 seeds, %.1f s", vals.c_str(), good, t)};
}

Outcome rip_control() {
  Stopwatch sw;
  const auto r = run_flip_test(config_from_json(flip_config("bernoulli", 128, 4, kData + "/camera_512.pgm", kRipIters)));
  int good = 0;
  std::string vals;
  for (auto [u, f] : flip_pairs(r)) {
    good += std::abs(f - u) <= kRipBand * u;
    vals += fmt(" %+.3f", (f - u) / u);
  }
  return {good >= kFlipSeedsNeeded, fmt("(flip-unflip)/unflip =%s, %d of 5 seeds, %.1f s", vals.c_str(), good, sw.seconds())};
}

Outcome uniform_vs_multilevel() {
  Stopwatch sw;
  json j = {{"schema_version", 1},
            {"experiment", "compare_schemes"},
            {"sensing", "dft"},
            {"wavelet", {{"family", 4}, {"levels", 0}}},
            {"image", {{"path", kData + "/camera_512.pgm"}}},
            {"size", 512},
            {"schemes", {{{"id", "multilevel"}, {"type", "gg"}, {"fraction", 0.05}}, {{"id", "uniform"}, {"type", "uniform"}, {"fraction", 0.05}}}},
            {"seeds", {1, 2, 3}},
            {"solver", {{"max_iters", kUniformIters}}},
            {"write_images", false}};
  const auto r = run_experiment(config_from_json(j));
  std::map<std::uint64_t, std::pair<double, double>> by_seed;
  for (const auto& rec : r.records) (rec.scheme == "uniform" ? by_seed[rec.seed].second : by_seed[rec.seed].first) = rec.rel_error;
  bool ok = by_seed.size() == 3;
  std::string vals;
  for (const auto& [s, p] : by_seed) {
    ok = ok && p.first <= kUniformRatio * p.second;
    vals += fmt(" %.3f/%.3f", p.first, p.second);
  }
  const double t = sw.seconds();
  return {ok && t < kUniformSeconds, fmt("multilevel/uniform =%s, %.1f s", vals.c_str(), t)};
}

Outcome sharpness_oracles() {
  Stopwatch sw;
  bool ok = true;
  std::string why;
  {
    const std::vector<Index> pi{2, 0, 1};
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(3, 3);
    for (Index k = 0; k < 3; ++k) V(k, pi[k]) = 1.0;
    auto U = make_op<KroneckerOp>(make_op<DenseMatrixOp>(V, true), build_operator(OperatorSpec::fwht(8)));
    const auto p = LevelPartition::uniform(24, 3);
    const std::vector<Index> s{1, 2, 3};
    const auto S = relative_sparsity(*U, p, p, s, RelSparsityMode::Exact);
    for (Index k = 0; k < 3; ++k) ok = ok && std::abs(S[k] - double(s[pi[k]])) < 1e-12;
    why += fmt("perm S = %.3f %.3f %.3f;", S[0], S[1], S[2]);
  }
  {
    const Index r = 2;
    auto U = make_op<KroneckerOp>(build_operator(OperatorSpec::dft1d(r)), build_operator(OperatorSpec::fwht(8)));
    const auto p = LevelPartition::uniform(16, r);
    const auto S = relative_sparsity(*U, p, p, {2, 2}, RelSparsityMode::Exact);
    for (double v : S) ok = ok && v >= 4.0 / r - 1e-9 && v <= 4.0 + 1e-9;
    why += fmt(" dft S = %.3f %.3f;", S[0], S[1]);
  }
  {
    auto U = build_operator(OperatorSpec::block_diag({OperatorSpec::fwht(4), OperatorSpec::dft1d(8), OperatorSpec::fwht(4)}));
    const LevelPartition p({4, 12, 16});
    const auto prof = local_coherence(*U, p, p, false);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        if (k != l) ok = ok && prof.local(k, l) == 0.0;
    const std::vector<Index> s{1, 3, 2};
    const auto S = relative_sparsity(*U, p, p, s, RelSparsityMode::Exact);
    for (Index k = 0; k < 3; ++k) ok = ok && std::abs(S[k] - double(s[k])) < 1e-12;
    why += fmt(" block S = %.3f %.3f %.3f", S[0], S[1], S[2]);
  }
  const double t = sw.seconds();
  return {ok && t < kSharpSeconds, why + fmt(", %.1f s", t)};
}

Outcome structured_saving() {
  const Index r = 4, n = 1024;
  std::vector<OperatorSpec> blocks(r, OperatorSpec::dft1d(n));
  auto U = build_operator(OperatorSpec::block_diag(blocks));
  const Index s_total = 16;
  const double eps = 0.05;
  const LevelPartition one({r * n});
  const auto single = allocate_samples(local_coherence(*U, one, one, false), {double(s_total)}, {s_total}, one, eps, 1.0);
  const auto p = LevelPartition::uniform(r * n, r);
  const std::vector<Index> s(r, s_total / r);
  const auto S = relative_sparsity(*U, p, p, s, RelSparsityMode::Greedy);
  const auto multi = allocate_samples(local_coherence(*U, p, p, false), S, s, p, eps, 1.0);
  const double ratio = double(single.total()) / double(multi.total());
  const bool capped = single.infeasible[0];
  return {!capped && std::abs(ratio - double(r)) <= kSavingBand * r,
          fmt("single %zu, levels %zu, ratio %.3f", std::size_t(single.total()), std::size_t(multi.total()), ratio)};
}

Outcome asymptotic_sparsity() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"camera_512.pgm", "astronaut_512.pgm", "moon_512.pgm"}) {
    ImageSource src;
    src.path = kData + "/" + name;
    const Index N = 512;
    const int levels = default_wavelet_levels(8, N);
    const auto W = sparsifying_dwt(8, levels, N);
    CVec x;
    for (double v : load_image(src, N)) x.push_back(v);
    const auto c = W->apply(x);
    std::vector<double> mag(c.size());
    for (Index i = 0; i < c.size(); ++i) mag[i] = std::abs(c[i]);
    const auto mpart = wavelet_levels(N, levels, 2);
    const auto prof = sparsity_profile(mag, mpart, {0.75, 0.9, 0.99}, 0.0);
    int inversions = 0;
    double worst = 0.0;
    for (const auto& [eps, s] : prof.s_eff) {
      // k >= 2 in 1-based levels: indices 1.. here.
      for (Index k = 2; k < s.size(); ++k) {
        const double prev = double(s[k - 1]) / mpart.size(k - 1), cur = double(s[k]) / mpart.size(k);
        if (cur > prev) {
          ++inversions;
          worst = std::max(worst, (cur - prev) / prev);
        }
      }
    }
    ok = ok && (inversions == 0 || (inversions == 1 && worst <= kInversionMax));
    detail += fmt("%s %d inversion(s)%s; ", name, inversions, inversions ? fmt(" max %.3f", worst).c_str() : "");
  }
  return {ok, detail};
}

Outcome solver_soundness() {
  Stopwatch sw;
  double worst_obj = 0, worst_feas = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(5000 + seed);
    const Index n = 8 + seed % 9, m = 4 + seed % 3, k = 1 + seed % 3;
    Eigen::MatrixXd A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = rng.normal() / std::sqrt(double(m));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Index t = 0; t < k; ++t) x(rng.below(n)) = rng.normal();
    const Eigen::VectorXd y = A * x;
    const double delta = seed % 2 ? 0.1 * y.norm() : 0.0;
    const auto oracle = oracle_bp_small(A, y, delta, int(m));
    BPProblem p;
    p.measurement = make_op<DenseMatrixOp>(A.cast<cplx>());
    for (Eigen::Index i = 0; i < y.size(); ++i) p.y.push_back(y(i));
    p.delta = delta;
    p.opts.max_iters = kOracleIters;
    p.opts.tol_primal = 1e-9;
    const auto r = solve_bpdn(p);
    worst_obj = std::max(worst_obj, std::abs(r.objective - oracle.objective) / std::max(1.0, oracle.objective));
    worst_feas = std::max(worst_feas, r.feas_residual - delta);
  }
  const double t = sw.seconds();
  return {worst_obj <= kOracleObjTol && worst_feas <= kOracleFeasTol && t < kOracleSeconds,
          fmt("max objective gap %.2e, max feasibility excess %.2e, %.1f s", worst_obj, worst_feas, t)};
}

Outcome resolution_dependence() {
  Stopwatch sw;
  json base = {{"schema_version", 1},
               {"image", {{"phantom", "shepp_logan"}}},
               {"wavelet", {{"family", 4}, {"levels", 0}}},
               {"seeds", {1}},
               {"solver", {{"max_iters", kResolutionIters}}},
               {"write_images", false}};
  json ff = base;
  ff["experiment"] = "resolution_fixed_fraction";
  ff["resolutions"] = {256, 512, 1024};
  ff["schemes"] = {{{"id", "gg5"}, {"type", "gg"}, {"fraction", 0.05}}};
  const auto a = run_experiment(config_from_json(ff));
  bool dec = a.records.size() == 3;
  std::string vals;
  for (Index i = 0; i < a.records.size(); ++i) {
    vals += fmt(" %.4f", a.records[i].rel_error);
    if (i > 0) dec = dec && a.records[i].rel_error < a.records[i - 1].rel_error;
  }
  json fc = base;
  fc["experiment"] = "resolution_fixed_count";
  fc["resolutions"] = {2048};
  fc["sample_count"] = 512 * 512;
  fc["schemes"] = {{{"id", "gg"}, {"type", "gg"}}};
  const auto b = run_experiment(config_from_json(fc));
  double lin = -1, nonlin = -1;
  for (const auto& rec : b.records) (rec.variant == "linear" ? lin : nonlin) = rec.rel_error;
  const bool beats = lin > 0 && nonlin >= 0 && nonlin < lin;
  const double t = sw.seconds();
  return {dec && beats && t < kResolutionSeconds,
          fmt("fixed fraction errors%s; at 2048 nonlinear %.4f vs linear %.4f; %.1f s", vals.c_str(), nonlin, lin, t)};
}

Outcome balancing_property() {
  const auto sys = make_wavelet_system(1);
  const auto g = make_grid(sys, 6);
  const Index M = 64, s = 16;
  const double K = 4;
  bool fails_at_m = false, succeeds = false, monotone = true;
  double prev = 1e300;
  std::string vals;
  for (Index N = 64; N <= 4096; N *= 2) {
    const ContinuumOp U(g, sys, N, M);
    const auto b = balancing_check(U, N, K, M, s, Strength::Weak);
    if (N == M) fails_at_m = !b.satisfied;
    succeeds = succeeds || b.satisfied;
    monotone = monotone && b.residual_weak <= prev + 1e-15;
    prev = b.residual_weak;
    vals += fmt(" %zu:%.4f", std::size_t(N), b.residual_weak);
    if (N == 64) vals += fmt(" (threshold %.4f)", b.threshold);
  }
  return {fails_at_m && succeeds && monotone, "residuals" + vals};
}

Outcome transform_correctness() {
  double worst = 0;
  auto roundtrip = [&](const OperatorSpec& spec, std::uint64_t seed) {
    const auto U = build_operator(spec);
    const CVec x = random_cvec(U->cols(), seed);
    worst = std::max(worst, rel_err(U->adjoint(U->apply(x)), x));
  };
  for (Index n : {8u, 64u, 1024u, 4096u}) {
    roundtrip(OperatorSpec::dft1d(n), n);
    roundtrip(OperatorSpec::fwht(n), n + 1);
    for (int p = 1; p <= 8; ++p)
      if (Index(2 * p) <= n) roundtrip(OperatorSpec::dwt(p, 1, n), n + p);
  }
  roundtrip(OperatorSpec::dft2d(256), 7);
  roundtrip(OperatorSpec::fwht(256, 2), 8);
  roundtrip(OperatorSpec::dwt(4, 4, 256, 2), 9);
  roundtrip(OperatorSpec::compose(OperatorSpec::dft1d(512), OperatorSpec::dwt(6, 5, 512)), 10);
  roundtrip(OperatorSpec::kronecker(OperatorSpec::dft1d(8), OperatorSpec::fwht(32)), 11);
  const auto F = build_operator(OperatorSpec::fwht(Index(1) << 20));
  const CVec x = random_cvec(Index(1) << 20, 12);
  CVec y(x.size());
  F->apply(x, y);
  Stopwatch sw;
  F->apply(x, y);
  const double t = sw.seconds();
  return {worst <= kRoundtripTol && t < kFwhtSeconds, fmt("worst roundtrip %.2e, FWHT 2^20 %.3f s", worst, t)};
}

Outcome density_calibration() {
  DensityParams p;
  p.N = 2048;
  p.n = 100;
  p.m_radius = 0.05;
  p.a = 1.25;
  const double target = 0.0625;
  p.b = calibrate_b(p, target);
  const auto map = gg_density_map(p, 1);
  const double frac = map.fraction();
  const bool ok = std::abs(p.b - kReferenceB) <= kCalibBand * kReferenceB && std::abs(frac - target) <= kMaskBand * target;
  return {ok, fmt("b = %.4f (%+.2f%%), mask fraction %.5f", p.b, 100 * (p.b - kReferenceB) / kReferenceB, frac)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"coherence barrier", coherence_barrier},
      {"asymptotic incoherence", asymptotic_incoherence},
      {"flip test", flip_test},
      {"rip control", rip_control},
      {"uniform vs multilevel", uniform_vs_multilevel},
      {"sharpness oracles", sharpness_oracles},
      {"structured saving", structured_saving},
      {"asymptotic sparsity", asymptotic_sparsity},
      {"solver soundness", solver_soundness},
      {"resolution dependence", resolution_dependence},
      {"balancing property", balancing_property},
      {"transform correctness", transform_correctness},
      {"density-map calibration", density_calibration},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
