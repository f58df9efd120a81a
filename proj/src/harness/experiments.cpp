#include "mlcs/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mlcs/coherence/coherence.hpp"
#include "mlcs/continuum/continuum.hpp"
#include "mlcs/core/rng.hpp"
#include "mlcs/linops/kernels.hpp"
#include "mlcs/linops/operators.hpp"
#include "mlcs/structure/structure.hpp"

namespace mlcs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

const char* sensing_name(Sensing s) {
  switch (s) {
    case Sensing::Dft: return "dft";
    case Sensing::Fwht: return "fwht";
    case Sensing::Bernoulli: return "bernoulli";
    case Sensing::Gaussian: return "gaussian";
  }
  return "?";
}

Sensing sensing_from_name(const std::string& s) {
  if (s == "dft") return Sensing::Dft;
  if (s == "fwht") return Sensing::Fwht;
  if (s == "bernoulli") return Sensing::Bernoulli;
  if (s == "gaussian") return Sensing::Gaussian;
  config_error("unknown sensing '" + s + "'");
}

bool dense_sensing(Sensing s) { return s == Sensing::Bernoulli || s == Sensing::Gaussian; }

// Zero frequency moved from (0,0) to (N/2, N/2).
std::vector<std::uint8_t> fftshift_mask(const std::vector<std::uint8_t>& m, Index N) {
  std::vector<std::uint8_t> out(m.size());
  for (Index r = 0; r < N; ++r)
    for (Index c = 0; c < N; ++c) out[((r + N / 2) % N) * N + (c + N / 2) % N] = m[r * N + c];
  return out;
}

std::vector<std::uint8_t> mask_of(const SampleSet& s) {
  std::vector<std::uint8_t> m(s.total, 0);
  for (Index i : s.indices) m[i] = 1;
  return m;
}

struct Recon {
  std::vector<double> image;
  SolveResult solve;
};

Recon reconstruct(const OperatorPtr& U, const OperatorPtr& W, const SampleSet& sample, const CVec& y, double delta,
                  const SolverOptions& opts) {
  auto A = make_op<RowSubsetOp>(U, sample.indices);
  Recon r;
  r.solve = solve_bpdn(BPProblem{A, y, delta, opts});
  r.image = modulus(W->adjoint(r.solve.xi));
  return r;
}

CVec gather(const CVec& full, const SampleSet& s) {
  CVec y(s.size());
  for (Index i = 0; i < s.size(); ++i) y[i] = full[s.indices[i]];
  return y;
}

void maybe_write_image(const ExperimentConfig& c, ExperimentResult& res, const std::string& name,
                       const std::vector<double>& img, Index N) {
  if (c.out_dir.empty() || !c.write_images) return;
  const fs::path p = fs::path(c.out_dir) / (name + ".pgm");
  write_scaled_pgm(p, img, N, N);
  res.artifacts.push_back(p.string());
}

void maybe_write_mask(const ExperimentConfig& c, ExperimentResult& res, const std::string& name,
                      const std::vector<std::uint8_t>& mask, Index N) {
  if (c.out_dir.empty() || !c.write_images || mask.size() != N * N) return;
  const fs::path p = fs::path(c.out_dir) / (name + ".pbm");
  write_pbm(p, N, N, mask);
  res.artifacts.push_back(p.string());
}

std::string scheme_label(const SchemeConfig& sc, Index k) {
  return sc.id.empty() ? sc.type + std::to_string(k) : sc.id;
}

// Lowest frequencies: an L×L block, centred on zero for the DFT layout.
SampleSet lowpass_block(Sensing sensing, Index N, Index L) {
  SampleSet s;
  s.scheme = "lowpass";
  s.total = N * N;
  L = std::min(L, N);
  std::vector<Index> coord;
  if (sensing == Sensing::Dft) {
    const long lo = -static_cast<long>(L / 2);
    for (long k = lo; k < lo + static_cast<long>(L); ++k)
      coord.push_back(static_cast<Index>((k + static_cast<long>(N)) % static_cast<long>(N)));
  } else {
    for (Index k = 0; k < L; ++k) coord.push_back(k);
  }
  for (Index r : coord)
    for (Index c : coord) s.indices.push_back(r * N + c);
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::FlipTest: return "flip_test";
    case ExperimentKind::CompareSchemes: return "compare_schemes";
    case ExperimentKind::ResolutionFixedFraction: return "resolution_fixed_fraction";
    case ExperimentKind::ResolutionFixedCount: return "resolution_fixed_count";
    case ExperimentKind::SparsityLevels: return "sparsity_levels";
    case ExperimentKind::CoherenceReport: return "coherence_report";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& s) {
  for (auto k : {ExperimentKind::FlipTest, ExperimentKind::CompareSchemes, ExperimentKind::ResolutionFixedFraction,
                 ExperimentKind::ResolutionFixedCount, ExperimentKind::SparsityLevels,
                 ExperimentKind::CoherenceReport})
    if (s == experiment_kind_name(k)) return k;
  config_error("unknown experiment '" + s + "'");
}

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) config_error("config must be a JSON object");
  if (!j.contains("schema_version")) config_error("missing schema_version");
  ExperimentConfig c;
  c.schema_version = field<int>(j, "schema_version", 0);
  if (c.schema_version != kSchemaVersion)
    config_error("unsupported schema_version " + std::to_string(c.schema_version));
  c.kind = experiment_kind_from_name(field<std::string>(j, "experiment", "flip_test"));
  c.sensing = sensing_from_name(field<std::string>(j, "sensing", "dft"));
  c.sensing_fraction = field<double>(j, "sensing_fraction", c.sensing_fraction);
  if (j.contains("wavelet")) {
    const json& w = j.at("wavelet");
    c.wavelet_family = field<int>(w, "family", c.wavelet_family);
    c.wavelet_levels = field<int>(w, "levels", 0);
  }
  if (j.contains("image")) {
    const json& im = j.at("image");
    if (im.contains("phantom")) {
      if (field<std::string>(im, "phantom", "") != "shepp_logan") config_error("unknown phantom");
      c.image.phantom = true;
    } else {
      c.image.path = field<std::string>(im, "path", "");
      fs::path p(c.image.path);
      if (p.is_relative() && !fs::exists(p) && !base_dir.empty() && fs::exists(base_dir / p))
        c.image.path = (base_dir / p).string();
    }
  }
  c.size = field<Index>(j, "size", c.size);
  if (j.contains("schemes")) {
    if (!j.at("schemes").is_array()) config_error("schemes must be an array");
    for (const json& s : j.at("schemes")) {
      SchemeConfig sc;
      sc.id = field<std::string>(s, "id", "");
      sc.type = field<std::string>(s, "type", sc.type);
      sc.fraction = field<double>(s, "fraction", sc.fraction);
      sc.n = field<Index>(s, "n", sc.n);
      sc.m_radius = field<double>(s, "m", sc.m_radius);
      sc.a = field<double>(s, "a", sc.a);
      if (s.contains("b")) sc.b = field<double>(s, "b", 0.0);
      try {
        sc.radii = radius_convention_from_name(field<std::string>(s, "radii", "inscribed"));
      } catch (const Error& e) {
        config_error(e.what());
      }
      c.schemes.push_back(sc);
    }
  }
  c.resolutions = field<std::vector<Index>>(j, "resolutions", {});
  c.sample_count = field<Index>(j, "sample_count", 0);
  c.delta = field<double>(j, "delta", 0.0);
  c.seeds = field<std::vector<std::uint64_t>>(j, "seeds", c.seeds);
  if (j.contains("solver")) c.solver = solver_options_from_json(j.at("solver"));
  c.epsilons = field<std::vector<double>>(j, "epsilons", c.epsilons);
  if (j.contains("operator")) {
    try {
      c.op = spec_from_json(j.at("operator"));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  c.npart = field<std::vector<Index>>(j, "npart", {});
  c.mpart = field<std::vector<Index>>(j, "mpart", {});
  c.sparsity = field<std::vector<Index>>(j, "sparsity", {});
  c.constant_c = field<double>(j, "constant_c", c.constant_c);
  c.epsilon = field<double>(j, "epsilon", c.epsilon);
  c.out_dir = field<std::string>(j, "output_dir", "");
  c.write_images = field<bool>(j, "write_images", true);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["experiment"] = experiment_kind_name(c.kind);
  j["sensing"] = sensing_name(c.sensing);
  j["sensing_fraction"] = c.sensing_fraction;
  j["wavelet"] = {{"family", c.wavelet_family}, {"levels", c.wavelet_levels}};
  if (c.image.phantom) {
    j["image"] = {{"phantom", "shepp_logan"}};
  } else if (!c.image.path.empty()) {
    j["image"] = {{"path", c.image.path}};
  }
  j["size"] = c.size;
  json schemes = json::array();
  for (const auto& s : c.schemes) {
    json o = {{"id", s.id}, {"type", s.type}, {"fraction", s.fraction}, {"n", s.n},
              {"m", s.m_radius}, {"a", s.a}, {"radii", radius_convention_name(s.radii)}};
    if (s.b) o["b"] = *s.b;
    schemes.push_back(o);
  }
  j["schemes"] = schemes;
  j["resolutions"] = c.resolutions;
  j["sample_count"] = c.sample_count;
  j["delta"] = c.delta;
  j["seeds"] = c.seeds;
  j["solver"] = solver_options_to_json(c.solver);
  j["epsilons"] = c.epsilons;
  if (c.op) j["operator"] = spec_to_json(*c.op);
  j["npart"] = c.npart;
  j["mpart"] = c.mpart;
  j["sparsity"] = c.sparsity;
  j["constant_c"] = c.constant_c;
  j["epsilon"] = c.epsilon;
  j["output_dir"] = c.out_dir;
  j["write_images"] = c.write_images;
  return j;
}

void validate(const ExperimentConfig& c) {
  auto sizes_ok = [](Index n) { return is_power_of_two(n) && n >= 8; };
  const bool needs_image = c.kind != ExperimentKind::CoherenceReport;
  const bool resolution = c.kind == ExperimentKind::ResolutionFixedFraction ||
                          c.kind == ExperimentKind::ResolutionFixedCount;
  if (needs_image) {
    if (!c.image.phantom && c.image.path.empty()) config_error("image source required");
    if (!c.image.phantom && !fs::exists(c.image.path)) config_error("image file not found: " + c.image.path);
    if (!resolution && !sizes_ok(c.size)) config_error("size must be a power of two >= 8");
    if (c.wavelet_family < 1 || c.wavelet_family > 8) config_error("wavelet family must be 1..8");
    if (c.wavelet_levels < 0) config_error("wavelet levels must be >= 0");
  }
  if (resolution) {
    if (c.resolutions.empty()) config_error("resolutions required");
    for (Index i = 0; i < c.resolutions.size(); ++i) {
      if (!sizes_ok(c.resolutions[i])) config_error("resolutions must be powers of two >= 8");
      if (i && c.resolutions[i] <= c.resolutions[i - 1]) config_error("resolutions must increase");
    }
    if (c.sensing != Sensing::Dft) config_error("resolution studies use DFT sensing");
  }
  if (c.kind == ExperimentKind::ResolutionFixedCount) {
    if (c.sample_count == 0) config_error("sample_count required");
    for (Index n : c.resolutions)
      if (c.sample_count > n * n) config_error("sample_count exceeds the coefficient count");
  }
  if (c.kind == ExperimentKind::CompareSchemes && c.schemes.size() < 2) config_error("compare_schemes needs >= 2 schemes");
  if ((c.kind == ExperimentKind::FlipTest || c.kind == ExperimentKind::ResolutionFixedFraction ||
       c.kind == ExperimentKind::ResolutionFixedCount) &&
      c.schemes.empty() && !dense_sensing(c.sensing))
    config_error("at least one scheme required");
  for (const auto& s : c.schemes) {
    if (!(s.fraction > 0.0 && s.fraction <= 1.0)) config_error("fraction must lie in (0, 1]");
    if (s.type != "gg" && s.type != "uniform" && s.type != "full" && s.type != "lowpass")
      config_error("unknown scheme type '" + s.type + "'");
  }
  if (dense_sensing(c.sensing) && !(c.sensing_fraction > 0.0 && c.sensing_fraction <= 1.0))
    config_error("sensing_fraction must lie in (0, 1]");
  if (c.delta < 0) config_error("delta must be >= 0");
  if (c.seeds.empty()) config_error("seeds must not be empty");
  if (c.kind == ExperimentKind::CoherenceReport) {
    if (!c.op) config_error("coherence_report needs an operator");
    if (c.npart.empty() || c.mpart.empty()) config_error("coherence_report needs npart and mpart");
    if (!c.sparsity.empty() && c.sparsity.size() != c.mpart.size())
      config_error("sparsity must have one entry per sparsity level");
    if (!(c.constant_c > 0)) config_error("constant_c must be positive");
  }
  if (c.kind == ExperimentKind::SparsityLevels)
    for (double e : c.epsilons)
      if (!(e > 0 && e <= 1)) config_error("epsilons must lie in (0, 1]");
}

bool ExperimentResult::all_converged() const {
  return std::all_of(records.begin(), records.end(), [](const RunRecord& r) { return r.converged; });
}

json result_to_json(const ExperimentResult& r) {
  json rows = json::array();
  for (const auto& x : r.records)
    rows.push_back({{"scheme", x.scheme},
                    {"variant", x.variant},
                    {"resolution", x.resolution},
                    {"seed", x.seed},
                    {"samples", x.samples},
                    {"fraction", x.fraction},
                    {"rel_error", x.rel_error},
                    {"iters", x.iters},
                    {"converged", x.converged},
                    {"wall_time_s", x.wall_time}});
  return {{"schema_version", kSchemaVersion},
          {"experiment", experiment_kind_name(r.kind)},
          {"records", rows},
          {"artifacts", r.artifacts},
          {"extra", r.extra}};
}

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << "scheme,variant,resolution,seed,samples,fraction,rel_error,iters,converged,wall_time_s\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.scheme << ',' << r.variant << ',' << r.resolution << ',' << r.seed << ',' << r.samples << ','
       << r.fraction << ',' << r.rel_error << ',' << r.iters << ',' << (r.converged ? 1 : 0) << ',' << r.wall_time
       << '\n';
}

std::vector<RunRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::IoError, "empty results CSV");
  std::vector<RunRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 10) throw Error(Errc::IoError, "bad results row: " + line);
    RunRecord r;
    r.scheme = f[0];
    r.variant = f[1];
    r.resolution = std::stoull(f[2]);
    r.seed = std::stoull(f[3]);
    r.samples = std::stoull(f[4]);
    r.fraction = std::stod(f[5]);
    r.rel_error = std::stod(f[6]);
    r.iters = std::stoi(f[7]);
    r.converged = f[8] == "1";
    r.wall_time = std::stod(f[9]);
    out.push_back(r);
  }
  return out;
}

int default_wavelet_levels(int family, Index side) {
  const double taps = 2.0 * family;
  const int l = static_cast<int>(std::floor(std::log2(static_cast<double>(side) / (taps - 1.0))));
  return std::clamp(l, 1, static_cast<int>(log2_exact(side)));
}

std::vector<double> load_image(const ImageSource& src, Index N) {
  if (src.phantom) {
    const auto ph = shepp_logan();
    std::vector<double> img(N * N);
    const double h = 2.0 / static_cast<double>(N);
    for (Index r = 0; r < N; ++r)
      for (Index c = 0; c < N; ++c) img[r * N + c] = ellipse_phantom_value(ph, -1.0 + h * c, -1.0 + h * r);
    return img;
  }
  return resize_to(read_pgm(src.path), N).as_double();
}

OperatorPtr sparsifying_dwt(int family, int levels, Index N) {
  return make_op<DwtOp>(family, levels > 0 ? levels : default_wavelet_levels(family, N), N, 2);
}

OperatorPtr sensing_operator(Sensing s, Index N, double fraction, std::uint64_t seed) {
  switch (s) {
    case Sensing::Dft: return make_op<DftOp>(N, 2);
    case Sensing::Fwht: return make_op<FwhtOp>(N, 2);
    case Sensing::Bernoulli:
    case Sensing::Gaussian: {
      const Index rows = std::max<Index>(1, static_cast<Index>(std::llround(fraction * N * N)));
      return make_op<DenseRandomOp>(s == Sensing::Bernoulli ? RandomDist::Bernoulli : RandomDist::Gaussian, rows,
                                    N * N, derive_seed(seed, 0x5eed));
    }
  }
  throw Error(Errc::InvalidParams, "sensing");
}

SampleSet make_scheme(const SchemeConfig& sc, Sensing sensing, Index N, std::uint64_t seed,
                      std::vector<std::uint8_t>* display_mask) {
  const Index total = N * N;
  SampleSet s;
  if (sc.type == "full") {
    s.indices.resize(total);
    for (Index i = 0; i < total; ++i) s.indices[i] = i;
    s.total = total;
    s.scheme = "full";
    s.seed = seed;
  } else if (sc.type == "uniform") {
    s = uniform_scheme(total, static_cast<Index>(std::llround(sc.fraction * total)), seed);
  } else if (sc.type == "lowpass") {
    s = lowpass_block(sensing, N, static_cast<Index>(std::floor(std::sqrt(sc.fraction * total))));
    s.seed = seed;
  } else {
    DensityParams p;
    p.N = N;
    p.n = sc.n;
    p.m_radius = sc.m_radius;
    p.a = sc.a;
    p.geometry = sensing == Sensing::Fwht ? MapGeometry::Quadrant : MapGeometry::Circles;
    p.radii = sc.radii;
    p.b = sc.b ? *sc.b : calibrate_b(p, sc.fraction);
    auto map = gg_density_map(p, seed);
    if (display_mask) *display_mask = map.display_mask();
    return map.to_sample_set();
  }
  if (display_mask) *display_mask = sensing == Sensing::Dft ? fftshift_mask(mask_of(s), N) : mask_of(s);
  return s;
}

ExperimentResult run_flip_test(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult res;
  res.kind = ExperimentKind::FlipTest;
  const Index N = c.size;
  const auto x = load_image(c.image, N);
  const auto W = sparsifying_dwt(c.wavelet_family, c.wavelet_levels, N);
  const CVec coeffs = W->apply(to_complex(x));
  SchemeConfig sc;
  if (c.schemes.empty()) {
    sc.id = "all_rows";
    sc.type = "full";
  } else {
    sc = c.schemes.front();
  }
  for (std::uint64_t seed : c.seeds) {
    Timer t;
    const auto F = sensing_operator(c.sensing, N, c.sensing_fraction, seed);
    const auto U = make_op<ComposeOp>(F, W);
    std::vector<std::uint8_t> mask;
    SampleSet sample;
    if (dense_sensing(c.sensing)) {
      sample.total = U->rows();
      sample.indices.resize(U->rows());
      for (Index i = 0; i < U->rows(); ++i) sample.indices[i] = i;
      sample.scheme = "all_rows";
    } else {
      sample = make_scheme(sc, c.sensing, N, seed, &mask);
    }
    SolverOptions o = c.solver;
    o.seed = derive_seed(seed, 1);
    const FlipResult fr = flip_reconstruct(U, coeffs, sample, c.delta, o);
    const auto img1 = modulus(W->adjoint(fr.z1));
    const auto img2 = modulus(W->adjoint(fr.z2));
    const double wall = t.seconds();
    const double frac = static_cast<double>(sample.size()) / static_cast<double>(N * N);
    const std::string label = dense_sensing(c.sensing) ? sensing_name(c.sensing) : scheme_label(sc, 0);
    res.records.push_back({label, "unflipped", N, seed, sample.size(), frac, relative_error(x, img1).value,
                           fr.unflipped.iters, fr.unflipped.converged, wall});
    res.records.push_back({label, "flipped", N, seed, sample.size(), frac, relative_error(x, img2).value,
                           fr.flipped.iters, fr.flipped.converged, wall});
    if (seed == c.seeds.front()) {
      maybe_write_image(c, res, "original", x, N);
      maybe_write_image(c, res, "unflipped_seed" + std::to_string(seed), img1, N);
      maybe_write_image(c, res, "flipped_seed" + std::to_string(seed), img2, N);
      maybe_write_mask(c, res, "mask_seed" + std::to_string(seed), mask, N);
    }
  }
  return res;
}

ExperimentResult run_compare_schemes(const ExperimentConfig& c) {
  validate(c);
  return run_reconstruct(c);
}

ExperimentResult run_reconstruct(const ExperimentConfig& c) {
  ExperimentConfig single = c;
  single.kind = ExperimentKind::FlipTest;
  validate(single);
  ExperimentResult res;
  res.kind = ExperimentKind::CompareSchemes;
  const Index N = c.size;
  const auto x = load_image(c.image, N);
  const auto W = sparsifying_dwt(c.wavelet_family, c.wavelet_levels, N);
  for (Index k = 0; k < c.schemes.size(); ++k) {
    const auto& sc = c.schemes[k];
    const std::string label = scheme_label(sc, k);
    for (std::uint64_t seed : c.seeds) {
      Timer t;
      const auto F = sensing_operator(c.sensing, N, c.sensing_fraction, seed);
      const auto U = make_op<ComposeOp>(F, W);
      std::vector<std::uint8_t> mask;
      SampleSet sample;
      if (dense_sensing(c.sensing)) {
        sample.total = U->rows();
        for (Index i = 0; i < U->rows(); ++i) sample.indices.push_back(i);
      } else {
        sample = make_scheme(sc, c.sensing, N, seed, &mask);
      }
      const CVec full = F->apply(to_complex(x));
      SolverOptions o = c.solver;
      o.seed = derive_seed(seed, 1);
      const Recon r = reconstruct(U, W, sample, gather(full, sample), c.delta, o);
      const double frac = static_cast<double>(sample.size()) / static_cast<double>(N * N);
      res.records.push_back({label, "", N, seed, sample.size(), frac, relative_error(x, r.image).value,
                             r.solve.iters, r.solve.converged, t.seconds()});
      if (seed == c.seeds.front()) {
        maybe_write_image(c, res, label + "_seed" + std::to_string(seed), r.image, N);
        maybe_write_mask(c, res, label + "_mask_seed" + std::to_string(seed), mask, N);
      }
    }
  }
  return res;
}

ExperimentResult run_resolution_study(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult res;
  res.kind = c.kind;
  const bool fixed_count = c.kind == ExperimentKind::ResolutionFixedCount;
  for (Index N : c.resolutions) {
    const auto F = make_op<DftOp>(N, 2);
    const auto W = sparsifying_dwt(c.wavelet_family, c.wavelet_levels, N);
    const auto U = make_op<ComposeOp>(F, W);
    // Continuous samples avoid the inverse crime; the reference is the
    // fully sampled reconstruction at the same resolution.
    CVec full = c.image.phantom ? phantom_dft_samples(shepp_logan(), N) : F->apply(to_complex(load_image(c.image, N)));
    const auto ref = modulus(F->adjoint(full));
    if (N == c.resolutions.front()) maybe_write_image(c, res, "full_N" + std::to_string(N), ref, N);
    const double count_frac = fixed_count ? static_cast<double>(c.sample_count) / static_cast<double>(N * N) : 0.0;
    if (fixed_count) {
      Timer t;
      const auto low = lowpass_block(Sensing::Dft, N, static_cast<Index>(std::floor(std::sqrt(c.sample_count))));
      CVec padded(N * N, 0.0);
      for (Index i : low.indices) padded[i] = full[i];
      const auto lin = modulus(F->adjoint(padded));
      res.records.push_back({"lowpass", "linear", N, 0, low.size(),
                             static_cast<double>(low.size()) / static_cast<double>(N * N),
                             relative_error(ref, lin).value, 0, true, t.seconds()});
      maybe_write_image(c, res, "linear_N" + std::to_string(N), lin, N);
    }
    for (Index k = 0; k < c.schemes.size(); ++k) {
      SchemeConfig sc = c.schemes[k];
      if (fixed_count) sc.fraction = count_frac;
      const std::string label = scheme_label(sc, k);
      for (std::uint64_t seed : c.seeds) {
        Timer t;
        std::vector<std::uint8_t> mask;
        const SampleSet sample = make_scheme(sc, Sensing::Dft, N, seed, &mask);
        SolverOptions o = c.solver;
        o.seed = derive_seed(seed, 1);
        const Recon r = reconstruct(U, W, sample, gather(full, sample), c.delta, o);
        res.records.push_back({label, fixed_count ? "nonlinear" : "", N, seed, sample.size(),
                               static_cast<double>(sample.size()) / static_cast<double>(N * N),
                               relative_error(ref, r.image).value, r.solve.iters, r.solve.converged, t.seconds()});
        if (seed == c.seeds.front()) {
          const std::string tag = label + "_N" + std::to_string(N);
          maybe_write_image(c, res, tag, r.image, N);
          maybe_write_mask(c, res, tag + "_mask", mask, N);
        }
      }
    }
  }
  return res;
}

ExperimentResult run_sparsity_levels(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult res;
  res.kind = ExperimentKind::SparsityLevels;
  const Index N = c.size;
  const int levels = c.wavelet_levels > 0 ? c.wavelet_levels : default_wavelet_levels(c.wavelet_family, N);
  const auto W = sparsifying_dwt(c.wavelet_family, levels, N);
  const auto coeffs = W->apply(to_complex(load_image(c.image, N)));
  const auto mpart = wavelet_levels(N, levels, 2);
  const auto prof = sparsity_profile(modulus(coeffs), mpart, c.epsilons, 0.0);
  json table = json::array();
  for (const auto& [eps, s] : prof.s_eff) {
    json ratios = json::array();
    for (Index k = 0; k < s.size(); ++k) ratios.push_back(static_cast<double>(s[k]) / mpart.size(k));
    table.push_back({{"epsilon", eps}, {"s", s}, {"ratio", ratios}});
  }
  res.extra = {{"levels", mpart.boundaries()}, {"profiles", table}};
  if (!c.out_dir.empty()) {
    const fs::path p = fs::path(c.out_dir) / "sparsity.csv";
    fs::create_directories(p.parent_path());
    std::ofstream os(p);
    write_sparsity_csv(os, prof);
    res.artifacts.push_back(p.string());
  }
  return res;
}

ExperimentResult run_coherence_report(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult res;
  res.kind = ExperimentKind::CoherenceReport;
  const auto U = build_operator(*c.op);
  const LevelPartition np(c.npart), mp(c.mpart);
  np.check_within(U->rows(), "npart");
  mp.check_within(U->cols(), "mpart");
  const auto prof = local_coherence(*U, np, mp, false);
  json local = json::array();
  for (Eigen::Index k = 0; k < prof.local.rows(); ++k) {
    json row = json::array();
    for (Eigen::Index l = 0; l < prof.local.cols(); ++l) row.push_back(prof.local(k, l));
    local.push_back(row);
  }
  res.extra = {{"global", prof.global}, {"local", local}};
  if (!c.sparsity.empty()) {
    const auto S = relative_sparsity(*U, np, mp, c.sparsity, RelSparsityMode::Greedy);
    const auto alloc = allocate_samples(prof, S, c.sparsity, np, c.epsilon, c.constant_c);
    res.extra["relative_sparsity"] = S;
    res.extra["allocation"] = alloc.m;
    res.extra["allocation_total"] = alloc.total();
    std::vector<bool> inf = alloc.infeasible;
    res.extra["infeasible"] = inf;
  }
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    const fs::path pc = fs::path(c.out_dir) / "coherence.csv";
    const fs::path pj = fs::path(c.out_dir) / "coherence.json";
    std::ofstream oc(pc), oj(pj);
    write_profile_csv(oc, prof);
    write_profile_json(oj, prof);
    res.artifacts.push_back(pc.string());
    res.artifacts.push_back(pj.string());
    if (c.write_images) {
      const fs::path ph = fs::path(c.out_dir) / "coherence_heatmap.pgm";
      write_log_heatmap(ph, prof.local);
      res.artifacts.push_back(ph.string());
    }
  }
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  ExperimentResult r;
  switch (c.kind) {
    case ExperimentKind::FlipTest: r = run_flip_test(c); break;
    case ExperimentKind::CompareSchemes: r = run_compare_schemes(c); break;
    case ExperimentKind::ResolutionFixedFraction:
    case ExperimentKind::ResolutionFixedCount: r = run_resolution_study(c); break;
    case ExperimentKind::SparsityLevels: r = run_sparsity_levels(c); break;
    case ExperimentKind::CoherenceReport: r = run_coherence_report(c); break;
  }
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    if (!r.records.empty()) {
      std::ofstream os(fs::path(c.out_dir) / "results.csv");
      write_records_csv(os, r.records);
    }
    json j = result_to_json(r);
    j["config"] = config_to_json(c);
    write_json_file(fs::path(c.out_dir) / "result.json", j);
  }
  return r;
}

}  // namespace mlcs
