#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcs/harness/io.hpp"
#include "mlcs/linops/spec.hpp"
#include "mlcs/sampling/sampling.hpp"
#include "mlcs/solver/solver.hpp"

namespace mlcs {

constexpr int kSchemaVersion = 1;

enum class ExperimentKind {
  FlipTest,
  CompareSchemes,
  ResolutionFixedFraction,
  ResolutionFixedCount,
  SparsityLevels,
  CoherenceReport,
};

const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& s);

enum class Sensing { Dft, Fwht, Bernoulli, Gaussian };

struct SchemeConfig {
  std::string id;
  // gg | uniform | full | lowpass
  std::string type = "gg";
  double fraction = 0.15;
  Index n = 100;
  double m_radius = 0.05;
  double a = 1.25;
  std::optional<double> b;  // calibrated to fraction when absent
  RadiusConvention radii = RadiusConvention::Inscribed;
};

struct ImageSource {
  std::string path;      // PGM file
  bool phantom = false;  // analytic Shepp-Logan ellipses
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::FlipTest;
  Sensing sensing = Sensing::Dft;
  double sensing_fraction = 0.25;  // rows of a dense random sensing matrix
  int wavelet_family = 4;
  int wavelet_levels = 0;          // 0: floor(log2(N / (taps - 1)))
  ImageSource image;
  Index size = 256;
  std::vector<SchemeConfig> schemes;
  std::vector<Index> resolutions;
  Index sample_count = 0;
  double delta = 0.0;
  std::vector<std::uint64_t> seeds{0};
  SolverOptions solver;
  std::vector<double> epsilons{0.75, 0.9, 0.99};
  // coherence_report
  std::optional<OperatorSpec> op;
  std::vector<Index> npart;
  std::vector<Index> mpart;
  std::vector<Index> sparsity;
  double constant_c = 1.0;
  double epsilon = 0.1;
  std::string out_dir;
  bool write_images = true;
};

// Throws ConfigError for malformed fields; semantic checks are left to
// validate. A missing "experiment" means flip_test. Relative image paths are
// resolved against base_dir when they do not exist relative to the working
// directory.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

struct RunRecord {
  std::string scheme;
  std::string variant;  // unflipped | flipped | linear | nonlinear | empty
  Index resolution = 0;
  std::uint64_t seed = 0;
  Index samples = 0;
  double fraction = 0.0;
  double rel_error = 0.0;
  int iters = 0;
  bool converged = true;
  double wall_time = 0.0;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::FlipTest;
  std::vector<RunRecord> records;
  std::vector<std::string> artifacts;
  nlohmann::json extra = nlohmann::json::object();

  bool all_converged() const;
};

nlohmann::json result_to_json(const ExperimentResult& r);
// Header: scheme,variant,resolution,seed,samples,fraction,rel_error,iters,converged,wall_time_s
void write_records_csv(std::ostream& os, const std::vector<RunRecord>& rows);
std::vector<RunRecord> read_records_csv(std::istream& is);

// ---- building blocks ----

int default_wavelet_levels(int family, Index side);

// Pixel values of the configured source at side N (phantom sampled on the pixel lattice).
std::vector<double> load_image(const ImageSource& src, Index N);

// U = sensing * W^-1 on N×N images, W the periodic 2D DWT.
OperatorPtr sparsifying_dwt(int family, int levels, Index N);
OperatorPtr sensing_operator(Sensing s, Index N, double fraction, std::uint64_t seed);

// Sample set for a scheme on the sensing index set of an N×N image.
SampleSet make_scheme(const SchemeConfig& sc, Sensing sensing, Index N, std::uint64_t seed,
                      std::vector<std::uint8_t>* display_mask = nullptr);

ExperimentResult run_flip_test(const ExperimentConfig& c);
ExperimentResult run_compare_schemes(const ExperimentConfig& c);
// Same as run_compare_schemes without the two-scheme minimum.
ExperimentResult run_reconstruct(const ExperimentConfig& c);
ExperimentResult run_resolution_study(const ExperimentConfig& c);
ExperimentResult run_sparsity_levels(const ExperimentConfig& c);
ExperimentResult run_coherence_report(const ExperimentConfig& c);
ExperimentResult run_experiment(const ExperimentConfig& c);

}  // namespace mlcs
