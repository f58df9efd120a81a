#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <omp.h>

#include <CLI11.hpp>

#include "mlcs/coherence/coherence.hpp"
#include "mlcs/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace mlcs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
  std::optional<double> constant_c;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON config file")->required();
  sub->add_option("--seed", f.seed, "replace the config seeds with this one");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "OpenMP threads (0 keeps the default)");
  sub->add_option("--constant-c", f.constant_c, "constant C of the sample allocation");
}

bool config_class(Errc e) {
  switch (e) {
    case Errc::ConfigError:
    case Errc::InvalidSpec:
    case Errc::InvalidParams:
    case Errc::InvalidDepth:
    case Errc::PartitionOutOfRange:
    case Errc::TooManySamples:
    case Errc::Unreachable:
      return true;
    default:
      return false;
  }
}

ExperimentConfig load_config(const CommonFlags& f, bool need_kind) {
  const fs::path path(f.config);
  if (!fs::exists(path)) throw Error(Errc::ConfigError, "config not found: " + f.config);
  nlohmann::json j = read_json_file(path);
  if (!j.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  if (need_kind && !j.contains("experiment")) throw Error(Errc::ConfigError, "missing experiment");
  if (f.seed) j["seeds"] = {*f.seed};
  if (!f.out.empty()) j["output_dir"] = f.out;
  if (f.constant_c) j["constant_c"] = *f.constant_c;
  return config_from_json(j, path.parent_path());
}

void print_records(const ExperimentResult& r) {
  if (r.records.empty()) return;
  write_records_csv(std::cout, r.records);
}

int finish(const ExperimentResult& r) {
  print_records(r);
  if (!r.extra.empty()) std::cout << r.extra.dump(2) << "\n";
  if (!r.all_converged()) {
    std::cerr << "warning: solver did not reach tolerance on every run\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

int cmd_sample_map(const ExperimentConfig& c) {
  if (c.schemes.empty()) throw Error(Errc::ConfigError, "sample-map needs a scheme");
  std::vector<std::uint8_t> mask;
  if (!is_power_of_two(c.size)) throw Error(Errc::ConfigError, "size must be a power of two");
  const SampleSet s = make_scheme(c.schemes.front(), c.sensing, c.size, c.seeds.front(), &mask);
  std::cout << "samples " << s.size() << " of " << s.total << " fraction "
            << static_cast<double>(s.size()) / static_cast<double>(s.total) << "\n";
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    write_pbm(fs::path(c.out_dir) / "mask.pbm", c.size, c.size, mask);
    std::ofstream os(fs::path(c.out_dir) / "samples.csv");
    os << "index,level\n";
    for (Index i = 0; i < s.size(); ++i) os << s.indices[i] << ',' << (s.level_of.empty() ? 0 : s.level_of[i]) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilevel compressed sensing laboratory"};
  app.require_subcommand(1);
  CommonFlags flags;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"coherence", "coherence profile, relative sparsity and sample allocation"},
      {"sample-map", "generate a sampling mask"},
      {"reconstruct", "reconstruct an image from subsampled measurements"},
      {"flip-test", "reconstruct a signal and its flipped coefficients"},
      {"sparsity-levels", "per-level effective sparsity of wavelet coefficients"},
      {"experiment", "run the experiment named in the config"},
  };
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (flags.threads > 0) omp_set_num_threads(flags.threads);
    const std::string name = app.get_subcommands().front()->get_name();
    auto c = load_config(flags, name == "experiment");
    if (name == "sample-map") return cmd_sample_map(c);
    if (name == "coherence") {
      c.kind = ExperimentKind::CoherenceReport;
    } else if (name == "flip-test") {
      c.kind = ExperimentKind::FlipTest;
    } else if (name == "sparsity-levels") {
      c.kind = ExperimentKind::SparsityLevels;
    } else if (name == "reconstruct") {
      auto r = run_reconstruct(c);
      return finish(r);
    }
    validate(c);
    return finish(run_experiment(c));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_class(e.code()) ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
