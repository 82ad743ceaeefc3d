#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernelrmt/approximant.hpp"
#include "kernelrmt/concentration.hpp"
#include "kernelrmt/data_models.hpp"
#include "kernelrmt/kernel_build.hpp"

namespace kernelrmt {

enum class ExperimentKind {
  convergence_strong,
  esd_weak,
  mp_baseline,
  largest_eig,
  concentration,
  gaussian_degeneracy,
  laplacian,
  centering,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

enum class KernelForm { inner, distance };

struct ModelConfig {
  enum class Generator { standard, sphere, copula, lb_ball, elliptical };

  Generator generator = Generator::standard;
  CovSpec cov = CovSpec::identity();  // correlation for copula
  EntryDist dist = EntryDist::gaussian();
  double b = 2.0;  // lb_ball
  RadialDist radial = RadialDist::constant();
};

/// Draws one dataset for `model`.
DataMatrix generate(const ModelConfig& model, std::size_t n, std::size_t p, std::uint64_t seed);

/// A single experiment: one JSON document. See README for the schema.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::convergence_strong;
  ModelConfig model;
  std::optional<KernelSpec> kernel;
  KernelForm form = KernelForm::inner;
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  ApproxInputs::Source approx_source = ApproxInputs::Source::population;
  std::filesystem::path output_dir = "out";
  bool rescale = false;  // multiply kernel matrices and approximants by 1/n
  RateSpec rate = RateSpec::lipschitz(2.0, 1.0, 0.1);
  double gamma = 1.0;  // unnormalized gaussian kernel of the degeneracy experiment
  bool center_left = true;
  bool center_right = true;
  bool principal_angle = true;  // convergence_strong: eigenvectors of M and K
  bool include_timing = false;

  /// Throws ConfigError when the configuration is inconsistent.
  void validate() const;
};

/// Throws ConfigError on malformed JSON or invalid fields.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentRecord {
  std::string experiment;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
  double wall_time = 0.0;  // seconds; never compared

  bool operator==(const ExperimentRecord& o) const {
    return experiment == o.experiment && n == o.n && p == o.p && repeat == o.repeat && seed == o.seed &&
           metrics == o.metrics && wall_time == o.wall_time;
  }
};

/// Stable per-repeat seed from (master seed, experiment tag, n, p, repeat).
std::uint64_t repeat_seed(std::uint64_t master, const std::string& tag, std::size_t n, std::size_t p,
                          std::size_t repeat);

/// Fixed, ordered metric columns recorded by each experiment.
const std::vector<std::string>& metric_columns(ExperimentKind k);

/// Kernel matrix and its approximants for one dataset, honouring cfg.form and cfg.rescale.
SymMatrix build_kernel(const ExperimentConfig& cfg, const DataMatrix& x);
Approximant build_approximant(const ExperimentConfig& cfg, const DataMatrix& x, bool strong);
ApproxInputs resolve_inputs(const ExperimentConfig& cfg, const DataMatrix& x);

std::vector<ExperimentRecord> run_convergence_strong(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_esd_weak(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_mp_baseline(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_largest_eig(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_concentration(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_gaussian_degeneracy(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_laplacian(const ExperimentConfig& cfg, std::size_t parallel = 1);
std::vector<ExperimentRecord> run_centering(const ExperimentConfig& cfg, std::size_t parallel = 1);

/// Dispatches on cfg.experiment. Records come back sorted by (n, p, repeat)
/// in the order of cfg.dims, whatever `parallel` is.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, std::size_t parallel = 1);

/// Median of `metric` over repeats, one value per entry of cfg.dims.
std::vector<double> medians_by_dims(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& records,
                                    const std::string& metric);

enum class OutputFormat { csv, json };
OutputFormat format_from_string(const std::string& s);

std::string records_to_csv(ExperimentKind kind, const std::vector<ExperimentRecord>& records,
                           bool include_timing = false);
std::string records_to_json(const std::vector<ExperimentRecord>& records, bool include_timing = false);
std::vector<ExperimentRecord> records_from_json(const std::string& text);

/// "<experiment>_<n>x<p>_<seed>.<ext>"
std::string output_file_name(ExperimentKind kind, std::size_t n, std::size_t p, std::uint64_t seed,
                             OutputFormat format);

/// Writes one file per entry of cfg.dims into `dir` (a header-only CSV or an
/// empty JSON array when a cell has no records). Returns the written paths.
/// Throws IoError when `dir` is not writable.
std::vector<std::filesystem::path> emit(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& records,
                                        OutputFormat format, const std::filesystem::path& dir);

}  // namespace kernelrmt
