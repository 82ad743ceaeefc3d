#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kernelrmt/approximant.hpp"
#include "kernelrmt/concentration.hpp"
#include "kernelrmt/csv_io.hpp"
#include "kernelrmt/errors.hpp"
#include "kernelrmt/experiment.hpp"
#include "kernelrmt/kernel_build.hpp"
#include "kernelrmt/spectral.hpp"

namespace fs = std::filesystem;
using namespace kernelrmt;

namespace {

enum ExitCode { kOk = 0, kIo = 1, kConfig = 2, kNumerical = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::size_t parallel = 1;
  std::string data;
  std::string matrix;
  bool weak = false;
  std::size_t bins = 0;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

DataMatrix read_data(const std::string& path) {
  std::istringstream is(read_text_file(path));
  return read_data_csv(is);
}

void write(const fs::path& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << path.string() << '\n';
}

void cmd_generate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  for (const auto& [n, p] : cfg.dims) {
    const DataMatrix x = generate(cfg.model, n, p, repeat_seed(cfg.seed, "data", n, p, 0));
    std::ostringstream os;
    write_data_csv(os, x);
    write(cfg.output_dir / ("data_" + std::to_string(n) + "x" + std::to_string(p) + "_" + std::to_string(cfg.seed) +
                            ".csv"),
          os.str());
  }
}

void cmd_kernel(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const DataMatrix x = read_data(o.data);
  std::ostringstream os;
  write_sym_csv(os, build_kernel(cfg, x));
  write(cfg.output_dir / "kernel.csv", os.str());
}

void cmd_approx(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const DataMatrix x = read_data(o.data);
  const Approximant a = build_approximant(cfg, x, !o.weak);
  std::ostringstream os;
  write_sym_csv(os, a.matrix);
  write(cfg.output_dir / (o.weak ? "approx_weak.csv" : "approx_strong.csv"), os.str());
  std::cout << "v_p," << format_double(a.v_p) << "\ntau," << format_double(a.tau) << '\n';
}

void cmd_spectrum(const Options& o) {
  std::istringstream is(read_text_file(o.matrix));
  const SpectralDistribution d = eigvals_sym(read_sym_csv(is));
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  std::ostringstream spec;
  write_spectrum_csv(spec, d);
  write(dir / "spectrum.csv", spec.str());
  const std::vector<double> values(d.values().begin(), d.values().end());
  std::ostringstream hist;
  write_histogram_csv(hist, make_histogram(values, o.bins));
  write(dir / "histogram.csv", hist.str());
}

void cmd_experiment(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const auto records = run_experiment(cfg, o.parallel);
  for (const auto& path : emit(cfg, records, format_from_string(o.format), cfg.output_dir))
    std::cout << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel random matrix laboratory"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "experiment configuration (JSON)")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    sub->add_option("--seed", o.seed, "override the master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("generate", "draw one dataset per dims entry");
  add_common(gen, true);
  auto* ker = app.add_subcommand("kernel", "kernel matrix of a data CSV");
  add_common(ker, true);
  ker->add_option("--data", o.data, "data CSV")->required()->check(CLI::ExistingFile);
  auto* apx = app.add_subcommand("approx", "approximant of a data CSV");
  add_common(apx, true);
  apx->add_option("--data", o.data, "data CSV")->required()->check(CLI::ExistingFile);
  apx->add_flag("--weak", o.weak, "spectral-distribution approximant instead of the operator-norm one");
  auto* spc = app.add_subcommand("spectrum", "eigenvalues and histogram of a symmetric matrix CSV");
  add_common(spc, false);
  spc->add_option("--matrix", o.matrix, "symmetric matrix CSV")->required()->check(CLI::ExistingFile);
  spc->add_option("--bins", o.bins, "histogram bins (0 = Freedman-Diaconis)");
  auto* exp = app.add_subcommand("experiment", "run an experiment and emit its records");
  add_common(exp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) cmd_generate(o);
    if (*ker) cmd_kernel(o);
    if (*apx) cmd_approx(o);
    if (*spc) cmd_spectrum(o);
    if (*exp) cmd_experiment(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfig;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
