#include "kernelrmt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include <json.hpp>

#include "experiment_internal.hpp"
#include "kernelrmt/csv_io.hpp"
#include "kernelrmt/errors.hpp"
#include "kernelrmt/rng.hpp"

namespace kernelrmt {

namespace {

using json = nlohmann::json;

constexpr std::pair<ExperimentKind, const char*> kExperimentNames[] = {
    {ExperimentKind::convergence_strong, "convergence_strong"},
    {ExperimentKind::esd_weak, "esd_weak"},
    {ExperimentKind::mp_baseline, "mp_baseline"},
    {ExperimentKind::largest_eig, "largest_eig"},
    {ExperimentKind::concentration, "concentration"},
    {ExperimentKind::gaussian_degeneracy, "gaussian_degeneracy"},
    {ExperimentKind::laplacian, "laplacian"},
    {ExperimentKind::centering, "centering"},
};

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; }))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  return get_or<std::string>(j, key, fallback);
}

CovSpec parse_cov(const json& j) {
  check_keys(j, "model.cov", {"kind", "values", "rho", "base", "spikes"});
  const std::string kind = get_string(j, "kind", "identity");
  if (kind == "identity") return CovSpec::identity();
  if (kind == "diagonal") return CovSpec::diagonal(get_or<std::vector<double>>(j, "values", {}));
  if (kind == "ar1") return CovSpec::ar1(get_or<double>(j, "rho", 0.0));
  if (kind == "spiked")
    return CovSpec::spiked(get_or<double>(j, "base", 1.0), get_or<std::vector<double>>(j, "spikes", {}));
  throw ConfigError("model.cov: unknown kind '" + kind + "'");
}

EntryDist parse_dist(const json& j) {
  check_keys(j, "model.dist", {"kind", "df"});
  const std::string kind = get_string(j, "kind", "gaussian");
  if (kind == "gaussian") return EntryDist::gaussian();
  if (kind == "rademacher") return EntryDist::rademacher();
  if (kind == "uniform") return EntryDist::uniform();
  if (kind == "student_t") {
    try {
      return EntryDist::student_t(get_or<double>(j, "df", 0.0));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("model.dist: ") + e.what());
    }
  }
  throw ConfigError("model.dist: unknown kind '" + kind + "'");
}

RadialDist parse_radial(const std::string& s) {
  if (s == "constant") return RadialDist::constant();
  if (s == "uniform") return RadialDist::uniform();
  if (s == "exponential") return RadialDist::exponential();
  throw ConfigError("model.radial: unknown law '" + s + "'");
}

ModelConfig parse_model(const json& j) {
  check_keys(j, "model", {"generator", "cov", "dist", "b", "radial"});
  ModelConfig m;
  const std::string gen = get_string(j, "generator", "standard");
  if (gen == "standard") {
    m.generator = ModelConfig::Generator::standard;
  } else if (gen == "sphere") {
    m.generator = ModelConfig::Generator::sphere;
  } else if (gen == "copula") {
    m.generator = ModelConfig::Generator::copula;
  } else if (gen == "lb_ball") {
    m.generator = ModelConfig::Generator::lb_ball;
  } else if (gen == "elliptical") {
    m.generator = ModelConfig::Generator::elliptical;
  } else {
    throw ConfigError("model: unknown generator '" + gen + "'");
  }
  if (j.contains("cov")) m.cov = parse_cov(j.at("cov"));
  if (j.contains("dist")) m.dist = parse_dist(j.at("dist"));
  m.b = get_or<double>(j, "b", 2.0);
  m.radial = parse_radial(get_string(j, "radial", "constant"));
  return m;
}

void parse_kernel(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "kernel", {"kind", "a", "b", "gamma", "form"});
  const std::string kind = get_string(j, "kind", "");
  if (kind == "linear") {
    cfg.kernel = KernelSpec::linear(get_or<double>(j, "a", 1.0), get_or<double>(j, "b", 0.0));
  } else if (kind == "gaussian") {
    cfg.kernel = KernelSpec::gaussian(get_or<double>(j, "gamma", 1.0));
  } else if (kind == "power") {
    cfg.kernel = KernelSpec::power(get_or<double>(j, "a", 2.0));
  } else if (kind == "tanh") {
    cfg.kernel = KernelSpec::tanh(get_or<double>(j, "a", 0.0), get_or<double>(j, "b", 1.0));
  } else {
    throw ConfigError("kernel: unknown kind '" + kind + "'");
  }
  const std::string form = get_string(j, "form", "inner");
  if (form == "inner") {
    cfg.form = KernelForm::inner;
  } else if (form == "distance") {
    cfg.form = KernelForm::distance;
  } else {
    throw ConfigError("kernel: unknown form '" + form + "'");
  }
}

RateSpec parse_rate(const json& j) {
  check_keys(j, "rate", {"kind", "m", "b", "c", "alpha", "eps"});
  const std::string kind = get_string(j, "kind", "lipschitz");
  const double eps = get_or<double>(j, "eps", 0.1);
  RateSpec r;
  if (kind == "moment") {
    r = RateSpec::moment(get_or<double>(j, "m", 4.0), eps);
  } else if (kind == "lipschitz") {
    r = RateSpec::lipschitz(get_or<double>(j, "b", 2.0), get_or<double>(j, "c", 1.0), eps,
                            get_or<double>(j, "alpha", 0.0));
  } else {
    throw ConfigError("rate: unknown kind '" + kind + "'");
  }
  return r;
}

bool needs_kernel(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::convergence_strong:
    case ExperimentKind::esd_weak:
    case ExperimentKind::laplacian:
    case ExperimentKind::centering:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentNames)
    if (kind == k) return name;
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (const auto& [kind, name] : kExperimentNames)
    if (s == name) return kind;
  throw ConfigError("unknown experiment '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (dims.empty()) throw ConfigError("dims must be nonempty");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [n, p] : dims) {
    if (n < 2 || p < 1) throw ConfigError("dims: need n >= 2 and p >= 1");
    if (!seen.insert({n, p}).second) throw ConfigError("dims: duplicate entry");
  }
  if (needs_kernel(experiment) && !kernel) throw ConfigError(to_string(experiment) + " requires a kernel");

  try {
    model.dist.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("model.dist: ") + e.what());
  }
  using G = ModelConfig::Generator;
  if (model.generator == G::lb_ball && !(model.b >= 1.0 && model.b <= 2.0))
    throw ConfigError("model.b must lie in [1, 2]");
  if (model.generator == G::copula && !(model.cov.kind == CovSpec::Kind::identity ||
                                         model.cov.kind == CovSpec::Kind::ar1))
    throw ConfigError("copula needs a unit-diagonal correlation (identity or ar1)");
  const bool uses_cov = model.generator == G::standard || model.generator == G::copula ||
                        model.generator == G::elliptical;
  if (uses_cov) {
    for (const auto& [n, p] : dims) {
      try {
        if (model.cov.kind == CovSpec::Kind::ar1) {
          if (!(std::abs(model.cov.rho) < 1.0)) throw ParameterError("ar1 requires |rho| < 1");
        } else {
          (void)make_cov(model.cov, p);
        }
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("model.cov: ") + e.what());
      }
    }
  }
  const bool has_population = model.generator == G::standard || model.generator == G::sphere ||
                              model.generator == G::elliptical;
  if (needs_kernel(experiment) && approx_source == ApproxInputs::Source::population && !has_population)
    throw ConfigError("approx_inputs_source 'population' needs a generator with a known covariance");

  if (experiment == ExperimentKind::mp_baseline) {
    const bool identity = model.generator == G::sphere ||
                          (model.generator == G::standard && model.cov.kind == CovSpec::Kind::identity);
    if (!identity) throw ConfigError("mp_baseline compares against the identity-covariance law");
    for (const auto& [n, p] : dims)
      if (p > n) throw ConfigError("mp_baseline needs p <= n (rho in (0, 1])");
  }
  if (experiment == ExperimentKind::gaussian_degeneracy && !(gamma > 0.0))
    throw ConfigError("gamma must be positive");
  if (experiment == ExperimentKind::concentration) {
    try {
      (void)rate.value(2.0);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("rate: ") + e.what());
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"experiment", "model", "kernel", "dims", "repeats", "seed", "approx_inputs_source", "output_dir",
              "rescale", "rate", "gamma", "center", "principal_angle", "include_timing"});
  ExperimentConfig cfg;
  if (!j.contains("experiment")) throw ConfigError("missing 'experiment'");
  cfg.experiment = experiment_from_string(get_string(j, "experiment", ""));
  if (j.contains("model")) cfg.model = parse_model(j.at("model"));
  try {
    if (j.contains("kernel")) parse_kernel(j.at("kernel"), cfg);
    if (j.contains("rate")) cfg.rate = parse_rate(j.at("rate"));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  if (!j.contains("dims") || !j.at("dims").is_array()) throw ConfigError("'dims' must be an array of [n, p] pairs");
  for (const auto& d : j.at("dims")) {
    if (!d.is_array() || d.size() != 2 || !d[0].is_number_unsigned() || !d[1].is_number_unsigned())
      throw ConfigError("'dims' entries must be [n, p] with nonnegative integers");
    cfg.dims.emplace_back(d[0].get<std::size_t>(), d[1].get<std::size_t>());
  }
  if (j.contains("repeats")) {
    if (!j.at("repeats").is_number_integer() || j.at("repeats").get<long long>() < 1)
      throw ConfigError("'repeats' must be a positive integer");
    cfg.repeats = j.at("repeats").get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  const std::string src = get_string(j, "approx_inputs_source", "population");
  if (src == "population") {
    cfg.approx_source = ApproxInputs::Source::population;
  } else if (src == "plugin") {
    cfg.approx_source = ApproxInputs::Source::plugin;
  } else {
    throw ConfigError("approx_inputs_source must be 'population' or 'plugin'");
  }
  cfg.output_dir = get_string(j, "output_dir", "out");
  cfg.rescale = get_or<bool>(j, "rescale", false);
  cfg.gamma = get_or<double>(j, "gamma", 1.0);
  if (j.contains("center")) {
    const json& c = j.at("center");
    check_keys(c, "center", {"left", "right"});
    cfg.center_left = get_or<bool>(c, "left", true);
    cfg.center_right = get_or<bool>(c, "right", true);
  }
  cfg.principal_angle = get_or<bool>(j, "principal_angle", true);
  cfg.include_timing = get_or<bool>(j, "include_timing", false);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::uint64_t repeat_seed(std::uint64_t master, const std::string& tag, std::size_t n, std::size_t p,
                          std::size_t repeat) {
  std::uint64_t s = stream_seed(master, fnv1a(tag));
  s = stream_seed(s, n);
  s = stream_seed(s, p);
  return stream_seed(s, repeat);
}

const std::vector<std::string>& metric_columns(ExperimentKind k) {
  static const std::map<ExperimentKind, std::vector<std::string>> columns = {
      {ExperimentKind::convergence_strong,
       {"op_norm_gap", "max_eig_gap", "top_eig_m", "top_eig_k", "principal_angle", "v_p", "tau"}},
      {ExperimentKind::esd_weak, {"kolmogorov", "frob_gap_scaled", "v_p", "tau"}},
      {ExperimentKind::mp_baseline, {"rho", "kolmogorov_mp", "largest_eig", "edge", "edge_error"}},
      {ExperimentKind::largest_eig, {"rho", "largest_eig", "edge", "edge_error"}},
      {ExperimentKind::concentration,
       {"max_offdiag", "max_diag_dev", "max_dist_dev", "rate_bound", "offdiag_within", "diag_within",
        "dist_within", "outside_hypotheses", "tau1"}},
      {ExperimentKind::gaussian_degeneracy, {"degeneracy_gap", "min_pair_sq_distance", "underflow_bound", "gamma"}},
      {ExperimentKind::laplacian, {"laplacian_gap", "op_norm_gap", "gamma_p"}},
      {ExperimentKind::centering, {"centered_gap", "op_norm_gap", "contraction_holds"}},
  };
  return columns.at(k);
}

DataMatrix generate(const ModelConfig& model, std::size_t n, std::size_t p, std::uint64_t seed) {
  using G = ModelConfig::Generator;
  switch (model.generator) {
    case G::standard:
      return gen_standard(n, p, make_cov(model.cov, p), model.dist, seed);
    case G::sphere:
      return gen_sphere(n, p, seed);
    case G::copula:
      return gen_copula(n, p, make_cov(model.cov, p), seed);
    case G::lb_ball:
      return gen_lb_ball(n, p, model.b, seed);
    case G::elliptical:
      return gen_elliptical(n, p, make_cov(model.cov, p), model.dist, model.radial, seed);
  }
  throw ConfigError("unknown generator");
}

ApproxInputs resolve_inputs(const ExperimentConfig& cfg, const DataMatrix& x) {
  if (cfg.approx_source == ApproxInputs::Source::plugin) return plugin_inputs(x);
  if (!x.cov()) throw ConfigError("population inputs requested but the data carries no covariance");
  return population_inputs(*x.cov());
}

SymMatrix build_kernel(const ExperimentConfig& cfg, const DataMatrix& x) {
  const KernelSpec& k = detail::require_kernel(cfg);
  SymMatrix m = cfg.form == KernelForm::inner ? build_inner_kernel(x, k) : build_distance_kernel(x, k);
  if (cfg.rescale) m *= 1.0 / static_cast<double>(x.n());
  return m;
}

Approximant build_approximant(const ExperimentConfig& cfg, const DataMatrix& x, bool strong) {
  const KernelSpec& k = detail::require_kernel(cfg);
  const ApproxInputs in = resolve_inputs(cfg, x);
  Approximant a;
  if (cfg.form == KernelForm::inner) {
    a = strong ? approx_inner_strong(x, k, in) : approx_inner_weak(x, k, in);
  } else {
    a = strong ? approx_distance_strong(x, k, in) : approx_distance_weak(x, k, in);
  }
  if (cfg.rescale) a.matrix *= 1.0 / static_cast<double>(x.n());
  return a;
}

namespace detail {

const KernelSpec& require_kernel(const ExperimentConfig& cfg) {
  if (!cfg.kernel) throw ConfigError(to_string(cfg.experiment) + " requires a kernel");
  return *cfg.kernel;
}

std::vector<ExperimentRecord> run_cells(const ExperimentConfig& cfg, std::size_t parallel, const CellFn& fn) {
  cfg.validate();
  struct Job {
    std::size_t n, p, repeat;
  };
  std::vector<Job> jobs;
  for (const auto& [n, p] : cfg.dims)
    for (std::size_t r = 0; r < cfg.repeats; ++r) jobs.push_back({n, p, r});

  const std::string tag = to_string(cfg.experiment);
  std::vector<ExperimentRecord> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      const Job& job = jobs[i];
      try {
        ExperimentRecord rec;
        rec.experiment = tag;
        rec.n = job.n;
        rec.p = job.p;
        rec.repeat = job.repeat;
        rec.seed = repeat_seed(cfg.seed, tag, job.n, job.p, job.repeat);
        const auto t0 = std::chrono::steady_clock::now();
        rec.metrics = fn(cfg, job.n, job.p, rec.seed);
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& [name, v] : rec.metrics)
          if (!std::isfinite(v)) throw NumericalError(tag + ": metric '" + name + "' is not finite");
        out[i] = std::move(rec);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(parallel, 1, std::max<std::size_t>(1, jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace detail

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, std::size_t parallel) {
  switch (cfg.experiment) {
    case ExperimentKind::convergence_strong:
      return run_convergence_strong(cfg, parallel);
    case ExperimentKind::esd_weak:
      return run_esd_weak(cfg, parallel);
    case ExperimentKind::mp_baseline:
      return run_mp_baseline(cfg, parallel);
    case ExperimentKind::largest_eig:
      return run_largest_eig(cfg, parallel);
    case ExperimentKind::concentration:
      return run_concentration(cfg, parallel);
    case ExperimentKind::gaussian_degeneracy:
      return run_gaussian_degeneracy(cfg, parallel);
    case ExperimentKind::laplacian:
      return run_laplacian(cfg, parallel);
    case ExperimentKind::centering:
      return run_centering(cfg, parallel);
  }
  throw ConfigError("unknown experiment");
}

std::vector<double> medians_by_dims(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& records,
                                    const std::string& metric) {
  std::vector<double> out;
  for (const auto& [n, p] : cfg.dims) {
    std::vector<double> v;
    for (const auto& r : records) {
      if (r.n != n || r.p != p) continue;
      const auto it = r.metrics.find(metric);
      if (it == r.metrics.end()) throw ParameterError("medians_by_dims: no metric '" + metric + "'");
      v.push_back(it->second);
    }
    if (v.empty()) {
      out.push_back(std::nan(""));
      continue;
    }
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    out.push_back(v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]));
  }
  return out;
}

}  // namespace kernelrmt
