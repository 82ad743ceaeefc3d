#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "experiment_internal.hpp"
#include "kernelrmt/errors.hpp"
#include "kernelrmt/experiment.hpp"
#include "kernelrmt/spectral.hpp"
#include "kernelrmt/sym_eigen.hpp"

namespace kernelrmt {

namespace {

using detail::Metrics;

double largest_singular_value(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
  return std::sqrt(std::max(0.0, sym_eigen(sym).values.maxCoeff()));
}

// Sample second moment on the smaller side: X'X/n when p <= n, XX'/n otherwise.
// Both have the same nonzero eigenvalues.
Eigen::MatrixXd small_gram(const DataMatrix& x) {
  const Eigen::MatrixXd& r = x.rows();
  const Eigen::Index k = std::min(r.rows(), r.cols());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
  const double scale = 1.0 / static_cast<double>(x.n());
  if (r.cols() <= r.rows()) {
    s.selfadjointView<Eigen::Lower>().rankUpdate(r.transpose(), scale);
  } else {
    s.selfadjointView<Eigen::Lower>().rankUpdate(r, scale);
  }
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s;
}

double top_angle(const SymEigen& em, const SymEigen& ek) {
  const Eigen::Index n = ek.values.size();
  const Eigen::Index top = n - 1;
  const double norm = std::max(std::abs(ek.values(0)), std::abs(ek.values(top)));
  if (n > 1 && ek.values(top) - ek.values(top - 1) <= 1e-6 * norm) return -1.0;
  const double c = std::abs(em.vectors.col(top).dot(ek.vectors.col(top)));
  return std::acos(std::clamp(c, 0.0, 1.0));
}

Metrics convergence_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  const SymMatrix m = build_kernel(cfg, x);
  const Approximant a = build_approximant(cfg, x, true);

  const double op_gap = operator_norm(m - a.matrix);
  const SymEigen em = sym_eigen(m.dense(), cfg.principal_angle);
  const SymEigen ek = sym_eigen(a.matrix.dense(), cfg.principal_angle);
  const double eig_gap = (em.values - ek.values).cwiseAbs().maxCoeff();

  const WeylResult weyl{eig_gap, op_gap};
  if (!weyl.holds())
    throw NumericalError("convergence_strong: Weyl inequality violated (max eigenvalue gap " +
                         std::to_string(eig_gap) + " > operator-norm gap " + std::to_string(op_gap) + ")");

  const Eigen::Index top = em.values.size() - 1;
  return {
      {"op_norm_gap", op_gap},
      {"max_eig_gap", eig_gap},
      {"top_eig_m", em.values(top)},
      {"top_eig_k", ek.values(top)},
      {"principal_angle", cfg.principal_angle ? top_angle(em, ek) : -1.0},
      {"v_p", a.v_p},
      {"tau", a.tau},
  };
}

Metrics esd_weak_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  const SymMatrix m = build_kernel(cfg, x);
  const Approximant a = build_approximant(cfg, x, false);
  const double ks = kolmogorov_distance(eigvals_sym(m), eigvals_sym(a.matrix));
  const double frob = frobenius_norm(m - a.matrix) / std::sqrt(static_cast<double>(n));
  return {{"kolmogorov", ks}, {"frob_gap_scaled", frob}, {"v_p", a.v_p}, {"tau", a.tau}};
}

Metrics edge_metrics(const DataMatrix& x, const SpectralDistribution& d) {
  const double rho = static_cast<double>(x.p()) / static_cast<double>(x.n());
  const double edge = (1.0 + std::sqrt(rho)) * (1.0 + std::sqrt(rho));
  return {{"rho", rho}, {"largest_eig", d.max()}, {"edge", edge}, {"edge_error", std::abs(d.max() - edge)}};
}

Metrics mp_baseline_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  const SpectralDistribution d = eigvals_sym(small_gram(x));
  Metrics out = edge_metrics(x, d);
  out["kolmogorov_mp"] = kolmogorov_to_mp(d, make_mp(out.at("rho")));
  return out;
}

Metrics largest_eig_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  return edge_metrics(x, eigvals_sym(small_gram(x)));
}

Metrics concentration_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  std::optional<double> tau1;
  if (cfg.approx_source == ApproxInputs::Source::plugin || !x.cov()) tau1 = plugin_inputs(x).tau1;
  const DeviationReport r = deviation_report(x, cfg.rate, tau1);
  auto flag = [](bool b) { return b ? 1.0 : 0.0; };
  return {
      {"max_offdiag", r.max_offdiag},
      {"max_diag_dev", r.max_diag_dev},
      {"max_dist_dev", r.max_dist_dev},
      {"rate_bound", r.rate_bound},
      {"offdiag_within", flag(r.offdiag_within())},
      {"diag_within", flag(r.diag_within())},
      {"dist_within", flag(r.dist_within())},
      {"outside_hypotheses", flag(r.outside_hypotheses)},
      {"tau1", r.tau1},
  };
}

Metrics degeneracy_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  const double gap = gaussian_degeneracy_check(x, cfg.gamma);
  const double dmin = min_pair_sq_distance(x);
  // Gershgorin: ||M - Id||_2 <= max row sum of the off-diagonal part.
  const double bound = static_cast<double>(n - 1) * std::exp(-cfg.gamma * dmin);
  return {{"degeneracy_gap", gap}, {"min_pair_sq_distance", dmin}, {"underflow_bound", bound}, {"gamma", cfg.gamma}};
}

Metrics laplacian_cell(const ExperimentConfig& cfg_in, std::size_t n, std::size_t p, std::uint64_t seed) {
  ExperimentConfig cfg = cfg_in;
  cfg.rescale = false;  // the Laplacian carries its own 1/n
  const DataMatrix x = generate(cfg.model, n, p, seed);
  const SymMatrix m = build_kernel(cfg, x);
  const Approximant a = build_approximant(cfg, x, true);
  const KernelSpec& k = detail::require_kernel(cfg);
  const double gamma_p = cfg.form == KernelForm::inner ? k.eval(0.0) : k.eval(a.tau);
  const double lap_gap = operator_norm(laplacian_like(m) - laplacian_approx(a.matrix, gamma_p));
  return {{"laplacian_gap", lap_gap}, {"op_norm_gap", operator_norm(m - a.matrix)}, {"gamma_p", gamma_p}};
}

Metrics centering_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t p, std::uint64_t seed) {
  const DataMatrix x = generate(cfg.model, n, p, seed);
  const SymMatrix m = build_kernel(cfg, x);
  const Approximant a = build_approximant(cfg, x, true);
  const SymMatrix diff = m - a.matrix;
  const double op_gap = operator_norm(diff);
  const Eigen::MatrixXd c = center(diff.dense(), cfg.center_left, cfg.center_right);
  double centered = 0.0;
  if (cfg.center_left == cfg.center_right) {
    centered = operator_norm(Eigen::MatrixXd(0.5 * (c + c.transpose())));
  } else {
    centered = largest_singular_value(c);
  }
  const bool holds = centered <= op_gap * (1.0 + 1e-10) + 1e-12;
  if (!holds)
    throw NumericalError("centering: ||H^a (M-K) H^b||_2 = " + std::to_string(centered) + " exceeds ||M-K||_2 = " +
                         std::to_string(op_gap));
  return {{"centered_gap", centered}, {"op_norm_gap", op_gap}, {"contraction_holds", 1.0}};
}

void expect(const ExperimentConfig& cfg, ExperimentKind k) {
  if (cfg.experiment != k)
    throw ConfigError("config is for '" + to_string(cfg.experiment) + "', not '" + to_string(k) + "'");
}

}  // namespace

std::vector<ExperimentRecord> run_convergence_strong(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::convergence_strong);
  return detail::run_cells(cfg, parallel, convergence_cell);
}

std::vector<ExperimentRecord> run_esd_weak(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::esd_weak);
  return detail::run_cells(cfg, parallel, esd_weak_cell);
}

std::vector<ExperimentRecord> run_mp_baseline(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::mp_baseline);
  return detail::run_cells(cfg, parallel, mp_baseline_cell);
}

std::vector<ExperimentRecord> run_largest_eig(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::largest_eig);
  return detail::run_cells(cfg, parallel, largest_eig_cell);
}

std::vector<ExperimentRecord> run_concentration(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::concentration);
  return detail::run_cells(cfg, parallel, concentration_cell);
}

std::vector<ExperimentRecord> run_gaussian_degeneracy(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::gaussian_degeneracy);
  return detail::run_cells(cfg, parallel, degeneracy_cell);
}

std::vector<ExperimentRecord> run_laplacian(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::laplacian);
  return detail::run_cells(cfg, parallel, laplacian_cell);
}

std::vector<ExperimentRecord> run_centering(const ExperimentConfig& cfg, std::size_t parallel) {
  expect(cfg, ExperimentKind::centering);
  return detail::run_cells(cfg, parallel, centering_cell);
}

}  // namespace kernelrmt
