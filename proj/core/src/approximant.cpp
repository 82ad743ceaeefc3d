#include "kernelrmt/approximant.hpp"

#include <cmath>

#include "kernelrmt/errors.hpp"

namespace kernelrmt {
namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_finite(const SymMatrix& m, const char* who) {
  if (!m.dense().allFinite()) throw EvaluationError(std::string(who) + ": approximant has non-finite entries");
}

// c0 11' + c1 S + v Id, the common shape of three of the four approximants.
SymMatrix linear_form(const SymMatrix& s, double c0, double c1, double v) {
  const std::size_t n = s.order();
  Eigen::MatrixXd k(idx(n), idx(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) k(idx(i), idx(j)) = c0 + c1 * s(i, j) + (i == j ? v : 0.0);
  return SymMatrix::from_upper(k);
}

}  // namespace

ApproxInputs population_inputs(const CovModel& cov) {
  return {cov.tau1, cov.tau2, ApproxInputs::Source::population};
}

ApproxInputs plugin_inputs(const DataMatrix& x) {
  const std::size_t n = x.n();
  if (n < 2) throw ParameterError("plugin_inputs: need at least two observations");
  const SymMatrix s = inner_products(x);
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    diag += s(j, j);
    for (std::size_t i = 0; i < j; ++i) off += s(i, j) * s(i, j);
  }
  const double nd = static_cast<double>(n);
  ApproxInputs in{diag / nd, 2.0 * off / (nd * (nd - 1.0)), ApproxInputs::Source::plugin};
  if (!std::isfinite(in.tau1) || !std::isfinite(in.tau2))
    throw EvaluationError("plugin_inputs: non-finite estimate");
  return in;
}

ApproxInputs default_inputs(const DataMatrix& x) {
  return x.cov() ? population_inputs(*x.cov()) : plugin_inputs(x);
}

PsiVector::PsiVector(const DataMatrix& x, double tau1) {
  const double inv_p = 1.0 / static_cast<double>(x.p());
  v_ = (x.rows().rowwise().squaredNorm() * inv_p).array() - tau1;
}

double inner_v_p(const KernelSpec& k, double tau1) {
  const KernelDerivatives at0 = k.derivatives_at(0.0);
  return k.derivatives_at(tau1).f - at0.f - at0.d1 * tau1;
}

double distance_v_p(const KernelSpec& k, double tau) {
  const KernelDerivatives at_tau = k.derivatives_at(tau);
  return k.derivatives_at(0.0).f + tau * at_tau.d1 - at_tau.f;
}

Approximant approx_inner_strong(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in) {
  const KernelDerivatives at0 = k.derivatives_at(0.0);
  const double v_p = inner_v_p(k, in.tau1);
  Approximant out{linear_form(inner_products(x), at0.f + 0.5 * at0.d2 * in.tau2, at0.d1, v_p), v_p, in.tau1};
  check_finite(out.matrix, "approx_inner_strong");
  return out;
}

Approximant approx_inner_weak(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in) {
  const KernelDerivatives at0 = k.derivatives_at(0.0);
  const double v_p = inner_v_p(k, in.tau1);
  Approximant out{linear_form(inner_products(x), at0.f, at0.d1, v_p), v_p, in.tau1};
  check_finite(out.matrix, "approx_inner_weak");
  return out;
}

Approximant approx_distance_strong(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in) {
  const double tau = 2.0 * in.tau1;
  const KernelDerivatives at = k.derivatives_at(tau);
  const double v_p = distance_v_p(k, tau);
  const SymMatrix s = inner_products(x);
  const Eigen::VectorXd psi = PsiVector(x, in.tau1).values();
  const std::size_t n = x.n();

  const double half_f2 = 0.5 * at.d2;
  Eigen::MatrixXd m(idx(n), idx(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double pj = psi(idx(j));
    for (std::size_t i = 0; i <= j; ++i) {
      const double pi = psi(idx(i));
      const double first = pi + pj - 2.0 * s(i, j);
      const double second = pi * pi + pj * pj + 2.0 * pi * pj + 4.0 * in.tau2;
      m(idx(i), idx(j)) = at.f + at.d1 * first + half_f2 * second + (i == j ? v_p : 0.0);
    }
  }
  Approximant out{SymMatrix::from_upper(m), v_p, tau};
  check_finite(out.matrix, "approx_distance_strong");
  return out;
}

Approximant approx_distance_weak(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in) {
  const double tau = 2.0 * in.tau1;
  const KernelDerivatives at = k.derivatives_at(tau);
  const double v_p = distance_v_p(k, tau);
  Approximant out{linear_form(inner_products(x), at.f, -2.0 * at.d1, v_p), v_p, tau};
  check_finite(out.matrix, "approx_distance_weak");
  return out;
}

std::pair<double, double> rank2_eigenvalues(const PsiVector& psi) {
  const Eigen::VectorXd& v = psi.values();
  const double sum = v.sum();
  const double spread = std::sqrt(static_cast<double>(v.size())) * v.norm();
  return {sum + spread, sum - spread};
}

SymMatrix laplacian_approx(const SymMatrix& k, double gamma_p) {
  const double inv_n = 1.0 / static_cast<double>(k.order());
  SymMatrix out = -inv_n * k;
  out.shift(gamma_p);
  return out;
}

}  // namespace kernelrmt
