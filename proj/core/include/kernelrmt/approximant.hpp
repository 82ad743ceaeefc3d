#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Dense>

#include "kernelrmt/data_models.hpp"
#include "kernelrmt/kernel_build.hpp"
#include "kernelrmt/sym_matrix.hpp"

namespace kernelrmt {

/// Population scalars consumed by the linearized approximants.
struct ApproxInputs {
  enum class Source { population, plugin };

  double tau1 = 0.0;  // trace(Σ)/p
  double tau2 = 0.0;  // trace(Σ²)/p²
  Source source = Source::population;
};

ApproxInputs population_inputs(const CovModel& cov);

/// tau1 = mean_i ||X_i||²/p, tau2 = mean over ordered pairs i != j of (X_i'X_j/p)².
/// Throws ParameterError when n < 2.
ApproxInputs plugin_inputs(const DataMatrix& x);

/// Population inputs when the data carries a CovModel, plug-in estimates otherwise.
ApproxInputs default_inputs(const DataMatrix& x);

/// ψ_i = ||X_i||²/p - tau1.
class PsiVector {
 public:
  PsiVector(const DataMatrix& x, double tau1);
  explicit PsiVector(Eigen::VectorXd values) : v_(std::move(values)) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(v_.size()); }
  const Eigen::VectorXd& values() const noexcept { return v_; }

 private:
  Eigen::VectorXd v_;
};

/// An approximating matrix and the scalars it was built from. `tau` is the
/// expansion point: tau1 for inner-product kernels, 2 tau1 for distance kernels.
struct Approximant {
  SymMatrix matrix;
  double v_p = 0.0;
  double tau = 0.0;
};

/// Operator-norm approximant of f(X_i'X_j/p):
///   (f(0) + f''(0) tau2/2) 11' + f'(0) XX'/p + v_p Id,  v_p = f(tau1) - f(0) - f'(0) tau1.
Approximant approx_inner_strong(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in);

/// Operator-norm approximant of f(||X_i - X_j||²/p) with tau = 2 tau1:
///   f(tau) 11' + f'(tau) [1ψ' + ψ1' - 2XX'/p]
///   + f''(tau)/2 [1(ψ∘ψ)' + (ψ∘ψ)1' + 2ψψ' + 4 tau2 11'] + v_p Id,
///   v_p = f(0) + tau f'(tau) - f(tau).
Approximant approx_distance_strong(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in);

/// Spectral-distribution approximant f(0) 11' + f'(0) XX'/p + v_p Id (v_p as in the strong form).
Approximant approx_inner_weak(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in);

/// Spectral-distribution approximant f(tau) 11' - 2 f'(tau) XX'/p + v_p Id, tau = 2 tau1.
Approximant approx_distance_weak(const DataMatrix& x, const KernelSpec& k, const ApproxInputs& in);

/// Diagonal shifts on their own.
double inner_v_p(const KernelSpec& k, double tau1);
double distance_v_p(const KernelSpec& k, double tau);

/// Nonzero eigenvalues of 1ψ' + ψ1': (sum ψ + sqrt(n)||ψ||, sum ψ - sqrt(n)||ψ||).
std::pair<double, double> rank2_eigenvalues(const PsiVector& psi);

/// gamma_p Id - K/n.
SymMatrix laplacian_approx(const SymMatrix& k, double gamma_p);

}  // namespace kernelrmt
