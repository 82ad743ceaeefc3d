#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kernelrmt/sym_matrix.hpp"

namespace kernelrmt {

using Complex = std::complex<double>;

/// Empirical spectral distribution: eigenvalues sorted ascending, each with mass 1/n.
class SpectralDistribution {
 public:
  SpectralDistribution() = default;
  /// Sorts its input; throws ParameterError on non-finite values.
  explicit SpectralDistribution(std::vector<double> eigenvalues);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const double> values() const noexcept { return values_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// F(x) = #{l_i <= x} / n.
  double cdf(double x) const;
  /// F(x-) = #{l_i < x} / n.
  double cdf_left(double x) const;

 private:
  std::vector<double> values_;
};

SpectralDistribution eigvals_sym(const SymMatrix& m);
SpectralDistribution eigvals_sym(const Eigen::MatrixXd& m);

/// max |eigenvalue|.
double operator_norm(const SymMatrix& m);
double operator_norm(const Eigen::MatrixXd& symmetric);
double frobenius_norm(const Eigen::MatrixXd& m);
inline double frobenius_norm(const SymMatrix& m) { return frobenius_norm(m.dense()); }

/// (1/n) sum 1/(l_i - z). Throws DomainError unless Im z > 0.
Complex stieltjes_esd(const SpectralDistribution& d, Complex z);

/// Marčenko–Pastur law with ratio rho in (0, 1], support [a, b].
struct MPParams {
  double rho = 1.0;

  double a() const;
  double b() const;
};

/// Throws DomainError unless 0 < rho <= 1.
MPParams make_mp(double rho);

/// (1/(2πρ)) sqrt((b-x)(x-a)) / x on [a, b], 0 outside.
double mp_density(double x, const MPParams& mp);

/// Integral of mp_density over [a, min(x, b)], clamped to [0, 1].
double mp_cdf(double x, const MPParams& mp);

/// Discrete population spectral distribution H.
class DiscreteH {
 public:
  /// Atoms (λ >= 0, weight > 0); weights must sum to 1 within 1e-12.
  explicit DiscreteH(std::vector<std::pair<double, double>> atoms);
  static DiscreteH point_mass(double lambda) { return DiscreteH({{lambda, 1.0}}); }

  const std::vector<std::pair<double, double>>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<std::pair<double, double>> atoms_;
};

/// Residual of w (z - ρ ∫ λ dH(λ)/(1 + λ w)) + 1.
Complex mp_residual(Complex w, Complex z, double rho, const DiscreteH& h);

/// Solves -1/w = z - ρ ∫ λ dH(λ)/(1 + λ w) for the root with Im w > 0 by damped
/// fixed-point iteration followed by Newton polishing. Throws DomainError unless
/// Im z > 0 and rho > 0; NumericalError when the residual does not drop below
/// 1e-10 within 10^4 iterations.
Complex mp_stieltjes_solve(Complex z, double rho, const DiscreteH& h);

/// sup_x |F1(x) - F2(x)| evaluated exactly on the merged support.
double kolmogorov_distance(const SpectralDistribution& d1, const SpectralDistribution& d2);

/// sup_x |F_n(x) - F_MP(x)| using both one-sided limits of F_n at each eigenvalue.
double kolmogorov_to_mp(const SpectralDistribution& d, const MPParams& mp);

struct WeylResult {
  double max_gap = 0.0;       // max_j |l_j(M) - l_j(K)|
  double op_norm_diff = 0.0;  // ||M - K||_2

  bool holds() const { return max_gap <= op_norm_diff + 1e-8 * (1.0 + op_norm_diff); }
};

WeylResult weyl_check(const SymMatrix& m, const SymMatrix& k);

struct LidskiiResult {
  double lhs = 0.0;  // sum_j |l_j(M) - l_j(K)|^2
  double rhs = 0.0;  // ||M - K||_F^2
  bool ok = false;
};

LidskiiResult lidskii_check(const SymMatrix& m, const SymMatrix& k);

/// Angle in [0, π/2] between the unit eigenvectors of the j-th largest
/// eigenvalues (j = 0 is the top) of M and K. Throws GapError when the j-th
/// eigenvalue of K is within 1e-6 ||K||_2 of a neighbour.
double principal_angle(const SymMatrix& m, const SymMatrix& k, std::size_t j);

}  // namespace kernelrmt
