#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kernelrmt/data_models.hpp"
#include "kernelrmt/sym_matrix.hpp"

namespace kernelrmt {

// Fourth-moment identities for a vector Y of i.i.d. entries with variance
// sigma2 and fourth moment mu4:
//   E(YY'MYY')      = σ⁴(M + M') + (μ4 - 3σ⁴) diag(M) + σ⁴ trace(M) Id
//   E((Y'MY)²)      = σ⁴ trace(M² + MM') + σ⁴ trace(M)² + (μ4 - 3σ⁴) trace(M∘M)
Eigen::MatrixXd expected_outer_fourth(const Eigen::MatrixXd& m, double sigma2, double mu4);
double expected_quadratic_square(const Eigen::MatrixXd& m, double sigma2, double mu4);

/// Monte-Carlo mean of YY'MYY' against the closed form, unit variance and
/// μ4 from `dist`. Returns max_ij |mc - target| / (1 + |target|).
/// Requires M to be p x p and trials >= 10^4.
double moment4_identity_check(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                              std::size_t trials, std::uint64_t seed);

/// Monte-Carlo mean of (Y'MY)² against the closed form; returns
/// |mc - target| / max(1, |target|).
double trace_identity_check(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                            std::size_t trials, std::uint64_t seed);

/// Sample variance of (Y'MY)² over the same draws as trace_identity_check.
double quadratic_square_variance(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                                 std::size_t trials, std::uint64_t seed);

/// Inputs of the quadratic-form and bilinear-form tail bounds.
struct TailBoundInputs {
  double r = 0.0;       // deviation level
  double p = 0.0;       // dimension
  double b_p = 0.0;     // bound on the entries
  double sigma1 = 0.0;  // largest singular value of the form's matrix

  /// 128 e^{4π} σ1 B_p² / p
  double zeta() const;
  /// sqrt(σ1)
  double nu() const;
};

/// 8e^{4π}[exp(-p(r/2-ζ)²/(32B²(1+2ν)²σ1)) + exp(-p/(32B²(1+2ν)²σ1))]
/// clamped to [0, 1]. Throws ParameterError unless r/2 > ζ.
double quad_form_tail_bound(const TailBoundInputs& in);

/// Bound on P(|Y_i'ΣY_j/p| > r), same expression with σ1 = σ1(Σ).
double bilinear_tail_bound(const TailBoundInputs& in);

/// Rate function for the max-deviation statements.
///   moment(m, eps):        p^{-1/2 + 2/m} (log p)^{(1+eps)/2}
///   lipschitz(b, c, eps):  (p c(p)^{2/b})^{-1/2} (log p)^{(1+eps)/b},  c(p) = c0 p^{-alpha}
struct RateSpec {
  enum class Kind { moment, lipschitz };

  Kind kind = Kind::lipschitz;
  double m = 4.0;
  double b = 2.0;
  double c0 = 1.0;
  double alpha = 0.0;
  double eps = 0.1;

  static RateSpec moment(double m, double eps = 0.1);
  static RateSpec lipschitz(double b, double c0, double eps = 0.1, double alpha = 0.0);

  double c_of_p(double p) const { return c0 * std::pow(p, -alpha); }
  /// Throws ParameterError on m < 4, b <= 0, c <= 0, eps <= 0 or p < 2.
  double value(double p) const;
  /// True when c(p) decays faster than p^{-(1/2 - eps) b / 2}: the rate is
  /// still reported but lies outside the hypotheses the rate assumes.
  bool outside_hypotheses(double p) const;
  std::string describe() const;
};

struct DeviationReport {
  double max_offdiag = 0.0;   // max_{i != j} |X_i'X_j/p|
  double max_diag_dev = 0.0;  // max_i | ||X_i||²/p - tau1 |
  double max_dist_dev = 0.0;  // max_{i != j} | ||X_i - X_j||²/p - 2 tau1 |
  double rate_bound = 0.0;
  RateSpec rate;
  double tau1 = 0.0;
  bool outside_hypotheses = false;

  bool offdiag_within() const { return max_offdiag <= rate_bound; }
  bool diag_within() const { return max_diag_dev <= rate_bound; }
  bool dist_within() const { return max_dist_dev <= rate_bound; }
};

/// Uses `tau1` when given, else the attached CovModel; throws ParameterError
/// when neither is available.
DeviationReport deviation_report(const DataMatrix& x, const RateSpec& rate,
                                 std::optional<double> tau1 = std::nullopt);

struct HadamardBound {
  double lhs = 0.0;  // σ1(E∘M)
  double rhs = 0.0;  // max|E_ij| σ1(M)
  bool ok = false;
};

/// Throws ParameterError when M has a negative entry.
HadamardBound hadamard_bound_check(const SymMatrix& e, const SymMatrix& m);

struct Histogram {
  std::vector<double> left_edges;
  std::vector<std::size_t> counts;
  double width = 0.0;

  std::size_t total() const;
};

/// Freedman–Diaconis bin width with at least `min_bins` bins; a sample whose
/// range is below 1e-12 (relative) gets a single bin.
Histogram make_histogram(const std::vector<double>& values, std::size_t bins = 0, std::size_t min_bins = 10);

struct GeometryDiagnostics {
  Histogram norms;  // ||X_i||²/p
  Histogram inner;  // X_i'X_j/p, i < j
  double norm_mean = 0.0;
  double norm_std = 0.0;
  double inner_mean = 0.0;
  double inner_std = 0.0;
};

/// `bins` = 0 selects Freedman–Diaconis. Throws ParameterError when n < 2.
GeometryDiagnostics geometry_diagnostics(const DataMatrix& x, std::size_t bins = 0);

/// ||M - Id||_2 for the unnormalized kernel M_ij = exp(-gamma ||X_i - X_j||²).
double gaussian_degeneracy_check(const DataMatrix& x, double gamma);

/// Smallest off-diagonal ||X_i - X_j||² (unnormalized); +inf when n < 2.
double min_pair_sq_distance(const DataMatrix& x);

}  // namespace kernelrmt
