#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kernelrmt/rng.hpp"

namespace kernelrmt {

/// Population covariance specification.
struct CovSpec {
  enum class Kind { identity, diagonal, ar1, spiked };

  Kind kind = Kind::identity;
  std::vector<double> values;  // diagonal
  double rho = 0.0;            // ar1
  double base = 1.0;           // spiked
  std::vector<double> spikes;  // spiked: leading eigenvalues are base + spike

  static CovSpec identity() { return {}; }
  static CovSpec diagonal(std::vector<double> v) {
    CovSpec s;
    s.kind = Kind::diagonal;
    s.values = std::move(v);
    return s;
  }
  static CovSpec ar1(double r) {
    CovSpec s;
    s.kind = Kind::ar1;
    s.rho = r;
    return s;
  }
  static CovSpec spiked(double base, std::vector<double> spikes) {
    CovSpec s;
    s.kind = Kind::spiked;
    s.base = base;
    s.spikes = std::move(spikes);
    return s;
  }
};

std::string to_string(CovSpec::Kind k);

/// Population covariance together with its square root and the scalars the
/// approximants need.
struct CovModel {
  CovSpec spec;
  std::size_t dim = 0;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sqrt;  // symmetric PSD, sqrt * sqrt == sigma
  double tau1 = 0.0;     // trace(sigma) / p
  double tau2 = 0.0;     // trace(sigma^2) / p^2
  double sigma1 = 0.0;   // largest eigenvalue

  bool is_identity() const noexcept { return spec.kind == CovSpec::Kind::identity; }
};

/// Builds Σ for `spec` in dimension p, its square root (via a symmetric
/// eigendecomposition) and tau1/tau2/sigma1. Throws ParameterError on an
/// invalid spec.
CovModel make_cov(const CovSpec& spec, std::size_t p);

/// Standardized (mean 0, variance 1) entry law of the standard model.
struct EntryDist {
  enum class Kind { gaussian, rademacher, uniform, student_t };

  Kind kind = Kind::gaussian;
  double df = 0.0;  // student_t only, must exceed 4

  static EntryDist gaussian() { return {}; }
  static EntryDist rademacher() { return {Kind::rademacher, 0.0}; }
  static EntryDist uniform() { return {Kind::uniform, 0.0}; }
  static EntryDist student_t(double df);

  /// Exact fourth moment of the standardized entry.
  double mu4() const;
  /// Throws ParameterError when df <= 4 for student_t.
  void validate() const;
  double sample(Engine& eng) const;
};

std::string to_string(EntryDist::Kind k);

/// Radial law of the elliptical model X = r Σ^{1/2} Y.
struct RadialDist {
  enum class Kind { constant, uniform, exponential };
  Kind kind = Kind::constant;

  static RadialDist constant() { return {Kind::constant}; }
  static RadialDist uniform() { return {Kind::uniform}; }          // U(0.5, 1.5)
  static RadialDist exponential() { return {Kind::exponential}; }  // mean 1

  double sample(Engine& eng) const;
  double second_moment() const;
};

std::string to_string(RadialDist::Kind k);

/// n x p data, one observation per row, with the generator's provenance.
class DataMatrix {
 public:
  DataMatrix(Eigen::MatrixXd rows, std::string model_tag, std::uint64_t seed,
             std::optional<CovModel> cov = std::nullopt);

  std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  const std::string& model_tag() const noexcept { return model_tag_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::optional<CovModel>& cov() const noexcept { return cov_; }

 private:
  Eigen::MatrixXd rows_;
  std::string model_tag_;
  std::uint64_t seed_;
  std::optional<CovModel> cov_;
};

/// Rows Σ^{1/2} Y_i with Y_i i.i.d. entries from `dist`.
DataMatrix gen_standard(std::size_t n, std::size_t p, const CovModel& cov, const EntryDist& dist,
                        std::uint64_t seed);

/// Rows sqrt(p) times uniform points on the unit sphere of R^p.
DataMatrix gen_sphere(std::size_t n, std::size_t p, std::uint64_t seed);

/// Centered Gaussian copula: Φ(v) - 1/2 with v ~ N(0, corr). `corr` must have unit diagonal.
DataMatrix gen_copula(std::size_t n, std::size_t p, const CovModel& corr, std::uint64_t seed);

/// Rows p^{1/b} times uniform points in the unit l^b ball, 1 <= b <= 2.
DataMatrix gen_lb_ball(std::size_t n, std::size_t p, double b, std::uint64_t seed);

/// Rows r_i Σ^{1/2} Y_i with r_i independent of Y_i. The attached CovModel is
/// the scatter Σ, not the covariance E(r^2) Σ.
DataMatrix gen_elliptical(std::size_t n, std::size_t p, const CovModel& cov, const EntryDist& dist,
                          const RadialDist& radial, std::uint64_t seed);

/// Sample covariance X'X/n (data assumed centered).
Eigen::MatrixXd sample_second_moment(const DataMatrix& x);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace kernelrmt
