#include "kernelrmt/data_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kernelrmt/errors.hpp"
#include "kernelrmt/sym_eigen.hpp"

namespace kernelrmt {
namespace {

void check_dims(std::size_t n, std::size_t p) {
  if (n == 0 || p == 0) throw ParameterError("generator: n and p must be positive");
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Row i of the output is drawn from its own stream so generation order is
// irrelevant.
template <class RowFn>
Eigen::MatrixXd draw_rows(std::size_t n, std::size_t p, std::uint64_t seed, RowFn&& fill) {
  Eigen::MatrixXd out(idx(n), idx(p));
  Eigen::VectorXd row(idx(p));
  for (std::size_t i = 0; i < n; ++i) {
    Engine eng = make_engine(seed, i);
    fill(eng, row);
    out.row(idx(i)) = row.transpose();
  }
  return out;
}

void fill_gaussian(Engine& eng, Eigen::VectorXd& row) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index k = 0; k < row.size(); ++k) row(k) = normal(eng);
}

}  // namespace

std::string to_string(CovSpec::Kind k) {
  switch (k) {
    case CovSpec::Kind::identity: return "identity";
    case CovSpec::Kind::diagonal: return "diagonal";
    case CovSpec::Kind::ar1: return "ar1";
    case CovSpec::Kind::spiked: return "spiked";
  }
  return "unknown";
}

std::string to_string(EntryDist::Kind k) {
  switch (k) {
    case EntryDist::Kind::gaussian: return "gaussian";
    case EntryDist::Kind::rademacher: return "rademacher";
    case EntryDist::Kind::uniform: return "uniform";
    case EntryDist::Kind::student_t: return "student_t";
  }
  return "unknown";
}

std::string to_string(RadialDist::Kind k) {
  switch (k) {
    case RadialDist::Kind::constant: return "constant";
    case RadialDist::Kind::uniform: return "uniform";
    case RadialDist::Kind::exponential: return "exp_mean1";
  }
  return "unknown";
}

CovModel make_cov(const CovSpec& spec, std::size_t p) {
  if (p == 0) throw ParameterError("make_cov: p must be positive");
  const Eigen::Index pp = idx(p);
  CovModel cov;
  cov.spec = spec;
  cov.dim = p;

  bool diagonal = true;
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(pp);
  switch (spec.kind) {
    case CovSpec::Kind::identity:
      break;
    case CovSpec::Kind::diagonal: {
      if (spec.values.size() != p)
        throw ParameterError("make_cov: diagonal spec needs exactly p values");
      bool any_positive = false;
      for (std::size_t k = 0; k < p; ++k) {
        const double v = spec.values[k];
        if (!std::isfinite(v) || v < 0.0) throw ParameterError("make_cov: diagonal values must be >= 0");
        any_positive = any_positive || v > 0.0;
        diag(idx(k)) = v;
      }
      if (!any_positive) throw ParameterError("make_cov: diagonal spec is identically zero");
      break;
    }
    case CovSpec::Kind::ar1:
      if (!(std::abs(spec.rho) < 1.0)) throw ParameterError("make_cov: ar1 requires |rho| < 1");
      diagonal = spec.rho == 0.0;
      break;
    case CovSpec::Kind::spiked:
      if (!(spec.base > 0.0) || !std::isfinite(spec.base))
        throw ParameterError("make_cov: spiked base must be positive");
      if (spec.spikes.size() > p) throw ParameterError("make_cov: more spikes than dimensions");
      diag.setConstant(spec.base);
      for (std::size_t k = 0; k < spec.spikes.size(); ++k) {
        const double s = spec.spikes[k];
        if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("make_cov: spikes must be positive");
        diag(idx(k)) += s;
      }
      break;
  }

  if (diagonal) {
    cov.sigma = diag.asDiagonal();
    cov.sqrt = diag.cwiseSqrt().asDiagonal();
    cov.sigma1 = diag.maxCoeff();
  } else {
    cov.sigma.resize(pp, pp);
    for (Eigen::Index i = 0; i < pp; ++i)
      for (Eigen::Index j = 0; j < pp; ++j)
        cov.sigma(i, j) = std::pow(spec.rho, static_cast<double>(std::abs(i - j)));
    const SymEigen eig = sym_eigen(cov.sigma, true);
    const Eigen::VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
    cov.sqrt = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
    cov.sqrt = (0.5 * (cov.sqrt + cov.sqrt.transpose())).eval();
    cov.sigma1 = eig.values.maxCoeff();
  }
  const double pd = static_cast<double>(p);
  cov.tau1 = cov.sigma.diagonal().sum() / pd;
  cov.tau2 = cov.sigma.squaredNorm() / (pd * pd);
  return cov;
}

EntryDist EntryDist::student_t(double df) {
  EntryDist d{Kind::student_t, df};
  d.validate();
  return d;
}

void EntryDist::validate() const {
  if (kind == Kind::student_t && !(df > 4.0))
    throw ParameterError("EntryDist: student_t requires df > 4 (finite 4+eps moments)");
}

double EntryDist::mu4() const {
  switch (kind) {
    case Kind::gaussian: return 3.0;
    case Kind::rademacher: return 1.0;
    case Kind::uniform: return 9.0 / 5.0;
    case Kind::student_t: validate(); return 3.0 * (df - 2.0) / (df - 4.0);
  }
  return 0.0;
}

double EntryDist::sample(Engine& eng) const {
  switch (kind) {
    case Kind::gaussian: return std::normal_distribution<double>(0.0, 1.0)(eng);
    case Kind::rademacher: return (eng() >> 63) != 0 ? 1.0 : -1.0;
    case Kind::uniform: {
      const double s = std::sqrt(3.0);
      return std::uniform_real_distribution<double>(-s, s)(eng);
    }
    case Kind::student_t: {
      validate();
      return std::student_t_distribution<double>(df)(eng) / std::sqrt(df / (df - 2.0));
    }
  }
  return 0.0;
}

double RadialDist::sample(Engine& eng) const {
  switch (kind) {
    case Kind::constant: return 1.0;
    case Kind::uniform: return std::uniform_real_distribution<double>(0.5, 1.5)(eng);
    case Kind::exponential: return std::exponential_distribution<double>(1.0)(eng);
  }
  return 1.0;
}

double RadialDist::second_moment() const {
  switch (kind) {
    case Kind::constant: return 1.0;
    case Kind::uniform: return 13.0 / 12.0;
    case Kind::exponential: return 2.0;
  }
  return 1.0;
}

DataMatrix::DataMatrix(Eigen::MatrixXd rows, std::string model_tag, std::uint64_t seed,
                       std::optional<CovModel> cov)
    : rows_(std::move(rows)), model_tag_(std::move(model_tag)), seed_(seed), cov_(std::move(cov)) {
  if (!rows_.allFinite()) throw ParameterError("DataMatrix: non-finite entry");
  if (cov_ && cov_->dim != p()) throw DimensionError("DataMatrix: covariance dimension does not match p");
}

DataMatrix gen_standard(std::size_t n, std::size_t p, const CovModel& cov, const EntryDist& dist,
                        std::uint64_t seed) {
  check_dims(n, p);
  if (cov.dim != p) throw DimensionError("gen_standard: covariance dimension does not match p");
  dist.validate();
  Eigen::MatrixXd y = draw_rows(n, p, seed, [&](Engine& eng, Eigen::VectorXd& row) {
    for (Eigen::Index k = 0; k < row.size(); ++k) row(k) = dist.sample(eng);
  });
  if (!cov.is_identity()) y = y * cov.sqrt;  // rows are (Σ^{1/2} Y_i)'
  return DataMatrix(std::move(y), "standard:" + to_string(cov.spec.kind) + ":" + to_string(dist.kind),
                    seed, cov);
}

DataMatrix gen_sphere(std::size_t n, std::size_t p, std::uint64_t seed) {
  check_dims(n, p);
  const double scale = std::sqrt(static_cast<double>(p));
  Eigen::MatrixXd x = draw_rows(n, p, seed, [&](Engine& eng, Eigen::VectorXd& row) {
    double norm = 0.0;
    do {
      fill_gaussian(eng, row);
      norm = row.norm();
    } while (norm == 0.0);
    row *= scale / norm;
  });
  return DataMatrix(std::move(x), "sphere", seed, make_cov(CovSpec::identity(), p));
}

DataMatrix gen_copula(std::size_t n, std::size_t p, const CovModel& corr, std::uint64_t seed) {
  check_dims(n, p);
  if (corr.dim != p) throw DimensionError("gen_copula: correlation dimension does not match p");
  for (Eigen::Index k = 0; k < corr.sigma.rows(); ++k)
    if (std::abs(corr.sigma(k, k) - 1.0) > 1e-12)
      throw ParameterError("gen_copula: correlation matrix must have unit diagonal");
  Eigen::MatrixXd v = draw_rows(n, p, seed, fill_gaussian);
  if (!corr.is_identity()) v = v * corr.sqrt;
  Eigen::MatrixXd x = v.unaryExpr([](double t) { return normal_cdf(t) - 0.5; });
  return DataMatrix(std::move(x), "copula:" + to_string(corr.spec.kind), seed);
}

DataMatrix gen_lb_ball(std::size_t n, std::size_t p, double b, std::uint64_t seed) {
  check_dims(n, p);
  if (!(b >= 1.0 && b <= 2.0)) throw ParameterError("gen_lb_ball: b must lie in [1, 2]");
  const double pd = static_cast<double>(p);
  const double scale = std::pow(pd, 1.0 / b);
  Eigen::MatrixXd x = draw_rows(n, p, seed, [&](Engine& eng, Eigen::VectorXd& row) {
    // Coordinates with density ∝ exp(-|t|^b): |t|^b ~ Gamma(1/b, 1), random sign.
    std::gamma_distribution<double> gamma(1.0 / b, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double lb = 0.0;
    do {
      lb = 0.0;
      for (Eigen::Index k = 0; k < row.size(); ++k) {
        const double g = gamma(eng);
        const double mag = std::pow(g, 1.0 / b);
        row(k) = (eng() >> 63) != 0 ? mag : -mag;
        lb += g;
      }
    } while (lb == 0.0);
    const double radius = std::pow(unif(eng), 1.0 / pd);
    row *= scale * radius / std::pow(lb, 1.0 / b);
  });
  return DataMatrix(std::move(x), "lb_ball:" + std::to_string(b), seed);
}

DataMatrix gen_elliptical(std::size_t n, std::size_t p, const CovModel& cov, const EntryDist& dist,
                          const RadialDist& radial, std::uint64_t seed) {
  check_dims(n, p);
  if (cov.dim != p) throw DimensionError("gen_elliptical: covariance dimension does not match p");
  dist.validate();
  Eigen::VectorXd r(idx(n));
  Eigen::MatrixXd y = draw_rows(n, p, seed, [&](Engine& eng, Eigen::VectorXd& row) {
    for (Eigen::Index k = 0; k < row.size(); ++k) row(k) = dist.sample(eng);
  });
  // Radii use a separate family of streams so that r == 1 reproduces gen_standard exactly.
  const std::uint64_t radial_seed = mix64(seed ^ 0x5bd1e995a3c4f1b7ULL);
  for (std::size_t i = 0; i < n; ++i) {
    Engine eng = make_engine(radial_seed, i);
    r(idx(i)) = radial.sample(eng);
  }
  if (!cov.is_identity()) y = y * cov.sqrt;
  if (radial.kind != RadialDist::Kind::constant) y = r.asDiagonal() * y;
  return DataMatrix(std::move(y), "elliptical:" + to_string(radial.kind) + ":" + to_string(dist.kind), seed,
                    cov);
}

Eigen::MatrixXd sample_second_moment(const DataMatrix& x) {
  return x.rows().transpose() * x.rows() / static_cast<double>(x.n());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace kernelrmt
