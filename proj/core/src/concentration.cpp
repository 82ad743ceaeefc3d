#include "kernelrmt/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kernelrmt/errors.hpp"
#include "kernelrmt/spectral.hpp"

namespace kernelrmt {
namespace {

constexpr std::size_t kChunk = 4096;
constexpr std::size_t kMinTrials = 10000;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_mc_args(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p, std::size_t trials,
                   const char* who) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != p)
    throw DimensionError(std::string(who) + ": M must be p x p");
  if (trials < kMinTrials) throw ParameterError(std::string(who) + ": need at least 10^4 trials");
  dist.validate();
}

// Pairwise reduction of per-chunk partial sums.
template <class T>
T pairwise_sum(std::vector<T> parts) {
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.front();
}

// Calls visit(y) for every trial; chunk c draws from stream c of `seed`.
template <class Visit>
void for_each_draw(const EntryDist& dist, std::size_t p, std::size_t trials, std::uint64_t seed,
                   Visit&& visit) {
  Eigen::VectorXd y(idx(p));
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    Engine eng = make_engine(seed, c);
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = dist.sample(eng);
      visit(c, y);
    }
  }
}

std::vector<double> quadratic_squares(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                                      std::size_t trials, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(trials);
  for_each_draw(dist, p, trials, seed, [&](std::size_t, const Eigen::VectorXd& y) {
    const double q = y.dot(m * y);
    out.push_back(q * q);
  });
  return out;
}

double chunked_mean(const std::vector<double>& v) {
  std::vector<double> parts;
  for (std::size_t start = 0; start < v.size(); start += kChunk) {
    double s = 0.0;
    for (std::size_t i = start; i < std::min(v.size(), start + kChunk); ++i) s += v[i];
    parts.push_back(s);
  }
  return pairwise_sum(std::move(parts)) / static_cast<double>(v.size());
}

double tail_expression(const TailBoundInputs& in) {
  const double zeta = in.zeta();
  if (!(in.r / 2.0 > zeta)) {
    std::ostringstream msg;
    msg << "tail bound requires r/2 > zeta_p (r = " << in.r << ", zeta_p = " << zeta << ")";
    throw ParameterError(msg.str());
  }
  const double k = 8.0 * std::exp(4.0 * std::numbers::pi);
  const double one_nu = 1.0 + 2.0 * in.nu();
  const double denom = 32.0 * in.b_p * in.b_p * one_nu * one_nu * in.sigma1;
  const double gap = in.r / 2.0 - zeta;
  const double v = k * (std::exp(-in.p * gap * gap / denom) + std::exp(-in.p / denom));
  return std::clamp(v, 0.0, 1.0);
}

void check_tail_inputs(const TailBoundInputs& in) {
  if (!(in.p > 0.0) || !(in.b_p > 0.0) || !(in.sigma1 > 0.0))
    throw ParameterError("tail bound: p, B_p and sigma1 must be positive");
}

void check_data_for_pairs(const DataMatrix& x, const char* who) {
  if (x.n() < 2) throw ParameterError(std::string(who) + ": need at least two observations");
}

}  // namespace

Eigen::MatrixXd expected_outer_fourth(const Eigen::MatrixXd& m, double sigma2, double mu4) {
  const double s4 = sigma2 * sigma2;
  Eigen::MatrixXd out = s4 * (m + m.transpose());
  out.diagonal() += (mu4 - 3.0 * s4) * m.diagonal();
  out.diagonal().array() += s4 * m.trace();
  return out;
}

double expected_quadratic_square(const Eigen::MatrixXd& m, double sigma2, double mu4) {
  const double s4 = sigma2 * sigma2;
  const double tr = m.trace();
  return s4 * ((m * m).trace() + (m * m.transpose()).trace()) + s4 * tr * tr +
         (mu4 - 3.0 * s4) * m.cwiseProduct(m).trace();
}

double moment4_identity_check(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                              std::size_t trials, std::uint64_t seed) {
  check_mc_args(m, dist, p, trials, "moment4_identity_check");
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXd> parts(chunks, Eigen::MatrixXd::Zero(idx(p), idx(p)));
  // YY'MYY' = (Y'MY) YY'
  for_each_draw(dist, p, trials, seed, [&](std::size_t c, const Eigen::VectorXd& y) {
    const double q = y.dot(m * y);
    parts[c].noalias() += q * (y * y.transpose());
  });
  const Eigen::MatrixXd mc = pairwise_sum(std::move(parts)) / static_cast<double>(trials);
  const Eigen::MatrixXd target = expected_outer_fourth(m, 1.0, dist.mu4());
  return ((mc - target).array().abs() / (1.0 + target.array().abs())).maxCoeff();
}

double trace_identity_check(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                            std::size_t trials, std::uint64_t seed) {
  check_mc_args(m, dist, p, trials, "trace_identity_check");
  const double mc = chunked_mean(quadratic_squares(m, dist, p, trials, seed));
  const double target = expected_quadratic_square(m, 1.0, dist.mu4());
  return std::abs(mc - target) / std::max(1.0, std::abs(target));
}

double quadratic_square_variance(const Eigen::MatrixXd& m, const EntryDist& dist, std::size_t p,
                                 std::size_t trials, std::uint64_t seed) {
  check_mc_args(m, dist, p, trials, "quadratic_square_variance");
  std::vector<double> v = quadratic_squares(m, dist, p, trials, seed);
  const double mean = chunked_mean(v);
  for (double& x : v) x = (x - mean) * (x - mean);
  return chunked_mean(v) * static_cast<double>(v.size()) / static_cast<double>(v.size() - 1);
}

double TailBoundInputs::zeta() const {
  return 128.0 * std::exp(4.0 * std::numbers::pi) * sigma1 * b_p * b_p / p;
}

double TailBoundInputs::nu() const { return std::sqrt(sigma1); }

double quad_form_tail_bound(const TailBoundInputs& in) {
  check_tail_inputs(in);
  return tail_expression(in);
}

double bilinear_tail_bound(const TailBoundInputs& in) {
  check_tail_inputs(in);
  return tail_expression(in);
}

RateSpec RateSpec::moment(double m, double eps) {
  RateSpec r;
  r.kind = Kind::moment;
  r.m = m;
  r.eps = eps;
  return r;
}

RateSpec RateSpec::lipschitz(double b, double c0, double eps, double alpha) {
  RateSpec r;
  r.kind = Kind::lipschitz;
  r.b = b;
  r.c0 = c0;
  r.eps = eps;
  r.alpha = alpha;
  return r;
}

double RateSpec::value(double p) const {
  if (!(p >= 2.0)) throw ParameterError("RateSpec: p must be at least 2");
  if (!(eps > 0.0)) throw ParameterError("RateSpec: eps must be positive");
  const double lp = std::log(p);
  if (kind == Kind::moment) {
    if (!(m >= 4.0)) throw ParameterError("RateSpec: moment rate needs m >= 4");
    return std::pow(p, -0.5 + 2.0 / m) * std::pow(lp, (1.0 + eps) / 2.0);
  }
  if (!(b > 0.0)) throw ParameterError("RateSpec: b must be positive");
  const double c = c_of_p(p);
  if (!(c > 0.0)) throw ParameterError("RateSpec: c(p) must be positive");
  return std::pow(p * std::pow(c, 2.0 / b), -0.5) * std::pow(lp, (1.0 + eps) / b);
}

bool RateSpec::outside_hypotheses(double p) const {
  if (kind == Kind::moment) return false;
  return c_of_p(p) < std::pow(p, -(0.5 - eps) * b / 2.0);
}

std::string RateSpec::describe() const {
  std::ostringstream s;
  if (kind == Kind::moment)
    s << "moment(m=" << m << ",eps=" << eps << ")";
  else
    s << "lipschitz(b=" << b << ",c=" << c0 << ",alpha=" << alpha << ",eps=" << eps << ")";
  return s.str();
}

DeviationReport deviation_report(const DataMatrix& x, const RateSpec& rate, std::optional<double> tau1) {
  if (!tau1) {
    if (!x.cov()) throw ParameterError("deviation_report: tau1 not supplied and data has no covariance model");
    tau1 = x.cov()->tau1;
  }
  const std::size_t n = x.n();
  const std::size_t p = x.p();
  const double inv_p = 1.0 / static_cast<double>(p);
  // Row-major copy and fixed-order scalar loops: every entry is computed the
  // same way wherever its rows sit, so the maxima are exactly permutation invariant.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = x.rows();

  DeviationReport rep;
  rep.rate = rate;
  rep.tau1 = *tau1;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = r.data() + i * p;
    double sq = 0.0;
    for (std::size_t k = 0; k < p; ++k) sq += xi[k] * xi[k];
    rep.max_diag_dev = std::max(rep.max_diag_dev, std::abs(sq * inv_p - *tau1));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = r.data() + j * p;
      double dot = 0.0;
      double dist = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        dot += xi[k] * xj[k];
        const double d = xi[k] - xj[k];
        dist += d * d;
      }
      rep.max_offdiag = std::max(rep.max_offdiag, std::abs(dot * inv_p));
      rep.max_dist_dev = std::max(rep.max_dist_dev, std::abs(dist * inv_p - 2.0 * *tau1));
    }
  }
  const double pd = static_cast<double>(std::max<std::size_t>(p, 2));
  rep.rate_bound = rate.value(pd);
  rep.outside_hypotheses = rate.outside_hypotheses(pd);
  return rep;
}

HadamardBound hadamard_bound_check(const SymMatrix& e, const SymMatrix& m) {
  if (e.order() != m.order()) throw DimensionError("hadamard_bound_check: order mismatch");
  if ((m.dense().array() < 0.0).any()) throw ParameterError("hadamard_bound_check: M must be entrywise nonnegative");
  HadamardBound h;
  if (m.order() == 0) {
    h.ok = true;
    return h;
  }
  h.lhs = operator_norm(hadamard(e, m));
  h.rhs = e.dense().cwiseAbs().maxCoeff() * operator_norm(m);
  h.ok = h.lhs <= h.rhs * (1.0 + 1e-10);
  return h;
}

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (std::size_t c : counts) t += c;
  return t;
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins, std::size_t min_bins) {
  Histogram h;
  if (values.empty()) return h;
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  const double lo = v.front();
  const double hi = v.back();
  const double range = hi - lo;
  if (range <= 1e-12 * std::max(1.0, std::abs(hi))) {
    h.left_edges = {lo};
    h.counts = {v.size()};
    h.width = 0.0;
    return h;
  }
  if (bins == 0) {
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(v.size() - 1);
      const auto k = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(k);
      return k + 1 < v.size() ? v[k] * (1.0 - frac) + v[k + 1] * frac : v[k];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double fd = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(v.size()));
    bins = fd > 0.0 ? static_cast<std::size_t>(std::ceil(range / fd)) : min_bins;
    bins = std::clamp(bins, min_bins, std::max(min_bins, v.size()));
  }
  h.width = range / static_cast<double>(bins);
  h.left_edges.resize(bins);
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b < bins; ++b) h.left_edges[b] = lo + static_cast<double>(b) * h.width;
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / h.width);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

GeometryDiagnostics geometry_diagnostics(const DataMatrix& x, std::size_t bins) {
  check_data_for_pairs(x, "geometry_diagnostics");
  const std::size_t n = x.n();
  const double inv_p = 1.0 / static_cast<double>(x.p());
  const Eigen::MatrixXd g = x.rows() * x.rows().transpose() * inv_p;
  std::vector<double> norms(n);
  std::vector<double> inner;
  inner.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = x.rows().row(idx(i)).squaredNorm() * inv_p;
    for (std::size_t j = i + 1; j < n; ++j) inner.push_back(g(idx(i), idx(j)));
  }
  auto moments = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = chunked_mean(v);
    double ss = 0.0;
    for (double t : v) ss += (t - mean) * (t - mean);
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  };
  GeometryDiagnostics out;
  moments(norms, out.norm_mean, out.norm_std);
  moments(inner, out.inner_mean, out.inner_std);
  out.norms = make_histogram(norms, bins);
  out.inner = make_histogram(inner, bins);
  return out;
}

double min_pair_sq_distance(const DataMatrix& x) {
  double best = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd& r = x.rows();
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = i + 1; j < r.rows(); ++j) best = std::min(best, (r.row(i) - r.row(j)).squaredNorm());
  return best;
}

double gaussian_degeneracy_check(const DataMatrix& x, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("gaussian_degeneracy_check: gamma must be positive");
  const Eigen::MatrixXd& r = x.rows();
  const Eigen::Index n = r.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);  // M - Id: zero diagonal
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = std::exp(-gamma * (r.row(i) - r.row(j)).squaredNorm());
      m(i, j) = v;
      m(j, i) = v;
    }
  return operator_norm(m);
}

}  // namespace kernelrmt
