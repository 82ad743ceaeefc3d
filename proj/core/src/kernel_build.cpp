#include "kernelrmt/kernel_build.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kernelrmt/errors.hpp"

namespace kernelrmt {
namespace {

constexpr double kMaxExponent = 700.0;

bool finite(const KernelDerivatives& d) {
  return std::isfinite(d.f) && std::isfinite(d.d1) && std::isfinite(d.d2) && std::isfinite(d.d3);
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

template <class Arg>
SymMatrix apply_kernel(const SymMatrix& args, const KernelSpec& k, Arg&& diag_value) {
  const std::size_t n = args.order();
  Eigen::MatrixXd m(idx(n), idx(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double v = i == j ? diag_value(i) : k.eval(args(i, j));
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "kernel " << k.name() << " is non-finite at argument " << args(i, j);
        throw EvaluationError(msg.str(), i, j);
      }
      m(idx(i), idx(j)) = v;
    }
  }
  return SymMatrix::from_upper(m);
}

}  // namespace

KernelSpec KernelSpec::linear(double a, double b) {
  KernelSpec k;
  k.kind_ = Kind::linear;
  k.a_ = a;
  k.b_ = b;
  return k;
}

KernelSpec KernelSpec::gaussian(double gamma) {
  if (!std::isfinite(gamma)) throw ParameterError("KernelSpec::gaussian: gamma must be finite");
  KernelSpec k;
  k.kind_ = Kind::gaussian;
  k.a_ = gamma;
  return k;
}

KernelSpec KernelSpec::power(double a) {
  if (!std::isfinite(a)) throw ParameterError("KernelSpec::power: exponent must be finite");
  KernelSpec k;
  k.kind_ = Kind::power;
  k.a_ = a;
  return k;
}

KernelSpec KernelSpec::tanh(double a, double b) {
  KernelSpec k;
  k.kind_ = Kind::tanh;
  k.a_ = a;
  k.b_ = b;
  return k;
}

KernelSpec KernelSpec::custom(std::function<double(double)> fn, std::string name) {
  if (!fn) throw ParameterError("KernelSpec::custom: empty function");
  KernelSpec k;
  k.kind_ = Kind::custom;
  k.fn_ = std::move(fn);
  k.custom_name_ = std::move(name);
  return k;
}

KernelSpec KernelSpec::plus_constant(double c) const {
  KernelSpec k = *this;
  k.shift_ += c;
  return k;
}

std::string KernelSpec::name() const {
  std::ostringstream s;
  switch (kind_) {
    case Kind::linear: s << "linear(" << a_ << "," << b_ << ")"; break;
    case Kind::gaussian: s << "gaussian(" << a_ << ")"; break;
    case Kind::power: s << "power(" << a_ << ")"; break;
    case Kind::tanh: s << "tanh(" << a_ << "," << b_ << ")"; break;
    case Kind::custom: s << custom_name_; break;
  }
  if (shift_ != 0.0) s << "+" << shift_;
  return s.str();
}

double KernelSpec::eval(double x) const {
  switch (kind_) {
    case Kind::linear: return a_ * x + b_ + shift_;
    case Kind::gaussian: return std::exp(std::min(-a_ * x, kMaxExponent)) + shift_;
    case Kind::power: return std::pow(1.0 + x, a_) + shift_;
    case Kind::tanh: return std::tanh(a_ + b_ * x) + shift_;
    case Kind::custom: return fn_(x) + shift_;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

KernelDerivatives KernelSpec::analytic(double x) const {
  KernelDerivatives d;
  switch (kind_) {
    case Kind::linear:
      d = {a_ * x + b_, a_, 0.0, 0.0};
      break;
    case Kind::gaussian: {
      const double e = std::exp(std::min(-a_ * x, kMaxExponent));
      d = {e, -a_ * e, a_ * a_ * e, -a_ * a_ * a_ * e};
      break;
    }
    case Kind::power: {
      const double u = 1.0 + x;
      const double a = a_;
      d = {std::pow(u, a), a * std::pow(u, a - 1.0), a * (a - 1.0) * std::pow(u, a - 2.0),
           a * (a - 1.0) * (a - 2.0) * std::pow(u, a - 3.0)};
      // 0 * inf for integer exponents at u == 0: the polynomial derivative is 0.
      if (a == 0.0) d.d1 = 0.0;
      if (a == 0.0 || a == 1.0) d.d2 = 0.0;
      if (a == 0.0 || a == 1.0 || a == 2.0) d.d3 = 0.0;
      break;
    }
    case Kind::tanh: {
      const double t = std::tanh(a_ + b_ * x);
      const double s = 1.0 - t * t;
      d = {t, b_ * s, -2.0 * b_ * b_ * t * s, -2.0 * b_ * b_ * b_ * s * (1.0 - 3.0 * t * t)};
      break;
    }
    case Kind::custom:
      break;
  }
  d.f += shift_;
  return d;
}

KernelDerivatives KernelSpec::finite_difference(double x) const {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, std::abs(x));
  const double h1 = std::cbrt(eps) * scale;
  const double h2 = std::pow(eps, 0.25) * scale;
  const double h3 = std::pow(eps, 0.2) * scale;
  auto f = [&](double t) { return fn_(t); };

  KernelDerivatives d;
  d.f = f(x) + shift_;
  d.d1 = (f(x + h1) - f(x - h1)) / (2.0 * h1);
  d.d2 = (f(x + h2) - 2.0 * f(x) + f(x - h2)) / (h2 * h2);
  d.d3 = (f(x + 2.0 * h3) - 2.0 * f(x + h3) + 2.0 * f(x - h3) - f(x - 2.0 * h3)) / (2.0 * h3 * h3 * h3);
  return d;
}

KernelDerivatives KernelSpec::derivatives_at(double x) const {
  const KernelDerivatives d = kind_ == Kind::custom ? finite_difference(x) : analytic(x);
  if (!finite(d)) {
    std::ostringstream msg;
    msg << "kernel " << name() << " has a non-finite derivative at x = " << x;
    throw EvaluationError(msg.str());
  }
  return d;
}

KernelDerivatives kernel_derivatives_at(const KernelSpec& k, double x) { return k.derivatives_at(x); }

SymMatrix inner_products(const DataMatrix& x) {
  const Eigen::MatrixXd& r = x.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(r.rows(), r.rows());
  g.selfadjointView<Eigen::Upper>().rankUpdate(r, 1.0 / static_cast<double>(x.p()));
  return SymMatrix::from_upper(g);
}

SymMatrix scaled_sq_distances(const DataMatrix& x) {
  const Eigen::MatrixXd& r = x.rows();
  const Eigen::Index n = r.rows();
  const double inv_p = 1.0 / static_cast<double>(x.p());
  // Row-major copy so each row difference is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = r;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) d(i, j) = (rm.row(i) - rm.row(j)).squaredNorm() * inv_p;
  return SymMatrix::from_upper(d);
}

SymMatrix build_inner_kernel(const DataMatrix& x, const KernelSpec& k) {
  if (x.n() == 0) throw ParameterError("build_inner_kernel: empty data");
  const SymMatrix s = inner_products(x);
  return apply_kernel(s, k, [&](std::size_t i) { return k.eval(s(i, i)); });
}

SymMatrix build_distance_kernel(const DataMatrix& x, const KernelSpec& k) {
  if (x.n() == 0) throw ParameterError("build_distance_kernel: empty data");
  const SymMatrix d = scaled_sq_distances(x);
  const double f0 = k.eval(0.0);
  return apply_kernel(d, k, [&](std::size_t) { return f0; });
}

Eigen::MatrixXd center(const Eigen::MatrixXd& m, bool left, bool right) {
  if (m.rows() != m.cols()) throw DimensionError("center: matrix is not square");
  Eigen::MatrixXd out = m;
  if (out.rows() == 0) return out;
  if (left) {  // H M: remove column means
    const Eigen::RowVectorXd col_means = out.colwise().mean();
    out.rowwise() -= col_means;
  }
  if (right) {  // M H: remove row means
    const Eigen::VectorXd row_means = out.rowwise().mean();
    out.colwise() -= row_means;
  }
  return out;
}

SymMatrix center_both(const SymMatrix& m) {
  Eigen::MatrixXd c = center(m.dense(), true, true);
  return SymMatrix::from_upper(c);
}

SymMatrix laplacian_like(const SymMatrix& m) {
  const std::size_t n = m.order();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd l(idx(n), idx(n));
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      l(idx(i), idx(j)) = -m(i, j) * inv_n;
      off += m(i, j);
    }
    l(idx(i), idx(i)) = off * inv_n;
  }
  return SymMatrix::from_symmetric(l);
}

}  // namespace kernelrmt
