#include "kernelrmt/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kernelrmt/errors.hpp"
#include "kernelrmt/sym_eigen.hpp"

namespace kernelrmt {
namespace {

constexpr int kMaxIterations = 10000;
constexpr double kResidualTol = 1e-10;
constexpr double kDamping = 0.5;
constexpr double kMinImag = 1e-14;

// 10-point Gauss–Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 5> kGLNodes = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                            0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kGLWeights = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                              0.1494513491505806, 0.0666713443086881};

template <class F>
double gauss_legendre(F&& f, double lo, double hi, int panels) {
  double total = 0.0;
  const double h = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < kGLNodes.size(); ++i)
      s += kGLWeights[i] * (f(mid - half * kGLNodes[i]) + f(mid + half * kGLNodes[i]));
    total += s * half;
  }
  return total;
}

void check_same_order(const SymMatrix& m, const SymMatrix& k, const char* who) {
  if (m.order() != k.order()) throw DimensionError(std::string(who) + ": matrices have different orders");
}

Complex atom_sum(Complex w, const DiscreteH& h) {
  Complex s = 0.0;
  for (const auto& [lambda, weight] : h.atoms()) s += weight * lambda / (1.0 + lambda * w);
  return s;
}

Complex atom_sum_derivative(Complex w, const DiscreteH& h) {
  Complex s = 0.0;
  for (const auto& [lambda, weight] : h.atoms()) {
    const Complex d = 1.0 + lambda * w;
    s -= weight * lambda * lambda / (d * d);
  }
  return s;
}

}  // namespace

SpectralDistribution::SpectralDistribution(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  for (double v : values_)
    if (!std::isfinite(v)) throw ParameterError("SpectralDistribution: non-finite eigenvalue");
  std::sort(values_.begin(), values_.end());
}

double SpectralDistribution::cdf(double x) const {
  if (values_.empty()) return 0.0;
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double SpectralDistribution::cdf_left(double x) const {
  if (values_.empty()) return 0.0;
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

SpectralDistribution eigvals_sym(const Eigen::MatrixXd& m) {
  const SymEigen e = sym_eigen(m, false);
  return SpectralDistribution(std::vector<double>(e.values.data(), e.values.data() + e.values.size()));
}

SpectralDistribution eigvals_sym(const SymMatrix& m) { return eigvals_sym(m.dense()); }

double operator_norm(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  const SpectralDistribution d = eigvals_sym(symmetric);
  return std::max(std::abs(d.min()), std::abs(d.max()));
}

double operator_norm(const SymMatrix& m) { return operator_norm(m.dense()); }

double frobenius_norm(const Eigen::MatrixXd& m) { return m.norm(); }

Complex stieltjes_esd(const SpectralDistribution& d, Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("stieltjes_esd: Im z must be positive");
  if (d.empty()) throw DomainError("stieltjes_esd: empty distribution");
  Complex s = 0.0;
  for (double l : d.values()) s += 1.0 / (l - z);
  return s / static_cast<double>(d.size());
}

double MPParams::a() const {
  const double r = 1.0 - std::sqrt(rho);
  return r * r;
}

double MPParams::b() const {
  const double r = 1.0 + std::sqrt(rho);
  return r * r;
}

MPParams make_mp(double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw DomainError("Marchenko-Pastur density is only defined here for 0 < rho <= 1");
  return MPParams{rho};
}

double mp_density(double x, const MPParams& mp) {
  make_mp(mp.rho);
  const double a = mp.a();
  const double b = mp.b();
  if (!(x > a && x < b)) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * mp.rho * x);
}

double mp_cdf(double x, const MPParams& mp) {
  make_mp(mp.rho);
  const double a = mp.a();
  const double b = mp.b();
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  // x = c - r cos θ maps [0, π] onto [a, b] and absorbs both square-root
  // endpoint singularities: the integrand becomes r² sin²θ / (2πρ x(θ)).
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double theta_x = std::acos(std::clamp((c - x) / r, -1.0, 1.0));
  auto integrand = [&](double t) {
    const double st = std::sin(t);
    const double sh = std::sin(0.5 * t);
    const double xt = a + 2.0 * r * sh * sh;
    return r * r * st * st / (2.0 * std::numbers::pi * mp.rho * xt);
  };
  const double v = gauss_legendre(integrand, 0.0, theta_x, 64);
  return std::clamp(v, 0.0, 1.0);
}

DiscreteH::DiscreteH(std::vector<std::pair<double, double>> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ParameterError("DiscreteH: no atoms");
  double total = 0.0;
  for (const auto& [lambda, weight] : atoms_) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("DiscreteH: atoms must be >= 0");
    if (!(weight > 0.0)) throw ParameterError("DiscreteH: weights must be positive");
    total += weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("DiscreteH: weights must sum to 1");
}

Complex mp_residual(Complex w, Complex z, double rho, const DiscreteH& h) {
  return w * (z - rho * atom_sum(w, h)) + 1.0;
}

Complex mp_stieltjes_solve(Complex z, double rho, const DiscreteH& h) {
  if (!(z.imag() > 0.0)) throw DomainError("mp_stieltjes_solve: Im z must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("mp_stieltjes_solve: rho must be positive");

  Complex w = -1.0 / z;
  double res = std::abs(mp_residual(w, z, rho, h));
  int it = 0;
  // Damped fixed point until close, then Newton on g(w) = w (z - ρ s(w)) + 1.
  for (; it < kMaxIterations && res >= kResidualTol; ++it) {
    if (res < 1e-6) {
      const Complex s = atom_sum(w, h);
      const Complex g = w * (z - rho * s) + 1.0;
      const Complex dg = z - rho * s - rho * w * atom_sum_derivative(w, h);
      if (std::abs(dg) > 0.0) {
        const Complex step = w - g / dg;
        if (step.imag() > 0.0 && std::abs(mp_residual(step, z, rho, h)) < res) {
          w = step;
          res = std::abs(mp_residual(w, z, rho, h));
          continue;
        }
      }
    }
    const Complex next = -1.0 / (z - rho * atom_sum(w, h));
    w = (1.0 - kDamping) * w + kDamping * next;
    if (w.imag() < kMinImag) w.imag(kMinImag);
    res = std::abs(mp_residual(w, z, rho, h));
  }
  if (!(res < kResidualTol) || !(w.imag() > 0.0)) {
    std::ostringstream msg;
    msg << "mp_stieltjes_solve: no convergence after " << it << " iterations at z = " << z
        << " (residual " << res << ")";
    throw NumericalError(msg.str());
  }
  return w;
}

double kolmogorov_distance(const SpectralDistribution& d1, const SpectralDistribution& d2) {
  if (d1.empty() || d2.empty()) throw DomainError("kolmogorov_distance: empty distribution");
  const auto a = d1.values();
  const auto b = d2.values();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  // Both CDFs are right-continuous step functions; the supremum is attained at
  // some grid point, evaluated after absorbing every tie at that point.
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      x = a[i];
    else
      x = b[j];
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double kolmogorov_to_mp(const SpectralDistribution& d, const MPParams& mp) {
  if (d.empty()) throw DomainError("kolmogorov_to_mp: empty distribution");
  const auto v = d.values();
  const double n = static_cast<double>(v.size());
  double best = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t k = i;
    while (k < v.size() && v[k] == v[i]) ++k;
    const double f = mp_cdf(v[i], mp);
    best = std::max({best, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(k) / n - f)});
    i = k;
  }
  return best;
}

WeylResult weyl_check(const SymMatrix& m, const SymMatrix& k) {
  check_same_order(m, k, "weyl_check");
  WeylResult r;
  if (m.order() == 0) return r;
  const SpectralDistribution lm = eigvals_sym(m);
  const SpectralDistribution lk = eigvals_sym(k);
  for (std::size_t i = 0; i < lm.size(); ++i) r.max_gap = std::max(r.max_gap, std::abs(lm.values()[i] - lk.values()[i]));
  r.op_norm_diff = operator_norm((m - k).dense());
  return r;
}

LidskiiResult lidskii_check(const SymMatrix& m, const SymMatrix& k) {
  check_same_order(m, k, "lidskii_check");
  LidskiiResult r;
  if (m.order() > 0) {
    const SpectralDistribution lm = eigvals_sym(m);
    const SpectralDistribution lk = eigvals_sym(k);
    for (std::size_t i = 0; i < lm.size(); ++i) {
      const double g = lm.values()[i] - lk.values()[i];
      r.lhs += g * g;
    }
    r.rhs = (m.dense() - k.dense()).squaredNorm();
  }
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-8);
  return r;
}

double principal_angle(const SymMatrix& m, const SymMatrix& k, std::size_t j) {
  check_same_order(m, k, "principal_angle");
  const std::size_t n = k.order();
  if (j >= n) throw ParameterError("principal_angle: index out of range");
  const SymEigen ek = sym_eigen(k.dense(), true);
  const SymEigen em = sym_eigen(m.dense(), true);
  const auto pos = static_cast<Eigen::Index>(n - 1 - j);  // ascending storage
  const double norm = std::max(std::abs(ek.values(0)), std::abs(ek.values(static_cast<Eigen::Index>(n - 1))));
  const double tol = 1e-6 * norm;
  const double lam = ek.values(pos);
  if ((pos > 0 && lam - ek.values(pos - 1) <= tol) ||
      (pos + 1 < static_cast<Eigen::Index>(n) && ek.values(pos + 1) - lam <= tol)) {
    std::ostringstream msg;
    msg << "principal_angle: eigenvalue " << j << " of K (" << lam << ") is not separated from its neighbours";
    throw GapError(msg.str());
  }
  const double c = std::abs(em.vectors.col(pos).dot(ek.vectors.col(pos)));
  return std::acos(std::clamp(c, 0.0, 1.0));
}

}  // namespace kernelrmt
