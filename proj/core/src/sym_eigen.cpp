#include "kernelrmt/sym_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "kernelrmt/errors.hpp"

namespace kernelrmt {
namespace {

constexpr int kMaxSweeps = 50;

struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;  // sub(i) couples i and i+1; sub(n-1) == 0
  Eigen::MatrixXd q;    // accumulated reflectors, empty unless requested
};

// Householder reduction A = Q T Q'. Works column by column on the lower
// triangle; the trailing block update is a symmetric rank-2 update.
Tridiagonal tridiagonalize(Eigen::MatrixXd a, bool accumulate) {
  const Eigen::Index n = a.rows();
  Tridiagonal t;
  t.diag.resize(n);
  t.sub = Eigen::VectorXd::Zero(n);

  std::vector<Eigen::VectorXd> reflectors;
  std::vector<double> betas;
  if (accumulate) {
    reflectors.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(n - 2, 0)));
    betas.reserve(reflectors.capacity());
  }

  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    Eigen::VectorXd v = a.col(k).tail(m);
    const double tail_norm2 = v.tail(m - 1).squaredNorm();
    double beta = 0.0;
    if (tail_norm2 == 0.0) {
      t.sub(k) = v(0);
    } else {
      const double x0 = v(0);
      const double norm = std::sqrt(x0 * x0 + tail_norm2);
      const double alpha = x0 > 0.0 ? -norm : norm;
      v(0) = x0 - alpha;
      beta = 2.0 / v.squaredNorm();

      auto block = a.bottomRightCorner(m, m);
      Eigen::VectorXd p = beta * (block.selfadjointView<Eigen::Lower>() * v);
      const double kappa = 0.5 * beta * v.dot(p);
      p -= kappa * v;
      block.selfadjointView<Eigen::Lower>().rankUpdate(v, p, -1.0);
      t.sub(k) = alpha;
    }
    t.diag(k) = a(k, k);
    if (accumulate) {
      reflectors.push_back(std::move(v));
      betas.push_back(beta);
    }
  }
  if (n >= 2) {
    t.diag(n - 2) = a(n - 2, n - 2);
    t.sub(n - 2) = a(n - 1, n - 2);
  }
  if (n >= 1) t.diag(n - 1) = a(n - 1, n - 1);

  if (accumulate) {
    t.q = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = static_cast<Eigen::Index>(reflectors.size()) - 1; k >= 0; --k) {
      const auto ku = static_cast<std::size_t>(k);
      if (betas[ku] == 0.0) continue;
      const Eigen::Index m = n - k - 1;
      const Eigen::VectorXd& v = reflectors[ku];
      auto block = t.q.bottomRightCorner(m, m);
      Eigen::RowVectorXd vtq = v.transpose() * block;
      block.noalias() -= (betas[ku] * v) * vtq;
    }
  }
  return t;
}

// Implicit-shift QL on the tridiagonal (d, e). Rotations are applied to the
// columns of z when z is non-empty.
void tridiagonal_ql(Eigen::VectorXd& d, Eigen::VectorXd& e, Eigen::MatrixXd* z) {
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(d(i)) + (i + 1 < n ? std::abs(e(i)) : 0.0));
  const double floor = eps * scale;
  for (int l = 0; l < n; ++l) {
    int sweeps = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd || std::abs(e(m)) <= floor) break;
      }
      if (m == l) break;
      if (++sweeps > kMaxSweeps) {
        std::ostringstream msg;
        msg << "sym_eigen: QL iteration did not converge for eigenvalue " << l << " of " << n
            << " after " << kMaxSweeps << " sweeps (|e| = " << std::abs(e(l))
            << ", |d| = " << std::abs(d(l)) << ")";
        throw NumericalError(msg.str());
      }
      double g = (d(l + 1) - d(l)) / (2.0 * e(l));
      double r = std::hypot(g, 1.0);
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      int i = m - 1;
      for (; i >= l; --i) {
        double f = s * e(i);
        const double b = c * e(i);
        r = std::hypot(f, g);
        e(i + 1) = r;
        if (r == 0.0) {
          d(i + 1) -= p;
          e(m) = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + 2.0 * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
        if (z != nullptr) {
          auto zi = z->col(i);
          auto zi1 = z->col(i + 1);
          for (Eigen::Index k = 0; k < z->rows(); ++k) {
            f = zi1(k);
            zi1(k) = s * zi(k) + c * f;
            zi(k) = c * zi(k) - s * f;
          }
        }
      }
      if (r == 0.0 && i >= l) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = 0.0;
    } while (m != l);
  }
}

}  // namespace

SymEigen sym_eigen(const Eigen::MatrixXd& a, bool want_vectors) {
  if (a.rows() != a.cols()) throw ParameterError("sym_eigen: matrix is not square");
  if (!a.allFinite()) throw ParameterError("sym_eigen: matrix has non-finite entries");
  const Eigen::Index n = a.rows();
  SymEigen out;
  if (n == 0) return out;

  Tridiagonal t = tridiagonalize(a, want_vectors);
  Eigen::VectorXd d = std::move(t.diag);
  Eigen::VectorXd e = std::move(t.sub);
  tridiagonal_ql(d, e, want_vectors ? &t.q : nullptr);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return d(x) < d(y); });

  out.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) out.values(k) = d(order[static_cast<std::size_t>(k)]);
  if (want_vectors) {
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) out.vectors.col(k) = t.q.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace kernelrmt
