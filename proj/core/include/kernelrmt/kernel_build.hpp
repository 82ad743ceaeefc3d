#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "kernelrmt/data_models.hpp"
#include "kernelrmt/sym_matrix.hpp"

namespace kernelrmt {

/// Value and first three derivatives of a scalar kernel at a point.
struct KernelDerivatives {
  double f = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Scalar kernel function f.
///
///   linear(a, b)   f(x) = a x + b
///   gaussian(g)    f(x) = exp(-g x), exponent clamped at 700 against overflow
///   power(a)       f(x) = (1 + x)^a
///   tanh(a, b)     f(x) = tanh(a + b x)
///   custom(fn)     derivatives by central differences
class KernelSpec {
 public:
  enum class Kind { linear, gaussian, power, tanh, custom };

  static KernelSpec linear(double a, double b);
  static KernelSpec gaussian(double gamma);
  static KernelSpec power(double a);
  static KernelSpec tanh(double a, double b);
  static KernelSpec custom(std::function<double(double)> fn, std::string name = "custom");

  Kind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::string name() const;

  double eval(double x) const;
  double d1(double x) const { return derivatives_at(x).d1; }
  double d2(double x) const { return derivatives_at(x).d2; }
  double d3(double x) const { return derivatives_at(x).d3; }

  /// Analytic for built-in kinds. Custom kernels use central differences with
  /// step eps^{1/3} max(1,|x|) for f'; f'' and f''' use eps^{1/4} and eps^{1/5}.
  /// Throws EvaluationError when any returned value is non-finite.
  KernelDerivatives derivatives_at(double x) const;

  /// The same kernel shifted by a constant, f + c.
  KernelSpec plus_constant(double c) const;

 private:
  KernelSpec() = default;
  KernelDerivatives analytic(double x) const;
  KernelDerivatives finite_difference(double x) const;

  Kind kind_ = Kind::linear;
  double a_ = 0.0;
  double b_ = 0.0;
  double shift_ = 0.0;
  std::function<double(double)> fn_;
  std::string custom_name_;
};

/// Same as `k.derivatives_at(x)`.
KernelDerivatives kernel_derivatives_at(const KernelSpec& k, double x);

/// X X' / p with exactly mirrored triangles.
SymMatrix inner_products(const DataMatrix& x);

/// ||X_i - X_j||^2 / p computed from the row differences; diagonal is exactly 0.
SymMatrix scaled_sq_distances(const DataMatrix& x);

/// M_{ij} = f(X_i'X_j / p), diagonal included. Throws EvaluationError naming
/// the first non-finite entry.
SymMatrix build_inner_kernel(const DataMatrix& x, const KernelSpec& k);

/// M_{ij} = f(||X_i - X_j||^2 / p); diagonal is f(0).
SymMatrix build_distance_kernel(const DataMatrix& x, const KernelSpec& k);

/// H^a M H^b with H = Id - 11'/n, a = left, b = right.
Eigen::MatrixXd center(const Eigen::MatrixXd& m, bool left, bool right);

/// H M H; symmetric by construction.
SymMatrix center_both(const SymMatrix& m);

/// L_{ij} = -M_{ij}/n off the diagonal, L_{ii} = (1/n) sum_{j != i} M_{ij}.
SymMatrix laplacian_like(const SymMatrix& m);

}  // namespace kernelrmt
