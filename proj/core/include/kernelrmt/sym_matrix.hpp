#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "kernelrmt/errors.hpp"

namespace kernelrmt {

/// Dense real symmetric matrix. Both triangles are stored and kept bitwise
/// equal: every mutator writes the mirrored entry as well.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : a_(Eigen::MatrixXd::Zero(idx(n), idx(n))) {}

  static SymMatrix zeros(std::size_t n) { return SymMatrix(n); }
  static SymMatrix identity(std::size_t n) {
    SymMatrix s(n);
    s.a_.diagonal().setOnes();
    return s;
  }
  static SymMatrix constant(std::size_t n, double c) {
    SymMatrix s;
    s.a_ = Eigen::MatrixXd::Constant(idx(n), idx(n), c);
    return s;
  }

  /// Takes the upper triangle of `m` and mirrors it.
  static SymMatrix from_upper(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionError("SymMatrix::from_upper: matrix is not square");
    SymMatrix s;
    s.a_ = m;
    s.mirror_upper();
    return s;
  }

  /// Requires `m` to be exactly symmetric.
  static SymMatrix from_symmetric(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionError("SymMatrix::from_symmetric: matrix is not square");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = j + 1; i < m.rows(); ++i)
        if (m(i, j) != m(j, i))
          throw ParameterError("SymMatrix::from_symmetric: matrix is not symmetric");
    SymMatrix s;
    s.a_ = m;
    return s;
  }

  std::size_t order() const noexcept { return static_cast<std::size_t>(a_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return a_(idx(i), idx(j)); }

  void set(std::size_t i, std::size_t j, double v) {
    a_(idx(i), idx(j)) = v;
    a_(idx(j), idx(i)) = v;
  }

  const Eigen::MatrixXd& dense() const noexcept { return a_; }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    a_ += o.a_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    a_ -= o.a_;
    return *this;
  }
  SymMatrix& operator*=(double c) {
    a_ *= c;
    return *this;
  }
  /// Adds c to every diagonal entry.
  SymMatrix& shift(double c) {
    a_.diagonal().array() += c;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

  /// Entrywise (Hadamard) product.
  friend SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b) {
    a.check_same(b);
    SymMatrix s;
    s.a_ = a.a_.cwiseProduct(b.a_);
    return s;
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  void mirror_upper() {
    for (Eigen::Index j = 0; j < a_.cols(); ++j)
      for (Eigen::Index i = j + 1; i < a_.rows(); ++i) a_(i, j) = a_(j, i);
  }

  void check_same(const SymMatrix& o) const {
    if (o.order() != order()) throw DimensionError("SymMatrix: order mismatch");
  }

  Eigen::MatrixXd a_;
};

}  // namespace kernelrmt
