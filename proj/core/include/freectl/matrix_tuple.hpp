#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace freectl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Normalized trace tr_n(A) = Tr(A) / n.
inline Complex normalized_trace(const Matrix& a) { return a.trace() / static_cast<double>(a.rows()); }

/// tr_n(A B) without forming the product.
inline Complex normalized_trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum() / static_cast<double>(a.rows());
}

/// Re tr_n(A* B), the real Hilbert-Schmidt pairing used throughout.
inline double hs_inner(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real() / static_cast<double>(a.rows());
}

inline Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

/// A d-tuple of n x n complex matrices, usually self-adjoint.
///
/// Arithmetic is componentwise. The inner product is
/// <A, B> = sum_j Re tr_n(A_j^* B_j), so ||1||^2 = d.
class MatrixTuple {
 public:
  MatrixTuple() = default;
  MatrixTuple(std::size_t n, std::size_t d);
  explicit MatrixTuple(std::vector<Matrix> components);

  static MatrixTuple zeros(std::size_t n, std::size_t d) { return MatrixTuple(n, d); }
  /// Identity in every component.
  static MatrixTuple identity(std::size_t n, std::size_t d);
  /// Identity in component l, zero elsewhere.
  static MatrixTuple unit(std::size_t n, std::size_t d, std::size_t l);

  std::size_t size() const { return n_; }
  std::size_t letters() const { return components_.size(); }
  bool empty() const { return components_.empty(); }

  const Matrix& operator[](std::size_t j) const { return components_[j]; }
  Matrix& operator[](std::size_t j) { return components_[j]; }
  const std::vector<Matrix>& components() const { return components_; }

  bool is_hermitian(double tol = 1e-12) const;
  void symmetrize();
  bool all_finite() const;

  /// max_j spectral radius of X_j (components assumed Hermitian).
  double operator_norm() const;
  double norm() const;
  double squared_norm() const;
  double inner(const MatrixTuple& other) const;

  MatrixTuple& operator+=(const MatrixTuple& other);
  MatrixTuple& operator-=(const MatrixTuple& other);
  MatrixTuple& operator*=(double s);

  friend MatrixTuple operator+(MatrixTuple a, const MatrixTuple& b) { return a += b; }
  friend MatrixTuple operator-(MatrixTuple a, const MatrixTuple& b) { return a -= b; }
  friend MatrixTuple operator*(MatrixTuple a, double s) { return a *= s; }
  friend MatrixTuple operator*(double s, MatrixTuple a) { return a *= s; }
  friend MatrixTuple operator-(MatrixTuple a) { return a *= -1.0; }

  bool same_shape(const MatrixTuple& other) const {
    return n_ == other.n_ && letters() == other.letters();
  }

 private:
  std::size_t n_ = 0;
  std::vector<Matrix> components_;
};

void require_same_shape(const MatrixTuple& a, const MatrixTuple& b, const char* where);

}  // namespace freectl
