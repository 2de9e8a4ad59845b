#include "freectl/matrix_tuple.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "freectl/error.hpp"

namespace freectl {

MatrixTuple::MatrixTuple(std::size_t n, std::size_t d)
    : n_(n), components_(d, Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))) {}

MatrixTuple::MatrixTuple(std::vector<Matrix> components) : components_(std::move(components)) {
  if (components_.empty()) return;
  n_ = static_cast<std::size_t>(components_.front().rows());
  for (const auto& c : components_) {
    FREECTL_REQUIRE_DIMS(c.rows() == c.cols() && static_cast<std::size_t>(c.rows()) == n_,
                         "MatrixTuple: components must be square of equal size");
  }
}

MatrixTuple MatrixTuple::identity(std::size_t n, std::size_t d) {
  MatrixTuple out(n, d);
  for (auto& c : out.components_) c.setIdentity();
  return out;
}

MatrixTuple MatrixTuple::unit(std::size_t n, std::size_t d, std::size_t l) {
  FREECTL_REQUIRE_DIMS(l < d, "MatrixTuple::unit: component index out of range");
  MatrixTuple out(n, d);
  out.components_[l].setIdentity();
  return out;
}

bool MatrixTuple::is_hermitian(double tol) const {
  return std::all_of(components_.begin(), components_.end(), [tol](const Matrix& c) {
    return (c - c.adjoint()).cwiseAbs().maxCoeff() <= tol;
  });
}

void MatrixTuple::symmetrize() {
  for (auto& c : components_) c = hermitian_part(c);
}

bool MatrixTuple::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const Matrix& c) { return c.allFinite(); });
}

double MatrixTuple::operator_norm() const {
  double best = 0.0;
  for (const auto& c : components_) {
    if (c.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return best;
}

double MatrixTuple::squared_norm() const { return inner(*this); }

double MatrixTuple::norm() const { return std::sqrt(std::max(0.0, squared_norm())); }

double MatrixTuple::inner(const MatrixTuple& other) const {
  require_same_shape(*this, other, "MatrixTuple::inner");
  double s = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) s += hs_inner(components_[j], other.components_[j]);
  return s;
}

MatrixTuple& MatrixTuple::operator+=(const MatrixTuple& other) {
  require_same_shape(*this, other, "MatrixTuple::operator+=");
  for (std::size_t j = 0; j < components_.size(); ++j) components_[j] += other.components_[j];
  return *this;
}

MatrixTuple& MatrixTuple::operator-=(const MatrixTuple& other) {
  require_same_shape(*this, other, "MatrixTuple::operator-=");
  for (std::size_t j = 0; j < components_.size(); ++j) components_[j] -= other.components_[j];
  return *this;
}

MatrixTuple& MatrixTuple::operator*=(double s) {
  for (auto& c : components_) c *= s;
  return *this;
}

void require_same_shape(const MatrixTuple& a, const MatrixTuple& b, const char* where) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(where) + ": shape mismatch (n=" + std::to_string(a.size()) +
                         ", d=" + std::to_string(a.letters()) + " vs n=" + std::to_string(b.size()) +
                         ", d=" + std::to_string(b.letters()) + ")");
  }
}

}  // namespace freectl
