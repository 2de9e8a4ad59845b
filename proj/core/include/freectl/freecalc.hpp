#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "freectl/matrix_tuple.hpp"
#include "freectl/ncpoly.hpp"
#include "freectl/rng.hpp"
#include "freectl/stats.hpp"

/// Calculus of cylindrical test functions U(X) = g(tau(phi_1(X)), ..., tau(phi_m(X))).
namespace freectl::freecalc {

/// Outer function g : R^m -> R from a small family that is linear in its
/// coefficients, so time-dependent coefficients differentiate termwise.
class OuterFunction {
 public:
  enum class Family { linear, quadratic, polynomial };

  struct Monomial {
    std::vector<int> powers;
    double coef = 0.0;
  };

  /// g(v) = c0 + w.v
  static OuterFunction linear(RealVector weights, double constant = 0.0);
  /// g(v) = c0 + w.v + v^T Q v, Q symmetric.
  static OuterFunction quadratic(RealMatrix q, RealVector weights, double constant = 0.0);
  /// g(v) = sum_k coef_k prod_o v_o^{powers_k[o]}
  static OuterFunction polynomial(std::size_t arity, std::vector<Monomial> terms);

  Family family() const { return family_; }
  std::size_t arity() const { return arity_; }

  double value(const RealVector& v) const;
  RealVector gradient(const RealVector& v) const;
  RealMatrix hessian(const RealVector& v) const;

  /// Flattened coefficient vector: [c0, w, vec(Q)] or the monomial coefficients.
  RealVector coefficients() const;
  OuterFunction with_coefficients(const RealVector& c) const;

  double constant() const { return constant_; }
  const RealVector& weights() const { return weights_; }
  const RealMatrix& quadratic_form() const { return quad_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }

 private:
  Family family_ = Family::linear;
  std::size_t arity_ = 0;
  double constant_ = 0.0;
  RealVector weights_;
  RealMatrix quad_;
  std::vector<Monomial> monomials_;
};

/// U(X) = g(tau(phi_1(psi X)), ..., tau(phi_m(psi X))) where psi is either the
/// identity or arctan applied to each component.
///
/// The cyclic gradients D_j phi_o and second derivatives d_i D_j phi_o are
/// computed once at construction and shared between copies.
class CylinderFunction {
 public:
  CylinderFunction(std::vector<ncpoly::NCPolynomial> inner, OuterFunction outer, bool arctan_inner = false);

  /// U(X) = tau(p(X)).
  static CylinderFunction trace_of(const ncpoly::NCPolynomial& p);

  int letters() const { return tables_->letters; }
  std::size_t arity() const { return tables_->inner.size(); }
  bool arctan_inner() const { return tables_->arctan; }
  const OuterFunction& outer() const { return outer_; }
  const ncpoly::NCPolynomial& inner(std::size_t o) const { return tables_->inner[o]; }
  /// D_j phi_o.
  const ncpoly::NCPolynomial& cyclic(std::size_t o, std::size_t j) const;
  /// d_{x_i} D_{x_j} phi_o.
  const ncpoly::TensorPolynomial& second(std::size_t o, std::size_t i, std::size_t j) const;

  CylinderFunction with_outer(OuterFunction outer) const;

  /// sum_j D_j phi_o: tau of it is the derivative of tau(phi_o) along 1.
  const ncpoly::NCPolynomial& shift_first(std::size_t o) const { return tables_->shift1.at(o); }
  /// Second derivative of phi_o along 1, as a polynomial.
  const ncpoly::NCPolynomial& shift_second(std::size_t o) const { return tables_->shift2.at(o); }
  /// sum_l D_l phi_o D_l phi_q.
  const ncpoly::NCPolynomial& gradient_product(std::size_t o, std::size_t q) const { return tables_->products.at(o).at(q); }

  /// Real parts of tau(phi_o(psi X)).
  RealVector inner_values(const MatrixTuple& x) const;
  /// Same, reusing the evaluator's cached words (polynomial inner functions only).
  RealVector inner_values(ncpoly::WordEvaluator& ev) const;
  double value(const MatrixTuple& x) const;

 private:
  struct Tables {
    int letters = 0;
    bool arctan = false;
    std::vector<ncpoly::NCPolynomial> inner;
    std::vector<std::vector<ncpoly::NCPolynomial>> cyclic;                 // [o][j]
    std::vector<std::vector<std::vector<ncpoly::TensorPolynomial>>> second;  // [o][i][j]
    std::vector<ncpoly::NCPolynomial> shift1, shift2;                      // [o]
    std::vector<std::vector<ncpoly::NCPolynomial>> products;                // [o][q]
  };
  std::shared_ptr<const Tables> tables_;
  OuterFunction outer_;
};

/// Gradient in L^2: component j is sum_o g_o D_j phi_o(X).
MatrixTuple grad(const CylinderFunction& u, const MatrixTuple& x);
/// Gradient at the evaluator's point; polynomial inner functions only.
MatrixTuple grad(const CylinderFunction& u, ncpoly::WordEvaluator& ev);

/// Hess U(X)[A, B]: the outer-Hessian tensor term plus the
/// free-difference-quotient term.
double hess_apply(const CylinderFunction& u, const MatrixTuple& x, const MatrixTuple& a, const MatrixTuple& b);
double hess_apply(const CylinderFunction& u, ncpoly::WordEvaluator& ev, const MatrixTuple& a, const MatrixTuple& b);

/// Hess U(X)[1, 1].
double common_laplacian(const CylinderFunction& u, const MatrixTuple& x);
double common_laplacian(const CylinderFunction& u, ncpoly::WordEvaluator& ev);

/// sum_i (tau (x) tau)(d_i (grad U)^i (X)). Polynomial inner functions only.
double free_laplacian(const CylinderFunction& u, const MatrixTuple& x);
double free_laplacian(const CylinderFunction& u, ncpoly::WordEvaluator& ev);

/// Monte Carlo estimate of sum_l Hess U(X)[S^l e^l, S^l e^l] over GUE(n)
/// proxies S.
Estimate free_laplacian_mc(const CylinderFunction& u, const MatrixTuple& x, std::size_t samples, Stream& stream);

/// E[free_laplacian_mc] - free_laplacian at finite n. Only the outer-Hessian
/// term contributes: sum_{o,q} g_oq sum_l tr_n(D_l phi_o D_l phi_q) / n^2.
double free_laplacian_mc_bias(const CylinderFunction& u, const MatrixTuple& x);
double free_laplacian_mc_bias(const CylinderFunction& u, ncpoly::WordEvaluator& ev);

/// arctan of a Hermitian matrix by functional calculus.
Matrix arctan_apply(const Matrix& x);
/// Directional derivative of arctan at X along A, by 64-point Gauss-Legendre
/// quadrature of 1/2 [(1+itX)^{-1} A (1+itX)^{-1} + (1-itX)^{-1} A (1-itX)^{-1}].
Matrix arctan_diff_apply(const Matrix& x, const Matrix& a);

// ---------------------------------------------------------------- time dependence

/// A cylinder function whose outer coefficients vary in time. Coefficients
/// and their time derivatives are given on a grid and joined by cubic Hermite
/// interpolation; d/dt U is the derivative of that interpolant.
class TimeDependentCylinder {
 public:
  TimeDependentCylinder(CylinderFunction prototype, std::vector<double> grid, std::vector<RealVector> coefficients,
                        std::vector<RealVector> coefficient_derivatives);
  static TimeDependentCylinder constant(CylinderFunction u, double t_begin = 0.0, double t_end = 1.0);

  double t_begin() const { return grid_.front(); }
  double t_end() const { return grid_.back(); }
  int letters() const { return prototype_.letters(); }

  CylinderFunction at(double t) const;
  double value(double t, const MatrixTuple& x) const;
  double time_derivative(double t, const MatrixTuple& x) const;
  /// d/dt U given the inner values at X, to share them with other terms.
  double time_derivative(double t, const RealVector& inner_values) const;

 private:
  std::pair<RealVector, RealVector> interpolate(double t) const;

  CylinderFunction prototype_;
  std::vector<double> grid_;
  std::vector<RealVector> coef_;
  std::vector<RealVector> dcoef_;
};

// ---------------------------------------------------------------- Hamiltonians

enum class HamiltonianKind { quadratic_with_potential, eikonal_l2, eikonal_l1, commutator_quadratic };

/// Control problem data behind a Hamiltonian: drift, Lagrangian and
/// admissible set are fixed by the kind.
///   quadratic_with_potential: b = alpha, L = |alpha|^2/2 + phi(X)
///   eikonal_l2:               b = alpha, L = 0, |alpha|_2 <= 1
///   eikonal_l1:               b = alpha, L = 0, max_j |alpha_j|_op <= 1
///   commutator_quadratic:     b = i[X, alpha], L = |alpha|^2/2
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::quadratic_with_potential;
  std::optional<CylinderFunction> potential;
};

double hamiltonian(const HamiltonianSpec& spec, const MatrixTuple& x, const MatrixTuple& p);
/// Closed-form maximizer of <b(X, alpha), P> - L(X, alpha).
MatrixTuple hamiltonian_maximizer(const HamiltonianSpec& spec, const MatrixTuple& x, const MatrixTuple& p);
MatrixTuple control_drift(HamiltonianKind kind, const MatrixTuple& x, const MatrixTuple& alpha);
double lagrangian(const HamiltonianSpec& spec, const MatrixTuple& x, const MatrixTuple& alpha);
bool admissible(HamiltonianKind kind, const MatrixTuple& alpha, double tol = 1e-12);

/// Componentwise i [X_j, A_j].
MatrixTuple commutator_drift(const MatrixTuple& x, const MatrixTuple& alpha);

}  // namespace freectl::freecalc
