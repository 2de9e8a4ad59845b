#include "freectl/freecalc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "freectl/error.hpp"
#include "freectl/randmat.hpp"

namespace freectl::freecalc {

using ncpoly::NCPolynomial;
using ncpoly::TensorPolynomial;
using ncpoly::WordEvaluator;

// ---------------------------------------------------------------- OuterFunction

OuterFunction OuterFunction::linear(RealVector weights, double constant) {
  OuterFunction g;
  g.family_ = Family::linear;
  g.arity_ = static_cast<std::size_t>(weights.size());
  g.weights_ = std::move(weights);
  g.constant_ = constant;
  g.quad_ = RealMatrix::Zero(g.weights_.size(), g.weights_.size());
  return g;
}

OuterFunction OuterFunction::quadratic(RealMatrix q, RealVector weights, double constant) {
  FREECTL_REQUIRE_DIMS(q.rows() == q.cols() && q.rows() == weights.size(),
                       "OuterFunction::quadratic: Q must be m x m with m = size of w");
  OuterFunction g;
  g.family_ = Family::quadratic;
  g.arity_ = static_cast<std::size_t>(weights.size());
  g.weights_ = std::move(weights);
  g.quad_ = 0.5 * (q + q.transpose());
  g.constant_ = constant;
  return g;
}

OuterFunction OuterFunction::polynomial(std::size_t arity, std::vector<Monomial> terms) {
  for (const auto& t : terms) {
    FREECTL_REQUIRE_DIMS(t.powers.size() == arity, "OuterFunction::polynomial: power vector has wrong length");
    for (int p : t.powers)
      if (p < 0) throw DimensionError("OuterFunction::polynomial: negative power");
  }
  OuterFunction g;
  g.family_ = Family::polynomial;
  g.arity_ = arity;
  g.monomials_ = std::move(terms);
  return g;
}

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

// d^{(a,b)} of prod_o v_o^{p_o}; a, b < 0 means no derivative in that slot.
double monomial_derivative(const std::vector<int>& powers, const RealVector& v, int a, int b) {
  std::vector<int> p = powers;
  double c = 1.0;
  for (int s : {a, b}) {
    if (s < 0) continue;
    if (p[s] == 0) return 0.0;
    c *= p[s];
    --p[s];
  }
  for (std::size_t o = 0; o < p.size(); ++o) c *= ipow(v[static_cast<Eigen::Index>(o)], p[o]);
  return c;
}

}  // namespace

double OuterFunction::value(const RealVector& v) const {
  FREECTL_REQUIRE_DIMS(static_cast<std::size_t>(v.size()) == arity_, "OuterFunction::value: wrong arity");
  if (family_ == Family::polynomial) {
    double s = 0.0;
    for (const auto& t : monomials_) s += t.coef * monomial_derivative(t.powers, v, -1, -1);
    return s;
  }
  return constant_ + weights_.dot(v) + v.dot(quad_ * v);
}

RealVector OuterFunction::gradient(const RealVector& v) const {
  FREECTL_REQUIRE_DIMS(static_cast<std::size_t>(v.size()) == arity_, "OuterFunction::gradient: wrong arity");
  if (family_ == Family::polynomial) {
    RealVector g = RealVector::Zero(v.size());
    for (const auto& t : monomials_)
      for (std::size_t o = 0; o < arity_; ++o)
        g[static_cast<Eigen::Index>(o)] += t.coef * monomial_derivative(t.powers, v, static_cast<int>(o), -1);
    return g;
  }
  return weights_ + 2.0 * quad_ * v;
}

RealMatrix OuterFunction::hessian(const RealVector& v) const {
  FREECTL_REQUIRE_DIMS(static_cast<std::size_t>(v.size()) == arity_, "OuterFunction::hessian: wrong arity");
  if (family_ == Family::polynomial) {
    RealMatrix h = RealMatrix::Zero(v.size(), v.size());
    for (const auto& t : monomials_)
      for (std::size_t o = 0; o < arity_; ++o)
        for (std::size_t q = 0; q < arity_; ++q)
          h(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(q)) +=
              t.coef * monomial_derivative(t.powers, v, static_cast<int>(o), static_cast<int>(q));
    return h;
  }
  return 2.0 * quad_;
}

RealVector OuterFunction::coefficients() const {
  if (family_ == Family::polynomial) {
    RealVector c(static_cast<Eigen::Index>(monomials_.size()));
    for (std::size_t k = 0; k < monomials_.size(); ++k) c[static_cast<Eigen::Index>(k)] = monomials_[k].coef;
    return c;
  }
  const auto m = static_cast<Eigen::Index>(arity_);
  const Eigen::Index len = family_ == Family::linear ? 1 + m : 1 + m + m * m;
  RealVector c(len);
  c[0] = constant_;
  c.segment(1, m) = weights_;
  if (family_ == Family::quadratic)
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) c[1 + m + i * m + j] = quad_(i, j);
  return c;
}

OuterFunction OuterFunction::with_coefficients(const RealVector& c) const {
  FREECTL_REQUIRE_DIMS(c.size() == coefficients().size(), "OuterFunction::with_coefficients: wrong length");
  OuterFunction g = *this;
  if (family_ == Family::polynomial) {
    for (std::size_t k = 0; k < g.monomials_.size(); ++k) g.monomials_[k].coef = c[static_cast<Eigen::Index>(k)];
    return g;
  }
  const auto m = static_cast<Eigen::Index>(arity_);
  g.constant_ = c[0];
  g.weights_ = c.segment(1, m);
  if (family_ == Family::quadratic) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) g.quad_(i, j) = c[1 + m + i * m + j];
    g.quad_ = 0.5 * (g.quad_ + g.quad_.transpose()).eval();
  }
  return g;
}

// ---------------------------------------------------------------- CylinderFunction

CylinderFunction::CylinderFunction(std::vector<NCPolynomial> inner, OuterFunction outer, bool arctan_inner)
    : outer_(std::move(outer)) {
  FREECTL_REQUIRE_DIMS(!inner.empty(), "CylinderFunction: needs at least one inner polynomial");
  FREECTL_REQUIRE_DIMS(inner.size() == outer_.arity(), "CylinderFunction: outer arity differs from inner count");
  auto t = std::make_shared<Tables>();
  t->letters = inner.front().dims();
  t->arctan = arctan_inner;
  for (const auto& p : inner) {
    FREECTL_REQUIRE_DIMS(p.dims() == t->letters, "CylinderFunction: inner polynomials disagree on letter count");
    if (!p.is_self_adjoint(1e-12)) throw DimensionError("CylinderFunction: inner polynomial is not self-adjoint");
  }
  const auto d = static_cast<std::size_t>(t->letters);
  t->cyclic.resize(inner.size());
  t->second.resize(inner.size());
  for (std::size_t o = 0; o < inner.size(); ++o) {
    t->second[o].resize(d);
    for (std::size_t j = 0; j < d; ++j) t->cyclic[o].push_back(ncpoly::cyclic_diff(inner[o], static_cast<int>(j)));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        t->second[o][i].push_back(ncpoly::free_diff(t->cyclic[o][j], static_cast<int>(i)));
    // Derivatives along the common direction 1: (a (x) b) # 1 = ab.
    NCPolynomial s1(t->letters), s2(t->letters);
    for (std::size_t j = 0; j < d; ++j) {
      s1 += t->cyclic[o][j];
      for (std::size_t i = 0; i < d; ++i)
        for (const auto& [k, c] : t->second[o][i][j].terms()) s2.add_term(k.first + k.second, c);
    }
    t->shift1.push_back(std::move(s1));
    t->shift2.push_back(std::move(s2));
  }
  t->products.resize(inner.size());
  for (std::size_t o = 0; o < inner.size(); ++o)
    for (std::size_t q = 0; q < inner.size(); ++q) {
      NCPolynomial pr(t->letters);
      for (std::size_t l = 0; l < d; ++l) pr += t->cyclic[o][l] * t->cyclic[q][l];
      t->products[o].push_back(std::move(pr));
    }
  t->inner = std::move(inner);
  tables_ = std::move(t);
}

CylinderFunction CylinderFunction::trace_of(const NCPolynomial& p) {
  return CylinderFunction({p}, OuterFunction::linear(RealVector::Ones(1)));
}

const NCPolynomial& CylinderFunction::cyclic(std::size_t o, std::size_t j) const { return tables_->cyclic.at(o).at(j); }

const TensorPolynomial& CylinderFunction::second(std::size_t o, std::size_t i, std::size_t j) const {
  return tables_->second.at(o).at(i).at(j);
}

CylinderFunction CylinderFunction::with_outer(OuterFunction outer) const {
  FREECTL_REQUIRE_DIMS(outer.arity() == arity(), "CylinderFunction::with_outer: arity mismatch");
  CylinderFunction u = *this;
  u.outer_ = std::move(outer);
  return u;
}

namespace {

void check_point(const CylinderFunction& u, const MatrixTuple& x, const char* where) {
  FREECTL_REQUIRE_DIMS(static_cast<int>(x.letters()) == u.letters(),
                       std::string(where) + ": tuple has " + std::to_string(x.letters()) + " letters, function has " +
                           std::to_string(u.letters()));
}

MatrixTuple apply_arctan(const MatrixTuple& x) {
  std::vector<Matrix> c;
  c.reserve(x.letters());
  for (const auto& m : x.components()) c.push_back(arctan_apply(m));
  return MatrixTuple(std::move(c));
}

RealVector inner_values_at(const CylinderFunction& u, WordEvaluator& ev) {
  RealVector v(static_cast<Eigen::Index>(u.arity()));
  for (std::size_t o = 0; o < u.arity(); ++o) v[static_cast<Eigen::Index>(o)] = ev.trace(u.inner(o)).real();
  return v;
}

}  // namespace

RealVector CylinderFunction::inner_values(const MatrixTuple& x) const {
  check_point(*this, x, "CylinderFunction::inner_values");
  if (arctan_inner()) {
    const MatrixTuple y = apply_arctan(x);
    WordEvaluator ev(y);
    return inner_values_at(*this, ev);
  }
  WordEvaluator ev(x);
  return inner_values_at(*this, ev);
}

RealVector CylinderFunction::inner_values(WordEvaluator& ev) const {
  if (arctan_inner()) throw UnsupportedError("CylinderFunction::inner_values: evaluator form needs polynomial inner functions");
  return inner_values_at(*this, ev);
}

double CylinderFunction::value(const MatrixTuple& x) const { return outer_.value(inner_values(x)); }

// ---------------------------------------------------------------- derivatives

MatrixTuple grad(const CylinderFunction& u, const MatrixTuple& x) {
  check_point(u, x, "grad");
  const MatrixTuple y = u.arctan_inner() ? apply_arctan(x) : x;
  WordEvaluator ev(y);
  const RealVector g = u.outer().gradient(inner_values_at(u, ev));
  MatrixTuple out(x.size(), x.letters());
  for (std::size_t j = 0; j < x.letters(); ++j) {
    Matrix acc = Matrix::Zero(y[j].rows(), y[j].cols());
    for (std::size_t o = 0; o < u.arity(); ++o) {
      const double go = g[static_cast<Eigen::Index>(o)];
      if (go != 0.0) acc += go * ev.evaluate(u.cyclic(o, j));
    }
    acc = hermitian_part(acc);
    out[j] = u.arctan_inner() ? hermitian_part(arctan_diff_apply(x[j], acc)) : acc;
  }
  return out;
}

MatrixTuple grad(const CylinderFunction& u, WordEvaluator& ev) {
  if (u.arctan_inner()) throw UnsupportedError("grad: evaluator form needs polynomial inner functions");
  const MatrixTuple& x = ev.point();
  check_point(u, x, "grad");
  const RealVector g = u.outer().gradient(inner_values_at(u, ev));
  MatrixTuple out(x.size(), x.letters());
  for (std::size_t j = 0; j < x.letters(); ++j) {
    Matrix acc = Matrix::Zero(x[j].rows(), x[j].cols());
    for (std::size_t o = 0; o < u.arity(); ++o) {
      const double go = g[static_cast<Eigen::Index>(o)];
      if (go != 0.0) acc += go * ev.evaluate(u.cyclic(o, j));
    }
    out[j] = hermitian_part(acc);
  }
  return out;
}

namespace {

bool is_zero_matrix(const Matrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

double hess_apply(const CylinderFunction& u, WordEvaluator& ev, const MatrixTuple& a, const MatrixTuple& b) {
  if (u.arctan_inner()) throw UnsupportedError("hess_apply: second derivatives of arctan compositions are not supported");
  const MatrixTuple& x = ev.point();
  check_point(u, x, "hess_apply");
  require_same_shape(x, a, "hess_apply");
  require_same_shape(x, b, "hess_apply");
  const std::size_t d = x.letters();
  const std::size_t m = u.arity();
  const RealVector v = inner_values_at(u, ev);
  const RealVector g = u.outer().gradient(v);
  const RealMatrix h = u.outer().hessian(v);

  std::vector<char> a_live(d), b_live(d);
  for (std::size_t j = 0; j < d; ++j) {
    a_live[j] = !is_zero_matrix(a[j]);
    b_live[j] = !is_zero_matrix(b[j]);
  }

  double total = 0.0;
  // Outer-Hessian term: sum_{oq} g_oq delta_o(A) delta_q(B).
  if (h.cwiseAbs().maxCoeff() > 0.0) {
    RealVector da = RealVector::Zero(static_cast<Eigen::Index>(m));
    RealVector db = RealVector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t o = 0; o < m; ++o)
      for (std::size_t j = 0; j < d; ++j) {
        if (!a_live[j] && !b_live[j]) continue;
        const Matrix& dj = ev.evaluate(u.cyclic(o, j));
        if (a_live[j]) da[static_cast<Eigen::Index>(o)] += hs_inner(dj, a[j]);
        if (b_live[j]) db[static_cast<Eigen::Index>(o)] += hs_inner(dj, b[j]);
      }
    total += da.dot(h * db);
  }
  // Free-difference-quotient term: sum_o g_o sum_ij <d_i D_j phi_o # A^i, B^j>.
  for (std::size_t o = 0; o < m; ++o) {
    const double go = g[static_cast<Eigen::Index>(o)];
    if (go == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      if (!a_live[i]) continue;
      for (std::size_t j = 0; j < d; ++j) {
        if (!b_live[j]) continue;
        const auto& t = u.second(o, i, j);
        if (t.is_zero()) continue;
        total += go * hs_inner(ev.contract(t, a[i]), b[j]);
      }
    }
  }
  return total;
}

double hess_apply(const CylinderFunction& u, const MatrixTuple& x, const MatrixTuple& a, const MatrixTuple& b) {
  check_point(u, x, "hess_apply");
  WordEvaluator ev(x);
  return hess_apply(u, ev, a, b);
}

double common_laplacian(const CylinderFunction& u, WordEvaluator& ev) {
  if (u.arctan_inner()) throw UnsupportedError("common_laplacian: not available for arctan-composed inner functions");
  check_point(u, ev.point(), "common_laplacian");
  // Hess[1, 1] = sum_oq g_oq tau(s1_o) tau(s1_q) + sum_o g_o tau(s2_o), all traces.
  const RealVector v = inner_values_at(u, ev);
  const RealVector g = u.outer().gradient(v);
  const RealMatrix h = u.outer().hessian(v);
  const auto m = static_cast<Eigen::Index>(u.arity());
  RealVector delta = RealVector::Zero(m);
  double total = 0.0;
  for (Eigen::Index o = 0; o < m; ++o) {
    const auto oo = static_cast<std::size_t>(o);
    if (h.row(o).cwiseAbs().maxCoeff() > 0.0) delta[o] = ev.trace(u.shift_first(oo)).real();
    if (g[o] != 0.0) total += g[o] * ev.trace(u.shift_second(oo)).real();
  }
  return total + delta.dot(h * delta);
}

double common_laplacian(const CylinderFunction& u, const MatrixTuple& x) {
  check_point(u, x, "common_laplacian");
  WordEvaluator ev(x);
  return common_laplacian(u, ev);
}

double free_laplacian(const CylinderFunction& u, WordEvaluator& ev) {
  if (u.arctan_inner()) throw UnsupportedError("free_laplacian: not available for arctan-composed inner functions");
  check_point(u, ev.point(), "free_laplacian");
  const RealVector g = u.outer().gradient(inner_values_at(u, ev));
  double total = 0.0;
  for (std::size_t o = 0; o < u.arity(); ++o) {
    const double go = g[static_cast<Eigen::Index>(o)];
    if (go == 0.0) continue;
    for (std::size_t i = 0; i < ev.point().letters(); ++i) total += go * ev.tensor_trace(u.second(o, i, i)).real();
  }
  return total;
}

double free_laplacian(const CylinderFunction& u, const MatrixTuple& x) {
  check_point(u, x, "free_laplacian");
  WordEvaluator ev(x);
  return free_laplacian(u, ev);
}

Estimate free_laplacian_mc(const CylinderFunction& u, const MatrixTuple& x, std::size_t samples, Stream& stream) {
  check_point(u, x, "free_laplacian_mc");
  WordEvaluator ev(x);
  std::vector<double> values(samples);
  const std::size_t n = x.size(), d = x.letters();
  for (std::size_t s = 0; s < samples; ++s) {
    const MatrixTuple sp = randmat::sample_free_semicircular_proxy(x, stream);
    double acc = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      MatrixTuple e = MatrixTuple::zeros(n, d);
      e[l] = sp[l];
      acc += hess_apply(u, ev, e, e);
    }
    values[s] = acc;
  }
  return estimate_mean(values);
}

double free_laplacian_mc_bias(const CylinderFunction& u, WordEvaluator& ev) {
  if (u.arctan_inner()) throw UnsupportedError("free_laplacian_mc_bias: not available for arctan-composed inner functions");
  check_point(u, ev.point(), "free_laplacian_mc_bias");
  const RealMatrix h = u.outer().hessian(inner_values_at(u, ev));
  const double n = static_cast<double>(ev.point().size());
  double total = 0.0;
  for (std::size_t o = 0; o < u.arity(); ++o)
    for (std::size_t q = 0; q < u.arity(); ++q) {
      const double hoq = h(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(q));
      if (hoq != 0.0) total += hoq * ev.trace(u.gradient_product(o, q)).real();
    }
  return total / (n * n);
}

double free_laplacian_mc_bias(const CylinderFunction& u, const MatrixTuple& x) {
  check_point(u, x, "free_laplacian_mc_bias");
  WordEvaluator ev(x);
  return free_laplacian_mc_bias(u, ev);
}

// ---------------------------------------------------------------- arctan

namespace {

struct Eigenbasis {
  RealVector values;
  Matrix vectors;
};

Eigenbasis eigenbasis(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(x));
  if (es.info() != Eigen::Success) throw NumericalError("arctan: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// 64-point Gauss-Legendre rule mapped to [0, 1].
struct UnitRule {
  std::array<double, 64> nodes{};
  std::array<double, 64> weights{};
  UnitRule() {
    using Rule = boost::math::quadrature::gauss<double, 64>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double s : {-1.0, 1.0}) {
        nodes[k] = 0.5 * (1.0 + s * x[i]);
        weights[k] = 0.5 * w[i];
        ++k;
      }
    }
  }
};

const UnitRule& unit_rule() {
  static const UnitRule rule;
  return rule;
}

}  // namespace

Matrix arctan_apply(const Matrix& x) {
  const Eigenbasis e = eigenbasis(x);
  const RealVector f = e.values.unaryExpr([](double l) { return std::atan(l); });
  return e.vectors * f.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

Matrix arctan_diff_apply(const Matrix& x, const Matrix& a) {
  FREECTL_REQUIRE_DIMS(x.rows() == a.rows() && x.cols() == a.cols(), "arctan_diff_apply: shape mismatch");
  const Eigenbasis e = eigenbasis(x);
  const Eigen::Index n = x.rows();
  const auto& rule = unit_rule();
  // In the eigenbasis both resolvents are diagonal, so the integral acts on
  // A entrywise with weight K_ij = int_0^1 Re[1 / ((1 + i t l_i)(1 + i t l_j))] dt.
  RealMatrix k = RealMatrix::Zero(n, n);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    Eigen::VectorXcd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = 1.0 / Complex(1.0, t * e.values[i]);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) k(i, j) += rule.weights[q] * (r[i] * r[j]).real();
  }
  const Matrix at = e.vectors.adjoint() * a * e.vectors;
  return e.vectors * at.cwiseProduct(k.cast<Complex>()) * e.vectors.adjoint();
}

// ---------------------------------------------------------------- TimeDependentCylinder

TimeDependentCylinder::TimeDependentCylinder(CylinderFunction prototype, std::vector<double> grid,
                                             std::vector<RealVector> coefficients,
                                             std::vector<RealVector> coefficient_derivatives)
    : prototype_(std::move(prototype)),
      grid_(std::move(grid)),
      coef_(std::move(coefficients)),
      dcoef_(std::move(coefficient_derivatives)) {
  FREECTL_REQUIRE_DIMS(grid_.size() >= 2, "TimeDependentCylinder: grid needs at least two nodes");
  FREECTL_REQUIRE_DIMS(coef_.size() == grid_.size() && dcoef_.size() == grid_.size(),
                       "TimeDependentCylinder: one coefficient vector per grid node");
  const auto len = prototype_.outer().coefficients().size();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    FREECTL_REQUIRE_DIMS(coef_[k].size() == len && dcoef_[k].size() == len,
                         "TimeDependentCylinder: coefficient vector has wrong length");
    if (k > 0 && !(grid_[k] > grid_[k - 1])) throw DimensionError("TimeDependentCylinder: grid must increase");
  }
}

TimeDependentCylinder TimeDependentCylinder::constant(CylinderFunction u, double t_begin, double t_end) {
  const RealVector c = u.outer().coefficients();
  const RealVector z = RealVector::Zero(c.size());
  return TimeDependentCylinder(std::move(u), {t_begin, t_end}, {c, c}, {z, z});
}

std::pair<RealVector, RealVector> TimeDependentCylinder::interpolate(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(grid_.back()));
  if (t < grid_.front() - tol || t > grid_.back() + tol)
    throw DimensionError("TimeDependentCylinder: time " + std::to_string(t) + " outside the grid");
  t = std::clamp(t, grid_.front(), grid_.back());
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - grid_.begin());
  k = std::clamp<std::size_t>(k, 1, grid_.size() - 1) - 1;
  const double h = grid_[k + 1] - grid_[k];
  const double s = (t - grid_[k]) / h;
  // Cubic Hermite basis and its derivative in s.
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
  RealVector c = h00 * coef_[k] + h10 * h * dcoef_[k] + h01 * coef_[k + 1] + h11 * h * dcoef_[k + 1];
  RealVector dc = (d00 * coef_[k] + d01 * coef_[k + 1]) / h + d10 * dcoef_[k] + d11 * dcoef_[k + 1];
  return {std::move(c), std::move(dc)};
}

CylinderFunction TimeDependentCylinder::at(double t) const {
  return prototype_.with_outer(prototype_.outer().with_coefficients(interpolate(t).first));
}

double TimeDependentCylinder::value(double t, const MatrixTuple& x) const { return at(t).value(x); }

double TimeDependentCylinder::time_derivative(double t, const MatrixTuple& x) const {
  // Every outer family is linear in its coefficients, so d/dt g_c(v) = g_{c'}(v).
  const RealVector dc = interpolate(t).second;
  return prototype_.outer().with_coefficients(dc).value(prototype_.inner_values(x));
}

double TimeDependentCylinder::time_derivative(double t, const RealVector& inner_values) const {
  return prototype_.outer().with_coefficients(interpolate(t).second).value(inner_values);
}

// ---------------------------------------------------------------- Hamiltonians

MatrixTuple commutator_drift(const MatrixTuple& x, const MatrixTuple& alpha) {
  require_same_shape(x, alpha, "commutator_drift");
  MatrixTuple out(x.size(), x.letters());
  const Complex i(0.0, 1.0);
  for (std::size_t j = 0; j < x.letters(); ++j) out[j] = i * (x[j] * alpha[j] - alpha[j] * x[j]);
  return out;
}

namespace {

double trace_abs(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(p), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("trace_abs: eigensolver failed");
  return es.eigenvalues().cwiseAbs().sum() / static_cast<double>(p.rows());
}

Matrix matrix_sign(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(p));
  if (es.info() != Eigen::Success) throw NumericalError("matrix_sign: eigensolver failed");
  const RealVector s = es.eigenvalues().unaryExpr([](double l) { return l > 0 ? 1.0 : (l < 0 ? -1.0 : 0.0); });
  return es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double potential_at(const HamiltonianSpec& spec, const MatrixTuple& x) {
  if (spec.kind != HamiltonianKind::quadratic_with_potential || !spec.potential) return 0.0;
  return spec.potential->value(x);
}

}  // namespace

double hamiltonian(const HamiltonianSpec& spec, const MatrixTuple& x, const MatrixTuple& p) {
  require_same_shape(x, p, "hamiltonian");
  switch (spec.kind) {
    case HamiltonianKind::quadratic_with_potential:
      return 0.5 * p.squared_norm() - potential_at(spec, x);
    case HamiltonianKind::eikonal_l2:
      return p.norm();
    case HamiltonianKind::eikonal_l1: {
      double s = 0.0;
      for (const auto& c : p.components()) s += trace_abs(c);
      return s;
    }
    case HamiltonianKind::commutator_quadratic: {
      double s = 0.0;
      for (std::size_t j = 0; j < x.letters(); ++j) {
        const Matrix c = p[j] * x[j] - x[j] * p[j];
        s += hs_inner(c, c);
      }
      return 0.5 * s;
    }
  }
  throw UnsupportedError("hamiltonian: unknown kind");
}

MatrixTuple hamiltonian_maximizer(const HamiltonianSpec& spec, const MatrixTuple& x, const MatrixTuple& p) {
  require_same_shape(x, p, "hamiltonian_maximizer");
  switch (spec.kind) {
    case HamiltonianKind::quadratic_with_potential:
      return p;
    case HamiltonianKind::eikonal_l2: {
      const double nrm = p.norm();
      return nrm > 0.0 ? p * (1.0 / nrm) : MatrixTuple::zeros(p.size(), p.letters());
    }
    case HamiltonianKind::eikonal_l1: {
      MatrixTuple a(p.size(), p.letters());
      for (std::size_t j = 0; j < p.letters(); ++j) a[j] = matrix_sign(p[j]);
      return a;
    }
    case HamiltonianKind::commutator_quadratic: {
      MatrixTuple a(p.size(), p.letters());
      const Complex i(0.0, 1.0);
      for (std::size_t j = 0; j < p.letters(); ++j) a[j] = i * (p[j] * x[j] - x[j] * p[j]);
      return a;
    }
  }
  throw UnsupportedError("hamiltonian_maximizer: unknown kind");
}

MatrixTuple control_drift(HamiltonianKind kind, const MatrixTuple& x, const MatrixTuple& alpha) {
  if (kind == HamiltonianKind::commutator_quadratic) return commutator_drift(x, alpha);
  require_same_shape(x, alpha, "control_drift");
  return alpha;
}

double lagrangian(const HamiltonianSpec& spec, const MatrixTuple& x, const MatrixTuple& alpha) {
  require_same_shape(x, alpha, "lagrangian");
  switch (spec.kind) {
    case HamiltonianKind::quadratic_with_potential:
      return 0.5 * alpha.squared_norm() + potential_at(spec, x);
    case HamiltonianKind::eikonal_l2:
    case HamiltonianKind::eikonal_l1:
      return 0.0;
    case HamiltonianKind::commutator_quadratic:
      return 0.5 * alpha.squared_norm();
  }
  throw UnsupportedError("lagrangian: unknown kind");
}

bool admissible(HamiltonianKind kind, const MatrixTuple& alpha, double tol) {
  if (!alpha.is_hermitian(1e-10)) return false;
  switch (kind) {
    case HamiltonianKind::eikonal_l2:
      return alpha.norm() <= 1.0 + tol;
    case HamiltonianKind::eikonal_l1:
      return alpha.operator_norm() <= 1.0 + tol;
    default:
      return true;
  }
}

}  // namespace freectl::freecalc
