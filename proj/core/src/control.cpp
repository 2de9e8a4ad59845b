#include "freectl/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "freectl/parallel.hpp"

namespace freectl::control {

using freecalc::CylinderFunction;
using freecalc::OuterFunction;
using ncpoly::NCPolynomial;

void LQSpec::validate() const {
  FREECTL_REQUIRE_DIMS(g0.rows() >= 1 && g0.rows() == g0.cols(), "LQSpec: G0 must be square and nonempty");
  FREECTL_REQUIRE_DIMS(g1.rows() == g0.rows() && g1.cols() == g0.cols(), "LQSpec: G1 must match G0");
  FREECTL_REQUIRE_DIMS((g0 - g0.transpose()).cwiseAbs().maxCoeff() == 0.0, "LQSpec: G0 must be symmetric");
  FREECTL_REQUIRE_DIMS((g1 - g1.transpose()).cwiseAbs().maxCoeff() == 0.0, "LQSpec: G1 must be symmetric");
  FREECTL_REQUIRE_DIMS(beta_c >= 0.0 && beta_f >= 0.0, "LQSpec: noise coefficients must be nonnegative");
  FREECTL_REQUIRE_DIMS(T > 0.0, "LQSpec: horizon must be positive");
}

// ---------------------------------------------------------------- Riccati

namespace {

struct Pair {
  RealMatrix a0, a1;
};

// Forward-time derivatives.
Pair riccati_rhs(const Pair& y, RiccatiForm form) {
  Pair f;
  f.a0 = 2.0 * y.a0 * y.a0;
  if (form == RiccatiForm::consistent) {
    f.a1 = 2.0 * y.a1 * y.a1 + 2.0 * (y.a0 * y.a1 + y.a1 * y.a0);
  } else {
    f.a1 = 2.0 * (y.a0 + y.a1) * y.a1;
  }
  return f;
}

// One RK4 step of size h (negative to go backward).
Pair rk4(const Pair& y, double h, RiccatiForm form) {
  auto axpy = [](const Pair& a, double s, const Pair& b) { return Pair{a.a0 + s * b.a0, a.a1 + s * b.a1}; };
  const Pair k1 = riccati_rhs(y, form);
  const Pair k2 = riccati_rhs(axpy(y, 0.5 * h, k1), form);
  const Pair k3 = riccati_rhs(axpy(y, 0.5 * h, k2), form);
  const Pair k4 = riccati_rhs(axpy(y, h, k3), form);
  return Pair{y.a0 + (h / 6.0) * (k1.a0 + 2.0 * k2.a0 + 2.0 * k3.a0 + k4.a0),
              y.a1 + (h / 6.0) * (k1.a1 + 2.0 * k2.a1 + 2.0 * k3.a1 + k4.a1)};
}

double size_of(const Pair& y) {
  const double s = std::max(y.a0.norm(), y.a1.norm());
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

double source(const LQSpec& spec, const RealMatrix& a0, const RealMatrix& a1) {
  return spec.beta_c * spec.beta_c * (a0 + a1).sum() + spec.beta_f * spec.beta_f * a0.trace();
}

template <class V>
V hermite(double s, double h, const V& y0, const V& d0, const V& y1, const V& d1) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y0 + (h10 * h) * d0 + h01 * y1 + (h11 * h) * d1;
}

}  // namespace

RiccatiSolution solve_riccati(const LQSpec& spec, std::size_t steps, RiccatiForm form, double threshold) {
  spec.validate();
  FREECTL_REQUIRE_DIMS(steps >= 1, "solve_riccati: need at least one step");
  const auto d = static_cast<Eigen::Index>(spec.letters());
  const double h = spec.T / static_cast<double>(steps);
  RiccatiSolution sol;
  sol.spec = spec;
  sol.form = form;
  sol.grid.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) sol.grid[k] = spec.T * static_cast<double>(k) / static_cast<double>(steps);
  sol.grid.back() = spec.T;
  sol.a0.resize(steps + 1);
  sol.a1.resize(steps + 1);
  sol.e.assign(steps + 1, 0.0);
  sol.da0.resize(steps + 1);
  sol.da1.resize(steps + 1);
  sol.de.resize(steps + 1);
  sol.a0_closed.resize(steps + 1);

  Pair y{spec.g0, spec.g1};
  sol.a0[steps] = y.a0;
  sol.a1[steps] = y.a1;
  for (std::size_t k = steps; k-- > 0;) {
    Pair next = rk4(y, -h, form);
    if (size_of(next) > threshold) {
      // Bisect the step length at which the threshold is crossed.
      double lo = 0.0, hi = h;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (size_of(rk4(y, -mid, form)) > threshold ? hi : lo) = mid;
      }
      const double t_blow = sol.grid[k + 1] - hi;
      throw RiccatiBlowUp(t_blow, "solve_riccati: coefficients exceed " + std::to_string(threshold) +
                                      " near t = " + std::to_string(t_blow));
    }
    y = std::move(next);
    sol.a0[k] = y.a0;
    sol.a1[k] = y.a1;
  }
  for (std::size_t k = 0; k <= steps; ++k) {
    const Pair f = riccati_rhs(Pair{sol.a0[k], sol.a1[k]}, form);
    sol.da0[k] = f.a0;
    sol.da1[k] = f.a1;
    sol.de[k] = -source(spec, sol.a0[k], sol.a1[k]);
  }
  for (std::size_t k = steps; k-- > 0;) sol.e[k] = sol.e[k + 1] - 0.5 * h * (sol.de[k] + sol.de[k + 1]);

  for (std::size_t k = 0; k <= steps; ++k) {
    const RealMatrix m = RealMatrix::Identity(d, d) + 2.0 * (spec.T - sol.grid[k]) * spec.g0;
    Eigen::FullPivLU<RealMatrix> lu(m);
    if (lu.isInvertible() && lu.rcond() > 1e-12) sol.a0_closed[k] = lu.solve(spec.g0);
  }
  return sol;
}

RiccatiSolution::At RiccatiSolution::at(double t) const {
  const double tol = 1e-12 * std::max(1.0, spec.T);
  if (t < grid.front() - tol || t > grid.back() + tol)
    throw DimensionError("RiccatiSolution: time " + std::to_string(t) + " outside [0, T]");
  t = std::clamp(t, grid.front(), grid.back());
  const std::size_t steps = grid.size() - 1;
  const double h = spec.T / static_cast<double>(steps);
  std::size_t k = std::min(static_cast<std::size_t>(t / h), steps - 1);
  const double s = std::clamp((t - grid[k]) / h, 0.0, 1.0);
  if (s == 0.0) return {a0[k], a1[k], e[k]};
  if (s == 1.0) return {a0[k + 1], a1[k + 1], e[k + 1]};
  return {hermite<RealMatrix>(s, h, a0[k], da0[k], a0[k + 1], da0[k + 1]),
          hermite<RealMatrix>(s, h, a1[k], da1[k], a1[k + 1], da1[k + 1]),
          hermite<double>(s, h, e[k], de[k], e[k + 1], de[k + 1])};
}

namespace {

double quadratic_form(const RealMatrix& a0, const RealMatrix& a1, const MatrixTuple& x) {
  const auto d = static_cast<Eigen::Index>(x.letters());
  FREECTL_REQUIRE_DIMS(a0.rows() == d, "LQ value: tuple letter count does not match the spec");
  RealVector tr(d);
  for (Eigen::Index i = 0; i < d; ++i) tr[i] = normalized_trace(x[static_cast<std::size_t>(i)]).real();
  double v = tr.dot(a1 * tr);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (a0(i, j) != 0.0)
        v += a0(i, j) * normalized_trace_product(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]).real();
  return v;
}

}  // namespace

double lq_terminal_cost(const LQSpec& spec, const MatrixTuple& x) { return quadratic_form(spec.g0, spec.g1, x); }

double lq_value(const RiccatiSolution& sol, double t, const MatrixTuple& x) {
  const auto c = sol.at(t);
  return c.e + quadratic_form(c.a0, c.a1, x);
}

MatrixTuple lq_feedback(const RiccatiSolution& sol, double t, const MatrixTuple& x) {
  const auto c = sol.at(t);
  const auto d = x.letters();
  FREECTL_REQUIRE_DIMS(static_cast<std::size_t>(c.a0.rows()) == d, "lq_feedback: letter count does not match");
  std::vector<Complex> tr(d);
  for (std::size_t i = 0; i < d; ++i) tr[i] = normalized_trace(x[i]).real();
  MatrixTuple out(x.size(), d);
  for (std::size_t j = 0; j < d; ++j) {
    Complex shift = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (c.a0(ii, jj) != 0.0) out[j] -= 2.0 * c.a0(ii, jj) * x[i];
      shift -= 2.0 * c.a1(ii, jj) * tr[i];
    }
    out[j].diagonal().array() += shift;
  }
  return out;
}

sde::ControlPolicy lq_policy(const RiccatiSolution& sol) {
  return sde::ControlPolicy::feedback([sol](double t, const MatrixTuple& x) { return lq_feedback(sol, t, x); },
                                      "lq_feedback");
}

freecalc::TimeDependentCylinder lq_cylinder(const RiccatiSolution& sol) {
  const int d = static_cast<int>(sol.spec.letters());
  std::vector<NCPolynomial> inner;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      NCPolynomial p = NCPolynomial::monomial(d, ncpoly::Word{i, j}, 0.5) + NCPolynomial::monomial(d, ncpoly::Word{j, i}, 0.5);
      inner.push_back(std::move(p));
      pairs.emplace_back(i, j);
    }
  const auto first_linear = static_cast<Eigen::Index>(inner.size());
  for (int i = 0; i < d; ++i) inner.push_back(NCPolynomial::variable(d, i));
  const auto m = static_cast<Eigen::Index>(inner.size());

  auto outer = [&](const RealMatrix& a0, const RealMatrix& a1, double e) {
    RealVector w = RealVector::Zero(m);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      w[static_cast<Eigen::Index>(k)] = i == j ? a0(i, i) : a0(i, j) + a0(j, i);
    }
    RealMatrix q = RealMatrix::Zero(m, m);
    q.block(first_linear, first_linear, d, d) = a1;
    return OuterFunction::quadratic(q, w, e);
  };

  CylinderFunction proto(inner, outer(sol.a0.back(), sol.a1.back(), sol.e.back()));
  std::vector<RealVector> c, dc;
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    c.push_back(outer(sol.a0[k], sol.a1[k], sol.e[k]).coefficients());
    dc.push_back(outer(sol.da0[k], sol.da1[k], sol.de[k]).coefficients());
  }
  return freecalc::TimeDependentCylinder(std::move(proto), sol.grid, std::move(c), std::move(dc));
}

// ---------------------------------------------------------------- Eikonal

double eikonal_value(double t, const randmat::SpectralMeasure& mu, const randmat::SpectralMeasure& target, double T) {
  return std::max(T - t, randmat::wasserstein2_1d(target, mu));
}

ScalarDiagnostics eikonal_scalar_diagnostics(double x, const randmat::SpectralMeasure& target) {
  if (target.empty()) throw NumericalError("eikonal_scalar_diagnostics: empty measure");
  ScalarDiagnostics r;
  double sq = 0.0;
  for (double y : target.atoms()) {
    r.l1 += std::abs(x - y);
    sq += (x - y) * (x - y);
  }
  const double m = static_cast<double>(target.size());
  r.l1 /= m;
  r.w2 = std::sqrt(sq / m);
  r.signed_mass = -target.mass_above(x) + target.mass_below(x);
  return r;
}

// ---------------------------------------------------------------- Hopf-Lax

MatrixTuple conjugation_flow(const MatrixTuple& x, const MatrixTuple& alpha, double s) {
  require_same_shape(x, alpha, "conjugation_flow");
  MatrixTuple out = x;
  const Complex i(0.0, 1.0);
  for (std::size_t j = 0; j < x.letters(); ++j) {
    if (s == 0.0 || alpha[j].cwiseAbs().maxCoeff() == 0.0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(alpha[j]));
    if (es.info() != Eigen::Success) throw NumericalError("conjugation_flow: eigensolver failed");
    const Eigen::VectorXcd phase = (-i * s * es.eigenvalues().cast<Complex>()).array().exp();
    const Matrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    out[j] = u * x[j] * u.adjoint();
  }
  return out;
}

double hopf_lax_objective(double t, double T, const MatrixTuple& x, const CylinderFunction& g, const MatrixTuple& alpha) {
  const double s = T - t;
  return 0.5 * s * alpha.squared_norm() + g.value(conjugation_flow(x, alpha, s));
}

namespace {

// Orthonormal coordinates on Hermitian d-tuples for <A, B> = Re tr_n(A* B).
struct HermitianCoordinates {
  std::size_t n, d;

  std::size_t size() const { return d * n * n; }

  MatrixTuple to_tuple(const RealVector& theta) const {
    MatrixTuple a(n, d);
    const double nn = static_cast<double>(n);
    const double diag = std::sqrt(nn), off = std::sqrt(nn / 2.0);
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < d; ++j) {
      Matrix& m = a[j];
      const auto en = static_cast<Eigen::Index>(n);
      for (Eigen::Index r = 0; r < en; ++r) m(r, r) = diag * theta[k++];
      for (Eigen::Index r = 0; r < en; ++r)
        for (Eigen::Index c = r + 1; c < en; ++c) {
          const Complex z(off * theta[k], off * theta[k + 1]);
          k += 2;
          m(r, c) = z;
          m(c, r) = std::conj(z);
        }
    }
    return a;
  }
};

struct Objective {
  double t, T;
  const MatrixTuple& x;
  const CylinderFunction& g;
  HermitianCoordinates coords;
  double h;

  double terminal(const RealVector& theta) const {
    return g.value(conjugation_flow(x, coords.to_tuple(theta), T - t));
  }
  double value(const RealVector& theta) const { return 0.5 * (T - t) * theta.squaredNorm() + terminal(theta); }
  RealVector gradient(const RealVector& theta) const {
    RealVector grad = (T - t) * theta;
    RealVector p = theta;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      p[k] = theta[k] + h;
      const double up = terminal(p);
      p[k] = theta[k] - h;
      const double down = terminal(p);
      p[k] = theta[k];
      grad[k] += (up - down) / (2.0 * h);
    }
    return grad;
  }
};

struct LocalResult {
  RealVector theta;
  double value = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

LocalResult bfgs(const Objective& f, RealVector theta, const HopfLaxOptions& opt) {
  const auto dim = theta.size();
  RealMatrix hinv = RealMatrix::Identity(dim, dim);
  double fx = f.value(theta);
  RealVector g = f.gradient(theta);
  LocalResult r;
  std::size_t it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.norm() < opt.gradient_tolerance) break;
    RealVector dir = -hinv * g;
    if (g.dot(dir) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    RealVector trial;
    double ft = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = theta + step * dir;
      ft = f.value(trial);
      if (ft <= fx + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (hinv.isIdentity()) break;  // no descent possible along -g at machine precision
      hinv.setIdentity();
      continue;
    }
    RealVector gt = f.gradient(trial);
    const RealVector s = trial - theta;
    const RealVector y = gt - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const RealMatrix id = RealMatrix::Identity(dim, dim);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    theta = std::move(trial);
    fx = ft;
    g = std::move(gt);
  }
  r.theta = std::move(theta);
  r.value = fx;
  r.gradient_norm = g.norm();
  r.iterations = it;
  r.converged = r.gradient_norm < opt.gradient_tolerance;
  return r;
}

}  // namespace

HopfLaxResult hopf_lax(double t, double T, const MatrixTuple& x, const CylinderFunction& g, const HopfLaxOptions& options) {
  FREECTL_REQUIRE_DIMS(static_cast<int>(x.letters()) == g.letters(), "hopf_lax: letter count mismatch");
  FREECTL_REQUIRE_DIMS(t <= T, "hopf_lax: need t <= T");
  HopfLaxResult out;
  out.alpha = MatrixTuple::zeros(x.size(), x.letters());
  if (t == T) {
    out.value = g.value(x);
    out.converged = true;
    out.start_values = {out.value};
    return out;
  }
  const HermitianCoordinates coords{x.size(), x.letters()};
  const Objective f{t, T, x, g, coords, options.fd_step};
  const auto dim = static_cast<Eigen::Index>(coords.size());

  std::vector<LocalResult> runs(options.starts + 1);
  parallel_for(runs.size(), options.threads, [&](std::size_t s) {
    RealVector start = RealVector::Zero(dim);
    if (s > 0) {
      Stream stream = Stream::derive(options.seed, s, StreamTag::optimizer);
      for (Eigen::Index k = 0; k < dim; ++k) start[k] = options.start_scale * stream.normal();
    }
    runs[s] = bfgs(f, std::move(start), options);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    // Ties go to the earlier start, so alpha = 0 wins when nothing is strictly better.
    if (runs[s].value < runs[best].value - 1e-14 * (1.0 + std::abs(runs[best].value))) best = s;
  }
  for (const auto& r : runs) out.start_values.push_back(r.value);
  const auto& b = runs[best];
  out.alpha = b.theta.isZero(0.0) ? MatrixTuple::zeros(x.size(), x.letters()) : coords.to_tuple(b.theta);
  out.value = b.value;
  out.gradient_norm = b.gradient_norm;
  out.iterations = b.iterations;
  out.converged = b.converged;
  return out;
}

}  // namespace freectl::control
