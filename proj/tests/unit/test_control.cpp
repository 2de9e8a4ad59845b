#include "doctest.h"

#include <cmath>

#include "freectl/control.hpp"
#include "freectl/error.hpp"
#include "test_support.hpp"

using namespace freectl;
using namespace freectl::control;
using testing::mono;
using testing::sym_mono;

namespace {

RealMatrix random_spd(int d, double shift, Stream& s) {
  RealMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = s.normal();
  RealMatrix m = a * a.transpose() / d + shift * RealMatrix::Identity(d, d);
  return 0.5 * (m + m.transpose());
}

RealMatrix random_sym(int d, double scale, Stream& s) {
  RealMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = scale * s.normal();
  return 0.5 * (a + a.transpose());
}

LQSpec scalar_spec(double g0, double g1, double bc, double bf) {
  LQSpec spec;
  spec.g0 = RealMatrix::Constant(1, 1, g0);
  spec.g1 = RealMatrix::Constant(1, 1, g1);
  spec.beta_c = bc;
  spec.beta_f = bf;
  spec.T = 1.0;
  return spec;
}

// (I + 2 (T - t) G)^{-1} G
RealMatrix closed_form(const RealMatrix& g, double tau) {
  const auto d = g.rows();
  return (RealMatrix::Identity(d, d) + 2 * tau * g).inverse() * g;
}

}  // namespace

TEST_CASE("LQ spec validation") {
  auto spec = scalar_spec(1, 0, 0, 0);
  CHECK_NOTHROW(spec.validate());
  spec.g0 = RealMatrix::Identity(2, 2);
  CHECK_THROWS_AS(spec.validate(), DimensionError);
  spec.g1 = RealMatrix::Zero(2, 2);
  spec.g0(0, 1) = 0.3;
  CHECK_THROWS_AS(spec.validate(), DimensionError);
  spec = scalar_spec(1, 0, -1, 0);
  CHECK_THROWS_AS(spec.validate(), DimensionError);
}

TEST_CASE("scalar Riccati example") {
  const auto sol = solve_riccati(scalar_spec(1, 0, 0, 1), 1000);
  CHECK(sol.a0.front()(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(sol.a1.front()(0, 0) == 0.0);
  // e(0) = beta_F^2 / 2 ln(1 + 2 T g0).
  CHECK(sol.e.front() == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-6));
  CHECK(sol.e.back() == 0.0);
  CHECK(sol.grid.size() == 1001);
  REQUIRE(sol.a0_closed.front().has_value());
  CHECK((*sol.a0_closed.front())(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("Riccati solution matches the closed forms") {
  auto s = testing::test_stream(61);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 3;
    LQSpec spec;
    spec.g0 = random_spd(d, 0.2, s);
    spec.g1 = random_spd(d, 0.1, s) * 0.5;
    spec.beta_c = 0.4;
    spec.beta_f = 0.7;
    spec.T = 1.5;
    const auto sol = solve_riccati(spec, 1500);
    const RealMatrix g = spec.g0 + spec.g1;
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.grid.size(); k += 100) {
      const double tau = spec.T - sol.grid[k];
      worst = std::max(worst, (sol.a0[k] - closed_form(spec.g0, tau)).norm());
      worst = std::max(worst, (sol.a0[k] + sol.a1[k] - closed_form(g, tau)).norm());
    }
    CHECK(worst < 1e-9);
    if (d == 1) {
      const double e0 = 0.5 * 0.16 * std::log(1 + 2 * spec.T * g(0, 0)) + 0.5 * 0.49 * std::log(1 + 2 * spec.T * spec.g0(0, 0));
      CHECK(sol.e.front() == doctest::Approx(e0).epsilon(1e-6));
    }
  }
}

TEST_CASE("printed and consistent a1 equations agree only when G1 = 0") {
  auto s = testing::test_stream(62);
  LQSpec spec;
  spec.g0 = random_spd(2, 0.3, s);
  spec.g1 = RealMatrix::Zero(2, 2);
  spec.T = 1.0;
  const auto c0 = solve_riccati(spec, 400, RiccatiForm::consistent);
  const auto r0 = solve_riccati(spec, 400, RiccatiForm::reduced);
  CHECK((c0.a0.front() - r0.a0.front()).norm() == 0.0);
  CHECK(r0.a1.front().norm() == 0.0);
  spec.g1 = random_spd(2, 0.3, s);
  const auto c1 = solve_riccati(spec, 400, RiccatiForm::consistent);
  const auto r1 = solve_riccati(spec, 400, RiccatiForm::reduced);
  CHECK((c1.a0.front() - r1.a0.front()).norm() < 1e-14);
  CHECK((c1.a1.front() - r1.a1.front()).norm() > 1e-3);
}

TEST_CASE("Riccati blow-up is detected with its time") {
  // b = g / (1 + 2 (T - t) g) with g = -1 blows up at T - t = 1/2.
  try {
    solve_riccati(scalar_spec(-1, 0, 0, 0), 2000);
    FAIL("expected blow-up");
  } catch (const RiccatiBlowUp& e) {
    CHECK(e.time() == doctest::Approx(0.5).epsilon(1e-3));
  }
  // Indefinite G1 blows up through a1 only.
  CHECK_THROWS_AS(solve_riccati(scalar_spec(0.5, -2, 0, 0), 2000), RiccatiBlowUp);
  CHECK_NOTHROW(solve_riccati(scalar_spec(-0.4, 0, 0, 0), 2000));
}

TEST_CASE("interpolated coefficients") {
  auto spec = scalar_spec(2, 0.5, 0, 0);
  const auto sol = solve_riccati(spec, 200);
  for (double t : {0.0, 0.0123, 0.5, 0.777, 1.0}) {
    const auto c = sol.at(t);
    CHECK(c.a0(0, 0) == doctest::Approx(closed_form(spec.g0, 1 - t)(0, 0)).epsilon(1e-8));
    CHECK(c.a0(0, 0) + c.a1(0, 0) == doctest::Approx(closed_form(spec.g0 + spec.g1, 1 - t)(0, 0)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(sol.at(1.5), DimensionError);
}

TEST_CASE("value, feedback and cylinder representation agree") {
  auto s = testing::test_stream(63);
  LQSpec spec;
  spec.g0 = random_spd(2, 0.2, s);
  spec.g1 = random_sym(2, 0.2, s);
  spec.beta_c = 0.5;
  spec.beta_f = 0.5;
  spec.T = 1.0;
  const auto sol = solve_riccati(spec, 400);
  const auto x = testing::random_tuple(5, 2, 1.0, s);
  CHECK(lq_value(sol, 1.0, x) == doctest::Approx(lq_terminal_cost(spec, x)).epsilon(1e-12));
  // g by hand.
  double g = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      g += spec.g0(i, j) * normalized_trace_product(x[i], x[j]).real() +
           spec.g1(i, j) * normalized_trace(x[i]).real() * normalized_trace(x[j]).real();
  CHECK(lq_terminal_cost(spec, x) == doctest::Approx(g));

  const auto u = lq_cylinder(sol);
  for (double t : {0.0, 0.31, 1.0}) {
    CHECK(u.value(t, x) == doctest::Approx(lq_value(sol, t, x)).epsilon(1e-12));
    const auto fb = lq_feedback(sol, t, x);
    CHECK(testing::rel_err(fb[0], -freecalc::grad(u.at(t), x)[0]) < 1e-12);
    const auto a = testing::random_tuple(5, 2, 1.0, s);
    const double h = 1e-5;
    const double fd = (lq_value(sol, t, x + a * h) - lq_value(sol, t, x - a * h)) / (2 * h);
    CHECK(testing::rel_err(-fb.inner(a), fd) < 1e-7);
  }
  const auto policy = lq_policy(sol);
  CHECK((policy(0.2, x) - lq_feedback(sol, 0.2, x)).norm() == 0.0);
}

// ---------------------------------------------------------------- Eikonal

TEST_CASE("eikonal value and scalar diagnostics") {
  const randmat::SpectralMeasure target({-1.0, 1.0});
  const auto mu = randmat::SpectralMeasure({-3.0, 3.0});
  CHECK(eikonal_value(1.0, mu, target, 1.0) == doctest::Approx(2.0));
  CHECK(eikonal_value(0.0, target, target, 1.0) == doctest::Approx(1.0));
  CHECK(eikonal_value(0.0, mu, target, 1.0) == doctest::Approx(2.0));
  const auto d0 = eikonal_scalar_diagnostics(0.0, target);
  CHECK(d0.l1 == doctest::Approx(1.0));
  CHECK(d0.signed_mass == doctest::Approx(0.0));
  CHECK(d0.w2 == doctest::Approx(1.0));
  const auto d2 = eikonal_scalar_diagnostics(2.0, target);
  CHECK(d2.l1 == doctest::Approx(2.0));
  CHECK(d2.signed_mass == doctest::Approx(1.0));
  CHECK(d2.w2 == doctest::Approx(std::sqrt(5.0)));
  // The L1 distance is 1-Lipschitz in x; its derivative is the signed mass.
  const auto target2 = randmat::semicircle_quantile_measure(101);
  for (double x : {-2.5, -0.3, 0.05, 1.7}) {
    const double h = 1e-6;
    const double fd = (eikonal_scalar_diagnostics(x + h, target2).l1 - eikonal_scalar_diagnostics(x - h, target2).l1) / (2 * h);
    CHECK(fd == doctest::Approx(eikonal_scalar_diagnostics(x, target2).signed_mass).epsilon(1e-6));
  }
}

// ---------------------------------------------------------------- Hopf-Lax

TEST_CASE("conjugation flow") {
  auto s = testing::test_stream(64);
  const auto x = testing::random_tuple(4, 2, 1.0, s);
  CHECK((conjugation_flow(x, MatrixTuple::zeros(4, 2), 1.0) - x).norm() == 0.0);
  // alpha commuting with X leaves it fixed.
  MatrixTuple a = x;
  for (std::size_t j = 0; j < 2; ++j) a[j] = x[j] * x[j];
  CHECK((conjugation_flow(x, a, 0.7) - x).norm() < 1e-12);
  const auto b = testing::random_tuple(4, 2, 1.0, s);
  const auto y = conjugation_flow(x, b, 0.7);
  CHECK(y.is_hermitian(1e-12));
  CHECK(y.norm() == doctest::Approx(x.norm()));
  // Group property.
  CHECK((conjugation_flow(conjugation_flow(x, b, 0.3), b, 0.4) - y).norm() < 1e-12);
}

TEST_CASE("Hopf-Lax examples") {
  // n = 2, X1 = diag(1, -1), X2 = sigma_x: g = tau(x1 x2) starts at 0 and can
  // be lowered to -1 by rotating X2 alone.
  MatrixTuple x(2, 2);
  x[0].diagonal() << 1, -1;
  x[1](0, 1) = 1;
  x[1](1, 0) = 1;
  const auto g = freecalc::CylinderFunction::trace_of(sym_mono(2, {0, 1}));
  HopfLaxOptions opt;
  opt.seed = 5;
  CHECK(hopf_lax(1.0, 1.0, x, g, opt).value == g.value(x));

  double prev = 0.0;
  auto s = testing::test_stream(65);
  for (double tau : {0.5, 1.0, 2.0}) {
    const auto r = hopf_lax(1.0 - tau, 1.0, x, g, opt);
    CHECK(r.start_values.size() == opt.starts + 1);
    CHECK(r.converged);
    CHECK(r.gradient_norm < 1e-5);
    CHECK(r.value < 0.0);
    CHECK(r.value > -1.0);
    CHECK(r.value <= prev + 1e-10);
    CHECK(r.value == doctest::Approx(hopf_lax_objective(1.0 - tau, 1.0, x, g, r.alpha)).epsilon(1e-12));
    // Minimum over random controls.
    for (int k = 0; k < 200; ++k) {
      const auto a = testing::random_tuple(2, 2, 2.0 * s.uniform(), s);
      CHECK(r.value <= hopf_lax_objective(1.0 - tau, 1.0, x, g, a) + 1e-9);
    }
    prev = r.value;
  }
  // A unitarily invariant single-letter cost cannot be lowered.
  const auto sq = freecalc::CylinderFunction::trace_of(mono(2, {0, 0}) + mono(2, {1, 1}));
  CHECK(hopf_lax(0.0, 1.0, x, sq, opt).value == doctest::Approx(sq.value(x)).epsilon(1e-10));
}
