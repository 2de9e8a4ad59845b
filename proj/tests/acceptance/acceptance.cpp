// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "freectl/control.hpp"
#include "freectl/freecalc.hpp"
#include "freectl/hjb.hpp"
#include "freectl/ncpoly.hpp"
#include "freectl/randmat.hpp"
#include "freectl/runtime.hpp"
#include "freectl/sde.hpp"
#include "ito_suite.hpp"
#include "test_support.hpp"

using namespace freectl;
using testing::mono;
using testing::sym_mono;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::size_t g_threads = 0;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome semicircle_moments() {
  Outcome o;
  const std::uint64_t cat[] = {1, 1, 2, 5, 14, 42};
  double worst = 0.0;
  for (unsigned k = 0; k <= 5; ++k) {
    const std::vector<int> colors(2 * k, 0);
    if (ncpoly::semicircle_moment(colors) != cat[k]) o.pass = false;
    const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [k](double x) { return std::sqrt(std::max(0.0, 4 - x * x)) / (2 * std::numbers::pi) * std::pow(x, 2 * k); },
        -2.0, 2.0, 15, 1e-14);
    worst = std::max(worst, std::abs(quad - double(ncpoly::semicircle_moment(colors))));
  }
  o.pass = o.pass && worst <= 1e-9;
  o.detail = "Catalan exact, quadrature err " + fmt("%.2e", worst);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome gue_convergence() {
  constexpr std::size_t n = 200, samples = 2000;
  std::vector<std::vector<double>> tr(5, std::vector<double>(samples));
  auto s = Stream::derive(2002, 0, StreamTag::test_data);
  for (std::size_t m = 0; m < samples; ++m) {
    const Matrix w = randmat::gue_increment(n, 1.0, s);
    const Matrix w2 = w * w;
    const Matrix w4 = w2 * w2;
    tr[1][m] = normalized_trace(w2).real();
    tr[2][m] = w2.squaredNorm() / n;
    tr[3][m] = normalized_trace_product(w2, w4).real();
    tr[4][m] = w4.squaredNorm() / n;
  }
  Outcome o;
  std::ostringstream d;
  for (unsigned k = 1; k <= 4; ++k) {
    const auto e = estimate_mean(tr[k]);
    const double err = std::abs(e.mean - double(ncpoly::catalan(k)));
    const double tol = 3 * e.std_error + 5.0 / n;
    if (err > tol) o.pass = false;
    d << "k=" << k << " err " << fmt("%.1e", err) << "/" << fmt("%.1e", tol) << (k < 4 ? ", " : "");
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 3

ncpoly::NCPolynomial integer_polynomial(int d, int max_degree, int terms, Stream& s) {
  ncpoly::NCPolynomial p(d);
  for (int k = 0; k < terms; ++k) {
    const int len = static_cast<int>(s.uniform() * (max_degree + 1));
    std::vector<int> w;
    for (int i = 0; i < len; ++i) w.push_back(static_cast<int>(s.uniform() * d));
    p.add_term(ncpoly::Word(std::move(w)),
               Complex(std::floor(7 * s.uniform()) - 3, std::floor(7 * s.uniform()) - 3));
  }
  return p;
}

Outcome derivative_calculus() {
  using namespace ncpoly;
  auto s = Stream::derive(2003, 0, StreamTag::test_data);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const std::size_t n = 4 + trial % 5;
    const auto p = testing::random_polynomial(d, 5, 6, s);
    const auto x = testing::random_tuple(n, d, 0.5, s);
    const auto a = testing::random_tuple(n, d, 0.5, s);
    for (int j = 0; j < d; ++j) {
      auto xp = x, xm = x;
      xp[j] += h * a[j];
      xm[j] -= h * a[j];
      const Matrix fd = (evaluate(p, xp) - evaluate(p, xm)) / (2 * h);
      worst = std::max(worst, testing::rel_err(tensor_contract(free_diff(p, j), x, a[j]), fd));
      const Complex tfd = (trace_eval(p, xp) - trace_eval(p, xm)) / (2 * h);
      const Complex tr = normalized_trace_product(evaluate(cyclic_diff(p, j), x), a[j]);
      worst = std::max(worst, std::abs(tr - tfd) / std::max(1.0, std::abs(tfd)));
    }
  }
  // Integer coefficients keep every coefficient exact, so the identities are
  // compared with ==.
  int identity_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 3;
    const auto p = integer_polynomial(d, 3, 4, s);
    const auto q = integer_polynomial(d, 3, 4, s);
    const auto one = NCPolynomial::constant(d, 1.0);
    std::vector<NCPolynomial> g;
    for (int k = 0; k < d; ++k) g.push_back(integer_polynomial(d, 2, 3, s));
    const auto comp = p.compose(g);
    for (int j = 0; j < d; ++j) {
      const auto leibniz = TensorPolynomial::elementary(one, q) * free_diff(p, j) +
                           TensorPolynomial::elementary(p, one) * free_diff(q, j);
      if (!(free_diff(p * q, j) == leibniz)) ++identity_failures;
      TensorPolynomial chain(d);
      for (int k = 0; k < d; ++k) chain += free_diff(p, k).compose(g) * free_diff(g[k], j);
      if (!(free_diff(comp, j) == chain)) ++identity_failures;
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6 && identity_failures == 0;
  o.detail = "200 FD cases, max rel err " + fmt("%.1e", worst) + "; identity failures " +
             std::to_string(identity_failures);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome laplacian_oracle() {
  const auto suite = testing::laplacian_suite();
  const std::size_t ns[] = {50, 100, 200};
  const std::size_t samples[] = {200, 100, 60};
  Outcome o;
  int failures = 0;
  // c2(n) = n^2 * bias per function; must agree across n within a factor 2.
  std::vector<std::vector<double>> c2(suite.size());
  double worst_ratio = 0.0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t n = ns[k];
    auto s = Stream::derive(2004, n, StreamTag::test_data);
    // Fixed spectra so the traces entering c2 converge as n grows.
    MatrixTuple x(n, 2);
    const auto q = randmat::semicircle_quantile_measure(n, 1.0).atoms();
    for (std::size_t i = 0; i < n; ++i) {
      x[0](i, i) = 0.5 + q[i];
      x[1](i, i) = 0.3 + 0.8 * q[n - 1 - i];
    }
    const Matrix u = randmat::haar_unitary(n, s);
    x[1] = u * x[1] * u.adjoint();
    x.symmetrize();
    for (std::size_t f = 0; f < suite.size(); ++f) {
      const double formula = freecalc::free_laplacian(suite[f], x);
      const auto mc = freecalc::free_laplacian_mc(suite[f], x, samples[k], s);
      const double bias = freecalc::free_laplacian_mc_bias(suite[f], x);
      const double tol = 3 * mc.std_error + std::abs(bias) + 1e-12;
      const double err = std::abs(mc.mean - formula);
      worst_ratio = std::max(worst_ratio, err / tol);
      if (err > tol) ++failures;
      c2[f].push_back(double(n) * double(n) * bias);
    }
  }
  int unstable = 0, biased = 0;
  for (const auto& c : c2) {
    const double hi = *std::max_element(c.begin(), c.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double lo = *std::min_element(c.begin(), c.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (hi == 0.0) continue;
    ++biased;
    if (std::abs(hi) > 2 * std::abs(lo) || hi * lo <= 0) ++unstable;
  }
  o.pass = failures == 0 && unstable == 0;
  double spread = 1.0;
  for (const auto& c : c2)
    if (c[0] != 0.0)
      for (double v : c) spread = std::max(spread, std::max(v / c[0], c[0] / v));
  o.detail = "30 comparisons, failures " + std::to_string(failures) + ", worst err/tol " + fmt("%.2f", worst_ratio) +
             "; c2 unstable " + std::to_string(unstable) + "/" + std::to_string(biased) + " (max spread " +
             fmt("%.3f", spread) + ")";
  return o;
}

// ---------------------------------------------------------------- 5

Outcome ito_suite_check() {
  namespace suite = testing::ito_suite;
  Outcome o;
  const std::string path = std::string(FREECTL_FIXTURE_DIR) + "/ito_bias.json";
  std::ifstream in(path);
  if (!in) {
    o.pass = false;
    o.detail = "missing " + path + " (run calibrate_ito_bias)";
    return o;
  }
  const auto fixture = nlohmann::json::parse(in);
  hjb::ItoOptions opt;
  opt.observe_every = suite::kObserveEvery;
  opt.c1 = fixture.at("c1").get<double>();
  opt.se_multiplier = 3.0;
  const auto fns = suite::functions();
  const auto names = suite::function_names();
  const auto x0 = suite::initial_state();
  int failures = 0, cases = 0;
  double worst = 0.0;
  for (const auto& [bc, bf] : suite::noise_pairs()) {
    for (const auto& pol : suite::policies(bc, bf)) {
      const auto cfg = suite::config(bc, bf, 1e-3, 2000, g_threads);
      for (const auto& r : hjb::ito_check(fns, names, cfg, pol.policy, x0, sde::DriftKind::identity, opt)) {
        ++cases;
        if (!r.pass) {
          ++failures;
          std::cerr << "  ito fail: " << r.function << " / " << pol.name << " beta=(" << bc << "," << bf
                    << ") lhs " << r.lhs << " rhs " << r.rhs << " tol " << r.tolerance << '\n';
        }
        worst = std::max(worst, std::abs(r.lhs - r.rhs) / r.tolerance);
      }
    }
  }
  o.pass = failures == 0 && cases == 36;
  o.detail = std::to_string(cases) + " cases, failures " + std::to_string(failures) + ", c1 " + fmt("%.3g", opt.c1) +
             ", worst |lhs-rhs|/tol " + fmt("%.2f", worst);
  return o;
}

// ---------------------------------------------------------------- 6

Outcome lq_reproduction() {
  Outcome o;
  std::ostringstream d;
  const double bc = 0.5, bf = 1.0;
  const auto spec = testing::ito_suite::lq_spec(bc, bf);
  const auto sol = control::solve_riccati(spec, 1000);

  // (a) RK4 against the closed form of a0.
  double closed_err = 0.0;
  for (std::size_t k = 0; k < sol.grid.size(); ++k)
    if (sol.a0_closed[k]) closed_err = std::max(closed_err, (sol.a0[k] - *sol.a0_closed[k]).norm());
  const bool a_ok = closed_err <= 1e-8;
  d << "(a) " << fmt("%.1e", closed_err);

  // (b) HJB residual on a 10 x 20 grid of (t, X) with |X|_2 <= 2.
  const auto u = control::lq_cylinder(sol);
  const freecalc::HamiltonianSpec quad{freecalc::HamiltonianKind::quadratic_with_potential, {}};
  auto s = Stream::derive(2006, 0, StreamTag::test_data);
  double residual = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double t = spec.T * i / 10.0;
    for (int j = 0; j < 20; ++j) {
      const auto x = testing::random_tuple_normalized(8, 2, s) * (2.0 * (j + 1) / 20.0);
      residual = std::max(residual, std::abs(hjb::hjb_residual(u, quad, bc, bf, t, x).residual));
    }
  }
  const bool b_ok = residual <= 1e-6;
  d << ", (b) " << fmt("%.1e", residual);

  // (c) Closed-loop cost at n = 100 against the value, and against perturbed
  // policies on common random numbers.
  sde::SimConfig cfg;
  cfg.n = 100;
  cfg.d = 2;
  cfg.T = spec.T;
  cfg.steps = 250;
  cfg.beta_c = bc;
  cfg.beta_f = bf;
  cfg.paths = 400;
  cfg.seed = 2606;
  cfg.snapshot_every = cfg.steps;
  cfg.threads = g_threads;
  const auto x0 = testing::random_tuple(cfg.n, cfg.d, 0.5, s);
  sde::SimOptions so;
  so.running_cost = [](double, const MatrixTuple&, const MatrixTuple& a) { return 0.5 * a.squared_norm(); };
  auto path_costs = [&](const sde::ControlPolicy& pol) {
    const auto b = sde::simulate(cfg, pol, x0, so);
    std::vector<double> c;
    for (const auto& p : b.paths) c.push_back(p.running_cost + control::lq_terminal_cost(spec, p.terminal));
    return c;
  };
  const auto opt_costs = path_costs(control::lq_policy(sol));
  const auto opt_est = estimate_mean(opt_costs);
  // Finite-n bias: beta_F^2/2 times the integrated Monte Carlo Laplacian bias.
  double bias = 0.0;
  const std::size_t m = 200;
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = spec.T * k / m;
    const double w = (k == 0 || k == m) ? 0.5 : 1.0;
    bias += w * spec.T / m * 0.5 * bf * bf * freecalc::free_laplacian_mc_bias(u.at(t), x0);
  }
  const double value = control::lq_value(sol, 0.0, x0);
  const double c_err = std::abs(opt_est.mean - value);
  const double c_tol = 3 * opt_est.std_error + std::abs(bias);
  bool c_ok = c_err <= c_tol;
  d << ", (c) |cost-V| " << fmt("%.2e", c_err) << "/" << fmt("%.2e", c_tol) << " (c2 " << fmt("%.3g", bias * 1e4)
    << ")";

  const auto delta = testing::random_tuple(cfg.n, cfg.d, 0.2, s);
  const auto star = control::lq_policy(sol);
  const std::vector<sde::ControlPolicy> perturbed{
      sde::ControlPolicy::feedback([&](double t, const MatrixTuple& x) { return star(t, x) * 1.2; }, "scaled up"),
      sde::ControlPolicy::feedback([&](double t, const MatrixTuple& x) { return star(t, x) * 0.8; }, "scaled down"),
      sde::ControlPolicy::feedback([&](double t, const MatrixTuple& x) { return star(t, x) + delta; }, "shifted"),
      sde::ControlPolicy::zero()};
  double min_gap = 1e300;
  for (const auto& pol : perturbed) {
    const auto c = path_costs(pol);
    std::vector<double> diff(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) diff[i] = c[i] - opt_costs[i];
    const auto e = estimate_mean(diff);
    min_gap = std::min(min_gap, e.mean);
    if (e.mean <= 0.0) c_ok = false;
  }
  d << ", min perturbed gap " << fmt("%.2e", min_gap);
  o.pass = a_ok && b_ok && c_ok;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 7

randmat::SpectralMeasure random_measure(Stream& s, double scale) {
  const std::size_t m = 1 + static_cast<std::size_t>(s.uniform() * 20);
  std::vector<double> atoms(m);
  const double shift = s.normal();
  for (auto& a : atoms) a = shift + scale * s.normal();
  return randmat::SpectralMeasure(atoms);
}

Outcome eikonal() {
  auto s = Stream::derive(2007, 0, StreamTag::test_data);
  const double T = 1.0;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto target = random_measure(s, 1.0);
    const auto mu = random_measure(s, 2.0 * s.uniform());
    const auto nu = random_measure(s, 2.0 * s.uniform());
    const double t = T * s.uniform();
    const double dv = std::abs(control::eikonal_value(t, mu, target, T) - control::eikonal_value(t, nu, target, T));
    const double w = randmat::wasserstein2_1d(mu, nu);
    if (dv > w + 1e-12) ++violations;
    if (w > 0) worst_ratio = std::max(worst_ratio, dv / w);
  }
  double worst = 0.0;
  int points = 0;
  const double h = 1e-5;
  while (points < 200) {
    const auto target = random_measure(s, 1.0);
    const double x = target.atoms().front() - 1.0 + (target.atoms().back() - target.atoms().front() + 2.0) * s.uniform();
    double gap = 1e300;
    for (double a : target.atoms()) gap = std::min(gap, std::abs(a - x));
    if (gap < 1e-3) continue;
    ++points;
    const double fd = (control::eikonal_scalar_diagnostics(x + h, target).l1 -
                       control::eikonal_scalar_diagnostics(x - h, target).l1) /
                      (2 * h);
    worst = std::max(worst, std::abs(fd - control::eikonal_scalar_diagnostics(x, target).signed_mass));
  }
  Outcome o;
  o.pass = violations == 0 && worst <= 1e-6;
  o.detail = "Lipschitz violations " + std::to_string(violations) + " (max ratio " + fmt("%.3f", worst_ratio) +
             "), derivative err " + fmt("%.1e", worst);
  return o;
}

// ---------------------------------------------------------------- 8

Outcome hopf_lax() {
  auto s = Stream::derive(2008, 0, StreamTag::test_data);
  const std::size_t n = 3, d = 2;
  const double t = 0.0, T = 1.0;
  const auto x = testing::random_tuple(n, d, 1.0, s);
  const auto g = freecalc::CylinderFunction::trace_of(sym_mono(2, {0, 1}) + sym_mono(2, {0, 1, 0, 1}, 0.5));
  control::HopfLaxOptions hopt;
  hopt.seed = 8;
  hopt.threads = g_threads;
  const auto r = control::hopf_lax(t, T, x, g, hopt);

  // Cost of the constant control along the commutator dynamics.
  sde::SimConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.t0 = t;
  cfg.T = T;
  cfg.steps = 100;
  cfg.paths = 1;
  cfg.snapshot_every = cfg.steps;
  sde::SimOptions so;
  so.drift = sde::DriftKind::commutator;
  so.running_cost = [](double, const MatrixTuple&, const MatrixTuple& a) { return 0.5 * a.squared_norm(); };
  const auto batch = sde::simulate(cfg, sde::ControlPolicy::constant(r.alpha), x, so);
  const double cost = sde::estimate_cost(batch, [&](const MatrixTuple& y) { return g.value(y); }).mean;
  const double match = std::abs(cost - r.value);

  // First variation along random directions.
  double stationarity = 0.0;
  const double h = 1e-4;
  for (int k = 0; k < 50; ++k) {
    const auto dir = testing::random_tuple_normalized(n, d, s);
    const double dj = (control::hopf_lax_objective(t, T, x, g, r.alpha + h * dir) -
                       control::hopf_lax_objective(t, T, x, g, r.alpha - h * dir)) /
                      (2 * h);
    stationarity = std::max(stationarity, std::abs(dj));
  }

  // Spectral invariant terminal cost.
  const auto inv = freecalc::CylinderFunction(
      {mono(2, {0, 0}), mono(2, {1, 1, 1, 1})},
      freecalc::OuterFunction::quadratic(RealMatrix::Identity(2, 2) * 0.3, RealVector::Ones(2)));
  const auto ri = control::hopf_lax(t, T, x, inv, hopt);
  const bool inv_ok = ri.alpha.norm() == 0.0 && ri.value == inv.value(x);

  Outcome o;
  o.pass = r.converged && match <= 1e-4 && stationarity <= 1e-4 && inv_ok;
  o.detail = "value " + fmt("%.6f", r.value) + ", |sim-value| " + fmt("%.1e", match) + ", stationarity " +
             fmt("%.1e", stationarity) + ", invariant g " + (inv_ok ? "alpha=0 exact" : "FAILED");
  return o;
}

// ---------------------------------------------------------------- 9

Outcome dyson() {
  constexpr std::size_t n = 200;
  auto s = Stream::derive(2009, 0, StreamTag::test_data);
  MatrixTuple x0(std::vector<Matrix>{randmat::gue_increment(n, 0.5, s)});
  const auto mu0 = randmat::spectral_measure(x0[0]);
  sde::SimConfig cfg;
  cfg.n = n;
  cfg.d = 1;
  cfg.T = 1.0;
  cfg.steps = 1000;
  cfg.beta_c = 0.7;
  cfg.beta_f = 1.0;
  cfg.paths = 8;
  cfg.seed = 2909;
  cfg.snapshot_every = cfg.steps;
  cfg.threads = g_threads;
  const auto full = sde::simulate(cfg, sde::ControlPolicy::zero(), x0);
  const auto particles = sde::dyson_simulate(cfg, mu0);
  std::vector<double> w2;
  bool matched = true;
  for (std::size_t p = 0; p < cfg.paths; ++p) {
    if (!full.paths[p].ok || !particles.paths[p].ok) return {false, "path aborted"};
    matched = matched && full.paths[p].common_increments == particles.paths[p].common_increments;
    w2.push_back(randmat::wasserstein2_1d(randmat::spectral_measure(full.paths[p].terminal[0]),
                                          randmat::SpectralMeasure(particles.paths[p].terminal)));
  }
  const auto e = estimate_mean(w2);
  Outcome o;
  o.pass = matched && e.mean <= 0.05 + 3 * e.std_error;
  o.detail = "mean W2 " + fmt("%.4f", e.mean) + " +- " + fmt("%.4f", e.std_error) + " over " +
             std::to_string(cfg.paths) + " matched paths" + (matched ? "" : " (common noise NOT matched)");
  return o;
}

// ---------------------------------------------------------------- 10

Outcome well_posedness() {
  auto s = Stream::derive(2010, 0, StreamTag::test_data);
  const std::size_t n = 20, d = 2;
  const auto x0 = testing::random_tuple(n, d, 1.0, s);
  const auto c = testing::random_tuple(n, d, 0.3, s);
  // Lipschitz feedback with a constant part.
  const auto policy = sde::ControlPolicy::feedback([c](double, const MatrixTuple& x) { return c - x; });

  auto constant_for = [&](std::size_t steps) {
    sde::SimConfig cfg;
    cfg.n = n;
    cfg.d = d;
    cfg.T = 0.5;
    cfg.steps = steps;
    cfg.beta_c = 0.5;
    cfg.beta_f = 1.0;
    cfg.paths = 2000;
    cfg.seed = 3010;
    cfg.snapshot_every = steps;
    cfg.threads = g_threads;
    sde::SimOptions so;
    so.observe_every = steps / 10;
    so.observables = {[&](double, const MatrixTuple& x, const MatrixTuple&) { return (x - x0).squared_norm(); }};
    so.keep_terminal = false;
    const auto b = sde::simulate(cfg, policy, x0, so);
    double ctilde = 0.0;
    for (std::size_t k = 1; k < b.observe_times.size(); ++k) {
      std::vector<double> v;
      for (const auto& p : b.paths) v.push_back(p.observed[0][k]);
      ctilde = std::max(ctilde, estimate_mean(v).mean / (b.observe_times[k] - cfg.t0));
    }
    return ctilde;
  };
  const double c1 = constant_for(100), c2 = constant_for(200);
  const double ratio = c1 / c2;
  const bool stable = ratio >= 0.8 && ratio <= 1.25;

  // Same noise, two initial conditions.
  sde::SimConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.T = 0.5;
  cfg.steps = 100;
  cfg.beta_c = 0.5;
  cfg.beta_f = 1.0;
  cfg.seed = 3011;
  cfg.snapshot_every = cfg.steps;
  const auto y0 = testing::random_tuple(n, d, 1.0, s);
  const double gap0 = (x0 - y0).norm();
  sde::SimOptions so;
  const auto cst = sde::ControlPolicy::constant(c);
  const auto px = sde::simulate_path(cfg, cst, x0, so, 0), py = sde::simulate_path(cfg, cst, y0, so, 0);
  const double err_const = ((px.terminal - py.terminal) - (x0 - y0)).norm() / gap0;
  const auto fx = sde::simulate_path(cfg, policy, x0, so, 0), fy = sde::simulate_path(cfg, policy, y0, so, 0);
  const double factor = std::pow(1.0 - cfg.dt(), double(cfg.steps));
  const double err_feedback = ((fx.terminal - fy.terminal) - factor * (x0 - y0)).norm() / gap0;
  const bool exact = err_const <= 1e-12 && err_feedback <= 1e-12;

  Outcome o;
  o.pass = stable && exact;
  o.detail = "C~ " + fmt("%.4f", c1) + " (dt) vs " + fmt("%.4f", c2) + " (dt/2); stability err " +
             fmt("%.1e", std::max(err_const, err_feedback));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  CLI::App app{"freectl acceptance suite"};
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--threads", g_threads, "worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "semicircle moments", 1, semicircle_moments},
      {2, "GUE moment convergence", 30, gue_convergence},
      {3, "derivative calculus", 10, derivative_calculus},
      {4, "free Laplacian oracle", 120, laplacian_oracle},
      {5, "mixed Ito identity", 600, ito_suite_check},
      {6, "LQ reproduction", 600, lq_reproduction},
      {7, "eikonal", 30, eikonal},
      {8, "Hopf-Lax constant control", 300, hopf_lax},
      {9, "Dyson cross-check", 120, dyson},
      {10, "well-posedness estimates", 60, well_posedness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %2d %-28s %8.2f s (limit %g s%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                c.time_limit, in_time ? "" : ", exceeded", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
