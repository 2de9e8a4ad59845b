#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "freectl/control.hpp"
#include "freectl/error.hpp"
#include "freectl/freecalc.hpp"
#include "freectl/hjb.hpp"
#include "freectl/io.hpp"
#include "freectl/parallel.hpp"
#include "freectl/randmat.hpp"
#include "freectl/sde.hpp"

namespace freectl::cli {

using freecalc::CylinderFunction;
using freecalc::OuterFunction;
using ncpoly::NCPolynomial;
using ncpoly::Word;

std::ofstream RunContext::csv(const std::string& name) {
  files.push_back(name);
  std::ofstream out(output_dir / name);
  if (!out) throw std::runtime_error("cannot write " + (output_dir / name).string());
  out << std::setprecision(17);
  return out;
}

namespace {

bool same_type(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
  if (a.is_null() || b.is_null()) return true;
  return a.type() == b.type();
}

Stream param_stream(const RunContext& ctx, std::uint64_t sub) {
  return Stream::derive(ctx.seed, 0, StreamTag::user, sub);
}

json cylinder_json(const NCPolynomial& p) { return io::to_json(CylinderFunction::trace_of(p)); }

NCPolynomial sym_word(int d, std::initializer_list<int> letters) {
  const auto p = NCPolynomial::monomial(d, Word(letters));
  return (p + p.adjoint()) * Complex(0.5, 0.0);
}

json square_of_trace(int d) {
  return io::to_json(CylinderFunction({NCPolynomial::variable(d, 0)},
                                      OuterFunction::quadratic(RealMatrix::Ones(1, 1), RealVector::Zero(1))));
}

Check make_check(std::string name, double value, double tol) { return {std::move(name), value, tol, value <= tol}; }

std::size_t as_size(const json& j, const char* key) {
  const auto v = j.at(key).get<double>();
  if (v < 0 || v != std::floor(v)) throw io::SchemaError(std::string(key) + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<freecalc::TimeDependentCylinder> named_functions(const json& list, double T, std::vector<std::string>& names) {
  std::vector<freecalc::TimeDependentCylinder> out;
  for (const auto& f : list) {
    io::require_keys(f, {"name", "cylinder"}, "function");
    names.push_back(io::field<std::string>(f, "name", "function"));
    out.push_back(freecalc::TimeDependentCylinder::constant(io::cylinder_from_json(f.at("cylinder")), 0.0, T));
  }
  return out;
}

// ---------------------------------------------------------------- lq

ExperimentResult run_lq(const json& p, RunContext& ctx) {
  const auto spec = io::lq_spec_from_json(p.at("spec"));
  const auto form_name = p.at("form").get<std::string>();
  if (form_name != "consistent" && form_name != "reduced") throw io::SchemaError("form must be consistent or reduced");
  const auto form = form_name == "consistent" ? control::RiccatiForm::consistent : control::RiccatiForm::reduced;
  const auto sol = control::solve_riccati(spec, as_size(p, "steps"), form);
  {
    auto out = ctx.csv("riccati.csv");
    io::write_riccati_csv(sol, out);
  }
  ExperimentResult r;
  r.results["a0_0"] = io::to_json(sol.a0.front());
  r.results["a1_0"] = io::to_json(sol.a1.front());
  r.results["e_0"] = sol.e.front();
  double closed = 0.0;
  for (std::size_t k = 0; k < sol.grid.size(); ++k)
    if (sol.a0_closed[k]) closed = std::max(closed, (sol.a0[k] - *sol.a0_closed[k]).norm());
  r.results["a0_closed_form_error"] = closed;
  r.checks.push_back(make_check("a0 vs closed form", closed, 1e-8));

  const std::size_t n = as_size(p, "n");
  if (n > 0) {
    sde::SimConfig cfg;
    cfg.n = n;
    cfg.d = spec.letters();
    cfg.T = spec.T;
    cfg.steps = as_size(p, "sim_steps");
    cfg.beta_c = spec.beta_c;
    cfg.beta_f = spec.beta_f;
    cfg.paths = as_size(p, "paths");
    cfg.seed = ctx.seed;
    cfg.snapshot_every = cfg.steps;
    cfg.threads = ctx.threads;
    auto s = param_stream(ctx, 1);
    const auto x0 = randmat::random_hermitian_tuple(n, cfg.d, p.at("x0_scale").get<double>(), s);
    sde::SimOptions so;
    so.running_cost = [](double, const MatrixTuple&, const MatrixTuple& a) { return 0.5 * a.squared_norm(); };
    const auto batch = sde::simulate(cfg, control::lq_policy(sol), x0, so);
    const auto cost = sde::estimate_cost(batch, [&](const MatrixTuple& y) { return control::lq_terminal_cost(spec, y); });
    const auto u = control::lq_cylinder(sol);
    double bias = 0.0;
    const std::size_t m = 200;
    for (std::size_t k = 0; k <= m; ++k) {
      const double w = (k == 0 || k == m) ? 0.5 : 1.0;
      bias += w * spec.T / m * 0.5 * spec.beta_f * spec.beta_f * freecalc::free_laplacian_mc_bias(u.at(spec.T * k / m), x0);
    }
    const double value = control::lq_value(sol, 0.0, x0);
    r.results["closed_loop"] = {{"n", n},           {"paths", cfg.paths},        {"steps", cfg.steps},
                                {"value", value},   {"cost", cost.mean},         {"cost_se", cost.std_error},
                                {"finite_n_bias", bias}, {"aborted", batch.aborted()}};
    r.checks.push_back(make_check("closed-loop cost vs value", std::abs(cost.mean - value), 3 * cost.std_error + std::abs(bias)));
  }
  return r;
}

json lq_defaults() {
  return {{"spec", {{"g0", {{1.0}}}, {"g1", {{0.0}}}, {"beta_c", 0.0}, {"beta_f", 0.0}, {"T", 1.0}}},
          {"form", "consistent"},
          {"steps", 1000},
          {"n", 0},
          {"paths", 200},
          {"sim_steps", 200},
          {"x0_scale", 0.5}};
}

// ---------------------------------------------------------------- eikonal

ExperimentResult run_eikonal(const json& p, RunContext& ctx) {
  std::vector<double> atoms = p.at("target").get<std::vector<double>>();
  const auto target = atoms.empty() ? randmat::semicircle_quantile_measure(as_size(p, "semicircle_atoms"))
                                    : randmat::SpectralMeasure(atoms);
  if (target.empty()) throw io::SchemaError("eikonal: empty target measure");
  const double T = p.at("T").get<double>();
  const auto lo = p.at("x_min").get<double>(), hi = p.at("x_max").get<double>();
  const std::size_t points = as_size(p, "points");
  const double h = 1e-5;
  double deriv = 0.0;
  {
    auto out = ctx.csv("eikonal.csv");
    out << "x,l1,signed_mass,w2,l1_fd,value_t0\n";
    for (std::size_t k = 0; k < points; ++k) {
      const double x = points == 1 ? lo : lo + (hi - lo) * k / double(points - 1);
      const auto dg = control::eikonal_scalar_diagnostics(x, target);
      const double fd = (control::eikonal_scalar_diagnostics(x + h, target).l1 -
                         control::eikonal_scalar_diagnostics(x - h, target).l1) /
                        (2 * h);
      double gap = 1e300;
      for (double a : target.atoms()) gap = std::min(gap, std::abs(a - x));
      if (gap > 1e-3) deriv = std::max(deriv, std::abs(fd - dg.signed_mass));
      out << x << ',' << dg.l1 << ',' << dg.signed_mass << ',' << dg.w2 << ',' << fd << ','
          << control::eikonal_value(0.0, randmat::SpectralMeasure::dirac(x), target, T) << '\n';
    }
  }
  auto s = param_stream(ctx, 2);
  const std::size_t pairs = as_size(p, "pairs");
  double worst = 0.0;
  std::size_t violations = 0;
  auto random_measure = [&] {
    std::vector<double> a(1 + static_cast<std::size_t>(s.uniform() * 20));
    const double shift = s.normal(), scale = 2.0 * s.uniform();
    for (auto& v : a) v = shift + scale * s.normal();
    return randmat::SpectralMeasure(a);
  };
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto mu = random_measure(), nu = random_measure();
    const double t = T * s.uniform();
    const double dv = std::abs(control::eikonal_value(t, mu, target, T) - control::eikonal_value(t, nu, target, T));
    const double w = randmat::wasserstein2_1d(mu, nu);
    if (dv > w + 1e-12) ++violations;
    if (w > 0) worst = std::max(worst, dv / w);
  }
  ExperimentResult r;
  r.results = {{"target_atoms", target.size()}, {"lipschitz_pairs", pairs}, {"lipschitz_violations", violations},
               {"max_lipschitz_ratio", worst}, {"derivative_error", deriv}};
  r.checks.push_back(make_check("Lipschitz violations", double(violations), 0.0));
  r.checks.push_back(make_check("derivative identity", deriv, 1e-6));
  return r;
}

json eikonal_defaults() {
  return {{"target", json::array()}, {"semicircle_atoms", 101}, {"T", 1.0}, {"x_min", -3.0},
          {"x_max", 3.0},            {"points", 121},          {"pairs", 200}};
}

// ---------------------------------------------------------------- vonneumann

ExperimentResult run_vonneumann(const json& p, RunContext& ctx) {
  const std::size_t n = as_size(p, "n"), d = as_size(p, "d");
  MatrixTuple x;
  if (!p.at("x").is_null()) {
    x = io::tuple_from_json(p.at("x"));
  } else {
    auto s = param_stream(ctx, 3);
    x = randmat::random_hermitian_tuple(n, d, p.at("x_scale").get<double>(), s);
  }
  const auto g = io::cylinder_from_json(p.at("g"));
  if (static_cast<std::size_t>(g.letters()) != x.letters()) throw io::SchemaError("vonneumann: g and x letter counts differ");
  const double T = p.at("T").get<double>();
  control::HopfLaxOptions opt;
  opt.starts = as_size(p, "starts");
  opt.seed = ctx.seed;
  opt.threads = ctx.threads;
  ExperimentResult r;
  r.results["runs"] = json::array();
  auto out = ctx.csv("hopf_lax.csv");
  out << "tau,value,alpha_norm,gradient_norm,simulated_cost\n";
  double worst_match = 0.0, prev = 1e300, monotone = 0.0;
  bool converged = true;
  for (double tau : p.at("taus").get<std::vector<double>>()) {
    const auto res = control::hopf_lax(T - tau, T, x, g, opt);
    sde::SimConfig cfg;
    cfg.n = x.size();
    cfg.d = x.letters();
    cfg.t0 = T - tau;
    cfg.T = T;
    cfg.steps = as_size(p, "sim_steps");
    cfg.snapshot_every = cfg.steps;
    double sim = g.value(x);
    if (tau > 0) {
      sde::SimOptions so;
      so.drift = sde::DriftKind::commutator;
      so.running_cost = [](double, const MatrixTuple&, const MatrixTuple& a) { return 0.5 * a.squared_norm(); };
      const auto b = sde::simulate(cfg, sde::ControlPolicy::constant(res.alpha), x, so);
      sim = sde::estimate_cost(b, [&](const MatrixTuple& y) { return g.value(y); }).mean;
    }
    worst_match = std::max(worst_match, std::abs(sim - res.value));
    monotone = std::max(monotone, res.value - prev);
    prev = res.value;
    converged = converged && res.converged;
    auto j = io::to_json(res);
    j["tau"] = tau;
    j["simulated_cost"] = sim;
    r.results["runs"].push_back(j);
    out << tau << ',' << res.value << ',' << res.alpha.norm() << ',' << res.gradient_norm << ',' << sim << '\n';
  }
  r.results["terminal_cost_at_x"] = g.value(x);
  r.checks.push_back(make_check("simulated cost vs Hopf-Lax value", worst_match, 1e-4));
  r.checks.push_back(make_check("value nonincreasing in tau", std::max(0.0, monotone), 1e-10));
  r.checks.push_back(make_check("optimizer converged", converged ? 0.0 : 1.0, 0.0));
  return r;
}

json vonneumann_defaults() {
  // n = 2: X1 = diag(1, -1), X2 = sigma_x.
  json x = {{"n", 2}, {"d", 2}, {"components", {{{"re", {1, 0, 0, -1}}, {"im", {0, 0, 0, 0}}}, {{"re", {0, 1, 1, 0}}, {"im", {0, 0, 0, 0}}}}}};
  return {{"n", 2},         {"d", 2},      {"x", x},           {"x_scale", 1.0},
          {"g", cylinder_json(sym_word(2, {0, 1}))}, {"T", 1.0}, {"taus", {0.0, 0.25, 0.5, 1.0, 2.0}},
          {"starts", 8},    {"sim_steps", 100}};
}

// ---------------------------------------------------------------- ito-check

ExperimentResult run_ito(const json& p, RunContext& ctx) {
  sde::SimConfig cfg;
  cfg.n = as_size(p, "n");
  cfg.d = as_size(p, "d");
  cfg.T = p.at("T").get<double>();
  cfg.steps = as_size(p, "steps");
  cfg.beta_c = p.at("beta_c").get<double>();
  cfg.beta_f = p.at("beta_f").get<double>();
  cfg.paths = as_size(p, "paths");
  cfg.seed = ctx.seed;
  cfg.snapshot_every = cfg.steps;
  cfg.threads = ctx.threads;
  std::vector<std::string> names;
  const auto fns = named_functions(p.at("functions"), cfg.T, names);
  auto s = param_stream(ctx, 4);
  const auto x0 = randmat::random_hermitian_tuple(cfg.n, cfg.d, p.at("x0_scale").get<double>(), s);
  const auto kind = p.at("policy").get<std::string>();
  const double scale = p.at("policy_scale").get<double>();
  sde::ControlPolicy policy = sde::ControlPolicy::zero();
  if (kind == "constant") {
    policy = sde::ControlPolicy::constant(randmat::random_hermitian_tuple(cfg.n, cfg.d, scale, s));
  } else if (kind == "linear") {
    policy = sde::ControlPolicy::feedback([scale](double, const MatrixTuple& x) { return x * -scale; }, "linear");
  } else if (kind != "zero") {
    throw io::SchemaError("ito-check: policy must be zero, constant or linear");
  }
  hjb::ItoOptions opt;
  opt.observe_every = as_size(p, "observe_every");
  opt.c1 = p.at("c1").get<double>();
  opt.se_multiplier = p.at("se_multiplier").get<double>();
  const auto reps = hjb::ito_check(fns, names, cfg, policy, x0, sde::DriftKind::identity, opt);
  ExperimentResult r;
  // Polynomial test functions are only locally bounded: record the radius of the start.
  r.results["x0_operator_norm"] = x0.operator_norm();
  r.results["cases"] = json::array();
  auto out = ctx.csv("ito.csv");
  out << "function,lhs,rhs,diff_se,finite_n_bias,tolerance,pass\n";
  for (const auto& rep : reps) {
    r.results["cases"].push_back(hjb::to_json(rep));
    out << rep.function << ',' << rep.lhs << ',' << rep.rhs << ',' << rep.diff_se << ',' << rep.finite_n_bias << ','
        << rep.tolerance << ',' << (rep.pass ? 1 : 0) << '\n';
    r.checks.push_back({"Ito identity: " + rep.function, std::abs(rep.lhs - rep.rhs), rep.tolerance, rep.pass});
  }
  return r;
}

json ito_defaults() {
  return {{"n", 20},
          {"d", 1},
          {"T", 0.2},
          {"steps", 100},
          {"paths", 500},
          {"beta_c", 0.5},
          {"beta_f", 1.0},
          {"x0_scale", 1.0},
          {"policy", "linear"},
          {"policy_scale", 1.0},
          {"observe_every", 10},
          {"c1", 0.0},
          {"se_multiplier", 3.0},
          {"functions",
           {{{"name", "tau(x1^2)"}, {"cylinder", cylinder_json(NCPolynomial::monomial(1, Word{0, 0}))}},
            {{"name", "tau(x1^4)"}, {"cylinder", cylinder_json(NCPolynomial::monomial(1, Word{0, 0, 0, 0}))}},
            {{"name", "tau(x1)^2"}, {"cylinder", square_of_trace(1)}}}}};
}

// ---------------------------------------------------------------- laplacian

ExperimentResult run_laplacian(const json& p, RunContext& ctx) {
  std::vector<std::string> names;
  std::vector<CylinderFunction> fns;
  for (const auto& f : named_functions(p.at("functions"), 1.0, names)) fns.push_back(f.at(0.0));
  if (fns.empty()) throw io::SchemaError("laplacian: no functions");
  const auto d = static_cast<std::size_t>(fns.front().letters());
  for (const auto& f : fns)
    if (static_cast<std::size_t>(f.letters()) != d) throw io::SchemaError("laplacian: functions differ in letter count");
  const std::size_t samples = as_size(p, "samples");
  ExperimentResult r;
  r.results["rows"] = json::array();
  auto out = ctx.csv("laplacian.csv");
  out << "n,function,formula,mc_mean,mc_se,bias,c2\n";
  for (const auto& nj : p.at("n")) {
    const auto n = nj.get<std::size_t>();
    auto s = Stream::derive(ctx.seed, n, StreamTag::user, 5);
    const auto x = randmat::random_hermitian_tuple(n, d, p.at("x_scale").get<double>(), s);
    for (std::size_t f = 0; f < fns.size(); ++f) {
      const double formula = freecalc::free_laplacian(fns[f], x);
      const auto mc = freecalc::free_laplacian_mc(fns[f], x, samples, s);
      const double bias = freecalc::free_laplacian_mc_bias(fns[f], x);
      const double c2 = double(n) * double(n) * bias;
      r.results["rows"].push_back({{"n", n}, {"x_operator_norm", x.operator_norm()}, {"function", names[f]}, {"formula", formula}, {"mc_mean", mc.mean},
                                   {"mc_se", mc.std_error}, {"bias", bias}, {"c2", c2}});
      out << n << ',' << names[f] << ',' << formula << ',' << mc.mean << ',' << mc.std_error << ',' << bias << ',' << c2
          << '\n';
      r.checks.push_back(make_check("n=" + std::to_string(n) + " " + names[f], std::abs(mc.mean - formula),
                                    3 * mc.std_error + std::abs(bias) + 1e-12));
    }
  }
  return r;
}

json laplacian_defaults() {
  return {{"n", {50, 100}},
          {"samples", 100},
          {"x_scale", 1.0},
          {"functions",
           {{{"name", "tau(x1^2)"}, {"cylinder", cylinder_json(NCPolynomial::monomial(2, Word{0, 0}))}},
            {{"name", "tau(x1^4)"}, {"cylinder", cylinder_json(NCPolynomial::monomial(2, Word{0, 0, 0, 0}))}},
            {{"name", "tau(x1 x2 x1 x2)"}, {"cylinder", cylinder_json(sym_word(2, {0, 1, 0, 1}))}},
            {{"name", "tau(x1)^2"}, {"cylinder", square_of_trace(2)}}}}};
}

// ---------------------------------------------------------------- dyson

ExperimentResult run_dyson(const json& p, RunContext& ctx) {
  sde::SimConfig cfg;
  cfg.n = as_size(p, "n");
  cfg.d = 1;
  cfg.T = p.at("T").get<double>();
  cfg.steps = as_size(p, "steps");
  cfg.beta_c = p.at("beta_c").get<double>();
  cfg.beta_f = p.at("beta_f").get<double>();
  cfg.paths = as_size(p, "paths");
  cfg.seed = ctx.seed;
  cfg.snapshot_every = cfg.steps;
  cfg.threads = ctx.threads;
  auto s = param_stream(ctx, 6);
  const MatrixTuple x0(std::vector<Matrix>{randmat::gue_increment(cfg.n, p.at("x0_variance").get<double>(), s)});
  const auto full = sde::simulate(cfg, sde::ControlPolicy::zero(), x0);
  const auto particles = sde::dyson_simulate(cfg, randmat::spectral_measure(x0[0]));
  std::vector<double> w2;
  for (std::size_t k = 0; k < cfg.paths; ++k) {
    if (!full.paths[k].ok) throw NumericalError("dyson: matrix path " + std::to_string(k) + ": " + full.paths[k].diagnostic);
    if (!particles.paths[k].ok)
      throw NumericalError("dyson: particle path " + std::to_string(k) + ": " + particles.paths[k].diagnostic);
    w2.push_back(randmat::wasserstein2_1d(randmat::spectral_measure(full.paths[k].terminal[0]),
                                          randmat::SpectralMeasure(particles.paths[k].terminal)));
  }
  const auto e = estimate_mean(w2);
  {
    auto out = ctx.csv("dyson_spectra.csv");
    out << "index,particles,matrix\n";
    const auto m = randmat::spectral_measure(full.paths[0].terminal[0]).atoms();
    const auto& q = particles.paths[0].terminal;
    for (std::size_t i = 0; i < m.size(); ++i) out << i << ',' << q[i] << ',' << m[i] << '\n';
  }
  ExperimentResult r;
  r.results = {{"w2", w2}, {"w2_mean", e.mean}, {"w2_se", e.std_error}};
  r.checks.push_back(make_check("W2 particles vs matrix", e.mean, p.at("w2_tolerance").get<double>() + 3 * e.std_error));
  return r;
}

json dyson_defaults() {
  return {{"n", 200},  {"T", 1.0},          {"steps", 1000}, {"beta_c", 0.7}, {"beta_f", 1.0},
          {"paths", 4}, {"x0_variance", 0.5}, {"w2_tolerance", 0.05}};
}

// ---------------------------------------------------------------- gue-moments

ExperimentResult run_gue(const json& p, RunContext& ctx) {
  const std::size_t n = as_size(p, "n"), samples = as_size(p, "samples"), kmax = as_size(p, "k_max");
  if (n == 0 || samples < 2 || kmax == 0) throw io::SchemaError("gue-moments: need n >= 1, samples >= 2, k_max >= 1");
  std::vector<std::vector<double>> tr(kmax + 1, std::vector<double>(samples));
  parallel_for(samples, ctx.threads, [&](std::size_t m) {
    auto s = Stream::derive(ctx.seed, m, StreamTag::user, 7);
    const Matrix w = randmat::gue_increment(n, 1.0, s);
    const Matrix w2 = w * w;
    Matrix pw = w2;
    for (std::size_t k = 1; k <= kmax; ++k) {
      tr[k][m] = normalized_trace(pw).real();
      if (k < kmax) pw = pw * w2;
    }
  });
  ExperimentResult r;
  r.results["moments"] = json::array();
  auto out = ctx.csv("gue_moments.csv");
  out << "k,mean,se,catalan,tolerance\n";
  for (std::size_t k = 1; k <= kmax; ++k) {
    const auto e = estimate_mean(tr[k]);
    const double c = double(ncpoly::catalan(static_cast<unsigned>(k)));
    const double tol = 3 * e.std_error + 5.0 / double(n);
    r.results["moments"].push_back({{"k", k}, {"mean", e.mean}, {"se", e.std_error}, {"catalan", c}});
    out << k << ',' << e.mean << ',' << e.std_error << ',' << c << ',' << tol << '\n';
    r.checks.push_back(make_check("tr W^" + std::to_string(2 * k) + " vs Catalan", std::abs(e.mean - c), tol));
  }
  return r;
}

json gue_defaults() { return {{"n", 200}, {"samples", 2000}, {"k_max", 4}}; }

}  // namespace

json merge_params(const json& defaults, const json& user, const std::string& where) {
  if (!user.is_object()) throw io::SchemaError(where + ": params must be an object");
  json out = defaults;
  for (const auto& [key, value] : user.items()) {
    if (!defaults.contains(key)) throw io::SchemaError(where + ": unknown parameter '" + key + "'");
    if (!same_type(defaults.at(key), value))
      throw io::SchemaError(where + ": parameter '" + key + "' has the wrong type");
    out[key] = value;
  }
  return out;
}

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> list{
      {"lq", "Riccati system of the linear-quadratic problem, optional closed-loop Monte Carlo", lq_defaults(), run_lq},
      {"eikonal", "Eikonal value and its scalar diagnostics against a target spectral measure", eikonal_defaults(),
       run_eikonal},
      {"vonneumann", "Hopf-Lax formula for the controlled von Neumann equation (constant controls)",
       vonneumann_defaults(), run_vonneumann},
      {"ito-check", "Mixed Ito identity for cylinder functions along simulated paths", ito_defaults(), run_ito},
      {"laplacian", "Free Laplacian formula against its Monte Carlo definition", laplacian_defaults(), run_laplacian},
      {"dyson", "Eigenvalue particles against the full matrix simulation", dyson_defaults(), run_dyson},
      {"gue-moments", "GUE trace moments against Catalan numbers", gue_defaults(), run_gue},
  };
  return list;
}

const Experiment* find_experiment(const std::string& kind) {
  for (const auto& e : experiments())
    if (e.kind == kind) return &e;
  return nullptr;
}

}  // namespace freectl::cli
