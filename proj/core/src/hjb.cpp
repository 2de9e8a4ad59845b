#include "freectl/hjb.hpp"

#include <cmath>

#include "freectl/error.hpp"

namespace freectl::hjb {

using freecalc::TimeDependentCylinder;

double ResidualReport::recompute() const {
  return -time_derivative + hamiltonian - 0.5 * beta_c * beta_c * delta - 0.5 * beta_f * beta_f * theta;
}

ResidualReport hjb_residual(const TimeDependentCylinder& u, const freecalc::HamiltonianSpec& spec, double beta_c,
                            double beta_f, double t, const MatrixTuple& x,
                            const std::function<double(const MatrixTuple&)>& terminal) {
  ResidualReport r;
  r.t = t;
  r.x_norm = x.norm();
  r.beta_c = beta_c;
  r.beta_f = beta_f;
  const auto ut = u.at(t);
  r.time_derivative = u.time_derivative(t, x);
  r.hamiltonian = freecalc::hamiltonian(spec, x, -freecalc::grad(ut, x));
  ncpoly::WordEvaluator ev(x);
  r.delta = freecalc::common_laplacian(ut, ev);
  r.theta = freecalc::free_laplacian(ut, ev);
  r.residual = r.recompute();
  if (terminal) r.terminal_gap = u.value(u.t_end(), x) - terminal(x);
  return r;
}

// ---------------------------------------------------------------- Ito

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

}  // namespace

std::vector<ItoReport> ito_check(const std::vector<TimeDependentCylinder>& functions,
                                 const std::vector<std::string>& names, const sde::SimConfig& config,
                                 const sde::ControlPolicy& policy, const MatrixTuple& x0, sde::DriftKind drift,
                                 const ItoOptions& options) {
  FREECTL_REQUIRE_DIMS(names.size() == functions.size(), "ito_check: one name per function");
  const double bc2 = 0.5 * config.beta_c * config.beta_c;
  const double bf2 = 0.5 * config.beta_f * config.beta_f;

  sde::SimOptions sim;
  sim.drift = drift;
  sim.keep_terminal = false;
  sim.observe_every = options.observe_every;
  // Per function: value, generator, finite-n bias; one evaluator per node.
  sim.observable_block = [&functions, drift, bc2, bf2](double t, const MatrixTuple& x, const MatrixTuple& alpha) {
    const MatrixTuple b = drift == sde::DriftKind::commutator ? freecalc::commutator_drift(x, alpha) : alpha;
    ncpoly::WordEvaluator ev(x);
    std::vector<double> out;
    out.reserve(3 * functions.size());
    for (const auto& u : functions) {
      const auto ut = u.at(t);
      const RealVector v = ut.inner_values(ev);
      double g = u.time_derivative(t, v) + freecalc::grad(ut, ev).inner(b);
      if (bc2 != 0.0) g += bc2 * freecalc::common_laplacian(ut, ev);
      if (bf2 != 0.0) g += bf2 * freecalc::free_laplacian(ut, ev);
      out.push_back(ut.outer().value(v));
      out.push_back(g);
      out.push_back(bf2 == 0.0 ? 0.0 : bf2 * freecalc::free_laplacian_mc_bias(ut, ev));
    }
    return out;
  };
  const sde::TrajectoryBatch batch = sde::simulate(config, policy, x0, sim);
  if (batch.aborted() > 0) throw NumericalError("ito_check: " + std::to_string(batch.aborted()) + " paths aborted");

  std::vector<ItoReport> reports;
  for (std::size_t f = 0; f < functions.size(); ++f) {
    const double u0 = functions[f].value(config.t0, x0);
    std::vector<double> lhs, rhs, diff, bias;
    for (const auto& p : batch.paths) {
      const auto& vals = p.observed[3 * f];
      const double l = vals.back() - u0;
      const double r = trapezoid(batch.observe_times, p.observed[3 * f + 1]);
      lhs.push_back(l);
      rhs.push_back(r);
      diff.push_back(l - r);
      bias.push_back(trapezoid(batch.observe_times, p.observed[3 * f + 2]));
    }
    ItoReport rep;
    rep.function = names[f];
    rep.paths = batch.paths.size();
    const Estimate el = estimate_mean(lhs), er = estimate_mean(rhs), ed = estimate_mean(diff);
    rep.lhs = el.mean;
    rep.rhs = er.mean;
    rep.lhs_se = el.std_error;
    rep.rhs_se = er.std_error;
    rep.diff_se = ed.std_error;
    rep.time_bias = options.c1 * config.dt();
    rep.finite_n_bias = estimate_mean(bias).mean;
    rep.tolerance = options.se_multiplier * rep.diff_se + rep.time_bias + std::abs(rep.finite_n_bias);
    rep.pass = std::abs(rep.lhs - rep.rhs) <= rep.tolerance;
    reports.push_back(std::move(rep));
  }
  return reports;
}

// ---------------------------------------------------------------- dynamic programming

DppReport dpp_check(const ValueFn& value, const sde::SimConfig& config, const std::vector<sde::ControlPolicy>& candidates,
                    const MatrixTuple& x0, const sde::PathFn& running_cost, double bias, sde::DriftKind drift) {
  FREECTL_REQUIRE_DIMS(!candidates.empty(), "dpp_check: need at least one candidate policy");
  DppReport r;
  r.t0 = config.t0;
  r.t1 = config.T;
  r.bias = bias;
  r.value = value(config.t0, x0);
  if (config.t0 == config.T) {
    for (const auto& c : candidates) r.candidates.push_back({c.name(), Estimate{r.value, 0.0, 1}, true});
    r.sub_ok = r.gap_ok = true;
    r.gap_tolerance = bias;
    return r;
  }
  sde::SimOptions sim;
  sim.drift = drift;
  sim.running_cost = running_cost;
  const double t1 = config.T;
  for (const auto& c : candidates) {
    const auto batch = sde::simulate(config, c, x0, sim);
    if (batch.aborted() > 0) throw NumericalError("dpp_check: paths aborted for policy " + c.name());
    DppCandidate cand;
    cand.policy = c.name();
    cand.cost = sde::estimate_cost(batch, [&](const MatrixTuple& x) { return value(t1, x); });
    cand.sub_ok = r.value <= cand.cost.mean + 3.0 * cand.cost.std_error + bias;
    r.candidates.push_back(std::move(cand));
  }
  r.sub_ok = true;
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    r.sub_ok = r.sub_ok && r.candidates[k].sub_ok;
    if (r.candidates[k].cost.mean < r.candidates[r.best].cost.mean) r.best = k;
  }
  r.gap = r.candidates[r.best].cost.mean - r.value;
  r.gap_tolerance = 3.0 * r.candidates[r.best].cost.std_error + bias;
  r.gap_ok = r.gap <= r.gap_tolerance;
  return r;
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json j = {{"t", r.t},
                      {"x_norm", r.x_norm},
                      {"beta_c", r.beta_c},
                      {"beta_f", r.beta_f},
                      {"time_derivative", r.time_derivative},
                      {"hamiltonian", r.hamiltonian},
                      {"delta", r.delta},
                      {"theta", r.theta},
                      {"residual", r.residual}};
  if (r.terminal_gap) j["terminal_gap"] = *r.terminal_gap;
  return j;
}

nlohmann::json to_json(const ItoReport& r) {
  return {{"function", r.function},     {"lhs", r.lhs},           {"rhs", r.rhs},
          {"lhs_se", r.lhs_se},         {"rhs_se", r.rhs_se},     {"diff_se", r.diff_se},
          {"time_bias", r.time_bias},   {"finite_n_bias", r.finite_n_bias},
          {"tolerance", r.tolerance},   {"paths", r.paths},       {"pass", r.pass}};
}

nlohmann::json to_json(const DppReport& r) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : r.candidates)
    cands.push_back({{"policy", c.policy}, {"mean", c.cost.mean}, {"std_error", c.cost.std_error}, {"sub_ok", c.sub_ok}});
  return {{"t0", r.t0},       {"t1", r.t1},           {"value", r.value},
          {"bias", r.bias},   {"candidates", cands},  {"best", r.best},
          {"gap", r.gap},     {"gap_tolerance", r.gap_tolerance},
          {"sub_ok", r.sub_ok}, {"gap_ok", r.gap_ok},
          {"note", "matrix representations only; the infimum over all tracial embeddings is not computed"}};
}

}  // namespace freectl::hjb
