#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "freectl/freecalc.hpp"
#include "freectl/sde.hpp"
#include "freectl/stats.hpp"

/// Checks that tie a value function, its generator and simulated paths together.
namespace freectl::hjb {

struct ResidualReport {
  double t = 0.0;
  double x_norm = 0.0;
  double beta_c = 0.0;
  double beta_f = 0.0;
  double time_derivative = 0.0;  // d/dt U
  double hamiltonian = 0.0;      // H(X, -grad U)
  double delta = 0.0;            // common-noise Laplacian
  double theta = 0.0;            // free Laplacian
  double residual = 0.0;
  std::optional<double> terminal_gap;  // U(T, X) - g(X) when g is supplied

  /// -dU/dt + H - beta_C^2/2 delta - beta_F^2/2 theta from the stored terms.
  double recompute() const;
};

ResidualReport hjb_residual(const freecalc::TimeDependentCylinder& u, const freecalc::HamiltonianSpec& spec,
                            double beta_c, double beta_f, double t, const MatrixTuple& x,
                            const std::function<double(const MatrixTuple&)>& terminal = {});

struct ItoOptions {
  /// Generator integrand sampled every this many steps (trapezoidal rule in between).
  std::size_t observe_every = 10;
  /// Allowance per unit dt for the time discretization.
  double c1 = 0.0;
  double se_multiplier = 3.0;
};

struct ItoReport {
  std::string function;
  double lhs = 0.0;       // E U(T, X_T) - U(t0, x0)
  double rhs = 0.0;       // E int (dU/dt + <grad U, b> + beta_C^2/2 delta + beta_F^2/2 theta)
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  double diff_se = 0.0;   // standard error of the pathwise difference
  double time_bias = 0.0;   // c1 dt
  double finite_n_bias = 0.0;  // E int beta_F^2/2 (finite-n Laplacian - theta), analytic; enters the tolerance in absolute value
  double tolerance = 0.0;
  std::size_t paths = 0;
  bool pass = false;
};

/// Runs one batch and checks the Ito identity for every function on it.
std::vector<ItoReport> ito_check(const std::vector<freecalc::TimeDependentCylinder>& functions,
                                 const std::vector<std::string>& names, const sde::SimConfig& config,
                                 const sde::ControlPolicy& policy, const MatrixTuple& x0, sde::DriftKind drift,
                                 const ItoOptions& options = {});

struct DppCandidate {
  std::string policy;
  Estimate cost;  // E[int_{t0}^{t1} L dt + V(t1, X_{t1})]
  bool sub_ok = false;
};

struct DppReport {
  double t0 = 0.0, t1 = 0.0;
  double value = 0.0;  // V(t0, x0)
  double bias = 0.0;
  std::vector<DppCandidate> candidates;
  std::size_t best = 0;
  double gap = 0.0;            // best cost - V(t0, x0)
  double gap_tolerance = 0.0;  // 3 SE of the best + bias
  bool sub_ok = false;
  bool gap_ok = false;
};

using ValueFn = std::function<double(double t, const MatrixTuple& x)>;

/// Sub-check: V(t0, x0) <= E[int L + V(t1, X_t1)] + 3 SE + bias for every
/// candidate. Super side: the best candidate's gap, reported with a
/// tolerance. config.t0 and config.T play the roles of t0 and t1.
DppReport dpp_check(const ValueFn& value, const sde::SimConfig& config, const std::vector<sde::ControlPolicy>& candidates,
                    const MatrixTuple& x0, const sde::PathFn& running_cost, double bias,
                    sde::DriftKind drift = sde::DriftKind::identity);

nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const ItoReport& r);
nlohmann::json to_json(const DppReport& r);

}  // namespace freectl::hjb
