#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "freectl/freecalc.hpp"
#include "freectl/matrix_tuple.hpp"
#include "freectl/randmat.hpp"
#include "freectl/stats.hpp"

/// Euler-Maruyama simulation of
///   dX = b(X, alpha) dt + beta_C 1 dW0 + beta_F dW
/// with a scalar common noise W0 shared by all components and independent
/// GUE(n) matrix Brownian motions W per component.
namespace freectl::sde {

struct SimConfig {
  std::size_t n = 10;
  std::size_t d = 1;
  double t0 = 0.0;
  double T = 1.0;
  std::size_t steps = 100;
  double beta_c = 0.0;
  double beta_f = 0.0;
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  /// Keep a state summary every this many steps (the final step is always kept).
  std::size_t snapshot_every = 1;
  /// 0 means one per logical core.
  std::size_t threads = 1;

  double dt() const { return (T - t0) / static_cast<double>(steps); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt(); }
  /// Throws DimensionError when the fields are inconsistent.
  void validate() const;
};

enum class DriftKind {
  identity,    // b = alpha
  commutator,  // b = i[X, alpha], integrated as X <- e^{-i alpha dt} X e^{i alpha dt}
};

using PolicyFn = std::function<MatrixTuple(double t, const MatrixTuple& x)>;

/// Feedback control alpha = f(t, X_t). The state is the only input, so the
/// control is adapted by construction.
class ControlPolicy {
 public:
  static ControlPolicy zero();
  static ControlPolicy constant(MatrixTuple alpha);
  static ControlPolicy feedback(PolicyFn fn, std::string name = "feedback");
  /// alpha = maximizer of the Hamiltonian at P = -grad U(t, X).
  static ControlPolicy gradient_feedback(freecalc::TimeDependentCylinder u, freecalc::HamiltonianSpec spec);

  const std::string& name() const { return name_; }
  MatrixTuple operator()(double t, const MatrixTuple& x) const;

 private:
  std::string name_;
  PolicyFn fn_;
};

/// Real-valued function of (t, X_t, alpha_t) evaluated along each path.
using PathFn = std::function<double(double t, const MatrixTuple& x, const MatrixTuple& alpha)>;

struct SimOptions {
  DriftKind drift = DriftKind::identity;
  /// Running cost L, integrated by the trapezoidal rule on the fine grid.
  PathFn running_cost;
  /// Observables recorded every `observe_every` steps (and at the last step).
  std::vector<PathFn> observables;
  std::size_t observe_every = 1;
  /// Several observables computed together so they can share work. Must
  /// return the same number of values at every node; they follow those of
  /// `observables` in PathRecord::observed.
  std::function<std::vector<double>(double t, const MatrixTuple& x, const MatrixTuple& alpha)> observable_block;
  bool keep_terminal = true;
  /// Keep full states at the snapshot times (memory heavy).
  bool keep_states = false;
};

struct Snapshot {
  double t = 0.0;
  double trace = 0.0;          // sum_j tr_n X_j
  double trace_square = 0.0;   // sum_j tr_n X_j^2
  double running_cost = 0.0;   // cumulative up to t
};

struct PathRecord {
  std::size_t index = 0;
  bool ok = true;
  std::string diagnostic;
  std::vector<double> common_increments;  // dW0 per step
  std::vector<Snapshot> snapshots;
  std::vector<MatrixTuple> states;        // when keep_states
  std::vector<std::vector<double>> observed;  // [observable][node]
  double running_cost = 0.0;
  MatrixTuple terminal;
};

struct TrajectoryBatch {
  SimConfig config;
  std::vector<double> snapshot_times;
  std::vector<double> observe_times;
  std::vector<PathRecord> paths;

  std::size_t aborted() const;
};

/// Runs config.paths independent paths. Path p draws its noise from streams
/// keyed by (seed, p), so any path can be replayed alone.
TrajectoryBatch simulate(const SimConfig& config, const ControlPolicy& policy, const MatrixTuple& x0,
                         const SimOptions& options = {});
PathRecord simulate_path(const SimConfig& config, const ControlPolicy& policy, const MatrixTuple& x0,
                         const SimOptions& options, std::size_t path);

/// E[int L dt + g(X_T)] over the non-aborted paths. Needs keep_terminal when
/// g is given.
Estimate estimate_cost(const TrajectoryBatch& batch, const std::function<double(const MatrixTuple&)>& terminal_cost);

/// Fixed-point iteration of the integral equation with the noise of one path
/// frozen. Returns, for each sweep, the largest Frobenius distance to the
/// Euler path over the grid. The discrete iteration reaches the Euler path
/// exactly after `steps` sweeps.
std::vector<double> picard_validate(const SimConfig& config, const ControlPolicy& policy, const MatrixTuple& x0,
                                    std::size_t path, std::size_t sweeps);

/// path, t, tr_X, tr_X2, running_cost; one row per snapshot.
void write_csv(const TrajectoryBatch& batch, std::ostream& out);

// ---------------------------------------------------------------- Dyson particles

/// Scalar drift a(t, lambda) applied to every eigenvalue.
using ScalarDrift = std::function<double(double t, double lambda)>;

struct DysonOptions {
  ScalarDrift drift;
  /// A step is halved (by Brownian bridge) while it would reorder particles or
  /// change some gap by more than this factor (or its inverse).
  double gap_shrink_limit = 0.25;
  std::size_t max_depth = 64;
};

struct DysonPath {
  bool ok = true;
  std::string diagnostic;
  std::vector<double> common_increments;
  std::vector<std::vector<double>> snapshots;  // sorted eigenvalues at snapshot times
  std::vector<double> terminal;
  std::size_t substeps = 0;
};

struct DysonBatch {
  SimConfig config;
  std::vector<double> snapshot_times;
  std::vector<DysonPath> paths;
};

/// Eigenvalue particles
///   d lambda_i = a dt + beta_C dW0 + beta_F dB_i / sqrt(n) + (beta_F^2 / n) sum_{j != i} dt / (lambda_i - lambda_j).
/// Requires d = 1 and x0 with n atoms; tied atoms are split by 1e-9.
/// The common noise uses the same stream as simulate, so matching seeds share W0.
DysonBatch dyson_simulate(const SimConfig& config, const randmat::SpectralMeasure& x0, const DysonOptions& options = {});

}  // namespace freectl::sde
