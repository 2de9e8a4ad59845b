#include "freectl/sde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "freectl/error.hpp"
#include "freectl/parallel.hpp"

namespace freectl::sde {

void SimConfig::validate() const {
  FREECTL_REQUIRE_DIMS(n >= 1 && d >= 1, "SimConfig: n and d must be positive");
  FREECTL_REQUIRE_DIMS(t0 < T, "SimConfig: need t0 < T");
  FREECTL_REQUIRE_DIMS(steps >= 1 && paths >= 1, "SimConfig: steps and paths must be positive");
  FREECTL_REQUIRE_DIMS(beta_c >= 0.0 && beta_f >= 0.0, "SimConfig: noise coefficients must be nonnegative");
  FREECTL_REQUIRE_DIMS(snapshot_every >= 1, "SimConfig: snapshot_every must be positive");
}

std::size_t TrajectoryBatch::aborted() const {
  return static_cast<std::size_t>(std::count_if(paths.begin(), paths.end(), [](const auto& p) { return !p.ok; }));
}

// ---------------------------------------------------------------- policies

ControlPolicy ControlPolicy::zero() {
  ControlPolicy p;
  p.name_ = "zero";
  p.fn_ = [](double, const MatrixTuple& x) { return MatrixTuple::zeros(x.size(), x.letters()); };
  return p;
}

ControlPolicy ControlPolicy::constant(MatrixTuple alpha) {
  ControlPolicy p;
  p.name_ = "constant";
  p.fn_ = [a = std::move(alpha)](double, const MatrixTuple&) { return a; };
  return p;
}

ControlPolicy ControlPolicy::feedback(PolicyFn fn, std::string name) {
  ControlPolicy p;
  p.name_ = std::move(name);
  p.fn_ = std::move(fn);
  return p;
}

ControlPolicy ControlPolicy::gradient_feedback(freecalc::TimeDependentCylinder u, freecalc::HamiltonianSpec spec) {
  ControlPolicy p;
  p.name_ = "gradient_feedback";
  p.fn_ = [u = std::move(u), spec = std::move(spec)](double t, const MatrixTuple& x) {
    const MatrixTuple minus_grad = -freecalc::grad(u.at(t), x);
    return freecalc::hamiltonian_maximizer(spec, x, minus_grad);
  };
  return p;
}

MatrixTuple ControlPolicy::operator()(double t, const MatrixTuple& x) const {
  MatrixTuple a = fn_(t, x);
  if (!a.same_shape(x)) throw DimensionError("ControlPolicy '" + name_ + "': control does not match the state shape");
  return a;
}

// ---------------------------------------------------------------- simulation

namespace {

struct PathStreams {
  Stream common;
  Stream free;
  PathStreams(const SimConfig& c, std::size_t path)
      : common(Stream::derive(c.seed, path, StreamTag::common_noise)),
        free(Stream::derive(c.seed, path, StreamTag::free_noise)) {}
};

// Adds the step's noise to x and returns dW0. The common normal is drawn even
// when beta_C = 0 so that paths stay aligned across noise settings.
double add_noise(const SimConfig& c, PathStreams& s, MatrixTuple& x) {
  const double dt = c.dt();
  const double dw0 = std::sqrt(dt) * s.common.normal();
  if (c.beta_c > 0.0)
    for (std::size_t j = 0; j < x.letters(); ++j) x[j].diagonal().array() += Complex(c.beta_c * dw0, 0.0);
  if (c.beta_f > 0.0)
    for (std::size_t j = 0; j < x.letters(); ++j) x[j] += c.beta_f * randmat::gue_increment(c.n, dt, s.free);
  return dw0;
}

void conjugate_step(MatrixTuple& x, const MatrixTuple& alpha, double dt) {
  const Complex i(0.0, 1.0);
  for (std::size_t j = 0; j < x.letters(); ++j) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(alpha[j]));
    if (es.info() != Eigen::Success) throw NumericalError("commutator step: eigensolver failed");
    const Eigen::VectorXcd phase = (-i * dt * es.eigenvalues().cast<Complex>()).array().exp();
    const Matrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    x[j] = u * x[j] * u.adjoint();
  }
}

Snapshot summarize(double t, const MatrixTuple& x, double cost) {
  Snapshot s;
  s.t = t;
  s.running_cost = cost;
  for (const auto& m : x.components()) {
    s.trace += normalized_trace(m).real();
    s.trace_square += m.squaredNorm() / static_cast<double>(m.rows());
  }
  return s;
}

bool keep_index(std::size_t k, std::size_t every, std::size_t last) { return k % every == 0 || k == last; }

void check_inputs(const SimConfig& config, const MatrixTuple& x0, const SimOptions& options) {
  config.validate();
  FREECTL_REQUIRE_DIMS(x0.size() == config.n && x0.letters() == config.d, "simulate: x0 does not match (n, d)");
  if (!x0.is_hermitian(1e-10)) throw DimensionError("simulate: initial data is not Hermitian");
  FREECTL_REQUIRE_DIMS(options.observe_every >= 1, "simulate: observe_every must be positive");
  if (options.drift == DriftKind::commutator && (config.beta_c != 0.0 || config.beta_f != 0.0))
    throw UnsupportedError("simulate: the commutator drift is only supported without noise");
}

}  // namespace

PathRecord simulate_path(const SimConfig& config, const ControlPolicy& policy, const MatrixTuple& x0,
                         const SimOptions& options, std::size_t path) {
  check_inputs(config, x0, options);
  PathRecord rec;
  rec.index = path;
  rec.observed.resize(options.observables.size());
  rec.common_increments.reserve(config.steps);
  PathStreams streams(config, path);
  const double dt = config.dt();
  MatrixTuple x = x0;
  double cost = 0.0, prev_l = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double t = config.time(k);
    const MatrixTuple alpha = policy(t, x);
    if (options.running_cost) {
      const double l = options.running_cost(t, x, alpha);
      if (k > 0) cost += 0.5 * dt * (prev_l + l);
      prev_l = l;
    }
    if (keep_index(k, options.observe_every, config.steps)) {
      const std::size_t m = options.observables.size();
      for (std::size_t q = 0; q < m; ++q) rec.observed[q].push_back(options.observables[q](t, x, alpha));
      if (options.observable_block) {
        const std::vector<double> vals = options.observable_block(t, x, alpha);
        if (k == 0) rec.observed.resize(m + vals.size());
        FREECTL_REQUIRE_DIMS(rec.observed.size() == m + vals.size(), "simulate: observable block changed size");
        for (std::size_t q = 0; q < vals.size(); ++q) rec.observed[m + q].push_back(vals[q]);
      }
    }
    if (keep_index(k, config.snapshot_every, config.steps)) {
      rec.snapshots.push_back(summarize(t, x, cost));
      if (options.keep_states) rec.states.push_back(x);
    }
    if (k == config.steps) break;

    if (options.drift == DriftKind::commutator) {
      conjugate_step(x, alpha, dt);
    } else {
      x += alpha * dt;
    }
    rec.common_increments.push_back(add_noise(config, streams, x));
    x.symmetrize();
    if (!x.all_finite()) {
      rec.ok = false;
      rec.diagnostic = "non-finite state at step " + std::to_string(k + 1) + " (t = " + std::to_string(config.time(k + 1)) + ")";
      break;
    }
  }
  rec.running_cost = cost;
  if (options.keep_terminal) rec.terminal = std::move(x);
  return rec;
}

TrajectoryBatch simulate(const SimConfig& config, const ControlPolicy& policy, const MatrixTuple& x0,
                         const SimOptions& options) {
  check_inputs(config, x0, options);
  TrajectoryBatch batch;
  batch.config = config;
  for (std::size_t k = 0; k <= config.steps; ++k) {
    if (keep_index(k, config.snapshot_every, config.steps)) batch.snapshot_times.push_back(config.time(k));
    if (keep_index(k, options.observe_every, config.steps)) batch.observe_times.push_back(config.time(k));
  }
  batch.paths.resize(config.paths);
  parallel_for(config.paths, config.threads,
               [&](std::size_t p) { batch.paths[p] = simulate_path(config, policy, x0, options, p); });
  return batch;
}

Estimate estimate_cost(const TrajectoryBatch& batch, const std::function<double(const MatrixTuple&)>& terminal_cost) {
  std::vector<double> v;
  v.reserve(batch.paths.size());
  for (const auto& p : batch.paths) {
    if (!p.ok) continue;
    double c = p.running_cost;
    if (terminal_cost) {
      if (p.terminal.empty()) throw DimensionError("estimate_cost: terminal states were not kept");
      c += terminal_cost(p.terminal);
    }
    v.push_back(c);
  }
  return estimate_mean(v);
}

std::vector<double> picard_validate(const SimConfig& config, const ControlPolicy& policy, const MatrixTuple& x0,
                                    std::size_t path, std::size_t sweeps) {
  check_inputs(config, x0, {});
  const double dt = config.dt();
  // Noise increments of the path, drawn in the same order as simulate_path.
  PathStreams streams(config, path);
  std::vector<MatrixTuple> noise;
  noise.reserve(config.steps);
  for (std::size_t k = 0; k < config.steps; ++k) {
    MatrixTuple z = MatrixTuple::zeros(config.n, config.d);
    add_noise(config, streams, z);
    noise.push_back(std::move(z));
  }
  std::vector<MatrixTuple> euler{x0};
  for (std::size_t k = 0; k < config.steps; ++k) {
    MatrixTuple next = euler.back() + policy(config.time(k), euler.back()) * dt + noise[k];
    next.symmetrize();
    euler.push_back(std::move(next));
  }
  std::vector<MatrixTuple> iterate(config.steps + 1, x0);
  std::vector<double> gaps;
  for (std::size_t m = 0; m < sweeps; ++m) {
    std::vector<MatrixTuple> next{x0};
    MatrixTuple acc = x0;
    for (std::size_t k = 0; k < config.steps; ++k) {
      acc += policy(config.time(k), iterate[k]) * dt + noise[k];
      MatrixTuple s = acc;
      s.symmetrize();
      next.push_back(std::move(s));
    }
    iterate = std::move(next);
    double gap = 0.0;
    for (std::size_t k = 0; k <= config.steps; ++k) {
      gap = std::max(gap, (iterate[k] - euler[k]).norm());
    }
    gaps.push_back(gap);
  }
  return gaps;
}

void write_csv(const TrajectoryBatch& batch, std::ostream& out) {
  out << "path,t,tr_X,tr_X2,running_cost\n";
  out.precision(17);
  for (const auto& p : batch.paths)
    for (const auto& s : p.snapshots)
      out << p.index << ',' << s.t << ',' << s.trace << ',' << s.trace_square << ',' << s.running_cost << '\n';
}

// ---------------------------------------------------------------- Dyson particles

namespace {

struct DysonStepper {
  const SimConfig& config;
  const DysonOptions& options;
  Stream& bridge;
  std::size_t substeps = 0;

  std::vector<double> propose(const std::vector<double>& l, double t, double h, const std::vector<double>& db,
                              double dw0) const {
    const std::size_t n = l.size();
    const double nn = static_cast<double>(n);
    std::vector<double> out(l);
    std::vector<double> repulsion(n, 0.0);
    if (config.beta_f > 0.0) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double r = 1.0 / (l[i] - l[j]);
          repulsion[i] += r;
          repulsion[j] -= r;
        }
    }
    const double sq = 1.0 / std::sqrt(nn);
    const double b2 = config.beta_f * config.beta_f;
    for (std::size_t i = 0; i < n; ++i) {
      double v = config.beta_c * dw0 + config.beta_f * db[i] * sq + b2 * repulsion[i] * h / nn;
      if (options.drift) v += options.drift(t, l[i]) * h;
      out[i] += v;
    }
    return out;
  }

  bool acceptable(const std::vector<double>& before, const std::vector<double>& after) const {
    for (std::size_t i = 0; i + 1 < after.size(); ++i) {
      const double g0 = before[i + 1] - before[i];
      const double g1 = after[i + 1] - after[i];
      // Growth is bounded too: near-ties make the explicit repulsion overshoot.
      if (!(g1 > 0.0) || !std::isfinite(g1)) return false;
      if (g1 < options.gap_shrink_limit * g0 || g1 * options.gap_shrink_limit > g0) return false;
    }
    return true;
  }

  // Advances l over [t, t + h] given the Brownian increments, halving the
  // interval by Brownian bridge when the step would crowd particles.
  void advance(std::vector<double>& l, double t, double h, const std::vector<double>& db, double dw0, std::size_t depth) {
    std::vector<double> next = propose(l, t, h, db, dw0);
    if (acceptable(l, next)) {
      l = std::move(next);
      ++substeps;
      return;
    }
    if (depth >= options.max_depth)
      throw NumericalError("dyson_simulate: particles collide at t = " + std::to_string(t) +
                           " even after " + std::to_string(depth) + " step halvings");
    const double half = 0.5 * h;
    const double s = std::sqrt(0.25 * h);
    std::vector<double> db1(db.size()), db2(db.size());
    for (std::size_t i = 0; i < db.size(); ++i) {
      db1[i] = 0.5 * db[i] + s * bridge.normal();
      db2[i] = db[i] - db1[i];
    }
    const double w1 = 0.5 * dw0 + s * bridge.normal();
    advance(l, t, half, db1, w1, depth + 1);
    advance(l, t + half, half, db2, dw0 - w1, depth + 1);
  }
};

std::vector<double> split_ties(std::vector<double> atoms) {
  std::sort(atoms.begin(), atoms.end());
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    while (j < atoms.size() && atoms[j] == atoms[i]) ++j;
    const double centre = 0.5 * static_cast<double>(j - i - 1);
    for (std::size_t k = i; k < j; ++k) atoms[k] += 1e-9 * (static_cast<double>(k - i) - centre);
    i = j;
  }
  return atoms;
}

}  // namespace

DysonBatch dyson_simulate(const SimConfig& config, const randmat::SpectralMeasure& x0, const DysonOptions& options) {
  config.validate();
  FREECTL_REQUIRE_DIMS(config.d == 1, "dyson_simulate: needs d = 1");
  FREECTL_REQUIRE_DIMS(x0.size() == config.n, "dyson_simulate: initial measure must have n atoms");
  const std::vector<double> start = split_ties(x0.atoms());
  DysonBatch batch;
  batch.config = config;
  for (std::size_t k = 0; k <= config.steps; ++k)
    if (keep_index(k, config.snapshot_every, config.steps)) batch.snapshot_times.push_back(config.time(k));
  batch.paths.resize(config.paths);
  const double dt = config.dt();
  parallel_for(config.paths, config.threads, [&](std::size_t p) {
    DysonPath& out = batch.paths[p];
    Stream common = Stream::derive(config.seed, p, StreamTag::common_noise);
    Stream noise = Stream::derive(config.seed, p, StreamTag::dyson_noise);
    Stream bridge = Stream::derive(config.seed, p, StreamTag::dyson_noise, 1);
    DysonStepper stepper{config, options, bridge};
    std::vector<double> l = start;
    std::vector<double> db(config.n);
    out.snapshots.push_back(l);
    try {
      for (std::size_t k = 0; k < config.steps; ++k) {
        const double dw0 = std::sqrt(dt) * common.normal();
        out.common_increments.push_back(dw0);
        noise.fill_normal(db);
        for (double& v : db) v *= std::sqrt(dt);
        stepper.advance(l, config.time(k), dt, db, dw0, 0);
        if (keep_index(k + 1, config.snapshot_every, config.steps)) out.snapshots.push_back(l);
      }
    } catch (const NumericalError& e) {
      out.ok = false;
      out.diagnostic = e.what();
    }
    out.substeps = stepper.substeps;
    out.terminal = l;
  });
  return batch;
}

}  // namespace freectl::sde
