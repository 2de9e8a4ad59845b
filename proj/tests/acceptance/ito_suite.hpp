#pragma once

#include <string>
#include <utility>
#include <vector>

#include "freectl/control.hpp"
#include "freectl/hjb.hpp"
#include "test_support.hpp"

// The fixed Ito suite: four functions x three policies x three noise pairs.
// Shared by the acceptance check and the calibration tool so both see the
// same cases.
namespace freectl::testing::ito_suite {

constexpr std::size_t kN = 100;
constexpr std::size_t kD = 2;
// Every calibration step (4e-3, 2e-3, 1e-3) divides the horizon.
constexpr double kHorizon = 0.04;
constexpr std::size_t kObserveEvery = 10;
constexpr std::uint64_t kSeed = 4242;
// Calibration draws its own paths so c1 is not fitted on the checked batch.
constexpr std::uint64_t kCalibrationSeed = 4343;

inline const std::vector<std::pair<double, double>>& noise_pairs() {
  static const std::vector<std::pair<double, double>> p{{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}};
  return p;
}

inline std::vector<std::string> function_names() { return {"tau(x1^2)", "tau(x1^4)", "tau(x1)^2", "tau(x1 x2)"}; }

inline std::vector<freecalc::TimeDependentCylinder> functions() {
  using freecalc::CylinderFunction;
  using freecalc::TimeDependentCylinder;
  const int d = static_cast<int>(kD);
  std::vector<TimeDependentCylinder> out;
  out.push_back(TimeDependentCylinder::constant(CylinderFunction::trace_of(mono(d, {0, 0})), 0.0, 1.0));
  out.push_back(TimeDependentCylinder::constant(CylinderFunction::trace_of(mono(d, {0, 0, 0, 0})), 0.0, 1.0));
  out.push_back(TimeDependentCylinder::constant(
      CylinderFunction({mono(d, {0})}, freecalc::OuterFunction::quadratic(RealMatrix::Ones(1, 1), RealVector::Zero(1))), 0.0,
      1.0));
  out.push_back(TimeDependentCylinder::constant(CylinderFunction::trace_of(sym_mono(d, {0, 1})), 0.0, 1.0));
  return out;
}

inline MatrixTuple initial_state() {
  auto s = test_stream(900);
  return random_tuple(kN, kD, 0.7, s);
}

inline control::LQSpec lq_spec(double bc, double bf) {
  control::LQSpec spec;
  spec.g0 = RealMatrix(2, 2);
  spec.g0 << 1.0, 0.3, 0.3, 0.8;
  spec.g1 = RealMatrix(2, 2);
  spec.g1 << 0.5, -0.2, -0.2, 0.4;
  spec.beta_c = bc;
  spec.beta_f = bf;
  spec.T = 1.0;
  return spec;
}

struct Policy {
  std::string name;
  sde::ControlPolicy policy;
};

inline std::vector<Policy> policies(double bc, double bf) {
  auto s = test_stream(901);
  const auto alpha = random_tuple(kN, kD, 0.5, s);
  const auto sol = control::solve_riccati(lq_spec(bc, bf), 1000);
  return {{"zero", sde::ControlPolicy::zero()},
          {"constant", sde::ControlPolicy::constant(alpha)},
          {"lq-feedback", control::lq_policy(sol)}};
}

inline sde::SimConfig config(double bc, double bf, double dt, std::size_t paths, std::size_t threads,
                             std::uint64_t seed = kSeed) {
  sde::SimConfig c;
  c.n = kN;
  c.d = kD;
  c.T = kHorizon;
  c.steps = static_cast<std::size_t>(kHorizon / dt + 0.5);
  c.beta_c = bc;
  c.beta_f = bf;
  c.paths = paths;
  c.seed = seed;
  c.snapshot_every = c.steps;
  c.threads = threads;
  return c;
}

}  // namespace freectl::testing::ito_suite
