#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "freectl/error.hpp"
#include "freectl/freecalc.hpp"
#include "freectl/matrix_tuple.hpp"
#include "freectl/randmat.hpp"
#include "freectl/sde.hpp"

namespace freectl::control {

// ---------------------------------------------------------------- linear-quadratic

/// Terminal cost g(X) = sum_ij G0_ij tau(X_i X_j) + sum_ij G1_ij tau(X_i) tau(X_j),
/// dynamics dX = alpha dt + noise, running cost |alpha|^2 / 2.
struct LQSpec {
  RealMatrix g0;
  RealMatrix g1;
  double beta_c = 0.0;
  double beta_f = 0.0;
  double T = 1.0;

  std::size_t letters() const { return static_cast<std::size_t>(g0.rows()); }
  void validate() const;
};

/// Which ODE to use for a1.
enum class RiccatiForm {
  /// a1' = 2 a1^2 + 2 (a0 a1 + a1 a0): the coefficient of tau(X_i) tau(X_j)
  /// in |grad U|^2 / 2, so U solves the HJB equation exactly.
  consistent,
  /// a1' = 2 (a0 + a1) a1: drops one cross term. Agrees with `consistent`
  /// when G1 = 0; kept for comparison.
  reduced,
};

/// Value U(t, X) = e + sum a0_ij tau(X_i X_j) + sum a1_ij tau(X_i) tau(X_j) on a uniform grid over [0, T].
struct RiccatiSolution {
  LQSpec spec;
  RiccatiForm form = RiccatiForm::consistent;
  std::vector<double> grid;
  std::vector<RealMatrix> a0, a1;
  std::vector<double> e;
  std::vector<RealMatrix> da0, da1;  // time derivatives
  std::vector<double> de;
  /// (I + 2 (T - t) G0)^{-1} G0 where the inverse exists.
  std::vector<std::optional<RealMatrix>> a0_closed;

  /// Coefficients at t by cubic Hermite interpolation of the nodal data.
  struct At {
    RealMatrix a0, a1;
    double e;
  };
  At at(double t) const;
};

/// Raised when the backward Riccati flow leaves every bounded set.
class RiccatiBlowUp : public NumericalError {
 public:
  RiccatiBlowUp(double time, const std::string& msg) : NumericalError(msg), time_(time) {}
  /// Estimated time at which the norm crosses the threshold.
  double time() const { return time_; }

 private:
  double time_;
};

/// Backward RK4 on a uniform grid with `steps` intervals; e by the trapezoidal
/// rule on the same grid. Throws RiccatiBlowUp when a norm exceeds `threshold`.
RiccatiSolution solve_riccati(const LQSpec& spec, std::size_t steps, RiccatiForm form = RiccatiForm::consistent,
                              double threshold = 1e6);

double lq_terminal_cost(const LQSpec& spec, const MatrixTuple& x);
double lq_value(const RiccatiSolution& sol, double t, const MatrixTuple& x);
/// -grad U(t, X), the maximizer of the quadratic Hamiltonian at P = -grad U.
MatrixTuple lq_feedback(const RiccatiSolution& sol, double t, const MatrixTuple& x);
sde::ControlPolicy lq_policy(const RiccatiSolution& sol);
/// The value as a cylinder function with inner functions
/// tau((X_i X_j + X_j X_i)/2) for i <= j followed by tau(X_i), so the generic
/// calculus (grad, Laplacians, HJB residual) applies to it.
freecalc::TimeDependentCylinder lq_cylinder(const RiccatiSolution& sol);

// ---------------------------------------------------------------- Eikonal

/// max(T - t, W2(target, mu)).
double eikonal_value(double t, const randmat::SpectralMeasure& mu, const randmat::SpectralMeasure& target, double T);

struct ScalarDiagnostics {
  double l1 = 0.0;           // int |x - y| d target(y)
  double signed_mass = 0.0;  // -target((x, inf)) + target((-inf, x))
  double w2 = 0.0;           // W2(delta_x, target)
};
ScalarDiagnostics eikonal_scalar_diagnostics(double x, const randmat::SpectralMeasure& target);

// ---------------------------------------------------------------- Hopf-Lax

struct HopfLaxOptions {
  std::size_t starts = 8;  // random starts, in addition to alpha = 0
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-6;
  double fd_step = 1e-5;
  double start_scale = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct HopfLaxResult {
  double value = 0.0;
  MatrixTuple alpha;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> start_values;  // best value reached from each start, alpha = 0 first
};

/// e^{-i alpha s} X e^{i alpha s}, componentwise.
MatrixTuple conjugation_flow(const MatrixTuple& x, const MatrixTuple& alpha, double s);

/// (T - t)/2 |alpha|^2 + g(e^{-i alpha (T - t)} X e^{i alpha (T - t)}).
double hopf_lax_objective(double t, double T, const MatrixTuple& x, const freecalc::CylinderFunction& g,
                          const MatrixTuple& alpha);

/// Minimizes the objective over Hermitian tuples alpha by BFGS with
/// backtracking line search, from alpha = 0 and `starts` random points. The
/// gradient of the terminal term uses central differences along an
/// orthonormal Hermitian basis. Non-convergence is reported in the result,
/// not thrown.
HopfLaxResult hopf_lax(double t, double T, const MatrixTuple& x, const freecalc::CylinderFunction& g,
                       const HopfLaxOptions& options = {});

}  // namespace freectl::control
