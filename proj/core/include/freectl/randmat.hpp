#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "freectl/matrix_tuple.hpp"
#include "freectl/ncpoly.hpp"
#include "freectl/rng.hpp"

namespace freectl::randmat {

/// GUE(n) increment over a time step dt.
///
/// Diagonal entries are real N(0, dt/n); off-diagonal entries are complex
/// Gaussians with E|z|^2 = dt/n. Hence E tr_n(W^2) = dt and the spectrum of
/// W / sqrt(dt) approaches the semicircle on [-2, 2].
Matrix gue_increment(std::size_t n, double dt, Stream& stream);

/// d fresh GUE(n) samples at t = 1, independent of x: the finite-n stand-in
/// for a semicircular family freely independent of x.
MatrixTuple sample_free_semicircular_proxy(const MatrixTuple& x, Stream& stream);

/// Empirical spectral distribution: sorted atoms of equal weight.
class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  /// Sorts the atoms.
  explicit SpectralMeasure(std::vector<double> atoms);
  static SpectralMeasure dirac(double x, std::size_t copies = 1);

  const std::vector<double>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double moment(unsigned k) const;
  /// Quantile function q(u) = inf{x : F(x) >= u} for u in (0, 1].
  double quantile(double u) const;
  /// mu((x, inf)) and mu((-inf, x)).
  double mass_above(double x) const;
  double mass_below(double x) const;

 private:
  std::vector<double> atoms_;
};

SpectralMeasure spectral_measure(const Matrix& x);

/// Quadratic Wasserstein distance between two empirical measures on the line,
/// via the monotone (quantile) coupling. Unequal sizes are integrated on the
/// common refinement of the two quantile grids.
double wasserstein2_1d(const SpectralMeasure& mu, const SpectralMeasure& nu);

// Semicircle law on [-2, 2] with unit variance.
double semicircle_density(double x);
double semicircle_cdf(double x);
double semicircle_quantile(double u);
/// m atoms at the mid-quantiles (i + 1/2)/m of the semicircle of variance s2.
SpectralMeasure semicircle_quantile_measure(std::size_t m, double variance = 1.0);

/// Word moments tr_n(X_{i_1} ... X_{i_k}) up to a length cap.
class MomentVector {
 public:
  using Map = std::map<ncpoly::Word, Complex>;
  MomentVector(std::size_t letters, std::size_t degree_cap, Map values)
      : letters_(letters), degree_cap_(degree_cap), values_(std::move(values)) {}

  std::size_t letters() const { return letters_; }
  std::size_t degree_cap() const { return degree_cap_; }
  const Map& values() const { return values_; }
  Complex at(const ncpoly::Word& w) const;

 private:
  std::size_t letters_;
  std::size_t degree_cap_;
  Map values_;
};

MomentVector moments(const MatrixTuple& x, std::size_t degree_cap);

/// Euclidean distance between moment vectors of equal shape. A heuristic
/// comparison of laws for d > 1, not a metric on laws.
double moment_distance(const MomentVector& a, const MomentVector& b);

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
Matrix haar_unitary(std::size_t n, Stream& stream);

/// A random Hermitian tuple with GUE components scaled by `scale`.
MatrixTuple random_hermitian_tuple(std::size_t n, std::size_t d, double scale, Stream& stream);

}  // namespace freectl::randmat
