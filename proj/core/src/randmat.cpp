#include "freectl/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "freectl/error.hpp"

namespace freectl::randmat {

Matrix gue_increment(std::size_t n, double dt, Stream& stream) {
  const auto m = static_cast<Eigen::Index>(n);
  const double diag_sd = std::sqrt(dt / static_cast<double>(n));
  const double off_sd = std::sqrt(dt / (2.0 * static_cast<double>(n)));
  std::vector<double> z(n * n);
  stream.fill_normal(z);
  Matrix w(m, m);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    w(i, i) = Complex(diag_sd * z[k++], 0.0);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Complex v(off_sd * z[k], off_sd * z[k + 1]);
      k += 2;
      w(i, j) = v;
      w(j, i) = std::conj(v);
    }
  }
  return w;
}

MatrixTuple sample_free_semicircular_proxy(const MatrixTuple& x, Stream& stream) {
  std::vector<Matrix> s;
  s.reserve(x.letters());
  for (std::size_t j = 0; j < x.letters(); ++j) s.push_back(gue_increment(x.size(), 1.0, stream));
  return MatrixTuple(std::move(s));
}

// ---------------------------------------------------------------- SpectralMeasure

SpectralMeasure::SpectralMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
}

SpectralMeasure SpectralMeasure::dirac(double x, std::size_t copies) {
  return SpectralMeasure(std::vector<double>(copies, x));
}

double SpectralMeasure::moment(unsigned k) const {
  double s = 0.0;
  for (double a : atoms_) s += std::pow(a, static_cast<int>(k));
  return s / static_cast<double>(atoms_.size());
}

double SpectralMeasure::quantile(double u) const {
  if (atoms_.empty()) throw NumericalError("SpectralMeasure::quantile: empty measure");
  const double m = static_cast<double>(atoms_.size());
  auto idx = static_cast<std::size_t>(std::ceil(u * m - 1e-12));
  idx = std::clamp<std::size_t>(idx, 1, atoms_.size());
  return atoms_[idx - 1];
}

double SpectralMeasure::mass_above(double x) const {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  return static_cast<double>(atoms_.end() - it) / static_cast<double>(atoms_.size());
}

double SpectralMeasure::mass_below(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
  return static_cast<double>(it - atoms_.begin()) / static_cast<double>(atoms_.size());
}

SpectralMeasure spectral_measure(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_measure: eigensolver failed");
  const auto& ev = es.eigenvalues();
  return SpectralMeasure(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

double wasserstein2_1d(const SpectralMeasure& mu, const SpectralMeasure& nu) {
  if (mu.empty() || nu.empty()) throw NumericalError("wasserstein2_1d: empty measure");
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  if (a.size() == b.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(a.size()));
  }
  // Merge breakpoints i/m and j/k; quantiles are constant in between.
  const double m = static_cast<double>(a.size());
  const double k = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double u = 0.0, s = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next_a = static_cast<double>(i + 1) / m;
    const double next_b = static_cast<double>(j + 1) / k;
    const double next = std::min(next_a, next_b);
    s += (next - u) * (a[i] - b[j]) * (a[i] - b[j]);
    u = next;
    if (next_a <= next) ++i;
    if (next_b <= next) ++j;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------- semicircle

double semicircle_density(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(x / 2.0) / std::numbers::pi;
}

double semicircle_quantile(double u) {
  if (u <= 0.0) return -2.0;
  if (u >= 1.0) return 2.0;
  double lo = -2.0, hi = 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (semicircle_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SpectralMeasure semicircle_quantile_measure(std::size_t m, double variance) {
  std::vector<double> atoms(m);
  const double scale = std::sqrt(variance);
  for (std::size_t i = 0; i < m; ++i) {
    atoms[i] = scale * semicircle_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));
  }
  return SpectralMeasure(std::move(atoms));
}

// ---------------------------------------------------------------- moments

Complex MomentVector::at(const ncpoly::Word& w) const {
  auto it = values_.find(w);
  if (it == values_.end()) throw DimensionError("MomentVector::at: word not in moment vector");
  return it->second;
}

MomentVector moments(const MatrixTuple& x, std::size_t degree_cap) {
  MomentVector::Map values;
  const auto d = static_cast<int>(x.letters());
  ncpoly::WordEvaluator ev(x);
  std::vector<ncpoly::Word> frontier{ncpoly::Word{}};
  values.emplace(ncpoly::Word{}, 1.0);
  for (std::size_t len = 1; len <= degree_cap; ++len) {
    std::vector<ncpoly::Word> next;
    next.reserve(frontier.size() * static_cast<std::size_t>(d));
    for (const auto& w : frontier) {
      for (int l = 0; l < d; ++l) {
        ncpoly::Word e = w + ncpoly::Word{l};
        values.emplace(e, ev.word_trace(e));
        next.push_back(std::move(e));
      }
    }
    frontier = std::move(next);
  }
  return MomentVector(x.letters(), degree_cap, std::move(values));
}

double moment_distance(const MomentVector& a, const MomentVector& b) {
  FREECTL_REQUIRE_DIMS(a.letters() == b.letters() && a.degree_cap() == b.degree_cap(),
                       "moment_distance: moment vectors of different shape");
  double s = 0.0;
  for (const auto& [w, v] : a.values()) s += std::norm(v - b.at(w));
  return std::sqrt(s);
}

Matrix haar_unitary(std::size_t n, Stream& stream) {
  const auto m = static_cast<Eigen::Index>(n);
  std::vector<double> z(2 * n * n);
  stream.fill_normal(z);
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto k = 2 * static_cast<std::size_t>(i * m + j);
      g(i, j) = Complex(z[k], z[k + 1]);
    }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the law is exactly Haar.
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

MatrixTuple random_hermitian_tuple(std::size_t n, std::size_t d, double scale, Stream& stream) {
  std::vector<Matrix> c;
  c.reserve(d);
  for (std::size_t j = 0; j < d; ++j) c.push_back(scale * gue_increment(n, 1.0, stream));
  return MatrixTuple(std::move(c));
}

}  // namespace freectl::randmat
