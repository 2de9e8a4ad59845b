#include "freectl/ncpoly.hpp"

#include <algorithm>
#include <string>

#include "freectl/error.hpp"

namespace freectl::ncpoly {

namespace {

void check_letter(int dims, int letter, const char* where) {
  if (letter < 0 || letter >= dims) {
    throw DimensionError(std::string(where) + ": letter index " + std::to_string(letter) +
                         " out of range for d=" + std::to_string(dims));
  }
}

void check_word(int dims, const Word& w, const char* where) {
  for (int l : w.letters) check_letter(dims, l, where);
}

void check_same_dims(int a, int b, const char* where) {
  if (a != b) {
    throw DimensionError(std::string(where) + ": letter count mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

void check_tuple(int dims, const MatrixTuple& x, const char* where) {
  if (static_cast<std::size_t>(dims) != x.letters()) {
    throw DimensionError(std::string(where) + ": polynomial has d=" + std::to_string(dims) +
                         " but tuple has d=" + std::to_string(x.letters()));
  }
}

template <class Map, class Key>
void accumulate(Map& m, const Key& k, Complex c) {
  if (c == Complex(0.0)) return;
  auto [it, inserted] = m.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) m.erase(it);
  }
}

}  // namespace

// ---------------------------------------------------------------- Word

Word Word::reversed() const { return Word(std::vector<int>(letters.rbegin(), letters.rend())); }

Word Word::slice(std::size_t begin, std::size_t end) const {
  return Word(std::vector<int>(letters.begin() + static_cast<std::ptrdiff_t>(begin),
                               letters.begin() + static_cast<std::ptrdiff_t>(end)));
}

Word operator+(const Word& a, const Word& b) {
  Word out = a;
  out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
  return out;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int l : w.letters) {
    h ^= static_cast<std::size_t>(l) + 0x9e3779b97f4a7c15ULL;
    h *= 0x100000001b3ULL;
  }
  return h ^ w.letters.size();
}

// ---------------------------------------------------------------- NCPolynomial

NCPolynomial::NCPolynomial(int dims) : dims_(dims) {
  if (dims < 1) throw DimensionError("NCPolynomial: letter count must be >= 1");
}

NCPolynomial NCPolynomial::constant(int dims, Complex c) {
  NCPolynomial p(dims);
  p.add_term(Word{}, c);
  return p;
}

NCPolynomial NCPolynomial::variable(int dims, int letter) {
  check_letter(dims, letter, "NCPolynomial::variable");
  return monomial(dims, Word{letter});
}

NCPolynomial NCPolynomial::monomial(int dims, Word w, Complex c) {
  NCPolynomial p(dims);
  check_word(dims, w, "NCPolynomial::monomial");
  p.add_term(w, c);
  return p;
}

std::size_t NCPolynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.size());
  return d;
}

Complex NCPolynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void NCPolynomial::add_term(const Word& w, Complex c) {
  check_word(dims_, w, "NCPolynomial::add_term");
  accumulate(terms_, w, c);
}

NCPolynomial NCPolynomial::adjoint() const {
  NCPolynomial out(dims_);
  for (const auto& [w, c] : terms_) out.terms_.emplace(w.reversed(), std::conj(c));
  return out;
}

bool NCPolynomial::is_self_adjoint(double tol) const {
  for (const auto& [w, c] : terms_) {
    if (std::abs(c - std::conj(coefficient(w.reversed()))) > tol) return false;
  }
  return true;
}

NCPolynomial NCPolynomial::compose(std::span<const NCPolynomial> g) const {
  if (g.size() != static_cast<std::size_t>(dims_)) {
    throw DimensionError("NCPolynomial::compose: need one substitute per letter");
  }
  const int target = g.front().dims();
  for (const auto& gj : g) check_same_dims(target, gj.dims(), "NCPolynomial::compose");
  NCPolynomial out(target);
  for (const auto& [w, c] : terms_) {
    NCPolynomial term = constant(target, c);
    for (int l : w.letters) term = term * g[static_cast<std::size_t>(l)];
    out += term;
  }
  return out;
}

NCPolynomial& NCPolynomial::operator+=(const NCPolynomial& q) {
  check_same_dims(dims_, q.dims_, "NCPolynomial::operator+");
  for (const auto& [w, c] : q.terms_) accumulate(terms_, w, c);
  return *this;
}

NCPolynomial& NCPolynomial::operator-=(const NCPolynomial& q) {
  check_same_dims(dims_, q.dims_, "NCPolynomial::operator-");
  for (const auto& [w, c] : q.terms_) accumulate(terms_, w, -c);
  return *this;
}

NCPolynomial& NCPolynomial::operator*=(Complex s) {
  if (s == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= s;
  return *this;
}

NCPolynomial operator*(const NCPolynomial& p, const NCPolynomial& q) {
  check_same_dims(p.dims_, q.dims_, "NCPolynomial::operator*");
  NCPolynomial out(p.dims_);
  for (const auto& [wp, cp] : p.terms_) {
    for (const auto& [wq, cq] : q.terms_) accumulate(out.terms_, wp + wq, cp * cq);
  }
  return out;
}

// ---------------------------------------------------------------- TensorPolynomial

TensorPolynomial::TensorPolynomial(int dims) : dims_(dims) {
  if (dims < 1) throw DimensionError("TensorPolynomial: letter count must be >= 1");
}

TensorPolynomial TensorPolynomial::elementary(const NCPolynomial& p, const NCPolynomial& q, Complex c) {
  check_same_dims(p.dims(), q.dims(), "TensorPolynomial::elementary");
  TensorPolynomial out(p.dims());
  for (const auto& [wp, cp] : p.terms()) {
    for (const auto& [wq, cq] : q.terms()) accumulate(out.terms_, Key{wp, wq}, c * cp * cq);
  }
  return out;
}

void TensorPolynomial::add_term(const Word& left, const Word& right, Complex c) {
  check_word(dims_, left, "TensorPolynomial::add_term");
  check_word(dims_, right, "TensorPolynomial::add_term");
  accumulate(terms_, Key{left, right}, c);
}

TensorPolynomial TensorPolynomial::adjoint() const {
  TensorPolynomial out(dims_);
  for (const auto& [k, c] : terms_) out.terms_.emplace(Key{k.first.reversed(), k.second.reversed()}, std::conj(c));
  return out;
}

NCPolynomial TensorPolynomial::flip_multiply() const {
  NCPolynomial out(dims_);
  for (const auto& [k, c] : terms_) out.add_term(k.second + k.first, c);
  return out;
}

NCPolynomial TensorPolynomial::multiply() const {
  NCPolynomial out(dims_);
  for (const auto& [k, c] : terms_) out.add_term(k.first + k.second, c);
  return out;
}

TensorPolynomial TensorPolynomial::compose(std::span<const NCPolynomial> g) const {
  if (g.size() != static_cast<std::size_t>(dims_)) {
    throw DimensionError("TensorPolynomial::compose: need one substitute per letter");
  }
  TensorPolynomial out(g.front().dims());
  for (const auto& [k, c] : terms_) {
    const auto left = NCPolynomial::monomial(dims_, k.first).compose(g);
    const auto right = NCPolynomial::monomial(dims_, k.second).compose(g);
    out += elementary(left, right, c);
  }
  return out;
}

TensorPolynomial& TensorPolynomial::operator+=(const TensorPolynomial& t) {
  check_same_dims(dims_, t.dims_, "TensorPolynomial::operator+");
  for (const auto& [k, c] : t.terms_) accumulate(terms_, k, c);
  return *this;
}

TensorPolynomial& TensorPolynomial::operator-=(const TensorPolynomial& t) {
  check_same_dims(dims_, t.dims_, "TensorPolynomial::operator-");
  for (const auto& [k, c] : t.terms_) accumulate(terms_, k, -c);
  return *this;
}

TensorPolynomial& TensorPolynomial::operator*=(Complex s) {
  if (s == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

TensorPolynomial operator*(const TensorPolynomial& a, const TensorPolynomial& b) {
  check_same_dims(a.dims_, b.dims_, "TensorPolynomial::operator*");
  TensorPolynomial out(a.dims_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      accumulate(out.terms_, TensorPolynomial::Key{ka.first + kb.first, kb.second + ka.second}, ca * cb);
    }
  }
  return out;
}

// ---------------------------------------------------------------- derivatives

TensorPolynomial free_diff(const NCPolynomial& p, int letter) {
  check_letter(p.dims(), letter, "free_diff");
  TensorPolynomial out(p.dims());
  for (const auto& [w, c] : p.terms()) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] == letter) out.add_term(w.slice(0, k), w.slice(k + 1, w.size()), c);
    }
  }
  return out;
}

NCPolynomial cyclic_diff(const NCPolynomial& p, int letter) {
  check_letter(p.dims(), letter, "cyclic_diff");
  NCPolynomial out(p.dims());
  for (const auto& [w, c] : p.terms()) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] == letter) out.add_term(w.slice(k + 1, w.size()) + w.slice(0, k), c);
    }
  }
  return out;
}

// ---------------------------------------------------------------- evaluation

WordEvaluator::WordEvaluator(const MatrixTuple& x)
    : x_(x), identity_(Matrix::Identity(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.size()))) {}

const Matrix& WordEvaluator::word(const Word& w) {
  if (w.empty()) return identity_;
  if (w.size() == 1) {
    check_letter(static_cast<int>(x_.letters()), w[0], "WordEvaluator");
    return x_[static_cast<std::size_t>(w[0])];
  }
  if (auto it = cache_.find(w); it != cache_.end()) return it->second;
  const Word prefix = w.slice(0, w.size() - 1);
  const int last = w[w.size() - 1];
  check_letter(static_cast<int>(x_.letters()), last, "WordEvaluator");
  Matrix product = word(prefix) * x_[static_cast<std::size_t>(last)];
  return cache_.emplace(w, std::move(product)).first->second;
}

Complex WordEvaluator::word_trace(const Word& w) {
  if (w.empty()) return 1.0;
  if (auto it = trace_cache_.find(w); it != trace_cache_.end()) return it->second;
  Complex value;
  if (w.size() == 1) {
    value = normalized_trace(word(w));
  } else {
    const std::size_t mid = w.size() / 2;
    value = normalized_trace_product(word(w.slice(0, mid)), word(w.slice(mid, w.size())));
  }
  trace_cache_.emplace(w, value);
  return value;
}

Matrix WordEvaluator::evaluate(const NCPolynomial& p) {
  check_tuple(p.dims(), x_, "evaluate");
  Matrix out = Matrix::Zero(identity_.rows(), identity_.cols());
  for (const auto& [w, c] : p.terms()) {
    if (w.empty()) {
      out.diagonal().array() += c;
    } else {
      out += c * word(w);
    }
  }
  return out;
}

Complex WordEvaluator::trace(const NCPolynomial& p) {
  check_tuple(p.dims(), x_, "trace_eval");
  Complex s = 0.0;
  for (const auto& [w, c] : p.terms()) s += c * word_trace(w);
  return s;
}

Matrix WordEvaluator::contract(const TensorPolynomial& t, const Matrix& a) {
  check_tuple(t.dims(), x_, "tensor_contract");
  FREECTL_REQUIRE_DIMS(a.rows() == identity_.rows() && a.cols() == identity_.cols(),
                       "tensor_contract: argument matrix has wrong size");
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto& [k, c] : t.terms()) {
    const auto& [left, right] = k;
    if (left.empty() && right.empty()) {
      out += c * a;
    } else if (left.empty()) {
      out.noalias() += c * (a * word(right));
    } else if (right.empty()) {
      out.noalias() += c * (word(left) * a);
    } else {
      Matrix la = word(left) * a;
      out.noalias() += c * (la * word(right));
    }
  }
  return out;
}

Complex WordEvaluator::tensor_trace(const TensorPolynomial& t) {
  check_tuple(t.dims(), x_, "tensor_trace");
  Complex s = 0.0;
  for (const auto& [k, c] : t.terms()) s += c * word_trace(k.first) * word_trace(k.second);
  return s;
}

Matrix evaluate(const NCPolynomial& p, const MatrixTuple& x) {
  WordEvaluator ev(x);
  return ev.evaluate(p);
}

Complex trace_eval(const NCPolynomial& p, const MatrixTuple& x) {
  WordEvaluator ev(x);
  return ev.trace(p);
}

Matrix tensor_contract(const TensorPolynomial& t, const MatrixTuple& x, const Matrix& a) {
  WordEvaluator ev(x);
  return ev.contract(t, a);
}

Complex tensor_trace(const TensorPolynomial& t, const MatrixTuple& x) {
  WordEvaluator ev(x);
  return ev.tensor_trace(t);
}

EvaluatedTensor EvaluatedTensor::from(const TensorPolynomial& t, WordEvaluator& ev) {
  check_tuple(t.dims(), ev.point(), "EvaluatedTensor::from");
  EvaluatedTensor out;
  for (const auto& [k, c] : t.terms()) out.terms.push_back({c, ev.word(k.first), ev.word(k.second)});
  return out;
}

EvaluatedTensor& EvaluatedTensor::operator+=(const EvaluatedTensor& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  return *this;
}

EvaluatedTensor operator*(const EvaluatedTensor& a, const EvaluatedTensor& b) {
  EvaluatedTensor out;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      out.terms.push_back({ta.coef * tb.coef, ta.left * tb.left, tb.right * ta.right});
    }
  }
  return out;
}

Matrix EvaluatedTensor::contract(const Matrix& a) const {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto& t : terms) out += t.coef * (t.left * a * t.right);
  return out;
}

// ---------------------------------------------------------------- semicircle moments

std::uint64_t semicircle_moment(std::span<const int> colors) {
  const std::size_t k = colors.size();
  if (k % 2 == 1) return 0;
  // count[i][j]: pairings of the half-open interval [i, j), pairing i first.
  std::vector<std::vector<std::uint64_t>> count(k + 1, std::vector<std::uint64_t>(k + 1, 0));
  for (std::size_t i = 0; i <= k; ++i) count[i][i] = 1;
  for (std::size_t len = 2; len <= k; len += 2) {
    for (std::size_t i = 0; i + len <= k; ++i) {
      const std::size_t j = i + len;
      std::uint64_t total = 0;
      for (std::size_t m = i + 1; m < j; m += 2) {
        if (colors[i] != colors[m]) continue;
        total += count[i + 1][m] * count[m + 1][j];
      }
      count[i][j] = total;
    }
  }
  return count[0][k];
}

std::uint64_t catalan(unsigned k) {
  std::uint64_t c = 1;
  for (unsigned i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

Complex semicircular_trace(const NCPolynomial& p) {
  Complex s = 0.0;
  for (const auto& [w, c] : p.terms()) {
    s += c * static_cast<double>(semicircle_moment(w.letters));
  }
  return s;
}

}  // namespace freectl::ncpoly
