#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "freectl/matrix_tuple.hpp"

/// Non-commutative polynomials in d self-adjoint letters.
///
/// Letters are 0-based in the C++ API (x_0 ... x_{d-1}); the JSON form uses
/// 1-based indices.
namespace freectl::ncpoly {

/// A monomial x_{i_1} ... x_{i_m}; the empty word is the unit.
struct Word {
  std::vector<int> letters;

  Word() = default;
  Word(std::initializer_list<int> l) : letters(l) {}
  explicit Word(std::vector<int> l) : letters(std::move(l)) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  int operator[](std::size_t k) const { return letters[k]; }

  Word reversed() const;
  Word slice(std::size_t begin, std::size_t end) const;
  friend Word operator+(const Word& a, const Word& b);

  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

class NCPolynomial {
 public:
  using TermMap = std::map<Word, Complex>;

  explicit NCPolynomial(int dims = 1);

  static NCPolynomial zero(int dims) { return NCPolynomial(dims); }
  static NCPolynomial constant(int dims, Complex c);
  static NCPolynomial variable(int dims, int letter);
  static NCPolynomial monomial(int dims, Word w, Complex c = 1.0);

  int dims() const { return dims_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t degree() const;
  Complex coefficient(const Word& w) const;

  /// Adds c to the coefficient of w, dropping the term if it becomes zero.
  void add_term(const Word& w, Complex c);

  NCPolynomial adjoint() const;
  /// Exact test when tol = 0: coefficient of each word equals the conjugate
  /// of the coefficient of its reverse.
  bool is_self_adjoint(double tol = 0.0) const;

  /// Substitutes g[j] for x_j. All g[j] must share one letter count.
  NCPolynomial compose(std::span<const NCPolynomial> g) const;

  NCPolynomial& operator+=(const NCPolynomial& q);
  NCPolynomial& operator-=(const NCPolynomial& q);
  NCPolynomial& operator*=(Complex s);

  friend NCPolynomial operator+(NCPolynomial p, const NCPolynomial& q) { return p += q; }
  friend NCPolynomial operator-(NCPolynomial p, const NCPolynomial& q) { return p -= q; }
  friend NCPolynomial operator*(const NCPolynomial& p, const NCPolynomial& q);
  friend NCPolynomial operator*(NCPolynomial p, Complex s) { return p *= s; }
  friend NCPolynomial operator*(Complex s, NCPolynomial p) { return p *= s; }
  friend bool operator==(const NCPolynomial&, const NCPolynomial&) = default;

 private:
  int dims_;
  TermMap terms_;
};

/// Element of NCP_d (x) NCP_d stored in canonical form: one coefficient per
/// pair of monomials (left, right).
class TensorPolynomial {
 public:
  using Key = std::pair<Word, Word>;
  using TermMap = std::map<Key, Complex>;

  explicit TensorPolynomial(int dims = 1);
  /// Expands p (x) q into monomial pairs.
  static TensorPolynomial elementary(const NCPolynomial& p, const NCPolynomial& q, Complex c = 1.0);

  int dims() const { return dims_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(const Word& left, const Word& right, Complex c);

  /// (X (x) Y)^* = X^* (x) Y^*.
  TensorPolynomial adjoint() const;
  /// The multiplication map X (x) Y -> Y X.
  NCPolynomial flip_multiply() const;
  /// The multiplication map X (x) Y -> X Y.
  NCPolynomial multiply() const;
  TensorPolynomial compose(std::span<const NCPolynomial> g) const;

  TensorPolynomial& operator+=(const TensorPolynomial& t);
  TensorPolynomial& operator-=(const TensorPolynomial& t);
  TensorPolynomial& operator*=(Complex s);

  friend TensorPolynomial operator+(TensorPolynomial a, const TensorPolynomial& b) { return a += b; }
  friend TensorPolynomial operator-(TensorPolynomial a, const TensorPolynomial& b) { return a -= b; }
  /// (X (x) Y)(W (x) Z) = (XW) (x) (ZY).
  friend TensorPolynomial operator*(const TensorPolynomial& a, const TensorPolynomial& b);
  friend TensorPolynomial operator*(TensorPolynomial a, Complex s) { return a *= s; }
  friend TensorPolynomial operator*(Complex s, TensorPolynomial a) { return a *= s; }
  friend bool operator==(const TensorPolynomial&, const TensorPolynomial&) = default;

 private:
  int dims_;
  TermMap terms_;
};

/// Free difference quotient: splits each monomial at every occurrence of x_j.
TensorPolynomial free_diff(const NCPolynomial& p, int letter);
/// Cyclic derivative: free_diff followed by X (x) Y -> Y X.
NCPolynomial cyclic_diff(const NCPolynomial& p, int letter);

/// Caches word evaluations p(X) at a fixed tuple. Words are built from their
/// longest cached prefix, and traces of long words are taken as tr_n(A B)
/// over the two halves, so a batch of related polynomials shares products.
class WordEvaluator {
 public:
  explicit WordEvaluator(const MatrixTuple& x);

  const MatrixTuple& point() const { return x_; }
  const Matrix& word(const Word& w);
  Complex word_trace(const Word& w);

  Matrix evaluate(const NCPolynomial& p);
  Complex trace(const NCPolynomial& p);
  Matrix contract(const TensorPolynomial& t, const Matrix& a);
  Complex tensor_trace(const TensorPolynomial& t);

 private:
  const MatrixTuple& x_;
  Matrix identity_;
  std::map<Word, Matrix> cache_;
  std::map<Word, Complex> trace_cache_;
};

Matrix evaluate(const NCPolynomial& p, const MatrixTuple& x);
/// tr_n(p(X)).
Complex trace_eval(const NCPolynomial& p, const MatrixTuple& x);
/// sum_k c_k p_k(X) A q_k(X).
Matrix tensor_contract(const TensorPolynomial& t, const MatrixTuple& x, const Matrix& a);
/// sum_k c_k tr_n(p_k(X)) tr_n(q_k(X)).
Complex tensor_trace(const TensorPolynomial& t, const MatrixTuple& x);

/// A tensor evaluated at a point: a list of (c, L, R) meaning c L (x) R.
struct EvaluatedTensor {
  struct Term {
    Complex coef;
    Matrix left;
    Matrix right;
  };
  std::vector<Term> terms;

  static EvaluatedTensor from(const TensorPolynomial& t, WordEvaluator& ev);
  EvaluatedTensor& operator+=(const EvaluatedTensor& other);
  friend EvaluatedTensor operator*(const EvaluatedTensor& a, const EvaluatedTensor& b);
  Matrix contract(const Matrix& a) const;
};

/// Number of non-crossing pair partitions of positions 0..k-1 in which every
/// block joins equal colors: the mixed moment tau(S_{i_1} ... S_{i_k}) of a
/// standard free semicircular family.
std::uint64_t semicircle_moment(std::span<const int> colors);
std::uint64_t catalan(unsigned k);
/// tau(p(S)) for a free semicircular family S.
Complex semicircular_trace(const NCPolynomial& p);

}  // namespace freectl::ncpoly
