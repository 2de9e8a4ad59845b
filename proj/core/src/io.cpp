#include "freectl/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>

#include "freectl/error.hpp"

namespace freectl::io {

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(where + ": unknown field '" + key + "'");
  }
}

// ---------------------------------------------------------------- polynomials

json to_json(const ncpoly::NCPolynomial& p) {
  json terms = json::array();
  for (const auto& [w, c] : p.terms()) {
    json word = json::array();
    for (int l : w.letters) word.push_back(l + 1);
    json t = {{"word", word}, {"re", c.real()}};
    if (c.imag() != 0.0) t["im"] = c.imag();
    terms.push_back(std::move(t));
  }
  return {{"dims", p.dims()}, {"terms", terms}};
}

ncpoly::NCPolynomial polynomial_from_json(const json& j) {
  const std::string where = "polynomial";
  require_keys(j, {"dims", "terms"}, where);
  const int d = field<int>(j, "dims", where);
  if (d < 1) throw SchemaError(where + ": dims must be positive");
  ncpoly::NCPolynomial p(d);
  const json terms = field<json>(j, "terms", where);
  if (!terms.is_array()) throw SchemaError(where + ": terms must be an array");
  for (const auto& t : terms) {
    require_keys(t, {"word", "re", "im"}, where + " term");
    std::vector<int> letters = field<std::vector<int>>(t, "word", where);
    for (int& l : letters) {
      if (l < 1 || l > d) throw SchemaError(where + ": letter " + std::to_string(l) + " outside 1.." + std::to_string(d));
      --l;
    }
    p.add_term(ncpoly::Word(std::move(letters)),
               Complex(field<double>(t, "re", where), field_or<double>(t, "im", 0.0, where)));
  }
  return p;
}

// ---------------------------------------------------------------- tuples

json to_json(const MatrixTuple& x) {
  json comps = json::array();
  for (const auto& m : x.components()) {
    std::vector<double> re, im;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        re.push_back(m(r, c).real());
        im.push_back(m(r, c).imag());
      }
    comps.push_back({{"re", re}, {"im", im}});
  }
  return {{"n", x.size()}, {"d", x.letters()}, {"components", comps}};
}

MatrixTuple tuple_from_json(const json& j) {
  const std::string where = "matrix tuple";
  require_keys(j, {"n", "d", "components"}, where);
  const auto n = field<std::size_t>(j, "n", where);
  const auto d = field<std::size_t>(j, "d", where);
  const json comps = field<json>(j, "components", where);
  if (!comps.is_array() || comps.size() != d) throw SchemaError(where + ": need d components");
  std::vector<Matrix> out;
  for (const auto& c : comps) {
    require_keys(c, {"re", "im"}, where + " component");
    const auto re = field<std::vector<double>>(c, "re", where);
    const auto im = field_or<std::vector<double>>(c, "im", std::vector<double>(n * n, 0.0), where);
    if (re.size() != n * n || im.size() != n * n) throw SchemaError(where + ": component needs n*n entries");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n * n; ++k)
      m(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) = Complex(re[k], im[k]);
    if ((m - m.adjoint()).norm() > 1e-12 * std::max(1.0, m.norm()))
      throw SchemaError(where + ": component " + std::to_string(out.size() + 1) + " is not Hermitian");
    out.push_back(std::move(m));
  }
  return MatrixTuple(std::move(out));
}

// ---------------------------------------------------------------- cylinder functions

json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw SchemaError(where + ": rows must be arrays of equal length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw SchemaError(where + ": entries must be numbers");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

namespace {

RealVector vector_from(const std::vector<double>& v) {
  return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> vector_to(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

json to_json(const freecalc::OuterFunction& g) {
  using F = freecalc::OuterFunction::Family;
  switch (g.family()) {
    case F::linear:
      return {{"family", "linear"}, {"constant", g.constant()}, {"weights", vector_to(g.weights())}};
    case F::quadratic:
      return {{"family", "quadratic"},
              {"constant", g.constant()},
              {"weights", vector_to(g.weights())},
              {"q", to_json(g.quadratic_form())}};
    case F::polynomial: {
      json terms = json::array();
      for (const auto& t : g.monomials()) terms.push_back({{"powers", t.powers}, {"coef", t.coef}});
      return {{"family", "polynomial"}, {"arity", g.arity()}, {"terms", terms}};
    }
  }
  return {};
}

freecalc::OuterFunction outer_from_json(const json& j) {
  const std::string where = "outer function";
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  const auto family = field<std::string>(j, "family", where);
  if (family == "linear") {
    require_keys(j, {"family", "constant", "weights"}, where);
    return freecalc::OuterFunction::linear(vector_from(field<std::vector<double>>(j, "weights", where)),
                                           field_or<double>(j, "constant", 0.0, where));
  }
  if (family == "quadratic") {
    require_keys(j, {"family", "constant", "weights", "q"}, where);
    const RealMatrix q = real_matrix_from_json(field<json>(j, "q", where), where + " q");
    const RealVector w = j.contains("weights") ? vector_from(field<std::vector<double>>(j, "weights", where))
                                               : RealVector::Zero(q.rows());
    if (q.rows() != q.cols() || q.rows() != w.size()) throw SchemaError(where + ": q must be m x m with m weights");
    return freecalc::OuterFunction::quadratic(q, w, field_or<double>(j, "constant", 0.0, where));
  }
  if (family == "polynomial") {
    require_keys(j, {"family", "arity", "terms"}, where);
    const auto arity = field<std::size_t>(j, "arity", where);
    std::vector<freecalc::OuterFunction::Monomial> terms;
    for (const auto& t : field<json>(j, "terms", where)) {
      require_keys(t, {"powers", "coef"}, where + " term");
      terms.push_back({field<std::vector<int>>(t, "powers", where), field<double>(t, "coef", where)});
      if (terms.back().powers.size() != arity) throw SchemaError(where + ": powers must have length arity");
    }
    return freecalc::OuterFunction::polynomial(arity, std::move(terms));
  }
  throw SchemaError(where + ": unknown family '" + family + "'");
}

json to_json(const freecalc::CylinderFunction& u) {
  json inner = json::array();
  for (std::size_t o = 0; o < u.arity(); ++o) inner.push_back(to_json(u.inner(o)));
  return {{"inner", inner}, {"arctan", u.arctan_inner()}, {"outer", to_json(u.outer())}};
}

freecalc::CylinderFunction cylinder_from_json(const json& j) {
  const std::string where = "cylinder function";
  require_keys(j, {"inner", "arctan", "outer"}, where);
  std::vector<ncpoly::NCPolynomial> inner;
  const json arr = field<json>(j, "inner", where);
  if (!arr.is_array() || arr.empty()) throw SchemaError(where + ": inner must be a nonempty array");
  for (const auto& p : arr) inner.push_back(polynomial_from_json(p));
  freecalc::OuterFunction outer = outer_from_json(field<json>(j, "outer", where));
  if (outer.arity() != inner.size()) throw SchemaError(where + ": outer arity must equal the number of inner polynomials");
  return freecalc::CylinderFunction(std::move(inner), std::move(outer), field_or<bool>(j, "arctan", false, where));
}

// ---------------------------------------------------------------- control

control::LQSpec lq_spec_from_json(const json& j) {
  const std::string where = "lq spec";
  require_keys(j, {"g0", "g1", "beta_c", "beta_f", "T"}, where);
  control::LQSpec s;
  s.g0 = real_matrix_from_json(field<json>(j, "g0", where), where + " g0");
  s.g1 = j.contains("g1") ? real_matrix_from_json(j.at("g1"), where + " g1") : RealMatrix::Zero(s.g0.rows(), s.g0.cols());
  s.beta_c = field_or<double>(j, "beta_c", 0.0, where);
  s.beta_f = field_or<double>(j, "beta_f", 0.0, where);
  s.T = field_or<double>(j, "T", 1.0, where);
  try {
    s.validate();
  } catch (const DimensionError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  return s;
}

json to_json(const control::LQSpec& s) {
  return {{"g0", to_json(s.g0)}, {"g1", to_json(s.g1)}, {"beta_c", s.beta_c}, {"beta_f", s.beta_f}, {"T", s.T}};
}

void write_riccati_csv(const control::RiccatiSolution& sol, std::ostream& out) {
  const auto d = static_cast<Eigen::Index>(sol.spec.letters());
  out << "t";
  for (const char* name : {"a0", "a1"})
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out << ',' << name << '_' << i + 1 << j + 1;
  out << ",e\n";
  out.precision(17);
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    out << sol.grid[k];
    for (const auto* m : {&sol.a0[k], &sol.a1[k]})
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) out << ',' << (*m)(i, j);
    out << ',' << sol.e[k] << '\n';
  }
}

json to_json(const control::HopfLaxResult& r) {
  return {{"value", r.value},
          {"alpha", to_json(r.alpha)},
          {"gradient_norm", r.gradient_norm},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"start_values", r.start_values}};
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace freectl::io
