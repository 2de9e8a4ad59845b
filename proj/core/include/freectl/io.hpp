#pragma once

#include <initializer_list>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "freectl/control.hpp"
#include "freectl/freecalc.hpp"
#include "freectl/matrix_tuple.hpp"
#include "freectl/ncpoly.hpp"

/// JSON forms of the core types. Letters are 1-based in JSON.
namespace freectl::io {

using nlohmann::json;

/// Input that does not follow the documented JSON layout.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws SchemaError if j is not an object or has a key outside `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

/// Typed field access with SchemaError on missing or mistyped fields.
template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

// {"dims": d, "terms": [{"word": [1, 2], "re": 1.0, "im": 0.0}, ...]}
json to_json(const ncpoly::NCPolynomial& p);
ncpoly::NCPolynomial polynomial_from_json(const json& j);

// {"n": n, "d": d, "components": [{"re": [row-major], "im": [row-major]}, ...]}
json to_json(const MatrixTuple& x);
MatrixTuple tuple_from_json(const json& j);

// {"family": "linear" | "quadratic" | "polynomial", ...}
json to_json(const freecalc::OuterFunction& g);
freecalc::OuterFunction outer_from_json(const json& j);

// {"inner": [polynomial, ...], "arctan": false, "outer": {...}}
json to_json(const freecalc::CylinderFunction& u);
freecalc::CylinderFunction cylinder_from_json(const json& j);

RealMatrix real_matrix_from_json(const json& j, const std::string& where);
json to_json(const RealMatrix& m);

// {"g0": [[...]], "g1": [[...]], "beta_c": 0, "beta_f": 0, "T": 1}
control::LQSpec lq_spec_from_json(const json& j);
json to_json(const control::LQSpec& s);

/// t, then a0_ij, a1_ij (row-major), e per grid node.
void write_riccati_csv(const control::RiccatiSolution& sol, std::ostream& out);

json to_json(const control::HopfLaxResult& r);

/// FNV-1a hash of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

}  // namespace freectl::io
