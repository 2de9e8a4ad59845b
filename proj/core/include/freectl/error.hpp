#pragma once

#include <stdexcept>
#include <string>

namespace freectl {

// Shapes, letter counts or letter indices that do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that diverged, hit NaN, or failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that is well-shaped but outside an operation's supported class.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define FREECTL_REQUIRE_DIMS(cond, msg)                         \
  do {                                                          \
    if (!(cond)) throw ::freectl::DimensionError(std::string(msg)); \
  } while (0)

}  // namespace freectl
