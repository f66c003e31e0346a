#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace curveflow {

using Real = double;

constexpr Real kPi = 3.14159265358979323846264338327950288;

// Thrown on contract violations (invalid construction parameters, mismatched
// sizes, degenerate geometry). Solver-level failures use SolverError.
struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

inline Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real acc = 0;
  for (std::size_t c = 0; c < a.size(); ++c) acc += a[c] * b[c];
  return acc;
}

inline Real norm(std::span<const Real> a) { return std::sqrt(dot(a, a)); }

inline Real sqr(Real x) { return x * x; }

}  // namespace curveflow
