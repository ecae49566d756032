// Directed-rounding helpers shared by the certified numeric paths. Each
// basic operation is evaluated in round-to-nearest and then nudged one ulp
// in the safe direction, which dominates the half-ulp rounding of the
// nearest result.
#pragma once

#include <cmath>
#include <limits>

namespace sawbound::internal {

inline double up(double v) {
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

inline double down(double v) {
  return std::nextafter(v, -std::numeric_limits<double>::infinity());
}

inline double add_up(double a, double b) { return up(a + b); }
inline double mul_up(double a, double b) { return up(a * b); }
inline double div_up(double a, double b) { return up(a / b); }
inline double sub_down(double a, double b) { return down(a - b); }

// Upper bound on exp(x) for x >= 0: libm guarantees are loose, so allow a
// generous 4-ulp nudge.
inline double exp_up(double x) { return up(up(up(up(std::exp(x))))); }

}  // namespace sawbound::internal
