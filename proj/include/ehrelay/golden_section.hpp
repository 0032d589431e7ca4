#pragma once

#include <utility>
#include <vector>

namespace ehrelay {

/// Interior-point fraction of the bracket.
inline constexpr double kGoldenFraction = 0.382;

struct GoldenSectionResult {
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
  std::vector<std::pair<double, double>> trace;  // (x, f(x)) in evaluation order

  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Shrinks [lo, hi] around a minimum of a unimodal f until (hi - lo) / hi < eps.
/// Both interior points are evaluated every round.
template <class F>
GoldenSectionResult golden_section(F&& f, double lo, double hi, double eps, int max_rounds = 500) {
  GoldenSectionResult out;
  out.lo = lo;
  out.hi = hi;
  for (int round = 0; round < max_rounds; ++round) {
    if (!(out.hi > 0.0) || (out.hi - out.lo) / out.hi < eps) break;
    const double width = out.hi - out.lo;
    const double left = out.lo + kGoldenFraction * width;
    const double right = out.hi - kGoldenFraction * width;
    const double f_left = f(left);
    const double f_right = f(right);
    out.trace.emplace_back(left, f_left);
    out.trace.emplace_back(right, f_right);
    out.evaluations += 2;
    if (f_left < f_right) {
      out.hi = right;
    } else {
      out.lo = left;
    }
  }
  return out;
}

}  // namespace ehrelay
