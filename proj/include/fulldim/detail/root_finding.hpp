#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <utility>

#include "fulldim/errors.hpp"

namespace fulldim::detail {

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

struct Bracket {
  double lo, flo, hi, fhi;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  std::size_t evaluations = 0;
  bool residual_met = false;
};

/// Grows [lo, hi] by doubling its width on the failing side until an
/// increasing function satisfies f(lo) <= 0 <= f(hi).
template <class F>
Bracket expand_increasing(F&& f, double lo, double hi, std::size_t max_doublings = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  for (std::size_t i = 0; i < max_doublings && fhi < 0.0; ++i) {
    const double width = hi - lo;
    lo = hi;
    flo = fhi;
    hi = lo + 2.0 * width;
    fhi = f(hi);
  }
  for (std::size_t i = 0; i < max_doublings && flo > 0.0; ++i) {
    const double width = hi - lo;
    hi = lo;
    fhi = flo;
    lo = hi - 2.0 * width;
    flo = f(lo);
  }
  if (fhi < 0.0 || flo > 0.0) throw ConvergenceFailure("bracket expansion failed");
  return {lo, flo, hi, fhi};
}

/// Root of a monotone function on a sign-changing bracket: regula falsi with
/// the Illinois modification, falling back to bisection when the bracket
/// stops shrinking. Stops when |f| <= ftol or the bracket is narrower than
/// xtol; in the latter case the best point seen is returned.
template <class F>
RootResult bracketed_root(F&& f, Bracket b, double ftol, double xtol,
                          std::size_t max_evaluations = 500) {
  RootResult best{b.lo, b.flo, 0, std::abs(b.flo) <= ftol};
  if (std::abs(b.fhi) < std::abs(best.fx)) best = {b.hi, b.fhi, 0, std::abs(b.fhi) <= ftol};
  if (best.residual_met) return best;
  if ((b.flo > 0.0) == (b.fhi > 0.0)) throw ConvergenceFailure("root is not bracketed");

  int side = 0;
  double width_before = b.hi - b.lo;
  for (std::size_t k = 1; k <= max_evaluations; ++k) {
    double x = (b.flo * b.hi - b.fhi * b.lo) / (b.flo - b.fhi);
    if (k % 4 == 0) {
      if (b.hi - b.lo > 0.5 * width_before) x = 0.5 * (b.lo + b.hi);
      width_before = b.hi - b.lo;
    }
    if (!(x > b.lo && x < b.hi)) x = 0.5 * (b.lo + b.hi);
    const double fx = f(x);
    best.evaluations = k;
    if (std::abs(fx) < std::abs(best.fx)) {
      best.x = x;
      best.fx = fx;
    }
    if (std::abs(fx) <= ftol) {
      best = {x, fx, k, true};
      return best;
    }
    if ((fx > 0.0) == (b.fhi > 0.0)) {
      b.hi = x;
      b.fhi = fx;
      if (side == -1) b.flo *= 0.5;
      side = -1;
    } else {
      b.lo = x;
      b.flo = fx;
      if (side == +1) b.fhi *= 0.5;
      side = +1;
    }
    const double scale = std::max(std::abs(b.lo), std::abs(b.hi));
    if (b.hi - b.lo <= xtol || b.hi - b.lo <= 4.0 * kEpsilon * scale) return best;
  }
  return best;
}

}  // namespace fulldim::detail
