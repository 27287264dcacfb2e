#pragma once

#include <cmath>
#include <numbers>

namespace critshape {

template <class F>
AngleExtremum minimize_periodic(F&& fn, int samples) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double step = two_pi / samples;
  AngleExtremum best{0.0, fn(0.0)};
  for (int i = 1; i < samples; ++i) {
    const double t = i * step;
    const double v = fn(t);
    if (v < best.value) best = {t, v};
  }
  // golden section on the bracketing cell pair
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best.theta - step, hi = best.theta + step;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
    if (fc < fd) {
      hi = d; d = c; fd = fc;
      c = hi - inv_phi * (hi - lo); fc = fn(c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + inv_phi * (hi - lo); fd = fn(d);
    }
  }
  const double t = 0.5 * (lo + hi);
  const double v = fn(t);
  if (v < best.value) best = {std::fmod(t + two_pi, two_pi), v};
  return best;
}

}  // namespace critshape
