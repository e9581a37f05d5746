// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used by the tests. Nothing here calls
// into the library.
#pragma once

#include <cmath>
#include <numbers>

namespace oracle {

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Unit-energy pulses on width W = (1 + a) B, normalized argument 2f/W.
inline double s_up(double f, double a, double B) {
  const double W = (1.0 + a) * B;
  const double s = sinc(2.0 * f / W);
  return std::sqrt(3.0 / W) * s * s;
}

inline double s_down(double f, double a, double B) {
  const double W = (1.0 + a) * B;
  return std::sqrt(2.0 / W) * sinc(2.0 * f / W);
}

// Composite trapezoid of the matched-filter overlap on [-W/2, W/2] with n panels.
inline double leakage_trapezoid(bool uplink_rx, double a, double B, int n) {
  const double W = (1.0 + a) * B;
  const double shift = (1.0 - a) * B;
  const double lo = -0.5 * W;
  const double h = W / n;
  auto g = [&](double f) {
    return uplink_rx ? s_up(f, a, B) * s_down(f - shift, a, B) : s_down(f, a, B) * s_up(f - shift, a, B);
  };
  double sum = 0.5 * (g(lo) + g(lo + W));
  for (int k = 1; k < n; ++k) sum += g(lo + k * h);
  return sum * h;
}

// Trapezoid at n and 10 n panels, returning the finer value and the change.
struct Refined {
  double value;
  double change;
};

inline Refined leakage_refined(bool uplink_rx, double a, double B, int n) {
  const double coarse = leakage_trapezoid(uplink_rx, a, B, n);
  const double fine = leakage_trapezoid(uplink_rx, a, B, 10 * n);
  return {fine, std::abs(fine - coarse)};
}

// 10^(-L/10), L = 22 log10 d + 28 + 20 log10 fc.
inline double pathloss(double d, double fc) {
  return std::pow(10.0, -(22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(fc)) / 10.0);
}

}  // namespace oracle
