// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "alphaduplex/errors.hpp"

namespace alphaduplex {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

/// Globally adaptive Gauss-Kronrod (15/31) quadrature to an absolute tolerance.
///
/// The interval is first cut into `initial_panels` equal pieces; the panel with
/// the largest error estimate is bisected until the summed estimate drops below
/// `abs_tol`. Throws NumericError (carrying the achieved estimate) if
/// `max_panels` is exhausted first.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                    int initial_panels = 4, int max_panels = 4096) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
  };
  auto evaluate = [&f](double lo, double hi) {
    double err = 0.0;
    const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
    return Panel{lo, hi, v, err};
  };

  initial_panels = std::max(initial_panels, 1);
  std::priority_queue<Panel> heap;
  const double width = (b - a) / initial_panels;
  for (int k = 0; k < initial_panels; ++k) {
    const double lo = a + k * width;
    const double hi = (k + 1 == initial_panels) ? b : lo + width;
    heap.push(evaluate(lo, hi));
  }

  auto totals = [&heap]() {
    // Re-summing keeps the running totals free of cancellation drift.
    double v = 0.0, e = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };

  double total_error = totals().second;
  int panels = initial_panels;
  while (total_error > abs_tol && panels < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = evaluate(worst.lo, mid);
    const Panel right = evaluate(mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  auto [value, error] = totals();
  if (error > abs_tol) {
    throw NumericError("adaptive quadrature did not reach tolerance within panel budget", error);
  }
  return {value, error, panels};
}

}  // namespace alphaduplex
