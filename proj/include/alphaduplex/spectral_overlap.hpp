// SPDX-License-Identifier: Apache-2.0
//
// Uplink (Sinc^2) and downlink (Sinc) pulse spectra, the matched-filter
// cross-mode leakage factors between them, and a cached polynomial model of
// those factors for use inside the optimizer.
#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "alphaduplex/errors.hpp"
#include "alphaduplex/quadrature.hpp"

namespace alphaduplex {

inline constexpr double kDefaultAlphaMin = 0.275;
inline constexpr double kDefaultQuadratureTol = 1e-10;
inline constexpr double kMaxFitResidual = 1e-4;

/// Normalized sinc, sin(pi x) / (pi x), with sinc(0) = 1.
inline double sinc(double x) {
  const double px = std::numbers::pi * x;
  if (std::abs(px) < 1e-6) {
    return 1.0 - px * px / 6.0;
  }
  return std::sin(px) / px;
}

enum class PulseKind { UplinkSinc2, DownlinkSinc };

struct PulseSpec {
  PulseKind kind = PulseKind::UplinkSinc2;
  double alpha = 0.0;
  double bandwidth = 1.0;  // HD channel bandwidth B, Hz

  double width() const { return (1.0 + alpha) * bandwidth; }
};

enum class NormalizationMethod { ClosedForm, Quadrature };

namespace detail {

inline void check_pulse_spec(const PulseSpec& spec) {
  if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth)) {
    throw InvalidParameter("pulse bandwidth must be positive");
  }
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) {
    throw InvalidParameter("pulse overlap fraction must lie in [0, 1]");
  }
}

inline int sinc_power(PulseKind kind) { return kind == PulseKind::UplinkSinc2 ? 4 : 2; }

// Integral over the real line of sinc^p(u), p in {2, 4}. Lobes [n, n+1] are
// integrated numerically up to `lobes`, the remainder by its asymptotic tail.
inline double sinc_power_integral_numeric(int p, int lobes = 2048) {
  auto f = [p](double u) {
    const double s = sinc(u);
    const double s2 = s * s;
    return p == 2 ? s2 : s2 * s2;
  };
  const auto half = integrate_adaptive(f, 0.0, static_cast<double>(lobes), 1e-13, lobes, 8 * lobes);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double tail = p == 2 ? 1.0 / (2.0 * pi2 * lobes)
                             : 1.0 / (8.0 * pi2 * pi2 * std::pow(static_cast<double>(lobes), 3));
  return 2.0 * (half.value + tail);
}

}  // namespace detail

/// A unit-energy pulse spectrum S(f) for one direction.
class Pulse {
 public:
  explicit Pulse(const PulseSpec& spec, NormalizationMethod method = NormalizationMethod::ClosedForm)
      : spec_(spec) {
    detail::check_pulse_spec(spec);
    width_ = spec.width();
    // Substituting u = 2f/W turns the energy integral into (W/2) * int sinc^p(u) du.
    const int p = detail::sinc_power(spec.kind);
    double unit_integral = 0.0;
    if (method == NormalizationMethod::ClosedForm) {
      unit_integral = p == 4 ? 2.0 / 3.0 : 1.0;
    } else {
      unit_integral = detail::sinc_power_integral_numeric(p);
    }
    inv_norm_ = 1.0 / std::sqrt(0.5 * width_ * unit_integral);
  }

  double operator()(double f) const {
    const double s = sinc(2.0 * f / width_);
    return inv_norm_ * (spec_.kind == PulseKind::UplinkSinc2 ? s * s : s);
  }

  const PulseSpec& spec() const { return spec_; }
  double width() const { return width_; }

 private:
  PulseSpec spec_;
  double width_ = 0.0;
  double inv_norm_ = 0.0;
};

inline double pulse_amplitude(const PulseSpec& spec, double f) { return Pulse(spec)(f); }

namespace detail {

// Matched filter `rx` against `tx` shifted by (1 - alpha) B, inside the
// receiver's low-pass window [-W/2, W/2].
inline double cross_factor(PulseKind rx_kind, double alpha, double bandwidth, double tol) {
  if (!(tol > 0.0)) {
    throw InvalidParameter("quadrature tolerance must be positive");
  }
  const PulseKind tx_kind =
      rx_kind == PulseKind::UplinkSinc2 ? PulseKind::DownlinkSinc : PulseKind::UplinkSinc2;
  const Pulse rx({rx_kind, alpha, bandwidth});
  const Pulse tx({tx_kind, alpha, bandwidth});
  const double shift = (1.0 - alpha) * bandwidth;
  const double half = 0.5 * rx.width();
  auto integrand = [&](double f) { return rx(f) * tx(f - shift); };
  return integrate_adaptive(integrand, -half, half, tol, 8).value;
}

}  // namespace detail

/// C_u(alpha): leakage of the shifted downlink pulse into the BS uplink matched filter.
inline double cross_factor_uplink(double alpha, double bandwidth,
                                  double tol = kDefaultQuadratureTol) {
  return detail::cross_factor(PulseKind::UplinkSinc2, alpha, bandwidth, tol);
}

/// C_b(alpha): leakage of the shifted uplink pulse into the user downlink matched filter.
inline double cross_factor_downlink(double alpha, double bandwidth,
                                    double tol = kDefaultQuadratureTol) {
  return detail::cross_factor(PulseKind::DownlinkSinc, alpha, bandwidth, tol);
}

/// Least-squares polynomial on [lo, hi], stored in powers of t = 2(a - lo)/(hi - lo) - 1.
struct PolynomialFit {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> coeffs;  // ascending powers of t

  double to_t(double a) const { return 2.0 * (a - lo) / (hi - lo) - 1.0; }

  double value(double a) const {
    const double t = to_t(a);
    double acc = 0.0;
    for (auto c = coeffs.rbegin(); c != coeffs.rend(); ++c) acc = acc * t + *c;
    return acc;
  }

  double derivative(double a) const {
    const double t = to_t(a);
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * coeffs[k];
    return acc * 2.0 / (hi - lo);
  }

  static PolynomialFit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                     double lo, double hi, int degree) {
    PolynomialFit fit{lo, hi, {}};
    const auto rows = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd vander(rows, degree + 1);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double t = fit.to_t(x[static_cast<std::size_t>(r)]);
      double power = 1.0;
      for (int k = 0; k <= degree; ++k) {
        vander(r, k) = power;
        power *= t;
      }
      rhs(r) = y[static_cast<std::size_t>(r)];
    }
    const Eigen::VectorXd c = vander.colPivHouseholderQr().solve(rhs);
    fit.coeffs.assign(c.data(), c.data() + c.size());
    return fit;
  }
};

/// Leakage factors sampled on an alpha grid plus their polynomial model on
/// [alpha_min, 1]. Immutable once built; share freely.
struct PulseOverlapProfile {
  std::vector<double> alpha_grid;
  std::vector<double> cu_values;
  std::vector<double> cb_values;
  std::vector<double> cu_squared;
  std::vector<double> cb_squared;
  PolynomialFit cu_poly;
  PolynomialFit cb_poly;
  double alpha_min = kDefaultAlphaMin;
  double quadrature_tol = kDefaultQuadratureTol;
  double max_fit_residual = 0.0;

  double cu(double alpha) const { return evaluate(alpha, cu_poly, cu_values).first; }
  double cb(double alpha) const { return evaluate(alpha, cb_poly, cb_values).first; }

  double cu_sq(double alpha) const { return square(evaluate(alpha, cu_poly, cu_values)).first; }
  double cb_sq(double alpha) const { return square(evaluate(alpha, cb_poly, cb_values)).first; }

  /// d|C_u|^2 / d alpha.
  double cu_sq_derivative(double alpha) const {
    return square(evaluate(alpha, cu_poly, cu_values)).second;
  }
  double cb_sq_derivative(double alpha) const {
    return square(evaluate(alpha, cb_poly, cb_values)).second;
  }

  /// Sampled non-decreasing check of both |C|^2 on the grid nodes in [alpha_min, 1].
  bool leakage_monotone() const {
    double prev_u = -1.0, prev_b = -1.0;
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
      if (alpha_grid[k] < alpha_min) continue;
      if (cu_squared[k] < prev_u || cb_squared[k] < prev_b) return false;
      prev_u = cu_squared[k];
      prev_b = cb_squared[k];
    }
    return true;
  }

  /// A profile with constant leakage amplitudes; used to isolate terms.
  static PulseOverlapProfile constant(double cu_amplitude, double cb_amplitude,
                                      double alpha_min = kDefaultAlphaMin) {
    PulseOverlapProfile p;
    p.alpha_min = alpha_min;
    p.alpha_grid = {0.0, 1.0};
    p.cu_values = {cu_amplitude, cu_amplitude};
    p.cb_values = {cb_amplitude, cb_amplitude};
    p.cu_squared = {cu_amplitude * cu_amplitude, cu_amplitude * cu_amplitude};
    p.cb_squared = {cb_amplitude * cb_amplitude, cb_amplitude * cb_amplitude};
    p.cu_poly = {alpha_min, 1.0, {cu_amplitude}};
    p.cb_poly = {alpha_min, 1.0, {cb_amplitude}};
    return p;
  }

 private:
  static std::pair<double, double> square(std::pair<double, double> vd) {
    return {vd.first * vd.first, 2.0 * vd.first * vd.second};
  }

  // (value, derivative). Polynomial on [alpha_min, inf); piecewise-linear
  // interpolation of the quadrature samples below alpha_min.
  std::pair<double, double> evaluate(double alpha, const PolynomialFit& poly,
                                     const std::vector<double>& samples) const {
    if (alpha >= alpha_min) {
      return {poly.value(alpha), poly.derivative(alpha)};
    }
    auto hi = std::upper_bound(alpha_grid.begin(), alpha_grid.end(), alpha);
    if (hi == alpha_grid.begin()) {
      return {samples.front(), 0.0};
    }
    if (hi == alpha_grid.end()) {
      return {samples.back(), 0.0};
    }
    const auto k = static_cast<std::size_t>(hi - alpha_grid.begin());
    const double a0 = alpha_grid[k - 1], a1 = alpha_grid[k];
    const double slope = (samples[k] - samples[k - 1]) / (a1 - a0);
    return {samples[k - 1] + slope * (alpha - a0), slope};
  }
};

/// Default sampling: 16 points on [0, alpha_min) and 64 on [alpha_min, 1].
inline std::vector<double> default_alpha_grid(double alpha_min = kDefaultAlphaMin,
                                              int below = 16, int above = 64) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(below + above));
  for (int k = 0; k < below; ++k) grid.push_back(alpha_min * k / below);
  for (int k = 0; k < above; ++k) grid.push_back(alpha_min + (1.0 - alpha_min) * k / (above - 1));
  return grid;
}

inline PulseOverlapProfile build_profile(const std::vector<double>& alpha_grid, double bandwidth,
                                         double tol = kDefaultQuadratureTol, int poly_degree = 8,
                                         double alpha_min = kDefaultAlphaMin) {
  if (alpha_grid.size() < 30) {
    throw InvalidParameter("alpha grid needs at least 30 points");
  }
  if (alpha_grid.front() != 0.0 || alpha_grid.back() != 1.0 ||
      !std::is_sorted(alpha_grid.begin(), alpha_grid.end()) ||
      std::adjacent_find(alpha_grid.begin(), alpha_grid.end()) != alpha_grid.end()) {
    throw InvalidParameter("alpha grid must ascend strictly from 0 to 1");
  }
  if (poly_degree < 4) {
    throw InvalidParameter("polynomial degree must be at least 4");
  }
  if (!(alpha_min >= 0.0 && alpha_min < 1.0)) {
    throw InvalidParameter("alpha_min must lie in [0, 1)");
  }

  PulseOverlapProfile p;
  p.alpha_grid = alpha_grid;
  p.alpha_min = alpha_min;
  p.quadrature_tol = tol;
  std::vector<double> fit_x, fit_u, fit_b;
  for (double a : alpha_grid) {
    const double cu = cross_factor_uplink(a, bandwidth, tol);
    const double cb = cross_factor_downlink(a, bandwidth, tol);
    p.cu_values.push_back(cu);
    p.cb_values.push_back(cb);
    p.cu_squared.push_back(cu * cu);
    p.cb_squared.push_back(cb * cb);
    if (a >= alpha_min) {
      fit_x.push_back(a);
      fit_u.push_back(cu);
      fit_b.push_back(cb);
    }
  }
  if (static_cast<int>(fit_x.size()) <= poly_degree) {
    throw InvalidParameter("too few grid points in [alpha_min, 1] for the requested degree");
  }
  p.cu_poly = PolynomialFit::least_squares(fit_x, fit_u, alpha_min, 1.0, poly_degree);
  p.cb_poly = PolynomialFit::least_squares(fit_x, fit_b, alpha_min, 1.0, poly_degree);

  double residual = 0.0;
  for (std::size_t k = 0; k < fit_x.size(); ++k) {
    residual = std::max(residual, std::abs(p.cu_poly.value(fit_x[k]) - fit_u[k]));
    residual = std::max(residual, std::abs(p.cb_poly.value(fit_x[k]) - fit_b[k]));
  }
  p.max_fit_residual = residual;
  if (residual > kMaxFitResidual) {
    throw DegreeInsufficient("polynomial fit residual exceeds 1e-4; raise the degree", residual);
  }
  return p;
}

inline PulseOverlapProfile build_default_profile(double bandwidth,
                                                 double alpha_min = kDefaultAlphaMin) {
  return build_profile(default_alpha_grid(alpha_min), bandwidth, kDefaultQuadratureTol, 8,
                       alpha_min);
}

/// alpha,cu,cb,cu_sq,cb_sq at every grid node (quadrature values).
inline void write_profile_csv(const PulseOverlapProfile& p, std::ostream& out) {
  out << "alpha,cu,cb,cu_sq,cb_sq\n" << std::setprecision(17);
  for (std::size_t k = 0; k < p.alpha_grid.size(); ++k) {
    out << p.alpha_grid[k] << ',' << p.cu_values[k] << ',' << p.cb_values[k] << ','
        << p.cu_squared[k] << ',' << p.cb_squared[k] << '\n';
  }
}

}  // namespace alphaduplex
