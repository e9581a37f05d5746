// SPDX-License-Identifier: Apache-2.0
//
// Uplink/downlink SINR, per-link rates, the two network utilities and their
// analytic gradients with respect to (p_u, p_b, alpha).
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "alphaduplex/errors.hpp"
#include "alphaduplex/network_scenario.hpp"
#include "alphaduplex/spectral_overlap.hpp"

namespace alphaduplex {

enum class UtilityKind { SumRate, SumLogRate };
enum class Direction { Uplink, Downlink };

inline std::string_view to_string(UtilityKind k) {
  return k == UtilityKind::SumRate ? "sum_rate" : "sum_log_rate";
}

/// Optimization variables: per-cell user power, BS power and overlap fraction.
struct DecisionVector {
  Eigen::VectorXd p_u;
  Eigen::VectorXd p_b;
  Eigen::VectorXd alpha;

  static DecisionVector uniform(int n, double p_u, double p_b, double alpha) {
    return {Eigen::VectorXd::Constant(n, p_u), Eigen::VectorXd::Constant(n, p_b),
            Eigen::VectorXd::Constant(n, alpha)};
  }

  int num_cells() const { return static_cast<int>(p_u.size()); }

  bool all_finite() const { return p_u.allFinite() && p_b.allFinite() && alpha.allFinite(); }

  /// [p_u; p_b; alpha]
  Eigen::VectorXd stacked() const {
    Eigen::VectorXd v(3 * p_u.size());
    v << p_u, p_b, alpha;
    return v;
  }

  static DecisionVector from_stacked(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size() / 3;
    return {v.segment(0, n), v.segment(n, n), v.segment(2 * n, n)};
  }
};

/// Interior of the full constraint box: 0 < p_u < p_u_max, p_b > p_b_min,
/// sum p_b < p_b_tot, alpha_min < alpha < 1.
inline bool strictly_feasible(const DecisionVector& x, const SystemParams& params) {
  if (!x.all_finite()) return false;
  return (x.p_u.array() > 0.0).all() && (x.p_u.array() < params.p_u_max).all() &&
         (x.p_b.array() > params.p_b_min).all() && x.p_b.sum() < params.p_b_tot &&
         (x.alpha.array() > params.alpha_min).all() && (x.alpha.array() < 1.0).all();
}

struct LinkMetrics {
  Eigen::VectorXd gamma_u, gamma_b;
  Eigen::VectorXd rate_u, rate_b;    // bits/s
  Eigen::VectorXd noise_b, noise_u;  // W, at BS and user receivers
};

/// Evaluates the link-level quantities of one realization. Holds references;
/// the realization and profile must outlive it.
class LinkModel {
 public:
  LinkModel(const NetworkRealization& net, const PulseOverlapProfile& profile, const SystemParams& params)
      : net_(net),
        profile_(profile),
        bandwidth_(params.bandwidth),
        n0_bs_(params.bs_noise_density()),
        n0_ue_(params.ue_noise_density()) {}

  int num_cells() const { return net_.num_cells(); }
  double bandwidth() const { return bandwidth_; }

  double uplink_sinr(int i, const DecisionVector& x) const {
    return uplink_terms(i, x, leakage(x, false)).gamma();
  }
  double downlink_sinr(int i, const DecisionVector& x) const {
    return downlink_terms(i, x, leakage(x, false)).gamma();
  }

  double link_rate(int i, Direction dir, const DecisionVector& x) const {
    const double gamma = dir == Direction::Uplink ? uplink_sinr(i, x) : downlink_sinr(i, x);
    return (1.0 + x.alpha(i)) * bandwidth_ * std::log2(1.0 + gamma);
  }

  LinkMetrics metrics(const DecisionVector& x) const {
    const int n = num_cells();
    LinkMetrics m;
    m.gamma_u.resize(n);
    m.gamma_b.resize(n);
    m.rate_u.resize(n);
    m.rate_b.resize(n);
    m.noise_b.resize(n);
    m.noise_u.resize(n);
    const Leakage leak = leakage(x, false);
    for (int i = 0; i < n; ++i) {
      const double width = (1.0 + x.alpha(i)) * bandwidth_;
      m.gamma_u(i) = uplink_terms(i, x, leak).gamma();
      m.gamma_b(i) = downlink_terms(i, x, leak).gamma();
      m.rate_u(i) = width * std::log2(1.0 + m.gamma_u(i));
      m.rate_b(i) = width * std::log2(1.0 + m.gamma_b(i));
      m.noise_b(i) = width * n0_bs_;
      m.noise_u(i) = width * n0_ue_;
    }
    return m;
  }

  /// Sum of rates in bits/s, or sum of natural-log rates.
  double utility(const DecisionVector& x, UtilityKind kind) const {
    const double u = normalized_utility(x, kind);
    return kind == UtilityKind::SumRate ? bandwidth_ * u
                                        : u + 2.0 * num_cells() * std::log(bandwidth_);
  }

  /// Gradient of utility() with respect to the stacked [p_u; p_b; alpha].
  Eigen::VectorXd utility_gradient(const DecisionVector& x, UtilityKind kind) const {
    Eigen::VectorXd g = normalized_gradient(x, kind);
    if (kind == UtilityKind::SumRate) g *= bandwidth_;
    return g;
  }

  /// Utility with rates expressed per unit HD bandwidth (R/B). Differs from
  /// utility() by a positive factor (sum-rate) or an additive constant (sum-log).
  double normalized_utility(const DecisionVector& x, UtilityKind kind) const {
    const Leakage leak = leakage(x, false);
    double u = 0.0;
    for (int i = 0; i < num_cells(); ++i) {
      const double ru = normalized_rate(x.alpha(i), uplink_terms(i, x, leak).gamma());
      const double rb = normalized_rate(x.alpha(i), downlink_terms(i, x, leak).gamma());
      if (kind == UtilityKind::SumRate) {
        u += ru + rb;
      } else {
        if (!(ru > 0.0) || !(rb > 0.0)) {
          throw DomainError("sum-log-rate utility needs every rate strictly positive (cell " +
                            std::to_string(i) + ")");
        }
        u += std::log(ru) + std::log(rb);
      }
    }
    return u;
  }

  Eigen::VectorXd normalized_gradient(const DecisionVector& x, UtilityKind kind) const {
    const int n = num_cells();
    const Leakage leak = leakage(x, true);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * n);
    auto d_pu = [&](int j) -> double& { return grad(j); };
    auto d_pb = [&](int j) -> double& { return grad(n + j); };
    auto d_alpha = [&](int j) -> double& { return grad(2 * n + j); };

    for (int i = 0; i < n; ++i) {
      for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
        const Terms t = dir == Direction::Uplink ? uplink_terms(i, x, leak) : downlink_terms(i, x, leak);
        const double gamma = t.gamma();
        const double log_term = std::log2(1.0 + gamma);
        const double rate = (1.0 + x.alpha(i)) * log_term;
        double weight = 1.0;
        if (kind == UtilityKind::SumLogRate) {
          if (!(rate > 0.0)) throw DomainError("sum-log-rate gradient needs positive rates");
          weight = 1.0 / rate;
        }
        // d rate / d gamma, then d gamma / d signal = 1/D and d gamma / d D = -gamma/D.
        const double dr_dgamma = (1.0 + x.alpha(i)) / ((1.0 + gamma) * std::numbers::ln2);
        const double c_signal = weight * dr_dgamma / t.denominator;
        const double c_denom = -weight * dr_dgamma * gamma / t.denominator;

        const double g_own = net_.g_bu(i, i);
        if (dir == Direction::Uplink) {
          d_pu(i) += c_signal * g_own;
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double g_cross = net_.g_bb(j, i);
            d_pb(j) += c_denom * g_cross * leak.cu_sq(j);
            d_alpha(j) += c_denom * x.p_b(j) * g_cross * leak.cu_sq_d(j);
            d_pu(j) += c_denom * net_.g_bu(j, i);
          }
          d_alpha(i) += weight * log_term + c_denom * bandwidth_ * n0_bs_;
        } else {
          d_pb(i) += c_signal * g_own;
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double g_cross = net_.g_uu(j, i);
            d_pu(j) += c_denom * g_cross * leak.cb_sq(j);
            d_alpha(j) += c_denom * x.p_u(j) * g_cross * leak.cb_sq_d(j);
            d_pb(j) += c_denom * net_.g_bu(j, i);
          }
          d_alpha(i) += weight * log_term + c_denom * bandwidth_ * n0_ue_;
        }
      }
    }
    return grad;
  }

 private:
  struct Terms {
    double signal = 0.0;
    double cross_mode = 0.0;
    double intra_mode = 0.0;
    double noise = 0.0;
    double denominator = 0.0;
    double gamma() const { return signal / denominator; }
  };

  // |C(alpha_j)|^2 per transmitting cell, and optionally its alpha-derivative.
  struct Leakage {
    Eigen::VectorXd cu_sq, cb_sq, cu_sq_d, cb_sq_d;
  };

  Leakage leakage(const DecisionVector& x, bool with_derivative) const {
    const int n = num_cells();
    Leakage l;
    l.cu_sq.resize(n);
    l.cb_sq.resize(n);
    if (with_derivative) {
      l.cu_sq_d.resize(n);
      l.cb_sq_d.resize(n);
    }
    for (int j = 0; j < n; ++j) {
      l.cu_sq(j) = profile_.cu_sq(x.alpha(j));
      l.cb_sq(j) = profile_.cb_sq(x.alpha(j));
      if (with_derivative) {
        l.cu_sq_d(j) = profile_.cu_sq_derivative(x.alpha(j));
        l.cb_sq_d(j) = profile_.cb_sq_derivative(x.alpha(j));
      }
    }
    return l;
  }

  static double normalized_rate(double alpha, double gamma) { return (1.0 + alpha) * std::log2(1.0 + gamma); }

  Terms uplink_terms(int i, const DecisionVector& x, const Leakage& leak) const {
    Terms t;
    t.signal = x.p_u(i) * net_.g_bu(i, i);
    for (int j = 0; j < num_cells(); ++j) {
      if (j == i) continue;
      t.cross_mode += x.p_b(j) * net_.g_bb(j, i) * leak.cu_sq(j);
      t.intra_mode += x.p_u(j) * net_.g_bu(j, i);
    }
    t.noise = (1.0 + x.alpha(i)) * bandwidth_ * n0_bs_;
    t.denominator = t.cross_mode + t.intra_mode + t.noise;
    return t;
  }

  Terms downlink_terms(int i, const DecisionVector& x, const Leakage& leak) const {
    Terms t;
    t.signal = x.p_b(i) * net_.g_bu(i, i);
    for (int j = 0; j < num_cells(); ++j) {
      if (j == i) continue;
      t.cross_mode += x.p_u(j) * net_.g_uu(j, i) * leak.cb_sq(j);
      t.intra_mode += x.p_b(j) * net_.g_bu(j, i);
    }
    t.noise = (1.0 + x.alpha(i)) * bandwidth_ * n0_ue_;
    t.denominator = t.cross_mode + t.intra_mode + t.noise;
    return t;
  }

  const NetworkRealization& net_;
  const PulseOverlapProfile& profile_;
  double bandwidth_;
  double n0_bs_;
  double n0_ue_;
};

inline double uplink_sinr(int i, const DecisionVector& x, const NetworkRealization& net,
                          const PulseOverlapProfile& profile, const SystemParams& params) {
  return LinkModel(net, profile, params).uplink_sinr(i, x);
}

inline double downlink_sinr(int i, const DecisionVector& x, const NetworkRealization& net,
                            const PulseOverlapProfile& profile, const SystemParams& params) {
  return LinkModel(net, profile, params).downlink_sinr(i, x);
}

inline double link_rate(int i, Direction dir, const DecisionVector& x, const NetworkRealization& net,
                        const PulseOverlapProfile& profile, const SystemParams& params) {
  return LinkModel(net, profile, params).link_rate(i, dir, x);
}

inline double utility(const DecisionVector& x, const NetworkRealization& net, const PulseOverlapProfile& profile,
                      const SystemParams& params, UtilityKind kind) {
  return LinkModel(net, profile, params).utility(x, kind);
}

inline Eigen::VectorXd utility_gradient(const DecisionVector& x, const NetworkRealization& net,
                                        const PulseOverlapProfile& profile, const SystemParams& params,
                                        UtilityKind kind) {
  return LinkModel(net, profile, params).utility_gradient(x, kind);
}

/// Utility computed directly from a list of rates (bits/s).
inline double utility_from_rates(const Eigen::VectorXd& rate_u, const Eigen::VectorXd& rate_b, UtilityKind kind) {
  if (kind == UtilityKind::SumRate) return rate_u.sum() + rate_b.sum();
  if ((rate_u.array() <= 0.0).any() || (rate_b.array() <= 0.0).any()) {
    throw DomainError("sum-log-rate utility needs every rate strictly positive");
  }
  return rate_u.array().log().sum() + rate_b.array().log().sum();
}

}  // namespace alphaduplex
