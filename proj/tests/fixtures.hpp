// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "alphaduplex/link_performance.hpp"
#include "alphaduplex/network_scenario.hpp"
#include "alphaduplex/spectral_overlap.hpp"

namespace fixtures {

// A realization with given gain matrices; positions are placeholders.
inline alphaduplex::NetworkRealization manual_network(const Eigen::MatrixXd& g_bu, const Eigen::MatrixXd& g_bb,
                                                      const Eigen::MatrixXd& g_uu) {
  alphaduplex::NetworkRealization net;
  const auto n = g_bu.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    net.bs_positions.push_back({500.0 * static_cast<double>(k), 0.0});
    net.user_positions.push_back({500.0 * static_cast<double>(k) + 50.0, 0.0});
  }
  net.r_bu = net.r_bb = net.r_uu = Eigen::MatrixXd::Ones(n, n);
  net.g_bu = g_bu;
  net.g_bb = g_bb;
  net.g_uu = g_uu;
  return net;
}

inline const alphaduplex::PulseOverlapProfile& profile() {
  static const alphaduplex::PulseOverlapProfile p = alphaduplex::build_default_profile(20e6);
  return p;
}

inline alphaduplex::SystemParams small_params(int n) {
  alphaduplex::SystemParams p;
  p.num_cells = n;
  p.p_b_tot = 40.0 * n;
  return p;
}

// Uniform point strictly inside the feasible box.
inline alphaduplex::DecisionVector random_interior(const alphaduplex::SystemParams& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const int n = p.num_cells;
  alphaduplex::DecisionVector x = alphaduplex::DecisionVector::uniform(n, 0.0, 0.0, 0.0);
  const double room = (p.p_b_tot - n * p.p_b_min) / n;
  for (int i = 0; i < n; ++i) {
    x.p_u(i) = u(rng) * p.p_u_max;
    x.p_b(i) = p.p_b_min + u(rng) * room;
    x.alpha(i) = p.alpha_min + u(rng) * (1.0 - p.alpha_min);
  }
  return x;
}

}  // namespace fixtures
