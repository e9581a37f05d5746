// SPDX-License-Identifier: Apache-2.0
//
// Seedable single-tier network drops: BS layout, one user per cell, distance
// and composite power-gain matrices.
#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alphaduplex/errors.hpp"

namespace alphaduplex {

enum class Fading { None, RayleighUnitMean };
enum class Layout { Auto, Grid, Line };

inline double dbm_per_hz_to_watts_per_hz(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

struct SystemParams {
  int num_cells = 9;
  double isd = 500.0;           // m
  double bandwidth = 20e6;      // Hz, per HD direction
  double carrier_ghz = 2.0;
  double noise_density = dbm_per_hz_to_watts_per_hz(-174.0 + 9.0);  // W/Hz at the BS receiver
  std::optional<double> user_noise_density;                         // defaults to noise_density
  double p_u_max = 0.5;   // W per user
  double p_b_min = 1.0;   // W per BS
  double p_b_tot = 360.0; // W across all BSs
  double alpha_min = 0.275;
  Fading fading = Fading::RayleighUnitMean;
  Layout layout = Layout::Auto;
  double d_min = 10.0;  // m, user exclusion radius around its BS

  double bs_noise_density() const { return noise_density; }
  double ue_noise_density() const { return user_noise_density.value_or(noise_density); }
  double coverage_radius() const { return 0.5 * isd; }

  void validate() const {
    if (num_cells < 1) throw ConfigError("N must be at least 1");
    if (!(isd > 0.0)) throw ConfigError("isd must be positive");
    if (!(bandwidth > 0.0)) throw ConfigError("B must be positive");
    if (!(carrier_ghz > 0.0)) throw ConfigError("fc must be positive");
    if (!(noise_density > 0.0) || (user_noise_density && !(*user_noise_density > 0.0))) {
      throw ConfigError("noise densities must be positive");
    }
    if (!(p_u_max > 0.0) || !(p_b_tot > 0.0)) throw ConfigError("p_u_max and p_b_tot must be positive");
    if (p_b_min < 0.0) throw ConfigError("p_b_min must be non-negative");
    if (!(alpha_min >= 0.0 && alpha_min <= 1.0)) throw ConfigError("alpha_min must lie in [0, 1]");
    if (!(d_min >= 0.0 && d_min < coverage_radius())) throw ConfigError("d_min must lie in [0, isd/2)");
  }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// One drop. Matrices are indexed (source cell j, destination cell i).
struct NetworkRealization {
  std::vector<Point> bs_positions;
  std::vector<Point> user_positions;
  Eigen::MatrixXd r_bu, r_bb, r_uu;  // m; r_bu(j, i) = |BS_j - user_i|
  Eigen::MatrixXd g_bu, g_bb, g_uu;  // composite power gains h * l(r)
  std::uint64_t seed = 0;

  int num_cells() const { return static_cast<int>(bs_positions.size()); }

  /// FNV-1a over the gain matrices; equal for identical realizations.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const Eigen::MatrixXd& m) {
      const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
      for (Eigen::Index k = 0; k < m.size() * static_cast<Eigen::Index>(sizeof(double)); ++k) {
        h ^= bytes[k];
        h *= 1099511628211ULL;
      }
    };
    mix(g_bu);
    mix(g_bb);
    mix(g_uu);
    return h;
  }
};

namespace detail {

// Independent streams per (seed, purpose) so drops and fading never share draws.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                    0x5eedu};
  return std::mt19937_64(seq);
}

inline double pathloss_db(double d, double fc_ghz) {
  return 22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(fc_ghz);
}

}  // namespace detail

/// Linear gain 10^(-L/10) of the urban-macro loss L(d) = 22 log10 d + 28 + 20 log10 fc.
inline double pathloss_gain(double d, double fc_ghz) {
  if (!(fc_ghz > 0.0)) throw InvalidParameter("carrier frequency must be positive");
  if (d < 1.0) {
    std::clog << "warning: pathloss distance " << d << " m below 1 m, clamped\n";
    d = 1.0;
  }
  return std::pow(10.0, -detail::pathloss_db(d, fc_ghz) / 10.0);
}

inline std::vector<Point> generate_topology(const SystemParams& params) {
  const int n = params.num_cells;
  if (n < 1) throw ConfigError("N must be at least 1");
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  const bool square = side * side == n;

  Layout layout = params.layout;
  if (layout == Layout::Auto) layout = square ? Layout::Grid : Layout::Line;
  if (layout == Layout::Grid && !square) {
    throw ConfigError("grid layout needs a square cell count, got N=" + std::to_string(n));
  }

  std::vector<Point> bs;
  bs.reserve(static_cast<std::size_t>(n));
  if (layout == Layout::Grid) {
    const double offset = 0.5 * (side - 1);
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        bs.push_back({(c - offset) * params.isd, (r - offset) * params.isd});
      }
    }
  } else {
    const double offset = 0.5 * (n - 1);
    for (int k = 0; k < n; ++k) bs.push_back({(k - offset) * params.isd, 0.0});
  }
  return bs;
}

/// One user per cell, uniform on the annulus d_min <= r <= isd/2 around its BS.
inline std::vector<Point> drop_users(const std::vector<Point>& bs_positions, const SystemParams& params,
                                     std::uint64_t seed) {
  auto rng = detail::make_rng(seed, 1);
  const double r_lo2 = params.d_min * params.d_min;
  const double r_hi2 = params.coverage_radius() * params.coverage_radius();
  std::uniform_real_distribution<double> radius2(r_lo2, r_hi2);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Point> users;
  users.reserve(bs_positions.size());
  for (const Point& b : bs_positions) {
    const double r = std::sqrt(radius2(rng));
    const double t = angle(rng);
    users.push_back({b.x + r * std::cos(t), b.y + r * std::sin(t)});
  }
  return users;
}

inline NetworkRealization realize_channels(const std::vector<Point>& bs_positions,
                                           const std::vector<Point>& user_positions,
                                           const SystemParams& params, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(bs_positions.size());
  if (static_cast<Eigen::Index>(user_positions.size()) != n) {
    throw InvalidParameter("one user per BS required");
  }
  NetworkRealization net;
  net.bs_positions = bs_positions;
  net.user_positions = user_positions;
  net.seed = seed;
  net.r_bu.resize(n, n);
  net.r_bb.resize(n, n);
  net.r_uu.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto uj = static_cast<std::size_t>(j), ui = static_cast<std::size_t>(i);
      net.r_bu(j, i) = distance(bs_positions[uj], user_positions[ui]);
      net.r_bb(j, i) = i == j ? 0.0 : distance(bs_positions[uj], bs_positions[ui]);
      net.r_uu(j, i) = i == j ? 0.0 : distance(user_positions[uj], user_positions[ui]);
    }
  }

  auto rng = detail::make_rng(seed, 2);
  std::exponential_distribution<double> exp1(1.0);
  auto fade = [&]() { return params.fading == Fading::RayleighUnitMean ? exp1(rng) : 1.0; };

  // Diagonals of bb/uu never enter an SINR; they hold the 1 m gain so every entry stays positive.
  const double g_one_metre = std::pow(10.0, -detail::pathloss_db(1.0, params.carrier_ghz) / 10.0);
  net.g_bu.resize(n, n);
  net.g_bb.resize(n, n);
  net.g_uu.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      net.g_bu(j, i) = fade() * pathloss_gain(net.r_bu(j, i), params.carrier_ghz);
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    net.g_bb(j, j) = g_one_metre;
    net.g_uu(j, j) = g_one_metre;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      // Reciprocal links share one fading draw.
      net.g_bb(j, i) = net.g_bb(i, j) = fade() * pathloss_gain(net.r_bb(j, i), params.carrier_ghz);
      net.g_uu(j, i) = net.g_uu(i, j) = fade() * pathloss_gain(net.r_uu(j, i), params.carrier_ghz);
    }
  }
  return net;
}

/// Full drop from (params, seed).
inline NetworkRealization generate_realization(const SystemParams& params, std::uint64_t seed) {
  params.validate();
  const auto bs = generate_topology(params);
  const auto users = drop_users(bs, params, seed);
  return realize_channels(bs, users, params, seed);
}

/// matrix,j,i,distance,gain rows plus bs/user position rows.
inline void write_realization_csv(const NetworkRealization& net, std::ostream& out) {
  out << "kind,j,i,x_or_distance,y_or_gain\n" << std::setprecision(17);
  for (int k = 0; k < net.num_cells(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out << "bs," << k << ',' << k << ',' << net.bs_positions[uk].x << ',' << net.bs_positions[uk].y << '\n';
    out << "user," << k << ',' << k << ',' << net.user_positions[uk].x << ','
        << net.user_positions[uk].y << '\n';
  }
  auto dump = [&](const char* name, const Eigen::MatrixXd& r, const Eigen::MatrixXd& g) {
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
      for (Eigen::Index i = 0; i < r.cols(); ++i) {
        out << name << ',' << j << ',' << i << ',' << r(j, i) << ',' << g(j, i) << '\n';
      }
    }
  };
  dump("bu", net.r_bu, net.g_bu);
  dump("bb", net.r_bb, net.g_bb);
  dump("uu", net.r_uu, net.g_uu);
}

}  // namespace alphaduplex
