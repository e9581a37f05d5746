// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "alphaduplex/network_scenario.hpp"
#include "oracles.hpp"

using namespace alphaduplex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemParams with_cells(int n) {
  SystemParams p;
  p.num_cells = n;
  return p;
}

double nearest_neighbour(const std::vector<Point>& pts, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j != k) best = std::min(best, distance(pts[j], pts[k]));
  }
  return best;
}

}  // namespace

TEST_CASE("nine cells form a 3x3 grid at the inter-site distance", "[topology]") {
  const auto bs = generate_topology(with_cells(9));
  REQUIRE(bs.size() == 9);
  for (std::size_t k = 0; k < bs.size(); ++k) CHECK_THAT(nearest_neighbour(bs, k), WithinRel(500.0, 1e-12));
  CHECK_THAT(distance(bs[0], bs[1]), WithinRel(500.0, 1e-12));
  CHECK_THAT(distance(bs[0], bs[3]), WithinRel(500.0, 1e-12));
  CHECK_THAT(distance(bs[0], bs[4]), WithinRel(500.0 * std::sqrt(2.0), 1e-12));
}

TEST_CASE("one cell sits at the origin", "[topology]") {
  const auto bs = generate_topology(with_cells(1));
  REQUIRE(bs.size() == 1);
  CHECK(bs[0].x == 0.0);
  CHECK(bs[0].y == 0.0);
}

TEST_CASE("two cells are one inter-site distance apart", "[topology]") {
  const auto bs = generate_topology(with_cells(2));
  REQUIRE(bs.size() == 2);
  CHECK_THAT(distance(bs[0], bs[1]), WithinRel(500.0, 1e-12));
}

TEST_CASE("line layout keeps nearest neighbours at isd for any N", "[topology][property]") {
  for (int n : {3, 5, 7}) {
    auto p = with_cells(n);
    p.layout = Layout::Line;
    const auto bs = generate_topology(p);
    for (std::size_t k = 0; k < bs.size(); ++k) CHECK_THAT(nearest_neighbour(bs, k), WithinRel(500.0, 1e-12));
  }
}

TEST_CASE("grid layout with a non-square count is a configuration error", "[topology]") {
  auto p = with_cells(5);
  p.layout = Layout::Grid;
  CHECK_THROWS_AS(generate_topology(p), ConfigError);
}

TEST_CASE("users stay inside their cell annulus", "[users][property]") {
  const auto p = with_cells(9);
  const auto bs = generate_topology(p);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto users = drop_users(bs, p, seed);
    for (std::size_t k = 0; k < bs.size(); ++k) {
      const double r = distance(bs[k], users[k]);
      CHECK(r >= p.d_min);
      CHECK(r <= p.coverage_radius());
    }
  }
}

TEST_CASE("user radius follows the uniform-disk mean 2R/3", "[users]") {
  auto p = with_cells(1);
  p.d_min = 0.0;
  const auto bs = generate_topology(p);
  double sum = 0.0;
  constexpr int kDrops = 10000;
  for (int s = 0; s < kDrops; ++s) sum += distance(bs[0], drop_users(bs, p, static_cast<std::uint64_t>(s))[0]);
  CHECK_THAT(sum / kDrops, WithinRel(2.0 / 3.0 * 250.0, 0.02));
}

TEST_CASE("pathloss gain matches the urban-macro formula", "[pathloss]") {
  CHECK_THAT(pathloss_gain(500.0, 2.0), WithinRel(4.575e-10, 1e-3));
  CHECK_THAT(pathloss_gain(1.0, 1.0), WithinRel(1.585e-3, 1e-3));
  for (double d : {3.0, 47.0, 812.0}) CHECK_THAT(pathloss_gain(d, 2.0), WithinRel(oracle::pathloss(d, 2.0), 1e-12));
}

TEST_CASE("pathloss gain decreases with distance", "[pathloss][property]") {
  double prev = pathloss_gain(1.0, 2.0);
  for (double d = 1.5; d < 3000.0; d *= 1.37) {
    const double g = pathloss_gain(d, 2.0);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("sub-metre distances are clamped to 1 m", "[pathloss]") {
  CHECK(pathloss_gain(0.25, 2.0) == pathloss_gain(1.0, 2.0));
  CHECK_THROWS_AS(pathloss_gain(10.0, 0.0), InvalidParameter);
}

TEST_CASE("same seed reproduces the realization bit for bit", "[realization][property]") {
  const auto p = with_cells(9);
  for (std::uint64_t seed : {0ull, 1ull, 12345ull}) {
    const auto a = generate_realization(p, seed);
    const auto b = generate_realization(p, seed);
    CHECK(a.g_bu == b.g_bu);
    CHECK(a.g_bb == b.g_bb);
    CHECK(a.g_uu == b.g_uu);
    CHECK(a.r_bu == b.r_bu);
    CHECK(a.fingerprint() == b.fingerprint());
  }
  CHECK(generate_realization(p, 1).fingerprint() != generate_realization(p, 2).fingerprint());
}

TEST_CASE("distance matrices are symmetric with zero diagonal and gains positive", "[realization][property]") {
  const auto p = with_cells(9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto net = generate_realization(p, seed);
    CHECK(net.r_bb.isApprox(net.r_bb.transpose(), 0.0));
    CHECK(net.r_uu.isApprox(net.r_uu.transpose(), 0.0));
    for (int k = 0; k < 9; ++k) {
      CHECK(net.r_bb(k, k) == 0.0);
      CHECK(net.r_uu(k, k) == 0.0);
      CHECK(net.r_bu(k, k) <= p.coverage_radius());
    }
    for (int j = 0; j < 9; ++j) {
      for (int i = 0; i < 9; ++i) {
        if (i != j) {
          CHECK(net.r_bb(j, i) > 0.0);
          CHECK(net.r_uu(j, i) > 0.0);
        }
      }
    }
    for (const auto* g : {&net.g_bu, &net.g_bb, &net.g_uu}) {
      CHECK(g->allFinite());
      CHECK((g->array() > 0.0).all());
    }
  }
}

TEST_CASE("without fading gains are pure pathloss and reciprocal", "[realization]") {
  auto p = with_cells(2);
  p.fading = Fading::None;
  const auto net = generate_realization(p, 3);
  CHECK(net.g_bb(0, 1) == net.g_bb(1, 0));
  CHECK(net.g_uu(0, 1) == net.g_uu(1, 0));
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) CHECK(net.g_bu(j, i) == pathloss_gain(net.r_bu(j, i), p.carrier_ghz));
  }
}

TEST_CASE("Rayleigh power fading has unit mean", "[realization]") {
  auto p = with_cells(10);
  p.layout = Layout::Line;
  double sum = 0.0;
  long count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto net = generate_realization(p, seed);
    for (int j = 0; j < 10; ++j) {
      for (int i = 0; i < 10; ++i) {
        sum += net.g_bu(j, i) / pathloss_gain(net.r_bu(j, i), p.carrier_ghz);
        ++count;
      }
    }
  }
  REQUIRE(count == 100000);
  CHECK_THAT(sum / count, WithinAbs(1.0, 0.02));
}

TEST_CASE("invalid system parameters are rejected", "[params]") {
  auto p = with_cells(9);
  p.bandwidth = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = with_cells(0);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = with_cells(9);
  p.alpha_min = 1.2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = with_cells(9);
  p.p_u_max = 0.0;
  CHECK_THROWS_AS(generate_realization(p, 1), ConfigError);
}

TEST_CASE("default noise density is -174 dBm/Hz plus a 9 dB figure", "[params]") {
  const SystemParams p;
  CHECK_THAT(p.noise_density, WithinRel(std::pow(10.0, -19.5), 1e-12));
  CHECK(p.ue_noise_density() == p.bs_noise_density());
}

TEST_CASE("realization CSV lists positions and every matrix entry", "[realization]") {
  const auto net = generate_realization(with_cells(4), 5);
  std::ostringstream os;
  write_realization_csv(net, os);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  std::getline(is, line);
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2 * 4 + 3 * 16);
}
