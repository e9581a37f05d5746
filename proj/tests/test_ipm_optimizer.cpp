// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "alphaduplex/ipm_optimizer.hpp"
#include "fixtures.hpp"

using namespace alphaduplex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Case {
  SystemParams params;
  NetworkRealization net;
};

Case network_case(int n, std::uint64_t seed, Fading fading = Fading::RayleighUnitMean) {
  Case c;
  c.params = fixtures::small_params(n);
  c.params.fading = fading;
  if (n != 1 && n != 4 && n != 9) c.params.layout = Layout::Line;
  c.net = generate_realization(c.params, seed);
  return c;
}

ProblemSpec spec_for(const Case& c, UtilityKind u, std::optional<double> fixed_alpha = std::nullopt) {
  return ProblemSpec{c.params, u, fixed_alpha, &c.net, &fixtures::profile()};
}

}  // namespace

TEST_CASE("constraint set has 5N+1 rows, 3N+1 with alpha pinned", "[constraints]") {
  const auto c = network_case(3, 1);
  const auto full = build_constraints(spec_for(c, UtilityKind::SumRate));
  CHECK(full.size() == 16);
  CHECK(full.A.cols() == 9);
  const auto pinned = build_constraints(spec_for(c, UtilityKind::SumRate, 0.0));
  CHECK(pinned.size() == 10);
  CHECK(pinned.A.cols() == 6);
}

TEST_CASE("constraint rows follow the stated order", "[constraints]") {
  const auto c = network_case(2, 1);
  const auto spec = spec_for(c, UtilityKind::SumRate);
  const auto con = build_constraints(spec);
  // x = [p_u; p_b; alpha]
  const Eigen::VectorXd x = (Eigen::VectorXd(6) << 0.1, 0.2, 5.0, 6.0, 0.3, 0.9).finished();
  const Eigen::VectorXd f = con.values(x);
  const Eigen::VectorXd expected = (Eigen::VectorXd(11) << -0.1, -0.2, 0.1 - 0.5, 0.2 - 0.5, 1.0 - 5.0, 1.0 - 6.0,
                                    11.0 - 80.0, 0.275 - 0.3, 0.275 - 0.9, 0.3 - 1.0, 0.9 - 1.0)
                                       .finished();
  CHECK((f - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("feasible start arithmetic", "[start]") {
  auto c = network_case(9, 2);
  c.params.p_b_min = 1.0;
  c.params.p_b_tot = 90.0;
  const auto spec = spec_for(c, UtilityKind::SumRate);
  const auto x = find_feasible_start(spec);
  for (int i = 0; i < 9; ++i) CHECK_THAT(x.p_b(i), WithinRel(5.5, 1e-12));
  CHECK_THAT(x.p_b.sum(), WithinRel(49.5, 1e-12));
  CHECK((build_constraints(spec).values(x.stacked()).array() < 0.0).all());
}

TEST_CASE("degenerate BS power budget has no interior", "[start]") {
  auto c = network_case(9, 2);
  c.params.p_b_min = 10.0;
  c.params.p_b_tot = 90.0;
  CHECK_THROWS_AS(find_feasible_start(spec_for(c, UtilityKind::SumRate)), InfeasibleSpec);
}

TEST_CASE("random and interiorized starts are strictly feasible", "[start][property]") {
  const auto c = network_case(3, 3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (auto fixed : {std::optional<double>{}, std::optional<double>{0.0}, std::optional<double>{1.0}}) {
    const auto spec = spec_for(c, UtilityKind::SumRate, fixed);
    const NetworkProblem problem(spec);
    for (int k = 0; k < 100; ++k) {
      CHECK(problem.strictly_feasible(random_feasible_start(spec, rng)));
      DecisionVector wild = DecisionVector::uniform(3, 0.0, 0.0, 0.0);
      for (int i = 0; i < 3; ++i) {
        wild.p_u(i) = u(rng) * c.params.p_u_max;
        wild.p_b(i) = u(rng) * c.params.p_b_tot;
        wild.alpha(i) = u(rng);
      }
      CHECK(problem.strictly_feasible(interiorize(wild, spec)));
    }
  }
}

TEST_CASE("scaled coordinates round-trip", "[problem]") {
  const auto c = network_case(3, 4);
  const NetworkProblem problem(spec_for(c, UtilityKind::SumLogRate));
  std::mt19937_64 rng(6);
  const auto x = fixtures::random_interior(c.params, rng);
  const auto back = problem.to_decision(problem.to_scaled(x));
  CHECK((back.stacked() - x.stacked()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scaled objective gradient matches central differences", "[problem][property]") {
  const auto c = network_case(3, 7);
  std::mt19937_64 rng(8);
  for (auto kind : {UtilityKind::SumRate, UtilityKind::SumLogRate}) {
    const NetworkProblem problem(spec_for(c, kind));
    for (int s = 0; s < 5; ++s) {
      const Eigen::VectorXd z = problem.to_scaled(fixtures::random_interior(c.params, rng));
      const Eigen::VectorXd g = problem.objective_gradient(z);
      for (Eigen::Index k = 0; k < z.size(); ++k) {
        const double h = 1e-6 * std::abs(z(k));
        Eigen::VectorXd zp = z, zm = z;
        zp(k) += h;
        zm(k) -= h;
        const double fd = (problem.objective(zp) - problem.objective(zm)) / (2 * h);
        CHECK(std::abs(g(k) - fd) <= 1e-4 * std::max(std::abs(fd), 1e-6 * g.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("network barrier objective", "[barrier]") {
  const auto c = network_case(2, 9);
  const auto spec = spec_for(c, UtilityKind::SumRate);
  const auto x = find_feasible_start(spec);
  const double u = utility(x, c.net, fixtures::profile(), c.params, UtilityKind::SumRate);
  CHECK_THAT(barrier_objective(x, 1e15, spec), WithinRel(-u, 1e-9));
  CHECK(barrier_objective(x, 1.0, spec) != barrier_objective(x, 2.0, spec));
  auto bad = x;
  bad.p_u(0) = c.params.p_u_max;
  CHECK_THROWS_AS(barrier_objective(bad, 1.0, spec), InfeasiblePoint);
}

TEST_CASE("single isolated cell drives every variable to its upper bound", "[solve]") {
  const auto c = network_case(1, 10);
  for (auto kind : {UtilityKind::SumRate, UtilityKind::SumLogRate}) {
    const auto spec = spec_for(c, kind);
    const auto r = solve(spec);
    CHECK(r.converged);
    const double slack = r.final_gap_proxy;  // m / tau_final
    CAPTURE(static_cast<int>(kind), r.x_opt.alpha(0), r.x_opt.p_u(0), r.x_opt.p_b(0), slack);
    CHECK(1.0 - r.x_opt.alpha(0) <= slack);
    CHECK(c.params.p_u_max - r.x_opt.p_u(0) <= slack * c.params.p_u_max);
    CHECK(c.params.p_b_tot - r.x_opt.p_b(0) <= slack * c.params.p_b_tot);
  }
}

TEST_CASE("solve results are feasible and self-consistent", "[solve][property]") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto c = network_case(3, 20 + seed);
    for (auto kind : {UtilityKind::SumRate, UtilityKind::SumLogRate}) {
      for (auto fixed : {std::optional<double>{}, std::optional<double>{0.0}, std::optional<double>{1.0}}) {
        const auto spec = spec_for(c, kind, fixed);
        const NetworkProblem problem(spec);
        const auto r = solve(spec);
        CHECK(problem.strictly_feasible(r.x_opt));
        CHECK_THAT(r.utility, WithinRel(utility(r.x_opt, c.net, fixtures::profile(), c.params, kind), 1e-9));
        CHECK(r.utility >= utility(find_feasible_start(spec), c.net, fixtures::profile(), c.params, kind));
        if (fixed) CHECK((r.x_opt.alpha.array() == *fixed).all());
        CHECK(r.outer_iterations == static_cast<int>(r.trace.size()));
        CHECK(r.total_newton_steps > 0);
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
          CHECK(r.trace[k].best_utility >= r.trace[k - 1].best_utility);
        }
        if (r.converged) CHECK(r.final_gap_proxy < 1e-6);
      }
    }
  }
}

TEST_CASE("solve rejects an infeasible start", "[solve]") {
  const auto c = network_case(2, 3);
  const auto spec = spec_for(c, UtilityKind::SumRate);
  CHECK_THROWS_AS(solve(spec, DecisionVector::uniform(2, 1.0, 2.0, 0.5)), InfeasiblePoint);
  ProblemSpec missing = spec;
  missing.net = nullptr;
  CHECK_THROWS_AS(solve(missing), InvalidParameter);
}

TEST_CASE("one start is plain solve", "[multistart]") {
  const auto c = network_case(3, 30);
  const auto spec = spec_for(c, UtilityKind::SumRate);
  const auto a = multi_start_solve(spec, 1, 99);
  const auto b = solve(spec);
  CHECK(a.utility == b.utility);
  CHECK(a.x_opt.stacked() == b.x_opt.stacked());
  CHECK(a.starts_used == 1);
}

TEST_CASE("more starts never lose and the same seed repeats", "[multistart][property]") {
  const auto c = network_case(3, 31);
  for (auto kind : {UtilityKind::SumRate, UtilityKind::SumLogRate}) {
    const auto spec = spec_for(c, kind);
    const auto single = solve(spec);
    const auto a = multi_start_solve(spec, 4, 17);
    const auto b = multi_start_solve(spec, 4, 17);
    CHECK(a.utility >= single.utility);
    CHECK(a.starts_used == 4);
    CHECK(a.utility == b.utility);
    CHECK(a.x_opt.stacked() == b.x_opt.stacked());
  }
}

TEST_CASE("injected starts are counted and can only help", "[multistart]") {
  const auto c = network_case(3, 32);
  const auto spec = spec_for(c, UtilityKind::SumRate);
  const auto base = multi_start_solve(spec, 2, 1);
  const auto more = multi_start_solve(spec, 2, 1, {}, {DecisionVector::uniform(3, 0.5, 40.0, 0.0)});
  CHECK(more.starts_used == 3);
  CHECK(more.utility >= base.utility);
}

TEST_CASE("a feasible injected point is never beaten by the result", "[multistart][property]") {
  const auto c = network_case(3, 34);
  for (auto kind : {UtilityKind::SumRate, UtilityKind::SumLogRate}) {
    const auto spec = spec_for(c, kind);
    const LinkModel model(*spec.net, *spec.profile, spec.params);
    for (double a : {1.0, 0.5}) {
      const auto x = DecisionVector::uniform(3, spec.params.p_u_max, spec.params.p_b_tot / 3, a);
      const auto r = multi_start_solve(spec, 1, 5, {}, {x});
      CHECK(r.utility >= model.utility(x, kind));
    }
  }
}

TEST_CASE("trace CSV has one row per outer iteration", "[trace]") {
  const auto c = network_case(2, 33);
  const auto r = solve(spec_for(c, UtilityKind::SumRate));
  std::ostringstream os;
  write_trace_csv(r.trace, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "outer,tau,inner_steps,utility,best_utility,gap_proxy");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == r.outer_iterations);
}
