// SPDX-License-Identifier: Apache-2.0
//
// Joint power / overlap optimization of one realization with the barrier
// method. Variables are scaled internally (p_u by p_u_max, p_b by p_b_tot/N)
// and the objective uses rates per unit HD bandwidth; results are reported in
// physical units.
#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "alphaduplex/barrier_solver.hpp"
#include "alphaduplex/errors.hpp"
#include "alphaduplex/link_performance.hpp"
#include "alphaduplex/network_scenario.hpp"
#include "alphaduplex/spectral_overlap.hpp"

namespace alphaduplex {

struct ProblemSpec {
  SystemParams params;
  UtilityKind utility = UtilityKind::SumRate;
  std::optional<double> fixed_alpha;  // pins alpha and drops it from the variables
  const NetworkRealization* net = nullptr;
  const PulseOverlapProfile* profile = nullptr;

  int num_cells() const { return params.num_cells; }
  bool optimizes_alpha() const { return !fixed_alpha.has_value(); }
  /// 5N+1 with alpha free, 3N+1 with alpha pinned.
  int constraint_count() const { return (optimizes_alpha() ? 5 : 3) * num_cells() + 1; }
};

/// Constraints in physical variables [p_u; p_b] or [p_u; p_b; alpha], rows in order
/// -p_u <= 0, p_u - p_u_max <= 0, p_b_min - p_b <= 0, sum p_b - p_b_tot <= 0,
/// alpha_min - alpha <= 0, alpha - 1 <= 0.
inline AffineConstraints build_constraints(const ProblemSpec& spec) {
  const int n = spec.num_cells();
  const int dim = (spec.optimizes_alpha() ? 3 : 2) * n;
  const int m = spec.constraint_count();
  AffineConstraints c{Eigen::MatrixXd::Zero(m, dim), Eigen::VectorXd::Zero(m)};
  int row = 0;
  for (int i = 0; i < n; ++i, ++row) c.A(row, i) = -1.0;
  for (int i = 0; i < n; ++i, ++row) {
    c.A(row, i) = 1.0;
    c.b(row) = spec.params.p_u_max;
  }
  for (int i = 0; i < n; ++i, ++row) {
    c.A(row, n + i) = -1.0;
    c.b(row) = -spec.params.p_b_min;
  }
  for (int i = 0; i < n; ++i) c.A(row, n + i) = 1.0;
  c.b(row++) = spec.params.p_b_tot;
  if (spec.optimizes_alpha()) {
    for (int i = 0; i < n; ++i, ++row) {
      c.A(row, 2 * n + i) = -1.0;
      c.b(row) = -spec.params.alpha_min;
    }
    for (int i = 0; i < n; ++i, ++row) {
      c.A(row, 2 * n + i) = 1.0;
      c.b(row) = 1.0;
    }
  }
  return c;
}

/// The network utility problem in the solver's scaled coordinates.
class NetworkProblem {
 public:
  explicit NetworkProblem(const ProblemSpec& spec)
      : spec_(spec), model_(checked_net(spec), *spec.profile, spec.params) {
    const int n = spec.num_cells();
    const Eigen::Index dim = (spec.optimizes_alpha() ? 3 : 2) * n;
    scale_.resize(dim);
    scale_.segment(0, n).setConstant(spec.params.p_u_max);
    scale_.segment(n, n).setConstant(spec.params.p_b_tot / n);
    if (spec.optimizes_alpha()) scale_.segment(2 * n, n).setOnes();
    raw_constraints_ = build_constraints(spec);
    scaled_constraints_ = {raw_constraints_.A * scale_.asDiagonal(), raw_constraints_.b};
  }

  Eigen::Index dimension() const { return scale_.size(); }
  const AffineConstraints& constraints() const { return scaled_constraints_; }
  const AffineConstraints& raw_constraints() const { return raw_constraints_; }
  const ProblemSpec& spec() const { return spec_; }
  const LinkModel& model() const { return model_; }

  double objective(const Eigen::VectorXd& z) const {
    return model_.normalized_utility(to_decision(z), spec_.utility);
  }

  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd full = model_.normalized_gradient(to_decision(z), spec_.utility);
    return full.head(dimension()).cwiseProduct(scale_);
  }

  DecisionVector to_decision(const Eigen::VectorXd& z) const {
    const int n = spec_.num_cells();
    DecisionVector x;
    x.p_u = z.segment(0, n).cwiseProduct(scale_.segment(0, n));
    x.p_b = z.segment(n, n).cwiseProduct(scale_.segment(n, n));
    x.alpha = spec_.optimizes_alpha() ? Eigen::VectorXd(z.segment(2 * n, n))
                                      : Eigen::VectorXd::Constant(n, *spec_.fixed_alpha);
    return x;
  }

  Eigen::VectorXd to_scaled(const DecisionVector& x) const {
    Eigen::VectorXd raw(dimension());
    const int n = spec_.num_cells();
    raw.segment(0, n) = x.p_u;
    raw.segment(n, n) = x.p_b;
    if (spec_.optimizes_alpha()) raw.segment(2 * n, n) = x.alpha;
    return raw.cwiseQuotient(scale_);
  }

  Eigen::VectorXd to_raw(const DecisionVector& x) const { return to_scaled(x).cwiseProduct(scale_); }

  bool strictly_feasible(const DecisionVector& x) const {
    if (x.num_cells() != spec_.num_cells()) return false;
    return raw_constraints_.strictly_feasible(to_raw(x));
  }

 private:
  static const NetworkRealization& checked_net(const ProblemSpec& spec) {
    if (spec.net == nullptr || spec.profile == nullptr) {
      throw InvalidParameter("problem needs a realization and a leakage profile");
    }
    if (spec.net->num_cells() != spec.num_cells()) {
      throw InvalidParameter("realization cell count does not match params");
    }
    return *spec.net;
  }

  ProblemSpec spec_;
  LinkModel model_;
  Eigen::VectorXd scale_;
  AffineConstraints raw_constraints_;
  AffineConstraints scaled_constraints_;
};

/// -[U(x) + (1/tau) sum log(-f_i(x))] in physical units.
inline double barrier_objective(const DecisionVector& x, double tau, const ProblemSpec& spec) {
  const NetworkProblem problem(spec);
  const Eigen::VectorXd s = problem.raw_constraints().slack(problem.to_raw(x));
  if (!(s.array() > 0.0).all()) {
    throw InfeasiblePoint("barrier objective needs a strictly feasible point");
  }
  return -(problem.model().utility(x, spec.utility) + s.array().log().sum() / tau);
}

struct OptimizationResult {
  DecisionVector x_opt;
  double utility = 0.0;  // physical units (bits/s, or sum of ln(bits/s))
  LinkMetrics metrics;
  int outer_iterations = 0;
  int total_newton_steps = 0;
  double final_gap_proxy = 0.0;
  bool converged = false;
  int starts_used = 1;
  double stationarity = 0.0;
  std::vector<BarrierTraceRow> trace;
};

inline void check_nonempty_interior(const SystemParams& params, bool alpha_free = true) {
  if (!(params.p_b_min * params.num_cells < params.p_b_tot)) {
    throw InfeasibleSpec("N * p_b_min must be below p_b_tot for a strictly feasible BS power");
  }
  if (alpha_free && !(params.alpha_min < 1.0)) {
    throw InfeasibleSpec("alpha_min must be below 1 for a strictly feasible overlap");
  }
}

/// Box midpoints for p_u and alpha; p_b^i = p_b_min + (p_b_tot/N - p_b_min)/2.
inline DecisionVector find_feasible_start(const ProblemSpec& spec) {
  const auto& p = spec.params;
  check_nonempty_interior(p, spec.optimizes_alpha());
  const int n = p.num_cells;
  const double alpha = spec.fixed_alpha.value_or(0.5 * (p.alpha_min + 1.0));
  return DecisionVector::uniform(n, 0.5 * p.p_u_max, p.p_b_min + 0.5 * (p.p_b_tot / n - p.p_b_min), alpha);
}

/// A strictly feasible point drawn uniformly from an inner box of the feasible set.
inline DecisionVector random_feasible_start(const ProblemSpec& spec, std::mt19937_64& rng) {
  const auto& p = spec.params;
  check_nonempty_interior(p, spec.optimizes_alpha());
  const int n = p.num_cells;
  std::uniform_real_distribution<double> u(0.05, 0.95);
  DecisionVector x = find_feasible_start(spec);
  const double pb_room = (p.p_b_tot - n * p.p_b_min) / n;
  // Powers are drawn before alpha so pinned-alpha problems see the same power starts.
  for (int i = 0; i < n; ++i) x.p_u(i) = u(rng) * p.p_u_max;
  for (int i = 0; i < n; ++i) x.p_b(i) = p.p_b_min + u(rng) * pb_room;
  if (spec.optimizes_alpha()) {
    for (int i = 0; i < n; ++i) x.alpha(i) = p.alpha_min + u(rng) * (1.0 - p.alpha_min);
  }
  return x;
}

/// Pulls an arbitrary point into the strict interior: alpha is clamped into
/// [alpha_min, 1] (unless pinned), then the point is blended toward the
/// feasible start by `fraction`.
inline DecisionVector interiorize(DecisionVector x, const ProblemSpec& spec, double fraction = 1e-3) {
  const DecisionVector centre = find_feasible_start(spec);
  if (spec.optimizes_alpha()) {
    x.alpha = x.alpha.cwiseMax(spec.params.alpha_min).cwiseMin(1.0);
  } else {
    x.alpha = centre.alpha;
  }
  x.p_u = x.p_u.cwiseMax(0.0).cwiseMin(spec.params.p_u_max);
  // Shrink only the excess over p_b_min so the floor survives the budget cut.
  Eigen::VectorXd excess = (x.p_b.array() - spec.params.p_b_min).cwiseMax(0.0);
  const double room = spec.params.p_b_tot - spec.num_cells() * spec.params.p_b_min;
  if (excess.sum() > room) excess *= room / excess.sum();
  x.p_b = excess.array() + spec.params.p_b_min;
  x.p_u += fraction * (centre.p_u - x.p_u);
  x.p_b += fraction * (centre.p_b - x.p_b);
  x.alpha += fraction * (centre.alpha - x.alpha);
  return x;
}

inline OptimizationResult solve(const ProblemSpec& spec, const std::optional<DecisionVector>& x0 = std::nullopt,
                                const BarrierOptions& opts = {}) {
  const NetworkProblem problem(spec);
  const DecisionVector start = x0 ? *x0 : find_feasible_start(spec);
  if (!problem.strictly_feasible(start)) {
    throw InfeasiblePoint("initial point is not strictly feasible");
  }
  const BarrierResult br = barrier_solve(problem, problem.to_scaled(start), opts);

  OptimizationResult res;
  res.x_opt = problem.to_decision(br.z);
  res.utility = problem.model().utility(res.x_opt, spec.utility);
  res.metrics = problem.model().metrics(res.x_opt);
  res.outer_iterations = br.outer_iterations;
  res.total_newton_steps = br.newton_steps;
  res.final_gap_proxy = br.gap_proxy;
  res.converged = br.converged;
  res.stationarity = br.stationarity;
  res.trace = br.trace;
  return res;
}

/// Best of: the feasible start, (n_starts - 1) random strictly feasible starts,
/// and any extra `injected` starts (interiorized first). Each injected point,
/// projected onto the closed feasible set, also competes as a candidate.
inline OptimizationResult multi_start_solve(const ProblemSpec& spec, int n_starts, std::uint64_t seed,
                                            const BarrierOptions& opts = {},
                                            const std::vector<DecisionVector>& injected = {}) {
  if (n_starts < 1) throw InvalidParameter("n_starts must be at least 1");
  auto rng = detail::make_rng(seed, 3);
  std::vector<DecisionVector> starts;
  starts.push_back(find_feasible_start(spec));
  for (int k = 1; k < n_starts; ++k) starts.push_back(random_feasible_start(spec, rng));
  for (const auto& x : injected) starts.push_back(interiorize(x, spec));

  std::optional<OptimizationResult> best;
  for (const auto& x0 : starts) {
    OptimizationResult r = solve(spec, x0, opts);
    if (!best || r.utility > best->utility) best = std::move(r);
  }
  // An injected point projected onto the closed feasible set is itself a
  // candidate; it wins when no barrier run climbs above it.
  const NetworkProblem problem(spec);
  const LinkModel& model = problem.model();
  for (const auto& x : injected) {
    const DecisionVector xp = interiorize(x, spec, 0.0);
    const double u = model.utility(xp, spec.utility);
    if (u > best->utility) {
      best->x_opt = xp;
      best->utility = u;
      best->metrics = model.metrics(xp);
    }
  }
  best->starts_used = static_cast<int>(starts.size());
  return *best;
}

/// outer,tau,inner_steps,utility,best_utility,gap_proxy
inline void write_trace_csv(const std::vector<BarrierTraceRow>& trace, std::ostream& out) {
  out << "outer,tau,inner_steps,utility,best_utility,gap_proxy\n" << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.outer << ',' << r.tau << ',' << r.inner_steps << ',' << r.utility << ',' << r.best_utility << ','
        << r.gap_proxy << '\n';
  }
}

}  // namespace alphaduplex
