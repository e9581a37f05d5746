// SPDX-License-Identifier: Apache-2.0
//
// Log-barrier interior-point method for maximizing a smooth objective subject
// to affine inequalities A z <= b. Inner iterations are damped Newton steps on
//
//     phi(z) = -[ U(z) + (1/tau) * sum_k log(b_k - a_k^T z) ]
//
// with a finite-difference Hessian of the objective gradient, an analytic
// barrier Hessian, and a fraction-to-boundary plus Armijo backtracking search.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "alphaduplex/errors.hpp"

namespace alphaduplex {

/// A z <= b, one row per scalar constraint f_k(z) = a_k^T z - b_k <= 0.
struct AffineConstraints {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::Index size() const { return b.size(); }
  /// -f(z); strictly positive in the interior.
  Eigen::VectorXd slack(const Eigen::VectorXd& z) const { return b - A * z; }
  Eigen::VectorXd values(const Eigen::VectorXd& z) const { return A * z - b; }
  bool strictly_feasible(const Eigen::VectorXd& z) const {
    return z.allFinite() && (slack(z).array() > 0.0).all();
  }
};

/// What the solver needs from a problem: an objective to maximize, its
/// gradient and the affine constraint set, all in the solver's coordinates.
template <class P>
concept BarrierProblem = requires(const P& p, const Eigen::VectorXd& z) {
  { p.dimension() } -> std::convertible_to<Eigen::Index>;
  { p.objective(z) } -> std::convertible_to<double>;
  { p.objective_gradient(z) } -> std::convertible_to<Eigen::VectorXd>;
  { p.constraints() } -> std::convertible_to<const AffineConstraints&>;
};

struct BarrierOptions {
  double tau0 = 1.0;
  double mu = 10.0;
  double eps_outer = 1e-6;  // stop once m / tau < eps_outer
  double eps_inner = 1e-8;  // Newton decrement threshold
  int max_inner = 100;
  double rho = 0.5;
  double armijo_c = 1e-4;
  double boundary_fraction = 0.99;
  double min_step = 1e-12;
  double fd_step = 1e-6;  // relative, per coordinate
  bool record_steps = false;
};

struct NewtonStep {
  Eigen::VectorXd direction;
  double decrement = 0.0;  // grad^T H^{-1} grad
  double shift = 0.0;      // lambda added to the diagonal
  bool steepest_descent = false;
};

struct BarrierTraceRow {
  int outer = 0;
  double tau = 0.0;
  int inner_steps = 0;
  double utility = 0.0;       // objective at the end of this centering
  double best_utility = 0.0;  // best objective over all accepted iterates so far
  double gap_proxy = 0.0;     // m / tau
};

struct BarrierResult {
  Eigen::VectorXd z;        // best strictly feasible iterate
  Eigen::VectorXd z_final;  // iterate at the end of the last centering
  double utility = 0.0;
  int outer_iterations = 0;
  int newton_steps = 0;
  double gap_proxy = 0.0;
  double stationarity = 0.0;  // |grad phi| at the last centering
  bool converged = false;
  int steepest_descent_fallbacks = 0;
  std::vector<BarrierTraceRow> trace;
  // (outer iteration, barrier value) after each accepted step, when record_steps is set.
  std::vector<std::pair<int, double>> step_phi;
};

template <BarrierProblem P>
double barrier_objective(const P& problem, const Eigen::VectorXd& z, double tau) {
  const Eigen::VectorXd s = problem.constraints().slack(z);
  if (!(s.array() > 0.0).all()) {
    throw InfeasiblePoint("barrier evaluated at a point that is not strictly feasible");
  }
  return -(problem.objective(z) + s.array().log().sum() / tau);
}

template <BarrierProblem P>
Eigen::VectorXd barrier_gradient(const P& problem, const Eigen::VectorXd& z, double tau) {
  const auto& con = problem.constraints();
  const Eigen::VectorXd s = con.slack(z);
  Eigen::VectorXd inv_s = s.cwiseInverse() / tau;
  return -problem.objective_gradient(z) + con.A.transpose() * inv_s;
}

/// Central differences of the objective gradient, with each step capped at
/// half the distance to the nearest constraint along that coordinate so every
/// probe stays strictly feasible. Symmetrized.
template <BarrierProblem P>
Eigen::MatrixXd objective_hessian_fd(const P& problem, const Eigen::VectorXd& z, double rel_step) {
  const auto& con = problem.constraints();
  const Eigen::VectorXd s = con.slack(z);
  const Eigen::Index n = z.size();
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd probe = z;
  for (Eigen::Index k = 0; k < n; ++k) {
    double h = rel_step * (1.0 + std::abs(z(k)));
    for (Eigen::Index r = 0; r < con.size(); ++r) {
      const double a = std::abs(con.A(r, k));
      if (a > 0.0) h = std::min(h, 0.5 * s(r) / a);
    }
    probe(k) = z(k) + h;
    const Eigen::VectorXd g_plus = problem.objective_gradient(probe);
    probe(k) = z(k) - h;
    const Eigen::VectorXd g_minus = problem.objective_gradient(probe);
    probe(k) = z(k);
    H.col(k) = (g_plus - g_minus) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

template <BarrierProblem P>
Eigen::MatrixXd barrier_hessian(const P& problem, const Eigen::VectorXd& z, double tau, double rel_step) {
  const auto& con = problem.constraints();
  const Eigen::VectorXd s = con.slack(z);
  const Eigen::VectorXd w = (s.array().square() * tau).inverse();
  return -objective_hessian_fd(problem, z, rel_step) + con.A.transpose() * w.asDiagonal() * con.A;
}

/// Newton direction for phi at z. The Hessian is shifted by lambda * I, with
/// lambda the first of {0, 1e-8, 1e-6, ..., 1e8} * scale giving a Cholesky
/// factorization; if none does, falls back to steepest descent.
inline NewtonStep newton_direction(const Eigen::VectorXd& grad, const Eigen::MatrixXd& hessian) {
  NewtonStep step;
  const Eigen::Index n = grad.size();
  const double scale = std::max(1.0, hessian.diagonal().cwiseAbs().maxCoeff());
  std::vector<double> shifts{0.0};
  for (double e = 1e-8; e <= 1e8 * 1.0000001; e *= 100.0) shifts.push_back(e * scale);
  for (double lambda : shifts) {
    Eigen::LLT<Eigen::MatrixXd> llt(hessian + lambda * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) continue;
    Eigen::VectorXd d = -llt.solve(grad);
    if (!d.allFinite()) continue;
    step.direction = std::move(d);
    step.decrement = -grad.dot(step.direction);
    step.shift = lambda;
    return step;
  }
  step.direction = -grad;
  step.decrement = grad.squaredNorm();
  step.steepest_descent = true;
  return step;
}

template <BarrierProblem P>
NewtonStep newton_step(const P& problem, const Eigen::VectorXd& z, double tau,
                       const BarrierOptions& opts = {}) {
  const Eigen::VectorXd g = barrier_gradient(problem, z, tau);
  return newton_direction(g, barrier_hessian(problem, z, tau, opts.fd_step));
}

/// Largest step in (0, 1] that keeps z + t d strictly inside, times the
/// fraction-to-boundary margin when a constraint would be reached before t = 1.
inline double max_feasible_step(const AffineConstraints& con, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& d, double boundary_fraction) {
  const Eigen::VectorXd s = con.slack(z);
  const Eigen::VectorXd ad = con.A * d;
  double t_boundary = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    if (ad(r) > 0.0) t_boundary = std::min(t_boundary, s(r) / ad(r));
  }
  return std::min(1.0, boundary_fraction * t_boundary);
}

template <BarrierProblem P>
double backtracking_line_search(const P& problem, const Eigen::VectorXd& z, const Eigen::VectorXd& d,
                                double tau, const BarrierOptions& opts = {}) {
  const auto& con = problem.constraints();
  double t = max_feasible_step(con, z, d, opts.boundary_fraction);
  const double phi0 = barrier_objective(problem, z, tau);
  const double slope = barrier_gradient(problem, z, tau).dot(d);
  while (t >= opts.min_step) {
    const Eigen::VectorXd trial = z + t * d;
    if (con.strictly_feasible(trial)) {
      double phi = std::numeric_limits<double>::infinity();
      try {
        phi = barrier_objective(problem, trial, tau);
      } catch (const DomainError&) {
      }
      if (std::isfinite(phi) && phi <= phi0 + opts.armijo_c * t * slope) return t;
    }
    t *= opts.rho;
  }
  throw LineSearchStall("line search step fell below minimum");
}

/// Barrier method from a strictly feasible start. tau grows by mu after each
/// centering until m / tau < eps_outer. An inner stall ends the run with
/// converged = false; the best iterate seen is returned either way.
template <BarrierProblem P>
BarrierResult barrier_solve(const P& problem, const Eigen::VectorXd& z0, const BarrierOptions& opts = {}) {
  const auto& con = problem.constraints();
  if (!con.strictly_feasible(z0)) {
    throw InfeasiblePoint("barrier solve needs a strictly feasible start");
  }
  const double m = static_cast<double>(con.size());

  BarrierResult res;
  Eigen::VectorXd z = z0;
  res.z = z0;
  res.utility = problem.objective(z0);
  double tau = opts.tau0;
  bool stalled = false;

  while (true) {
    int inner = 0;
    double decrement = 0.0;
    for (; inner < opts.max_inner; ++inner) {
      const Eigen::VectorXd g = barrier_gradient(problem, z, tau);
      const NewtonStep step = newton_direction(g, barrier_hessian(problem, z, tau, opts.fd_step));
      if (step.steepest_descent) ++res.steepest_descent_fallbacks;
      decrement = step.decrement;
      if (decrement <= opts.eps_inner) break;
      double t = 0.0;
      try {
        t = backtracking_line_search(problem, z, step.direction, tau, opts);
      } catch (const LineSearchStall&) {
        stalled = true;
        break;
      }
      z += t * step.direction;
      ++res.newton_steps;
      const double u = problem.objective(z);
      if (u > res.utility) {
        res.utility = u;
        res.z = z;
      }
      if (opts.record_steps) res.step_phi.emplace_back(res.outer_iterations + 1, barrier_objective(problem, z, tau));
    }
    ++res.outer_iterations;
    res.gap_proxy = m / tau;
    res.stationarity = barrier_gradient(problem, z, tau).norm();
    res.z_final = z;
    res.trace.push_back({res.outer_iterations, tau, inner, problem.objective(z), res.utility, m / tau});
    if (stalled) break;
    if (m / tau < opts.eps_outer) {
      res.converged = true;
      break;
    }
    tau *= opts.mu;
  }
  return res;
}

}  // namespace alphaduplex
