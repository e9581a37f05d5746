// SPDX-License-Identifier: Apache-2.0
//
// The proposed per-cell alpha-duplex optimization and the three benchmarks:
// half duplex (alpha = 0) and full duplex (alpha = 1) with power control, and
// a fixed alpha = alpha_min with fixed powers.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alphaduplex/errors.hpp"
#include "alphaduplex/ipm_optimizer.hpp"
#include "alphaduplex/link_performance.hpp"

namespace alphaduplex {

enum class SchemeKind { AlphaDuplexOpt, HalfDuplexPC, FullDuplexPC, FixedAlphaFixedPower };

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::AlphaDuplexOpt, SchemeKind::HalfDuplexPC,
                                             SchemeKind::FullDuplexPC, SchemeKind::FixedAlphaFixedPower};

inline std::string_view to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::AlphaDuplexOpt: return "alpha_duplex";
    case SchemeKind::HalfDuplexPC: return "half_duplex";
    case SchemeKind::FullDuplexPC: return "full_duplex";
    case SchemeKind::FixedAlphaFixedPower: return "fixed_alpha";
  }
  return "?";
}

struct SchemeConfig {
  SchemeKind kind = SchemeKind::AlphaDuplexOpt;
  UtilityKind utility = UtilityKind::SumRate;
  int n_starts = 5;
  std::uint64_t seed = 0;  // multi-start stream
  BarrierOptions solver;
};

struct SchemeResult {
  SchemeKind kind = SchemeKind::AlphaDuplexOpt;
  UtilityKind utility_kind = UtilityKind::SumRate;
  DecisionVector x;
  Eigen::VectorXd rate_u, rate_b;  // bits/s
  double utility = 0.0;
  double per_user_total_rate_per_B = 0.0;  // (1/N) sum (R_u + R_b) / B
  double per_user_ul_rate_per_B = 0.0;
  double per_user_dl_rate_per_B = 0.0;
  double mean_alpha = 0.0;
  bool converged = true;
  int starts_used = 0;
  std::uint64_t realization_fingerprint = 0;
};

namespace detail {

inline SchemeResult make_scheme_result(SchemeKind kind, UtilityKind utility, const DecisionVector& x,
                                       const LinkModel& model, const NetworkRealization& net) {
  SchemeResult r;
  r.kind = kind;
  r.utility_kind = utility;
  r.x = x;
  const LinkMetrics m = model.metrics(x);
  r.rate_u = m.rate_u;
  r.rate_b = m.rate_b;
  r.utility = utility_from_rates(m.rate_u, m.rate_b, utility);
  const double nb = net.num_cells() * model.bandwidth();
  r.per_user_ul_rate_per_B = m.rate_u.sum() / nb;
  r.per_user_dl_rate_per_B = m.rate_b.sum() / nb;
  r.per_user_total_rate_per_B = (m.rate_u.sum() + m.rate_b.sum()) / nb;
  r.mean_alpha = x.alpha.mean();
  r.realization_fingerprint = net.fingerprint();
  return r;
}

}  // namespace detail

/// Runs one scheme on one realization. `injected` adds candidate starts to the
/// alpha-duplex multi-start and is ignored by the other schemes.
inline SchemeResult run_scheme(const SchemeConfig& cfg, const NetworkRealization& net,
                               const PulseOverlapProfile& profile, const SystemParams& params,
                               const std::vector<DecisionVector>& injected = {}) {
  const LinkModel model(net, profile, params);
  if (cfg.kind == SchemeKind::FixedAlphaFixedPower) {
    const int n = params.num_cells;
    const DecisionVector x = DecisionVector::uniform(n, params.p_u_max, params.p_b_tot / n, params.alpha_min);
    return detail::make_scheme_result(cfg.kind, cfg.utility, x, model, net);
  }

  ProblemSpec spec{params, cfg.utility, std::nullopt, &net, &profile};
  if (cfg.kind == SchemeKind::HalfDuplexPC) spec.fixed_alpha = 0.0;
  if (cfg.kind == SchemeKind::FullDuplexPC) spec.fixed_alpha = 1.0;
  try {
    const OptimizationResult opt = multi_start_solve(
        spec, cfg.n_starts, cfg.seed, cfg.solver,
        cfg.kind == SchemeKind::AlphaDuplexOpt ? injected : std::vector<DecisionVector>{});
    SchemeResult r = detail::make_scheme_result(cfg.kind, cfg.utility, opt.x_opt, model, net);
    r.converged = opt.converged;
    r.starts_used = opt.starts_used;
    return r;
  } catch (const Error& e) {
    throw Error(std::string(to_string(cfg.kind)) + ": " + e.what());
  }
}

/// Runs the requested schemes on one realization. The pinned and fixed
/// solutions are computed first and injected as alpha-duplex starts, so the
/// alpha-duplex utility dominates theirs. Results come back in `kinds` order.
inline std::vector<SchemeResult> compare_schemes(const NetworkRealization& net, const PulseOverlapProfile& profile,
                                                 const SystemParams& params, UtilityKind utility, int n_starts,
                                                 std::uint64_t seed, const std::vector<SchemeKind>& kinds,
                                                 const BarrierOptions& solver = {}) {
  std::vector<std::optional<SchemeResult>> slots(kinds.size());
  std::vector<DecisionVector> injected;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    if (kinds[k] == SchemeKind::AlphaDuplexOpt) continue;
    slots[k] = run_scheme({kinds[k], utility, n_starts, seed, solver}, net, profile, params);
    injected.push_back(slots[k]->x);
  }
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    if (kinds[k] != SchemeKind::AlphaDuplexOpt) continue;
    slots[k] = run_scheme({kinds[k], utility, n_starts, seed, solver}, net, profile, params, injected);
  }
  std::vector<SchemeResult> out;
  out.reserve(kinds.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// All four schemes, in SchemeKind order.
inline std::vector<SchemeResult> compare_all(const NetworkRealization& net, const PulseOverlapProfile& profile,
                                             const SystemParams& params, UtilityKind utility, int n_starts,
                                             std::uint64_t seed = 0, const BarrierOptions& solver = {}) {
  return compare_schemes(net, profile, params, utility, n_starts, seed,
                         std::vector<SchemeKind>(std::begin(kAllSchemes), std::end(kAllSchemes)), solver);
}

}  // namespace alphaduplex
