// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: factors, run, sweep, hist.
// Exit codes: 0 success, 2 configuration or usage error, 1 runtime error.
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alphaduplex/experiment.hpp"

namespace alphaduplex {

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<int> threads;
  std::optional<int> bins;
  std::string out_dir;
  std::vector<std::string> schemes;
  std::vector<std::string> utilities;
};

namespace detail {

inline ExperimentConfig resolve_config(const CliOptions& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.drops) cfg.n_drops = *o.drops;
  if (o.threads) cfg.threads = *o.threads;
  if (o.bins) cfg.hist_bins = *o.bins;
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (!o.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : o.schemes) cfg.schemes.push_back(parse_scheme(s));
  }
  if (!o.utilities.empty()) {
    cfg.utilities.clear();
    for (const auto& u : o.utilities) cfg.utilities.push_back(parse_utility(u));
  }
  cfg.validate();
  return cfg;
}

inline std::string out_path(const ExperimentConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

// Writes through `write` to <output_dir>/<name>, or to `console` when no directory is set.
template <class Write>
void emit(const ExperimentConfig& cfg, const char* name, std::ostream& console, const Write& write) {
  if (cfg.output_dir.empty()) {
    write(console);
    return;
  }
  ensure_writable_dir(cfg.output_dir);
  const std::string path = out_path(cfg, name);
  auto f = open_for_write(path);
  write(f);
  finish_write(f, path);
}

inline int cmd_factors(const ExperimentConfig& cfg, std::ostream& out) {
  const auto profile = build_default_profile(cfg.params.bandwidth, cfg.params.alpha_min);
  emit(cfg, "factors.csv", out, [&](std::ostream& os) { write_profile_csv(profile, os); });
  return 0;
}

inline int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
  const auto profile = build_default_profile(cfg.params.bandwidth, cfg.params.alpha_min);
  const auto net = generate_realization(cfg.params, cfg.base_seed);
  std::vector<SchemeResult> all;
  for (UtilityKind uk : cfg.utilities) {
    auto r = compare_schemes(net, profile, cfg.params, uk, cfg.n_starts, cfg.base_seed, cfg.schemes, cfg.solver);
    all.insert(all.end(), r.begin(), r.end());
  }
  emit(cfg, "run.csv", out, [&](std::ostream& os) {
    os << "scheme,utility,utility_value,total_per_B,ul_per_B,dl_per_B,mean_alpha,converged\n"
       << std::setprecision(17);
    for (const auto& r : all) {
      os << to_string(r.kind) << ',' << to_string(r.utility_kind) << ',' << r.utility << ','
         << r.per_user_total_rate_per_B << ',' << r.per_user_ul_rate_per_B << ',' << r.per_user_dl_rate_per_B
         << ',' << r.mean_alpha << ',' << (r.converged ? 1 : 0) << '\n';
    }
  });
  return 0;
}

inline int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  const SweepOutput res = run_sweep(cfg);
  if (cfg.output_dir.empty()) {
    write_sweep_csv(res.records, out);
    return 0;
  }
  emit_csv(res.records, out_path(cfg, "sweep.csv"));
  emit_drops_csv(res.drops, out_path(cfg, "sweep_drops.csv"));
  return 0;
}

inline int cmd_hist(ExperimentConfig cfg, std::ostream& out) {
  if (std::find(cfg.schemes.begin(), cfg.schemes.end(), SchemeKind::AlphaDuplexOpt) == cfg.schemes.end()) {
    cfg.schemes.insert(cfg.schemes.begin(), SchemeKind::AlphaDuplexOpt);
  }
  const SweepOutput res = run_sweep(cfg);
  const auto rows = alpha_histogram(res.drops, cfg.hist_bins, cfg.params.alpha_min);
  if (cfg.output_dir.empty()) {
    out << "ratio,utility,bin_lo,bin_hi,count,frequency\n" << std::setprecision(17);
    for (const auto& r : rows) {
      out << r.ratio << ',' << to_string(r.utility) << ',' << r.bin_lo << ',' << r.bin_hi << ',' << r.count << ','
          << r.frequency << '\n';
    }
    return 0;
  }
  emit_histogram_csv(rows, out_path(cfg, "alpha_hist.csv"));
  return 0;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"alpha-duplex cellular network experiments"};
  app.require_subcommand(1, 1);
  CliOptions o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value configuration file");
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--out", o.out_dir, "output directory (stdout if absent)");
    sub->add_option("--scheme", o.schemes, "schemes to run")->delimiter(',');
    sub->add_option("--utility", o.utilities, "utility kinds to run")->delimiter(',');
    sub->add_option("--threads", o.threads, "worker threads");
  };
  CLI::App* factors = app.add_subcommand("factors", "dump the C_u / C_b table");
  CLI::App* run = app.add_subcommand("run", "compare schemes on one realization");
  CLI::App* sweep = app.add_subcommand("sweep", "power-disparity sweep");
  CLI::App* hist = app.add_subcommand("hist", "alpha histogram over a sweep");
  for (CLI::App* sub : {factors, run, sweep, hist}) add_common(sub);
  for (CLI::App* sub : {sweep, hist}) sub->add_option("--drops", o.drops, "drops per ratio");
  hist->add_option("--bins", o.bins, "histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    const ExperimentConfig cfg = detail::resolve_config(o);
    if (factors->parsed()) return detail::cmd_factors(cfg, out);
    if (run->parsed()) return detail::cmd_run(cfg, out);
    if (sweep->parsed()) return detail::cmd_sweep(cfg, out);
    return detail::cmd_hist(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace alphaduplex
