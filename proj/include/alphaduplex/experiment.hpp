// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo experiment driver: config files, power-disparity sweeps,
// aggregation with 95% confidence intervals, alpha histograms and CSV output.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "alphaduplex/errors.hpp"
#include "alphaduplex/schemes.hpp"

namespace alphaduplex {

struct ExperimentConfig {
  SystemParams params;
  std::vector<double> ratio_grid{0.0025, 0.005, 0.0125, 0.025, 0.05};  // N p_u_max / p_b_tot
  int n_drops = 100;
  std::uint64_t base_seed = 1;
  std::vector<UtilityKind> utilities{UtilityKind::SumRate, UtilityKind::SumLogRate};
  std::vector<SchemeKind> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  int n_starts = 5;
  std::string output_dir;  // empty: nothing is written
  int threads = 0;         // 0: ALPHADUPLEX_THREADS, else hardware concurrency
  int hist_bins = 10;
  BarrierOptions solver;

  void validate() const {
    params.validate();
    if (ratio_grid.empty()) throw ConfigError("ratio_grid must not be empty");
    for (std::size_t k = 0; k < ratio_grid.size(); ++k) {
      if (!(ratio_grid[k] > 0.0)) throw ConfigError("ratio_grid entries must be positive");
      if (k > 0 && !(ratio_grid[k] > ratio_grid[k - 1])) throw ConfigError("ratio_grid must ascend strictly");
    }
    if (n_drops < 1) throw ConfigError("n_drops must be at least 1");
    if (n_starts < 1) throw ConfigError("n_starts must be at least 1");
    if (utilities.empty()) throw ConfigError("no utility kinds selected");
    if (schemes.empty()) throw ConfigError("no schemes selected");
    if (hist_bins < 1) throw ConfigError("hist_bins must be at least 1");
  }

  /// p_u_max giving the disparity ratio r with p_b_tot held fixed.
  double user_power_for_ratio(double r) const { return r * params.p_b_tot / params.num_cells; }
};

/// Seed of drop `index`: base_seed XOR index.
inline std::uint64_t drop_seed(std::uint64_t base_seed, int index) {
  return base_seed ^ static_cast<std::uint64_t>(index);
}

/// One (ratio, drop, utility, scheme) outcome.
struct DropRecord {
  int ratio_index = 0;
  double ratio = 0.0;
  int drop = 0;
  std::uint64_t seed = 0;
  SchemeKind scheme = SchemeKind::AlphaDuplexOpt;
  UtilityKind utility = UtilityKind::SumRate;
  double total_per_B = 0.0;
  double ul_per_B = 0.0;
  double dl_per_B = 0.0;
  double mean_alpha = 0.0;
  bool converged = true;
  double utility_value = 0.0;
  std::vector<double> alphas;
};

struct SweepRecord {
  double ratio = 0.0;
  SchemeKind scheme = SchemeKind::AlphaDuplexOpt;
  UtilityKind utility = UtilityKind::SumRate;
  double mean_total = 0.0, ci_total = 0.0;
  double mean_ul = 0.0, ci_ul = 0.0;
  double mean_dl = 0.0, ci_dl = 0.0;
  double mean_alpha = 0.0;
  double conv_frac = 0.0;
};

struct SweepOutput {
  std::vector<SweepRecord> records;
  std::vector<DropRecord> drops;  // ordered by ratio, utility, scheme, drop
};

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Mean and 1.96 * sample standard deviation / sqrt(n); the half-width is 0 for n = 1.
inline MeanCi mean_ci(const std::vector<double>& v) {
  MeanCi r;
  if (v.empty()) return r;
  double sum = 0.0;
  for (double x : v) sum += x;
  r.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    r.half_width = 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
  }
  return r;
}

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ALPHADUPLEX_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

inline void ensure_writable_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = fs::path(dir) / ".alphaduplex_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory is not writable: " + dir);
  }
  fs::remove(probe, ec);
}

// Runs work(k) for k in [0, count) on `threads` workers. Each k owns its
// output slot, so results do not depend on scheduling.
template <class Work>
void parallel_for(int count, int threads, const Work& work) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) work(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int k = next++; k < count; k = next++) {
        try {
          work(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Aggregates drop records (ratio-major, then utility, then scheme) into sweep records.
inline std::vector<SweepRecord> aggregate(const std::vector<DropRecord>& drops) {
  std::vector<SweepRecord> out;
  std::size_t k = 0;
  while (k < drops.size()) {
    std::size_t end = k;
    while (end < drops.size() && drops[end].ratio_index == drops[k].ratio_index &&
           drops[end].utility == drops[k].utility && drops[end].scheme == drops[k].scheme) {
      ++end;
    }
    std::vector<double> total, ul, dl, alpha;
    int converged = 0;
    for (std::size_t d = k; d < end; ++d) {
      total.push_back(drops[d].total_per_B);
      ul.push_back(drops[d].ul_per_B);
      dl.push_back(drops[d].dl_per_B);
      alpha.push_back(drops[d].mean_alpha);
      converged += drops[d].converged ? 1 : 0;
    }
    SweepRecord r;
    r.ratio = drops[k].ratio;
    r.scheme = drops[k].scheme;
    r.utility = drops[k].utility;
    const MeanCi t = mean_ci(total), u = mean_ci(ul), l = mean_ci(dl);
    r.mean_total = t.mean;
    r.ci_total = t.half_width;
    r.mean_ul = u.mean;
    r.ci_ul = u.half_width;
    r.mean_dl = l.mean;
    r.ci_dl = l.half_width;
    r.mean_alpha = mean_ci(alpha).mean;
    r.conv_frac = static_cast<double>(converged) / static_cast<double>(end - k);
    out.push_back(r);
    k = end;
  }
  return out;
}

/// For each ratio, sets p_u_max = ratio * p_b_tot / N and evaluates every
/// requested scheme and utility on n_drops realizations seeded base_seed ^ drop.
inline SweepOutput run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.output_dir.empty()) detail::ensure_writable_dir(cfg.output_dir);

  const PulseOverlapProfile profile = build_default_profile(cfg.params.bandwidth, cfg.params.alpha_min);
  const int n_ratios = static_cast<int>(cfg.ratio_grid.size());
  const int units = n_ratios * cfg.n_drops;
  const std::size_t per_unit = cfg.utilities.size() * cfg.schemes.size();
  std::vector<std::vector<DropRecord>> slots(static_cast<std::size_t>(units));

  detail::parallel_for(units, resolve_thread_count(cfg.threads), [&](int unit) {
    const int ri = unit / cfg.n_drops;
    const int drop = unit % cfg.n_drops;
    SystemParams params = cfg.params;
    params.p_u_max = cfg.user_power_for_ratio(cfg.ratio_grid[static_cast<std::size_t>(ri)]);
    const std::uint64_t seed = drop_seed(cfg.base_seed, drop);
    const NetworkRealization net = generate_realization(params, seed);
    auto& slot = slots[static_cast<std::size_t>(unit)];
    slot.reserve(per_unit);
    for (UtilityKind uk : cfg.utilities) {
      const auto results = compare_schemes(net, profile, params, uk, cfg.n_starts, seed, cfg.schemes, cfg.solver);
      for (const SchemeResult& r : results) {
        DropRecord d;
        d.ratio_index = ri;
        d.ratio = cfg.ratio_grid[static_cast<std::size_t>(ri)];
        d.drop = drop;
        d.seed = seed;
        d.scheme = r.kind;
        d.utility = uk;
        d.total_per_B = r.per_user_total_rate_per_B;
        d.ul_per_B = r.per_user_ul_rate_per_B;
        d.dl_per_B = r.per_user_dl_rate_per_B;
        d.mean_alpha = r.mean_alpha;
        d.converged = r.converged;
        d.utility_value = r.utility;
        d.alphas.assign(r.x.alpha.data(), r.x.alpha.data() + r.x.alpha.size());
        slot.push_back(std::move(d));
      }
    }
  });

  SweepOutput out;
  out.drops.reserve(static_cast<std::size_t>(units) * per_unit);
  for (int ri = 0; ri < n_ratios; ++ri) {
    for (std::size_t u = 0; u < cfg.utilities.size(); ++u) {
      for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
        for (int drop = 0; drop < cfg.n_drops; ++drop) {
          const auto& slot = slots[static_cast<std::size_t>(ri * cfg.n_drops + drop)];
          out.drops.push_back(slot[u * cfg.schemes.size() + s]);
        }
      }
    }
  }
  out.records = aggregate(out.drops);
  return out;
}

struct HistogramRow {
  double ratio = 0.0;
  UtilityKind utility = UtilityKind::SumRate;
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  int count = 0;
  double frequency = 0.0;
};

/// Frequencies of the per-cell alpha chosen by the alpha-duplex scheme, over
/// `bins` equal bins on [alpha_min, 1], per (ratio, utility). alpha = 1 falls
/// in the top bin.
inline std::vector<HistogramRow> alpha_histogram(const std::vector<DropRecord>& drops, int bins,
                                                 double alpha_min = kDefaultAlphaMin) {
  if (bins < 1) throw InvalidParameter("histogram needs at least one bin");
  std::vector<HistogramRow> out;
  const double width = (1.0 - alpha_min) / bins;
  // Group keys in first-seen order.
  std::vector<std::pair<int, UtilityKind>> keys;
  for (const auto& d : drops) {
    if (d.scheme != SchemeKind::AlphaDuplexOpt) continue;
    const std::pair<int, UtilityKind> key{d.ratio_index, d.utility};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [ri, uk] : keys) {
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    int total = 0;
    double ratio = 0.0;
    for (const auto& d : drops) {
      if (d.scheme != SchemeKind::AlphaDuplexOpt || d.ratio_index != ri || d.utility != uk) continue;
      ratio = d.ratio;
      for (double a : d.alphas) {
        int b = static_cast<int>(std::floor((a - alpha_min) / width));
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
        ++total;
      }
    }
    for (int b = 0; b < bins; ++b) {
      HistogramRow row;
      row.ratio = ratio;
      row.utility = uk;
      row.bin_lo = alpha_min + b * width;
      row.bin_hi = b + 1 == bins ? 1.0 : alpha_min + (b + 1) * width;
      row.count = counts[static_cast<std::size_t>(b)];
      row.frequency = total > 0 ? static_cast<double>(row.count) / total : 0.0;
      out.push_back(row);
    }
  }
  return out;
}

inline constexpr const char* kSweepCsvHeader =
    "ratio,scheme,utility,mean_total,ci_total,mean_ul,ci_ul,mean_dl,ci_dl,mean_alpha,conv_frac";

inline void write_sweep_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
  out << kSweepCsvHeader << '\n' << std::setprecision(17);
  for (const auto& r : records) {
    out << r.ratio << ',' << to_string(r.scheme) << ',' << to_string(r.utility) << ',' << r.mean_total << ','
        << r.ci_total << ',' << r.mean_ul << ',' << r.ci_ul << ',' << r.mean_dl << ',' << r.ci_dl << ','
        << r.mean_alpha << ',' << r.conv_frac << '\n';
  }
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  return f;
}

inline void finish_write(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace detail

/// Sweep CSV: header plus one row per (ratio, scheme, utility), full precision.
inline void emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  if (records.empty()) throw InvalidParameter("no sweep records to write");
  auto f = detail::open_for_write(path);
  write_sweep_csv(records, f);
  detail::finish_write(f, path);
}

inline void emit_drops_csv(const std::vector<DropRecord>& drops, const std::string& path) {
  auto f = detail::open_for_write(path);
  f << "ratio,drop,seed,scheme,utility,total_per_B,ul_per_B,dl_per_B,mean_alpha,converged,utility_value\n"
    << std::setprecision(17);
  for (const auto& d : drops) {
    f << d.ratio << ',' << d.drop << ',' << d.seed << ',' << to_string(d.scheme) << ',' << to_string(d.utility)
      << ',' << d.total_per_B << ',' << d.ul_per_B << ',' << d.dl_per_B << ',' << d.mean_alpha << ','
      << (d.converged ? 1 : 0) << ',' << d.utility_value << '\n';
  }
  detail::finish_write(f, path);
}

inline void emit_histogram_csv(const std::vector<HistogramRow>& rows, const std::string& path) {
  auto f = detail::open_for_write(path);
  f << "ratio,utility,bin_lo,bin_hi,count,frequency\n" << std::setprecision(17);
  for (const auto& r : rows) {
    f << r.ratio << ',' << to_string(r.utility) << ',' << r.bin_lo << ',' << r.bin_hi << ',' << r.count << ','
      << r.frequency << '\n';
  }
  detail::finish_write(f, path);
}

// ---------------------------------------------------------------------------
// Parsing

inline UtilityKind parse_utility(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "sum_rate" || s == "sum") return UtilityKind::SumRate;
  if (s == "sum_log_rate" || s == "log") return UtilityKind::SumLogRate;
  throw ConfigError("unknown utility kind: " + s);
}

inline SchemeKind parse_scheme(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "alpha_duplex" || s == "alpha") return SchemeKind::AlphaDuplexOpt;
  if (s == "half_duplex" || s == "hd") return SchemeKind::HalfDuplexPC;
  if (s == "full_duplex" || s == "fd") return SchemeKind::FullDuplexPC;
  if (s == "fixed_alpha" || s == "fixed") return SchemeKind::FixedAlphaFixedPower;
  throw ConfigError("unknown scheme: " + s);
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": " + v);
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::to_double;
  using detail::to_int;
  auto& p = cfg.params;
  if (key == "N") {
    p.num_cells = static_cast<int>(to_int(key, value));
  } else if (key == "isd") {
    p.isd = to_double(key, value);
  } else if (key == "B") {
    p.bandwidth = to_double(key, value);
  } else if (key == "fc") {
    p.carrier_ghz = to_double(key, value);
  } else if (key == "noise_density_N0") {
    p.noise_density = to_double(key, value);
  } else if (key == "noise_density_N0_user") {
    p.user_noise_density = to_double(key, value);
  } else if (key == "p_u_max") {
    p.p_u_max = to_double(key, value);
  } else if (key == "p_b_min") {
    p.p_b_min = to_double(key, value);
  } else if (key == "p_b_tot") {
    p.p_b_tot = to_double(key, value);
  } else if (key == "alpha_min") {
    p.alpha_min = to_double(key, value);
  } else if (key == "d_min") {
    p.d_min = to_double(key, value);
  } else if (key == "fading") {
    if (value == "none") {
      p.fading = Fading::None;
    } else if (value == "rayleigh") {
      p.fading = Fading::RayleighUnitMean;
    } else {
      throw ConfigError("fading must be none or rayleigh, got " + value);
    }
  } else if (key == "layout") {
    if (value == "auto") {
      p.layout = Layout::Auto;
    } else if (value == "grid") {
      p.layout = Layout::Grid;
    } else if (value == "line") {
      p.layout = Layout::Line;
    } else {
      throw ConfigError("layout must be auto, grid or line, got " + value);
    }
  } else if (key == "ratio_grid") {
    cfg.ratio_grid.clear();
    for (const auto& item : detail::split_list(value)) cfg.ratio_grid.push_back(to_double(key, item));
  } else if (key == "n_drops") {
    cfg.n_drops = static_cast<int>(to_int(key, value));
  } else if (key == "base_seed") {
    cfg.base_seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "utility_kinds") {
    cfg.utilities.clear();
    for (const auto& item : detail::split_list(value)) cfg.utilities.push_back(parse_utility(item));
  } else if (key == "schemes") {
    cfg.schemes.clear();
    for (const auto& item : detail::split_list(value)) cfg.schemes.push_back(parse_scheme(item));
  } else if (key == "n_starts") {
    cfg.n_starts = static_cast<int>(to_int(key, value));
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(to_int(key, value));
  } else if (key == "hist_bins") {
    cfg.hist_bins = static_cast<int>(to_int(key, value));
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

/// Flat `key = value` text; `#` starts a comment.
inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig cfg = {}) {
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

/// Parses a sweep CSV written by emit_csv.
inline std::vector<SweepRecord> read_sweep_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(f, line) || line != kSweepCsvHeader) throw IoError("unexpected sweep CSV header in " + path);
  std::vector<SweepRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() != 11) throw IoError("expected 11 columns in " + path);
    SweepRecord r;
    r.ratio = std::stod(cols[0]);
    r.scheme = parse_scheme(cols[1]);
    r.utility = parse_utility(cols[2]);
    r.mean_total = std::stod(cols[3]);
    r.ci_total = std::stod(cols[4]);
    r.mean_ul = std::stod(cols[5]);
    r.ci_ul = std::stod(cols[6]);
    r.mean_dl = std::stod(cols[7]);
    r.ci_dl = std::stod(cols[8]);
    r.mean_alpha = std::stod(cols[9]);
    r.conv_frac = std::stod(cols[10]);
    out.push_back(r);
  }
  return out;
}

}  // namespace alphaduplex
