#include "irsce/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace irsce {

namespace {

// Stream purposes for substream derivation. Offline and online noise get
// separate substreams so the online draws line up across schemes when
// shared_noise pairs them.
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kNoiseOffline = 2;
constexpr std::uint64_t kNoiseOnline = 3;

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

}  // namespace

const char* scheme_name(SchemeId scheme) {
  switch (scheme) {
    case SchemeId::kProposedGeneral: return "proposed-general";
    case SchemeId::kProposedLos: return "proposed-los";
    case SchemeId::kBenchmark: return "benchmark";
  }
  return "?";
}

SchemeId parse_scheme(const std::string& name) {
  if (name == "proposed-general") return SchemeId::kProposedGeneral;
  if (name == "proposed-los") return SchemeId::kProposedLos;
  if (name == "benchmark") return SchemeId::kBenchmark;
  throw ConfigError("unknown scheme '" + name + "'");
}

long long training_overhead(long long m, long long n, long long k, SchemeId scheme) {
  if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("overhead needs positive M, N, K");
  const long long online = k + std::max(k, ceil_div(k * n, m));
  switch (scheme) {
    case SchemeId::kProposedGeneral: return 2 * (n + 1) + online;
    case SchemeId::kProposedLos: return (n + 1) + online;
    case SchemeId::kBenchmark: return k * (n + 1);
  }
  throw std::invalid_argument("unknown scheme");
}

double normalized_mse(const std::vector<CVec>& h_bu_hat,
                      const std::vector<CMat>& h_bsu_hat,
                      const ChannelRealization& truth) {
  const std::size_t k = truth.h_bu.size();
  if (h_bu_hat.size() != k || h_bsu_hat.size() != k) {
    throw std::invalid_argument("estimate count does not match user count");
  }
  double err = 0.0, energy = 0.0;
  for (std::size_t u = 0; u < k; ++u) {
    err += (h_bsu_hat[u] - truth.cascaded_bsu[u]).squaredNorm();
    err += (h_bu_hat[u] - truth.h_bu[u]).squaredNorm();
    energy += truth.cascaded_bsu[u].squaredNorm();
    energy += truth.h_bu[u].squaredNorm();
  }
  if (!(energy > 0.0)) throw std::domain_error("true channel energy is zero");
  return err / energy;
}

double normalized_mse(const EstimateSet& estimates, const ChannelRealization& truth) {
  return normalized_mse(estimates.h_bu_hat, estimates.H_bsu_hat, truth);
}

double normalized_mse(const BenchmarkEstimate& estimates, const ChannelRealization& truth) {
  return normalized_mse(estimates.h_bu_hat, estimates.H_bsu_hat, truth);
}

void ExperimentConfig::validate() const {
  if (m < 1) throw ConfigError("m must be at least 1");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (t_bs < 1 || t_su < 1) throw ConfigError("t_bs and t_su must be at least 1");
  if (schemes.empty()) throw ConfigError("at least one scheme must be selected");
  if (path_loss.reference_gain_db > 0.0) {
    throw ConfigError("reference_gain_db is a gain and must not be positive");
  }
  if (path_loss.exponent_nlos < 2.0 || path_loss.exponent_los < 2.0) {
    throw ConfigError("path loss exponents below 2 (free space) are not supported");
  }
  if (!(path_loss.reference_distance > 0.0) || !(path_loss.carrier_wavelength > 0.0)) {
    throw ConfigError("reference_distance and carrier_wavelength must be positive");
  }
  if (!(user_disk_radius > 0.0)) throw ConfigError("user_disk_radius must be positive");
  if (!(failure_rate_threshold >= 0.0 && failure_rate_threshold <= 1.0)) {
    throw ConfigError("failure_rate_threshold must lie in [0, 1]");
  }
  if (!geometry.user_positions.empty() &&
      static_cast<int>(geometry.user_positions.size()) < k) {
    throw ConfigError("user_positions must list at least k positions (or be empty)");
  }
  if (sweep_axis != SweepAxis::kNone) {
    if (sweep_grid.empty()) throw ConfigError("sweep grid must not be empty");
    if (!std::is_sorted(sweep_grid.begin(), sweep_grid.end())) {
      throw ConfigError("sweep grid must be sorted ascending");
    }
    for (double v : sweep_grid) {
      if ((sweep_axis == SweepAxis::kM || sweep_axis == SweepAxis::kK) &&
          (v < 1.0 || v != std::floor(v))) {
        throw ConfigError("m/k sweep grid values must be positive integers");
      }
    }
    if (sweep_axis == SweepAxis::kK && !geometry.user_positions.empty() &&
        static_cast<double>(geometry.user_positions.size()) < sweep_grid.back()) {
      throw ConfigError("user_positions must cover the largest k in the sweep");
    }
  }
  try {
    geometry.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

namespace {

// Per-user pooled error over direct + cascaded channels.
std::vector<double> per_user_nmse(const std::vector<CVec>& h_bu_hat,
                                  const std::vector<CMat>& h_bsu_hat,
                                  const ChannelRealization& truth) {
  std::vector<double> out(truth.h_bu.size());
  for (std::size_t u = 0; u < truth.h_bu.size(); ++u) {
    double err = (h_bsu_hat[u] - truth.cascaded_bsu[u]).squaredNorm() +
                 (h_bu_hat[u] - truth.h_bu[u]).squaredNorm();
    double energy = truth.cascaded_bsu[u].squaredNorm() + truth.h_bu[u].squaredNorm();
    out[u] = (energy > 0.0) ? err / energy : 0.0;
  }
  return out;
}

SystemGeometry resolve_geometry(const ExperimentConfig& config, Rng& rng, bool* defaulted) {
  SystemGeometry geometry = config.geometry;
  if (geometry.user_positions.empty()) {
    *defaulted = true;
    geometry.user_positions.reserve(config.k);
    for (int u = 0; u < config.k; ++u) {
      double radius = config.user_disk_radius * std::sqrt(rng.uniform());
      double angle = 2.0 * kPi * rng.uniform();
      geometry.user_positions.push_back(config.user_disk_center +
                                        Vec3(radius * std::cos(angle),
                                             radius * std::sin(angle), 0.0));
    }
  } else {
    *defaulted = false;
    geometry.user_positions.resize(config.k);  // first k configured positions
  }
  return geometry;
}

TrialResult run_scheme(const ExperimentConfig& config, SchemeId scheme,
                       const ChannelRealization& channels, std::uint64_t trial_index) {
  TrialResult result;
  result.scheme = scheme;
  result.overhead_slots =
      training_overhead(config.m, config.n(), config.k, scheme);

  const std::uint64_t noise_key =
      config.shared_noise ? 0 : static_cast<std::uint64_t>(scheme) + 1;
  Rng offline_rng(derive_seed(config.master_seed, trial_index, kNoiseOffline, noise_key));
  Rng online_rng(derive_seed(config.master_seed, trial_index, kNoiseOnline, noise_key));
  NoiseModel noise_model{config.noise_power_dbm, 0};
  const NoiseModel* noise = config.noise_off ? nullptr : &noise_model;
  Rng* offline = config.noise_off ? nullptr : &offline_rng;
  Rng* online = config.noise_off ? nullptr : &online_rng;

  const double p_online = dbm_to_mw(config.p_online_dbm);
  const double p_offline = dbm_to_mw(config.p_offline_dbm);
  const int n = config.n();

  try {
    if (scheme == SchemeId::kBenchmark) {
      BenchmarkEstimate est = run_benchmark(channels, p_online, noise, online);
      result.nmse = normalized_mse(est, channels);
      result.per_user_nmse = per_user_nmse(est.h_bu_hat, est.H_bsu_hat, channels);
      return result;
    }

    Phase1Plans plans = (scheme == SchemeId::kProposedLos) ? plan_phase1_los(n)
                                                           : plan_phase1(n);
    Phase1Estimate phase1 = run_phase1(channels, plans, p_offline, noise, offline,
                                       config.strict_reference_row);
    GroupingPlan grouping = make_grouping(config.k, config.m, n);
    Phase2Plan plan2 = plan_phase2(config.m, n, config.k, grouping, config.theta);
    if (plans.total_slots() + plan2.total_slots() != result.overhead_slots) {
      throw std::logic_error("pilot plan length disagrees with the overhead formula");
    }
    EstimateSet est = run_phase2(channels, phase1, plan2, p_online, noise, online,
                                 config.genie_direct);
    result.nmse = normalized_mse(est, channels);
    result.per_user_nmse = per_user_nmse(est.h_bu_hat, est.H_bsu_hat, channels);
    return result;
  } catch (const ConditioningError& e) {
    result.ok = false;
    result.error = e.what();
  } catch (const DegenerateChannelError& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

}  // namespace

std::vector<TrialResult> run_trial(const ExperimentConfig& config, std::uint64_t trial_index) {
  config.validate();
  Rng channel_rng(derive_seed(config.master_seed, trial_index, kChannelStream));
  bool users_defaulted = false;
  SystemGeometry geometry = resolve_geometry(config, channel_rng, &users_defaulted);
  ChannelRealization channels =
      draw_realization(geometry, config.path_loss, config.m, channel_rng);

  std::vector<TrialResult> results;
  results.reserve(config.schemes.size());
  for (SchemeId scheme : config.schemes) {
    TrialResult r = run_scheme(config, scheme, channels, trial_index);
    if (users_defaulted) r.warnings.push_back("user-placement:random-disk");
    results.push_back(std::move(r));
  }
  return results;
}

double SweepResult::max_failure_rate() const {
  double worst = 0.0;
  for (const SweepRow& row : rows) {
    const long long total = row.trials_ok + row.trials_failed;
    if (total > 0) {
      worst = std::max(worst, static_cast<double>(row.trials_failed) / total);
    }
  }
  return worst;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> grid = config.sweep_grid;
  if (config.sweep_axis == SweepAxis::kNone) {
    grid = {config.p_online_dbm};
  }

  SweepResult result;
  for (double axis_value : grid) {
    ExperimentConfig point = config;
    switch (config.sweep_axis) {
      case SweepAxis::kM: point.m = static_cast<int>(axis_value); break;
      case SweepAxis::kK: point.k = static_cast<int>(axis_value); break;
      case SweepAxis::kPOnline: point.p_online_dbm = axis_value; break;
      case SweepAxis::kNone: break;
    }
    point.validate();

    // Accumulate per scheme, merged by trial index so execution order is
    // irrelevant.
    struct Accum {
      double sum = 0.0, sum_sq = 0.0;
      long long ok = 0, failed = 0;
    };
    std::vector<Accum> accum(point.schemes.size());
    for (int trial = 0; trial < point.trials; ++trial) {
      std::vector<TrialResult> trial_results =
          run_trial(point, static_cast<std::uint64_t>(trial));
      for (std::size_t s = 0; s < trial_results.size(); ++s) {
        if (trial_results[s].ok) {
          accum[s].sum += trial_results[s].nmse;
          accum[s].sum_sq += trial_results[s].nmse * trial_results[s].nmse;
          accum[s].ok += 1;
        } else {
          accum[s].failed += 1;
        }
      }
    }

    for (std::size_t s = 0; s < point.schemes.size(); ++s) {
      SweepRow row;
      row.axis_value = axis_value;
      row.scheme = point.schemes[s];
      row.overhead_slots =
          training_overhead(point.m, point.n(), point.k, point.schemes[s]);
      row.trials_ok = accum[s].ok;
      row.trials_failed = accum[s].failed;
      row.seed = config.master_seed;
      if (accum[s].ok > 0) {
        row.nmse_mean = accum[s].sum / accum[s].ok;
        if (accum[s].ok > 1) {
          double var = (accum[s].sum_sq - accum[s].sum * accum[s].sum / accum[s].ok) /
                       (accum[s].ok - 1);
          row.nmse_stderr = std::sqrt(std::max(var, 0.0) / accum[s].ok);
        }
      } else {
        row.nmse_mean = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::string out = "axis_value,scheme,overhead_slots,nmse_mean,nmse_stderr,trials_ok,trials_failed,seed\n";
  char buf[256];
  for (const SweepRow& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%.10g,%s,%lld,%.10e,%.10e,%lld,%lld,%llu\n",
                  row.axis_value, scheme_name(row.scheme), row.overhead_slots,
                  row.nmse_mean, row.nmse_stderr, row.trials_ok, row.trials_failed,
                  static_cast<unsigned long long>(row.seed));
    out += buf;
  }
  return out;
}

void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  file << to_csv(result);
  if (!file) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace irsce
