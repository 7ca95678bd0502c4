#pragma once

#include <iosfwd>
#include <string>

#include "irsce/baseline.hpp"
#include "irsce/phase2.hpp"

namespace irsce {

enum class SchemeId { kProposedGeneral = 0, kProposedLos = 1, kBenchmark = 2 };

const char* scheme_name(SchemeId scheme);
SchemeId parse_scheme(const std::string& name);  // throws ConfigError

// Total pilot slots before data transmission.
//   proposed-general: 2(N+1) + K + max(K, ceil(KN/M))
//   proposed-los:      (N+1) + K + max(K, ceil(KN/M))
//   benchmark:         K(N+1)
long long training_overhead(long long m, long long n, long long k, SchemeId scheme);

// Pooled squared estimation error over all users' direct and cascaded
// channels, normalized by the true channel energy.
double normalized_mse(const std::vector<CVec>& h_bu_hat,
                      const std::vector<CMat>& h_bsu_hat,
                      const ChannelRealization& truth);
double normalized_mse(const EstimateSet& estimates, const ChannelRealization& truth);
double normalized_mse(const BenchmarkEstimate& estimates, const ChannelRealization& truth);

enum class SweepAxis { kNone, kM, kK, kPOnline };

struct ExperimentConfig {
  int m = 16;
  int k = 4;
  SystemGeometry geometry;  // N = geometry.num_elements()
  PathLossModel path_loss;
  double p_online_dbm = 20.0;
  double p_offline_dbm = 40.0;
  double noise_power_dbm = -105.0;
  int trials = 1000;
  std::uint64_t master_seed = 1;
  std::vector<SchemeId> schemes = {SchemeId::kProposedGeneral, SchemeId::kProposedLos,
                                   SchemeId::kBenchmark};
  long long t_bs = 10000;  // coherence-block lengths, recorded in outputs only
  long long t_su = 100;
  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<double> sweep_grid{0.0, 10.0, 20.0, 30.0, 40.0};  // dBm when sweeping p

  // Default user placement when geometry.user_positions is empty: redrawn per
  // trial, uniform in a horizontal disk.
  Vec3 user_disk_center{2.0, 100.0, 0.0};
  double user_disk_radius = 5.0;

  double theta = 0.0;  // 0 = default grid parameter
  double failure_rate_threshold = 0.05;

  // Debug switches.
  bool noise_off = false;
  bool shared_noise = false;
  bool genie_direct = false;
  bool strict_reference_row = false;

  int n() const { return geometry.num_elements(); }
  void validate() const;  // throws ConfigError
};

// Plain-text key = value configuration; '#' starts a comment, unknown keys
// are errors. See README for the key list.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Human-readable echo of the resolved configuration, marking defaulted
// choices (e.g. randomized user placement).
std::string describe_config(const ExperimentConfig& config);

struct TrialResult {
  SchemeId scheme = SchemeId::kProposedGeneral;
  long long overhead_slots = 0;
  double nmse = 0.0;
  std::vector<double> per_user_nmse;
  std::vector<std::string> warnings;
  bool ok = true;
  std::string error;
};

// Runs every configured scheme once on a single channel realization derived
// deterministically from (master_seed, trial_index). Schemes share the
// realization; noise substreams are keyed by scheme so they are independent
// unless shared_noise is set. Conditioning/degeneracy failures are returned
// as failed results, not thrown.
std::vector<TrialResult> run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

struct SweepRow {
  double axis_value = 0.0;
  SchemeId scheme = SchemeId::kProposedGeneral;
  long long overhead_slots = 0;
  double nmse_mean = 0.0;
  double nmse_stderr = 0.0;
  long long trials_ok = 0;
  long long trials_failed = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  double max_failure_rate() const;
};

// Iterates the sweep axis (a single point when axis = kNone) and aggregates
// trial-mean statistics per scheme.
SweepResult run_sweep(const ExperimentConfig& config);

// CSV with the fixed header
// axis_value,scheme,overhead_slots,nmse_mean,nmse_stderr,trials_ok,trials_failed,seed
std::string to_csv(const SweepResult& result);
void write_csv(const SweepResult& result, const std::string& path);

}  // namespace irsce
