#ifndef EVPLANE_HARNESS_EXPERIMENT_HPP
#define EVPLANE_HARNESS_EXPERIMENT_HPP

#include "evplane/harness/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evplane::harness {

/// Per-component seeds expanded from the master seed with derive_seed and
/// fixed stream numbers.
struct SeedPlan {
  std::uint64_t master = 0;
  std::uint64_t data = 0;         // stream 1
  std::uint64_t split = 0;        // stream 2
  std::uint64_t init = 0;         // stream 3
  std::uint64_t training = 0;     // stream 4: shuffles (and spike encoding for SNNs)
  std::uint64_t evaluation = 0;   // stream 5: SNN spike encoding at evaluation time
  std::uint64_t estimator = 0;    // stream 6: D_theta null splits and noise
  std::uint64_t input_estimator = 0;  // stream 7: D_inp estimate
  std::uint64_t votes = 0;        // stream 8: bootstrap groups
  std::uint64_t noise_sweep = 0;  // stream 9

  static SeedPlan from_master(std::uint64_t master);
  /// Named seeds of every RNG consumer, including the ones derived further
  /// inside the library (per-epoch shuffles excluded; they follow from
  /// `training` and the epoch number).
  std::vector<std::pair<std::string, std::uint64_t>> entries(int class_count) const;
};

struct TrajectoryRecord {
  int epoch = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double d_theta_bits = 0.0;
  double p_theta_bits = 0.0;
  int k_used = 0;
  std::vector<double> alpha, beta, d_class;
  double wall_ms = 0.0;
};

/// Fixed column order of trajectory.csv for K classes.
std::vector<std::string> trajectory_columns(int class_count);
std::string trajectory_csv_row(const TrajectoryRecord& record);
/// Parses trajectory.csv; rows after the last complete line are ignored.
/// Throws IngestionError when the file is missing or malformed.
std::vector<TrajectoryRecord> read_trajectory_csv(const std::filesystem::path& path);

struct RunResult {
  std::filesystem::path dir;
  std::string model_id, dataset_id;
  int class_count = 0;
  std::optional<double> dinp_analytic_bits;
  std::optional<double> dinp_estimate_bits;
  double dinp_bits = 0.0;  // the analytic value when known
  std::vector<TrajectoryRecord> trajectory;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

ExperimentConfig load_config(const std::string& path, const RunOverrides& overrides);

/// Trains and logs one experiment into cfg.output_dir. On failure the logs
/// written so far stay in place next to a FAILED marker and the error is
/// rethrown.
RunResult run_experiment(const ExperimentConfig& cfg);

struct SuiteRow {
  std::string run, model, dataset;
  std::optional<double> d_theta_bits, p_theta_bits;
  std::string status;  // "ok" or the error message
};

/// Runs every *.cfg in `dir` (sorted by name) sequentially, each into
/// <base>/<config stem> where base is overrides.output_dir or <dir>/results,
/// and writes <base>/summary.csv. A failed run becomes a row, not an abort.
std::vector<SuiteRow> run_suite(const std::filesystem::path& dir, const RunOverrides& overrides);

/// Writes plane.tsv, region.tsv and, for Gaussian runs, envelope.tsv from the
/// trajectory and manifest of a run directory.
void emit_plots(const std::filesystem::path& run_dir);

}  // namespace evplane::harness

#endif  // EVPLANE_HARNESS_EXPERIMENT_HPP
