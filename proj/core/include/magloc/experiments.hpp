#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "magloc/config.hpp"
#include "magloc/estimator.hpp"
#include "magloc/features.hpp"
#include "magloc/matcher.hpp"
#include "magloc/raster.hpp"

namespace magloc {

/// Total-field raster, its feature grid and the resolved experiment sites.
struct PreparedMap {
  MagRaster total;
  FeatureGrid features;
  double hx, hy;
  std::vector<std::pair<int, int>> sites;
};

/// Builds the map (file or synthetic), adds the main field, computes
/// features and resolves sites. Synthetic maps derive their stream from
/// the experiment seed, so the whole experiment is a function of the
/// manifest alone.
PreparedMap prepare_map(const ExperimentConfig& config);

/// Simulated corner measurements at one cell: per-corner estimator runs
/// under the given per-sensor budget, in the fixed (LL, LR, UL, UR) order
/// truncated to `sensor_count`.
struct CornerMeasurement {
  std::vector<CornerId> corners;
  std::vector<double> b_true_nt;
  std::vector<double> b_hat_nt;
  std::vector<double> sigma_nt;
  std::vector<FieldEstimate> estimates;

  /// MeasurementSet with the diagonal covariance of estimator-reported
  /// variances (nT^2).
  MeasurementSet to_measurement_set() const;
};

CornerMeasurement measure_corners(const MagRaster& total, int cell_i, int cell_j,
                                  int sensor_count, const NvSensorModel& model,
                                  const EstimatorConfig& estimator, double budget_s,
                                  RngStream& trial_rng);

struct EstimateTrialRow {
  int site;
  int site_i, site_j;
  double budget_s;
  int rep;
  int corner; ///< 0..3 = LL, LR, UL, UR
  std::uint64_t seed;
  double b_true_nt, b_hat_nt, sigma_b_nt, se_nt2;
  long shots;
  double budget_spent_s;
  bool stage1_only;
};

/// All (site x budget x repetition x corner) rows in deterministic order;
/// trials may run on a worker pool without changing the result.
std::vector<EstimateTrialRow> field_estimation_trials(const ExperimentConfig& config,
                                                      const PreparedMap& map);

struct LocalizeTrialRow {
  int site;
  double budget_s;
  int sensors;
  int rep;
  std::uint64_t seed;
  int true_i, true_j;
  int est_i, est_j;
  double d2_min;
  double error_m;
  long coarse_evals, refine_evals;
  double elapsed_s; ///< wall clock; written only to the timing sidecar
};

std::vector<LocalizeTrialRow> localization_trials(const ExperimentConfig& config,
                                                  const PreparedMap& map);

struct BenchRow {
  int site;
  double roi_frac;
  long roi_cells;
  std::string metric;
  long coarse_evals, refine_evals;
  int est_i, est_j;
  double d2_min;
  double median_elapsed_s, min_elapsed_s, max_elapsed_s;
};

std::vector<BenchRow> runtime_benchmark_rows(const ExperimentConfig& config,
                                             const PreparedMap& map);

/// CLI entry points. Each writes CSV (and SVG for the CRLB curves) under
/// config.out_dir. All simulation-derived outputs are byte-deterministic
/// in (config, seed); wall-clock measurements go to *_timing.csv sidecars,
/// which are measurements of the host and excluded from that guarantee.
void run_crlb_curves(const ExperimentConfig& config);
void run_field_estimation_sweep(const ExperimentConfig& config);
void run_localization_sweep(const ExperimentConfig& config);
void run_runtime_benchmark(const ExperimentConfig& config);

/// Generates the configured synthetic map and saves it under out_dir as
/// synth_map.asc / synth_map.bin. Returns the written path.
std::string run_synth_map(const ExperimentConfig& config, RasterFormat format);

/// One ad-hoc matching query against a raster file.
struct MatchOnceRequest {
  std::string map_path;
  RasterFormat map_format = RasterFormat::Asc;
  std::string measurement_path;
  SearchParams params;
};

/// Reads a measurement JSON file: {"corners": ["LL", ...],
/// "b_hat_nt": [...], "sigma_b_nt2": [[...]] or [diag...]}.
MeasurementSet load_measurement(const std::string& path);

/// Runs the query and prints the matched cell, its center lat/lon, the
/// distance and the top-k candidates (no timing, so output is
/// deterministic).
void cmd_match_once(const MatchOnceRequest& request, std::ostream& out);

}  // namespace magloc
