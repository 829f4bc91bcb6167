#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "magloc/estimator.hpp"
#include "magloc/mainfield.hpp"
#include "magloc/matcher.hpp"
#include "magloc/raster.hpp"
#include "magloc/sensor.hpp"
#include "magloc/synth.hpp"

namespace magloc {

/// Classical magnetometer reference for the CRLB comparison. Sigma values
/// are user-supplied configuration; the shipped examples are placeholders
/// sourced outside this repository, not measured here.
struct ClassicalReference {
  std::string name;
  double sigma_t; ///< noise standard deviation, T
};

/// One experiment manifest (JSON, schema version 1). CLI flags override
/// individual fields after loading.
struct ExperimentConfig {
  std::uint64_t seed = 20260810;
  std::string out_dir = "out";
  int threads = 1;

  // Map source: a raster file or a synthetic recipe.
  bool map_from_file = false;
  std::string map_path;
  RasterFormat map_format = RasterFormat::Asc;
  SynthSpec synth;

  // Main field added to the anomaly map.
  std::string main_field_type = "constant"; ///< constant | dipole | raster
  double main_field_value_nt = 50000.0;
  double dipole_equator_nt = 30000.0;
  double dipole_pole_lat = 80.65;
  double dipole_pole_lon = -72.68;
  std::string main_field_raster_path;
  RasterFormat main_field_raster_format = RasterFormat::Asc;

  NvSensorModel sensor;
  EstimatorConfig estimator;

  // Sites: explicit cells, explicit lat/lon, or automatic high-gradient
  // selection.
  std::vector<std::pair<int, int>> site_cells;
  std::vector<std::pair<double, double>> site_latlons;
  int auto_sites = 0;
  double auto_min_grad_nt_per_m = 0.05;
  int auto_min_separation_cells = 12;

  std::vector<double> budgets_s = {0.05, 0.1, 0.3, 0.6, 1.5};
  std::vector<int> sensor_counts = {4};
  int repetitions = 10;

  SearchParams search;
  std::vector<double> roi_fractions = {0.2, 0.4, 0.6, 0.8, 1.0};
  int bench_repetitions = 11;
  double bench_budget_s = 1.5;

  std::vector<ClassicalReference> classical;
  double crlb_tau_min_s = 1e-6;
  double crlb_tau_max_s = 1.4e-3;
  int crlb_points = 200;
  double crlb_t_total_s = 1.5;

  void validate() const;
};

/// Parses a manifest; throws ParseError on malformed JSON or wrong schema
/// version, ContractError on invalid values.
ExperimentConfig load_config(const std::string& path);

/// Parses from an in-memory JSON string (used by tests and defaults).
ExperimentConfig parse_config(const std::string& json_text);

std::unique_ptr<MainFieldProvider> make_main_field(const ExperimentConfig& config);

MetricPipeline parse_metric(const std::string& name);
std::string metric_name(MetricPipeline metric);
RasterFormat parse_format(const std::string& name);

}  // namespace magloc
