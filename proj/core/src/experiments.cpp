#include "magloc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "magloc/crlb.hpp"
#include "magloc/csv.hpp"
#include "magloc/errors.hpp"
#include "magloc/svg.hpp"
#include "magloc/synth.hpp"
#include "parallel.hpp"

namespace magloc {

namespace {

const char* kCornerNames[4] = {"LL", "LR", "UL", "UR"};

// Stream tags: the synthetic map and every trial kind draw from disjoint
// children of the experiment seed.
constexpr std::uint64_t kMapStreamTag = 0x4d415030;
constexpr std::uint64_t kBenchStreamTag = 0xbe;

std::string out_path(const ExperimentConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  return (std::filesystem::path(config.out_dir) / name).string();
}

std::vector<std::pair<int, int>> resolve_sites(const ExperimentConfig& config,
                                               const MagRaster& total,
                                               const FeatureGrid& features) {
  std::vector<std::pair<int, int>> sites;
  auto check = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= features.cells_x() || j >= features.cells_y())
      throw ContractError("site-out-of-map", "site cell (" + std::to_string(i) + ", " +
                                                 std::to_string(j) + ") outside the map");
    if (!features.valid(i, j))
      throw ContractError("nodata-site", "site cell touches nodata pixels");
  };

  for (const auto& [i, j] : config.site_cells) {
    check(i, j);
    sites.emplace_back(i, j);
  }
  for (const auto& [lat, lon] : config.site_latlons) {
    const int i = static_cast<int>(
        std::lround((lon - total.origin_lon()) / total.cell_dlon() - 1.0));
    const int j = static_cast<int>(
        std::lround(total.height() - 1.0 - (lat - total.origin_lat()) / total.cell_dlat()));
    check(i, j);
    sites.emplace_back(i, j);
  }
  if (config.auto_sites > 0) {
    struct Cell {
      double grad;
      int i, j;
    };
    std::vector<Cell> candidates;
    for (int j = 0; j < features.cells_y(); ++j) {
      for (int i = 0; i < features.cells_x(); ++i) {
        if (!features.valid(i, j)) continue;
        const CellFeature f = features.at(i, j);
        const double g = std::hypot(f.gx, f.gy);
        if (g >= config.auto_min_grad_nt_per_m) candidates.push_back({g, i, j});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Cell& a, const Cell& b) {
      if (a.grad != b.grad) return a.grad > b.grad;
      if (a.j != b.j) return a.j < b.j;
      return a.i < b.i;
    });
    const int sep = config.auto_min_separation_cells;
    for (const Cell& c : candidates) {
      if (static_cast<int>(sites.size()) >=
          config.auto_sites + static_cast<int>(config.site_cells.size() +
                                               config.site_latlons.size()))
        break;
      bool clear = true;
      for (const auto& [si, sj] : sites)
        if (std::abs(si - c.i) < sep && std::abs(sj - c.j) < sep) clear = false;
      if (clear) sites.emplace_back(c.i, c.j);
    }
  }
  if (sites.empty())
    throw ContractError("site-out-of-map",
                        "no experiment sites (configure cells, latlons or "
                        "auto_high_gradient)");
  return sites;
}

double site_error_m(const PreparedMap& map, int true_i, int true_j, int est_i,
                    int est_j) {
  return std::hypot((est_i - true_i) * map.hx, (est_j - true_j) * map.hy);
}

RoiRect centered_roi(const FeatureGrid& features, int center_i, int center_j,
                     double fraction) {
  const long total = static_cast<long>(features.cells_x()) * features.cells_y();
  long side = std::lround(std::sqrt(fraction * static_cast<double>(total)));
  side = std::max<long>(1, std::min<long>({side, features.cells_x(), features.cells_y()}));
  const int w = static_cast<int>(side);
  int i0 = std::clamp(center_i - w / 2, 0, features.cells_x() - w);
  int j0 = std::clamp(center_j - w / 2, 0, features.cells_y() - w);
  return {i0, j0, w, w};
}

}  // namespace

PreparedMap prepare_map(const ExperimentConfig& config) {
  config.validate();
  MagRaster anomaly = [&] {
    if (config.map_from_file) return load_raster(config.map_path, config.map_format);
    RngStream map_rng(derive_seed(config.seed, kMapStreamTag));
    return synth_map(config.synth, map_rng);
  }();
  const auto provider = make_main_field(config);
  MagRaster total = total_field(anomaly, *provider);
  FeatureGrid features = feature_map(total);
  const double hx = features.hx(), hy = features.hy();
  auto sites = resolve_sites(config, total, features);
  return {std::move(total), std::move(features), hx, hy, std::move(sites)};
}

MeasurementSet CornerMeasurement::to_measurement_set() const {
  const int s = static_cast<int>(corners.size());
  MeasurementSet meas;
  meas.corners = corners;
  meas.b_hat = Eigen::VectorXd(s);
  meas.sigma_b = Eigen::MatrixXd::Zero(s, s);
  for (int k = 0; k < s; ++k) {
    meas.b_hat[k] = b_hat_nt[k];
    meas.sigma_b(k, k) = sigma_nt[k] * sigma_nt[k];
  }
  return meas;
}

CornerMeasurement measure_corners(const MagRaster& total, int cell_i, int cell_j,
                                  int sensor_count, const NvSensorModel& model,
                                  const EstimatorConfig& estimator, double budget_s,
                                  RngStream& trial_rng) {
  if (sensor_count < 1 || sensor_count > 4)
    throw ContractError("invalid-config", "sensor count must lie in 1..4");
  const CornerVector corners = cell_corners(total, cell_i, cell_j);
  const double truths[4] = {corners.ll, corners.lr, corners.ul, corners.ur};

  CornerMeasurement out;
  for (int c = 0; c < sensor_count; ++c) {
    const double b_true_t = truths[c] * 1e-9;
    const double omega_true = model.gamma * b_true_t;
    if (!(omega_true > 0.0) || !(omega_true < estimator.omega_max))
      throw ContractError("site-out-of-map",
                          "true field at the site exceeds the estimator dynamic range");
    RngStream corner_rng = trial_rng.child(static_cast<std::uint64_t>(c));
    const FieldEstimate est =
        estimate_field(model, estimator, budget_s, omega_true, corner_rng);
    out.corners.push_back(static_cast<CornerId>(c));
    out.b_true_nt.push_back(truths[c]);
    out.b_hat_nt.push_back(est.b_hat * 1e9);
    out.sigma_nt.push_back(est.sigma_b * 1e9);
    out.estimates.push_back(est);
  }
  return out;
}

std::vector<EstimateTrialRow> field_estimation_trials(const ExperimentConfig& config,
                                                      const PreparedMap& map) {
  const std::size_t n_sites = map.sites.size();
  const std::size_t n_budgets = config.budgets_s.size();
  const std::size_t n_trials = n_sites * n_budgets * config.repetitions;
  std::vector<std::vector<EstimateTrialRow>> per_trial(n_trials);

  detail::parallel_for(n_trials, config.threads, [&](std::size_t t) {
    const int rep = static_cast<int>(t % config.repetitions);
    const std::size_t sb = t / config.repetitions;
    const int budget_idx = static_cast<int>(sb % n_budgets);
    const int site_idx = static_cast<int>(sb / n_budgets);
    const auto [si, sj] = map.sites[site_idx];
    const double budget = config.budgets_s[budget_idx];
    const std::uint64_t seed = derive_seed(config.seed, site_idx, budget_idx, rep);
    RngStream rng(seed);
    const CornerMeasurement m = measure_corners(map.total, si, sj, 4, config.sensor,
                                                config.estimator, budget, rng);
    auto& rows = per_trial[t];
    for (int c = 0; c < 4; ++c) {
      const double err = m.b_hat_nt[c] - m.b_true_nt[c];
      rows.push_back({site_idx, si, sj, budget, rep, c, seed, m.b_true_nt[c],
                      m.b_hat_nt[c], m.sigma_nt[c], err * err,
                      m.estimates[c].shots_used, m.estimates[c].budget_spent,
                      m.estimates[c].stage1_only});
    }
  });

  std::vector<EstimateTrialRow> rows;
  rows.reserve(n_trials * 4);
  for (auto& trial : per_trial)
    rows.insert(rows.end(), trial.begin(), trial.end());
  return rows;
}

std::vector<LocalizeTrialRow> localization_trials(const ExperimentConfig& config,
                                                  const PreparedMap& map) {
  const bool needs_gradient = config.search.metric != MetricPipeline::Corner;
  for (int s : config.sensor_counts)
    if (needs_gradient && s != 4)
      throw ContractError("invalid-measurement",
                          "gradient-space pipelines need all 4 corners; use "
                          "--metric corner for fewer sensors");

  const std::size_t n_sites = map.sites.size();
  const std::size_t n_budgets = config.budgets_s.size();
  const std::size_t n_counts = config.sensor_counts.size();
  const std::size_t n_trials = n_sites * n_budgets * n_counts * config.repetitions;
  std::vector<LocalizeTrialRow> rows(n_trials);
  const MapView view{&map.total, &map.features};

  detail::parallel_for(n_trials, config.threads, [&](std::size_t t) {
    const int rep = static_cast<int>(t % config.repetitions);
    std::size_t rest = t / config.repetitions;
    const int count_idx = static_cast<int>(rest % n_counts);
    rest /= n_counts;
    const int budget_idx = static_cast<int>(rest % n_budgets);
    const int site_idx = static_cast<int>(rest / n_budgets);

    const auto [si, sj] = map.sites[site_idx];
    const double budget = config.budgets_s[budget_idx];
    const int sensors = config.sensor_counts[count_idx];
    // Keyed by (site, budget, repetition) only: measurements are shared
    // across sensor counts, so corner 0 sees the same shots whether it is
    // alone or one of four.
    const std::uint64_t seed = derive_seed(config.seed, site_idx, budget_idx, rep);
    RngStream rng(seed);
    const CornerMeasurement m = measure_corners(map.total, si, sj, sensors,
                                                config.sensor, config.estimator,
                                                budget, rng);
    SearchParams params = config.search;
    const MatchResult result = two_metric_search(view, m.to_measurement_set(), params);
    rows[t] = {site_idx,
               budget,
               sensors,
               rep,
               seed,
               si,
               sj,
               result.i,
               result.j,
               result.d2_min,
               site_error_m(map, si, sj, result.i, result.j),
               result.coarse_evals,
               result.refine_evals,
               result.elapsed_s};
  });
  return rows;
}

std::vector<BenchRow> runtime_benchmark_rows(const ExperimentConfig& config,
                                             const PreparedMap& map) {
  std::vector<BenchRow> rows;
  const MapView view{&map.total, &map.features};
  const MetricPipeline metrics[2] = {MetricPipeline::Gradient, MetricPipeline::Corner};

  for (std::size_t site_idx = 0; site_idx < map.sites.size(); ++site_idx) {
    const auto [si, sj] = map.sites[site_idx];
    const std::uint64_t seed = derive_seed(config.seed, site_idx, kBenchStreamTag, 0);
    RngStream rng(seed);
    const CornerMeasurement m =
        measure_corners(map.total, si, sj, 4, config.sensor, config.estimator,
                        config.bench_budget_s, rng);
    const MeasurementSet meas = m.to_measurement_set();

    for (double frac : config.roi_fractions) {
      for (const MetricPipeline metric : metrics) {
        SearchParams params = config.search;
        params.metric = metric;
        params.roi = centered_roi(map.features, si, sj, frac);

        two_metric_search(view, meas, params);  // warm-up, discarded
        std::vector<double> times(config.bench_repetitions);
        MatchResult last;
        for (int r = 0; r < config.bench_repetitions; ++r) {
          last = two_metric_search(view, meas, params);
          times[r] = last.elapsed_s;
        }
        const Quartiles q = quartiles(times);
        rows.push_back({static_cast<int>(site_idx), frac,
                        static_cast<long>(params.roi.width) * params.roi.height,
                        metric_name(metric), last.coarse_evals, last.refine_evals,
                        last.i, last.j, last.d2_min, q.median,
                        *std::min_element(times.begin(), times.end()),
                        *std::max_element(times.begin(), times.end())});
      }
    }
  }
  return rows;
}

void run_crlb_curves(const ExperimentConfig& config) {
  config.sensor.validate();
  const auto grid =
      log_spaced_grid(config.crlb_tau_min_s, config.crlb_tau_max_s, config.crlb_points);

  CsvWriter csv(out_path(config, "crlb.csv"));
  std::vector<std::string> columns = {"tau_s", "shots", "var_q_t2"};
  for (const auto& c : config.classical) columns.push_back("var_c_t2_" + c.name);
  csv.header(columns);

  std::vector<std::pair<double, double>> curve;
  for (double tau : grid) {
    const BudgetedCrlbPoint p =
        quantum_crlb_field(config.sensor, tau, config.crlb_t_total_s);
    csv.begin_row();
    csv.cell(p.tau);
    csv.cell(p.shots);
    csv.cell(p.variance_b);
    for (const auto& c : config.classical) csv.cell(c.sigma_t * c.sigma_t);
    csv.end_row();
    curve.emplace_back(p.tau, p.variance_b);
  }
  csv.close();

  LogLogPlot plot("NV-center CRLB vs sensing time per shot", "tau (s)",
                  "field variance bound (T^2)");
  const char* band_colors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};
  const char* line_colors[] = {"#17557f", "#1a661a", "#5e3f82", "#5c3a33"};
  int idx = 0;
  for (const auto& c : config.classical) {
    const auto windows =
        advantage_window(config.sensor, c.sigma_t, config.crlb_t_total_s, grid);
    for (const auto& [lo, hi] : windows)
      plot.add_vband(lo, hi, band_colors[idx % 4]);
    plot.add_hline(c.name, line_colors[idx % 4], c.sigma_t * c.sigma_t);
    ++idx;
  }
  plot.add_series("quantum CRLB (budgeted)", "#d62728", curve);
  plot.write(out_path(config, "crlb.svg"));
}

void run_field_estimation_sweep(const ExperimentConfig& config) {
  const PreparedMap map = prepare_map(config);
  const auto rows = field_estimation_trials(config, map);

  CsvWriter csv(out_path(config, "estimate.csv"));
  csv.header({"site", "site_i", "site_j", "budget_s", "rep", "corner", "seed",
              "b_true_nt", "b_hat_nt", "sigma_b_nt", "se_nt2", "shots",
              "budget_spent_s", "status"});
  for (const auto& r : rows) {
    csv.begin_row();
    csv.cell(r.site);
    csv.cell(r.site_i);
    csv.cell(r.site_j);
    csv.cell(r.budget_s);
    csv.cell(r.rep);
    csv.cell(kCornerNames[r.corner]);
    csv.cell(std::to_string(r.seed));
    csv.cell(r.b_true_nt);
    csv.cell(r.b_hat_nt);
    csv.cell(r.sigma_b_nt);
    csv.cell(r.se_nt2);
    csv.cell(r.shots);
    csv.cell(r.budget_spent_s);
    csv.cell(r.stage1_only ? "stage1-only" : "ok");
    csv.end_row();
  }
  csv.close();

  CsvWriter summary(out_path(config, "estimate_summary.csv"));
  summary.header({"site", "budget_s", "samples", "q1_se_nt2", "median_se_nt2",
                  "q3_se_nt2"});
  for (std::size_t site = 0; site < map.sites.size(); ++site) {
    for (double budget : config.budgets_s) {
      std::vector<double> se;
      for (const auto& r : rows)
        if (r.site == static_cast<int>(site) && r.budget_s == budget)
          se.push_back(r.se_nt2);
      const Quartiles q = quartiles(se);
      summary.begin_row();
      summary.cell(static_cast<long>(site));
      summary.cell(budget);
      summary.cell(static_cast<long>(se.size()));
      summary.cell(q.q1);
      summary.cell(q.median);
      summary.cell(q.q3);
      summary.end_row();
    }
  }
  summary.close();
}

void run_localization_sweep(const ExperimentConfig& config) {
  const PreparedMap map = prepare_map(config);
  const auto rows = localization_trials(config, map);
  const std::string metric = metric_name(config.search.metric);

  CsvWriter csv(out_path(config, "localize.csv"));
  csv.header({"site", "budget_s", "sensors", "metric", "rep", "seed", "true_i",
              "true_j", "est_i", "est_j", "d2_min", "loc_error_m", "coarse_evals",
              "refine_evals"});
  CsvWriter timing(out_path(config, "localize_timing.csv"));
  timing.header({"site", "budget_s", "sensors", "metric", "rep", "elapsed_s"});
  for (const auto& r : rows) {
    csv.begin_row();
    csv.cell(r.site);
    csv.cell(r.budget_s);
    csv.cell(r.sensors);
    csv.cell(metric);
    csv.cell(r.rep);
    csv.cell(std::to_string(r.seed));
    csv.cell(r.true_i);
    csv.cell(r.true_j);
    csv.cell(r.est_i);
    csv.cell(r.est_j);
    csv.cell(r.d2_min);
    csv.cell(r.error_m);
    csv.cell(r.coarse_evals);
    csv.cell(r.refine_evals);
    csv.end_row();

    timing.begin_row();
    timing.cell(r.site);
    timing.cell(r.budget_s);
    timing.cell(r.sensors);
    timing.cell(metric);
    timing.cell(r.rep);
    timing.cell(r.elapsed_s);
    timing.end_row();
  }
  csv.close();
  timing.close();

  CsvWriter summary(out_path(config, "localize_summary.csv"));
  summary.header({"site", "budget_s", "sensors", "metric", "trials", "q1_error_m",
                  "median_error_m", "q3_error_m"});
  for (std::size_t site = 0; site < map.sites.size(); ++site) {
    for (double budget : config.budgets_s) {
      for (int sensors : config.sensor_counts) {
        std::vector<double> err;
        for (const auto& r : rows)
          if (r.site == static_cast<int>(site) && r.budget_s == budget &&
              r.sensors == sensors)
            err.push_back(r.error_m);
        const Quartiles q = quartiles(err);
        summary.begin_row();
        summary.cell(static_cast<long>(site));
        summary.cell(budget);
        summary.cell(sensors);
        summary.cell(metric);
        summary.cell(static_cast<long>(err.size()));
        summary.cell(q.q1);
        summary.cell(q.median);
        summary.cell(q.q3);
        summary.end_row();
      }
    }
  }
  summary.close();
}

void run_runtime_benchmark(const ExperimentConfig& config) {
  const PreparedMap map = prepare_map(config);
  const auto rows = runtime_benchmark_rows(config, map);

  CsvWriter csv(out_path(config, "bench.csv"));
  csv.header({"site", "roi_frac", "roi_cells", "metric", "stride", "window", "seeds",
              "coarse_evals", "refine_evals", "est_i", "est_j", "d2_min"});
  CsvWriter timing(out_path(config, "bench_timing.csv"));
  timing.header({"site", "roi_frac", "roi_cells", "metric", "reps",
                 "median_elapsed_s", "min_elapsed_s", "max_elapsed_s"});
  for (const auto& r : rows) {
    csv.begin_row();
    csv.cell(r.site);
    csv.cell(r.roi_frac);
    csv.cell(r.roi_cells);
    csv.cell(r.metric);
    csv.cell(config.search.stride);
    csv.cell(config.search.window);
    csv.cell(config.search.seeds);
    csv.cell(r.coarse_evals);
    csv.cell(r.refine_evals);
    csv.cell(r.est_i);
    csv.cell(r.est_j);
    csv.cell(r.d2_min);
    csv.end_row();

    timing.begin_row();
    timing.cell(r.site);
    timing.cell(r.roi_frac);
    timing.cell(r.roi_cells);
    timing.cell(r.metric);
    timing.cell(config.bench_repetitions);
    timing.cell(r.median_elapsed_s);
    timing.cell(r.min_elapsed_s);
    timing.cell(r.max_elapsed_s);
    timing.end_row();
  }
  csv.close();
  timing.close();
}

std::string run_synth_map(const ExperimentConfig& config, RasterFormat format) {
  RngStream map_rng(derive_seed(config.seed, kMapStreamTag));
  const MagRaster raster = synth_map(config.synth, map_rng);
  const std::string path = out_path(
      config, format == RasterFormat::Asc ? "synth_map.asc" : "synth_map.bin");
  save_raster(raster, path, format);
  return path;
}

MeasurementSet load_measurement(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open measurement file '" + path + "'");
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("measurement file is not valid JSON: ") + e.what());
  }
  try {
    MeasurementSet meas;
    for (const auto& name : root.at("corners")) {
      const std::string s = name.get<std::string>();
      if (s == "LL") meas.corners.push_back(CornerId::LL);
      else if (s == "LR") meas.corners.push_back(CornerId::LR);
      else if (s == "UL") meas.corners.push_back(CornerId::UL);
      else if (s == "UR") meas.corners.push_back(CornerId::UR);
      else throw ParseError("unknown corner '" + s + "'");
    }
    const auto b = root.at("b_hat_nt").get<std::vector<double>>();
    meas.b_hat = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    const auto& sig = root.at("sigma_b_nt2");
    const int s = static_cast<int>(meas.corners.size());
    meas.sigma_b = Eigen::MatrixXd::Zero(s, s);
    if (!sig.empty() && sig.at(0).is_array()) {
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) meas.sigma_b(r, c) = sig.at(r).at(c).get<double>();
    } else {
      for (int r = 0; r < s && r < static_cast<int>(sig.size()); ++r)
        meas.sigma_b(r, r) = sig.at(r).get<double>();
    }
    meas.validate();
    return meas;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("measurement field error: ") + e.what());
  }
}

void cmd_match_once(const MatchOnceRequest& request, std::ostream& out) {
  const MagRaster raster = load_raster(request.map_path, request.map_format);
  const FeatureGrid features = feature_map(raster);
  const MeasurementSet meas = load_measurement(request.measurement_path);
  const MapView view{&raster, &features};
  const MatchResult result = two_metric_search(view, meas, request.params);

  out << "matched_cell_i: " << result.i << "\n";
  out << "matched_cell_j: " << result.j << "\n";
  out << "matched_lat: " << format_double(raster.cell_center_lat(result.j)) << "\n";
  out << "matched_lon: " << format_double(raster.cell_center_lon(result.i)) << "\n";
  out << "d2_min: " << format_double(result.d2_min) << "\n";
  out << "coarse_evals: " << result.coarse_evals << "\n";
  out << "refine_evals: " << result.refine_evals << "\n";
  out << "top_k:\n";
  int rank = 1;
  for (const auto& c : result.top_k) {
    out << "  " << rank++ << ": i=" << c.i << " j=" << c.j
        << " d2=" << format_double(c.d2) << "\n";
  }
}

}  // namespace magloc
