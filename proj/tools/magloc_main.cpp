// magloc: NV-magnetometry simulation and magnetic map-matching experiments.
//
// Subcommands: crlb, estimate, localize, bench, match, synth-map.
// Exit codes: 0 ok, 1 runtime failure, 2 input parse error, 3 contract
// violation.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "magloc/config.hpp"
#include "magloc/errors.hpp"
#include "magloc/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string metric;
  int stride = 0, seeds = 0, window = 0;
  std::vector<double> budgets;
  std::vector<int> sensors;
  std::vector<double> roi_fracs;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment manifest (JSON)");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "root seed (u64)")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--threads", flags.threads, "worker pool size");
}

void add_search(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--metric", flags.metric,
                  "grad | corner | grad-corner | corner-grad");
  cmd->add_option("--stride", flags.stride, "coarse lattice step");
  cmd->add_option("--seeds", flags.seeds, "coarse seeds kept (K0)");
  cmd->add_option("--window", flags.window, "refinement window side (odd)");
}

magloc::ExperimentConfig build_config(const CommonFlags& flags) {
  magloc::ExperimentConfig cfg = flags.config_path.empty()
                                     ? magloc::ExperimentConfig{}
                                     : magloc::load_config(flags.config_path);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed_set) cfg.seed = flags.seed;
  if (flags.threads > 0) cfg.threads = flags.threads;
  if (!flags.metric.empty()) cfg.search.metric = magloc::parse_metric(flags.metric);
  if (flags.stride > 0) cfg.search.stride = flags.stride;
  if (flags.seeds > 0) cfg.search.seeds = flags.seeds;
  if (flags.window > 0) cfg.search.window = flags.window;
  if (!flags.budgets.empty()) cfg.budgets_s = flags.budgets;
  if (!flags.sensors.empty()) cfg.sensor_counts = flags.sensors;
  if (!flags.roi_fracs.empty()) cfg.roi_fractions = flags.roi_fracs;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NV quantum magnetometry and magnetic-anomaly geo-localization"};
  app.require_subcommand(1);

  CommonFlags crlb_flags, est_flags, loc_flags, bench_flags, synth_flags, match_flags;

  CLI::App* crlb = app.add_subcommand("crlb", "CRLB curves and advantage windows");
  add_common(crlb, crlb_flags);

  CLI::App* estimate = app.add_subcommand("estimate", "field-estimation sweep");
  add_common(estimate, est_flags);
  estimate->add_option("--budget", est_flags.budgets, "sensing budget in s (repeatable)");

  CLI::App* localize = app.add_subcommand("localize", "localization sweep");
  add_common(localize, loc_flags);
  add_search(localize, loc_flags);
  localize->add_option("--budget", loc_flags.budgets, "sensing budget in s (repeatable)");
  localize->add_option("--sensors", loc_flags.sensors, "corner count 1..4 (repeatable)");

  CLI::App* bench = app.add_subcommand("bench", "runtime vs ROI benchmark");
  add_common(bench, bench_flags);
  add_search(bench, bench_flags);
  bench->add_option("--roi-frac", bench_flags.roi_fracs,
                    "ROI area fraction (repeatable)");

  CLI::App* synth = app.add_subcommand("synth-map", "write the synthetic map");
  add_common(synth, synth_flags);
  std::string synth_format = "asc";
  synth->add_option("--format", synth_format, "asc | bin");

  CLI::App* match = app.add_subcommand("match", "one measurement-to-map query");
  std::string match_map, match_map_format = "asc", match_measurement;
  std::vector<int> match_roi;
  match->add_option("--map", match_map, "raster file")->required();
  match->add_option("--format", match_map_format, "asc | bin");
  match->add_option("--measurement", match_measurement, "measurement JSON file")
      ->required();
  add_search(match, match_flags);
  match->add_option("--roi", match_roi, "cell ROI: i0 j0 width height")
      ->expected(4);

  CLI11_PARSE(app, argc, argv);

  try {
    if (crlb->parsed()) {
      magloc::run_crlb_curves(build_config(crlb_flags));
    } else if (estimate->parsed()) {
      magloc::run_field_estimation_sweep(build_config(est_flags));
    } else if (localize->parsed()) {
      magloc::run_localization_sweep(build_config(loc_flags));
    } else if (bench->parsed()) {
      magloc::run_runtime_benchmark(build_config(bench_flags));
    } else if (synth->parsed()) {
      magloc::run_synth_map(build_config(synth_flags),
                            magloc::parse_format(synth_format));
    } else if (match->parsed()) {
      magloc::MatchOnceRequest request;
      request.map_path = match_map;
      request.map_format = magloc::parse_format(match_map_format);
      request.measurement_path = match_measurement;
      request.params.stride = match_flags.stride > 0 ? match_flags.stride : 1;
      if (match_flags.seeds > 0) request.params.seeds = match_flags.seeds;
      if (match_flags.window > 0) request.params.window = match_flags.window;
      if (!match_flags.metric.empty())
        request.params.metric = magloc::parse_metric(match_flags.metric);
      if (!match_roi.empty())
        request.params.roi = {match_roi[0], match_roi[1], match_roi[2], match_roi[3]};
      magloc::cmd_match_once(request, std::cout);
    }
  } catch (const magloc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const magloc::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const magloc::ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
