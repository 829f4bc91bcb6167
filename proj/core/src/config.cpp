#include "magloc/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "magloc/errors.hpp"

namespace magloc {

using nlohmann::json;

namespace {

RasterFormat format_field(const json& node, const char* key, RasterFormat fallback) {
  if (!node.contains(key)) return fallback;
  return parse_format(node.at(key).get<std::string>());
}

void read_synth(const json& node, SynthSpec& spec) {
  spec.width = node.value("width", spec.width);
  spec.height = node.value("height", spec.height);
  spec.origin_lat = node.value("origin_lat", spec.origin_lat);
  spec.origin_lon = node.value("origin_lon", spec.origin_lon);
  if (node.contains("cell_arcsec")) spec.cell_deg = node.at("cell_arcsec").get<double>() / 3600.0;
  spec.amplitude_nt = node.value("amplitude_nt", spec.amplitude_nt);
  spec.blob_count = node.value("blob_count", spec.blob_count);
  spec.blob_min_width_m = node.value("blob_min_width_m", spec.blob_min_width_m);
  spec.blob_max_width_m = node.value("blob_max_width_m", spec.blob_max_width_m);
}

void read_sites(const json& node, ExperimentConfig& cfg) {
  if (node.contains("cells")) {
    for (const auto& c : node.at("cells"))
      cfg.site_cells.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
  }
  if (node.contains("latlons")) {
    for (const auto& c : node.at("latlons"))
      cfg.site_latlons.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  }
  if (node.contains("auto_high_gradient")) {
    const auto& a = node.at("auto_high_gradient");
    cfg.auto_sites = a.value("count", 4);
    cfg.auto_min_grad_nt_per_m = a.value("min_grad_nt_per_m", cfg.auto_min_grad_nt_per_m);
    cfg.auto_min_separation_cells =
        a.value("min_separation_cells", cfg.auto_min_separation_cells);
  }
}

}  // namespace

MetricPipeline parse_metric(const std::string& name) {
  if (name == "grad") return MetricPipeline::Gradient;
  if (name == "corner") return MetricPipeline::Corner;
  if (name == "grad-corner") return MetricPipeline::GradThenCorner;
  if (name == "corner-grad") return MetricPipeline::CornerThenGrad;
  throw ParseError("unknown metric '" + name +
                   "' (expected grad, corner, grad-corner or corner-grad)");
}

std::string metric_name(MetricPipeline metric) {
  switch (metric) {
    case MetricPipeline::Gradient: return "grad";
    case MetricPipeline::Corner: return "corner";
    case MetricPipeline::GradThenCorner: return "grad-corner";
    case MetricPipeline::CornerThenGrad: return "corner-grad";
  }
  return "grad";
}

RasterFormat parse_format(const std::string& name) {
  if (name == "asc") return RasterFormat::Asc;
  if (name == "bin") return RasterFormat::Bin;
  throw ParseError("unknown raster format '" + name + "' (expected asc or bin)");
}

void ExperimentConfig::validate() const {
  sensor.validate();
  estimator.validate();
  if (repetitions < 1) throw ContractError("invalid-config", "repetitions must be >= 1");
  if (budgets_s.empty())
    throw ContractError("invalid-config", "at least one sensing budget required");
  for (double b : budgets_s)
    if (!(b > 0.0)) throw ContractError("invalid-config", "budgets must be positive");
  for (int s : sensor_counts)
    if (s < 1 || s > 4)
      throw ContractError("invalid-config", "sensor counts must lie in 1..4");
  for (double f : roi_fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw ContractError("invalid-config", "roi fractions must lie in (0, 1]");
  if (bench_repetitions < 1)
    throw ContractError("invalid-config", "bench repetitions must be >= 1");
  if (threads < 1) throw ContractError("invalid-config", "threads must be >= 1");
  search.validate();
  if (!map_from_file) synth.validate();
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    const int version = root.value("version", 1);
    if (version != 1)
      throw ParseError("unsupported config schema version " + std::to_string(version));

    ExperimentConfig cfg;
    cfg.seed = root.value("seed", cfg.seed);
    cfg.out_dir = root.value("out_dir", cfg.out_dir);
    cfg.threads = root.value("threads", cfg.threads);

    if (root.contains("map")) {
      const auto& m = root.at("map");
      if (m.contains("file")) {
        cfg.map_from_file = true;
        cfg.map_path = m.at("file").get<std::string>();
        cfg.map_format = format_field(m, "format", RasterFormat::Asc);
      } else if (m.contains("synth")) {
        read_synth(m.at("synth"), cfg.synth);
      }
    }

    if (root.contains("main_field")) {
      const auto& f = root.at("main_field");
      cfg.main_field_type = f.value("type", cfg.main_field_type);
      cfg.main_field_value_nt = f.value("value_nt", cfg.main_field_value_nt);
      cfg.dipole_equator_nt = f.value("equator_nt", cfg.dipole_equator_nt);
      cfg.dipole_pole_lat = f.value("pole_lat", cfg.dipole_pole_lat);
      cfg.dipole_pole_lon = f.value("pole_lon", cfg.dipole_pole_lon);
      cfg.main_field_raster_path = f.value("file", cfg.main_field_raster_path);
      cfg.main_field_raster_format =
          format_field(f, "format", cfg.main_field_raster_format);
    }

    if (root.contains("sensor")) {
      const auto& s = root.at("sensor");
      cfg.sensor.f0 = s.value("f0", cfg.sensor.f0);
      cfg.sensor.f1 = s.value("f1", cfg.sensor.f1);
      cfg.sensor.t2_star = s.value("t2_star_s", cfg.sensor.t2_star);
      cfg.sensor.gamma = s.value("gamma_rad_per_s_t", cfg.sensor.gamma);
    }

    if (root.contains("estimator")) {
      const auto& e = root.at("estimator");
      cfg.estimator.omega_max = e.value("omega_max", cfg.estimator.omega_max);
      cfg.estimator.stage1_shots =
          e.value("stage1_shots", cfg.estimator.stage1_shots);
      cfg.estimator.stage1_bins = e.value("stage1_bins", cfg.estimator.stage1_bins);
      cfg.estimator.refinement_width =
          e.value("refinement_width", cfg.estimator.refinement_width);
      cfg.estimator.particle_count =
          e.value("particle_count", cfg.estimator.particle_count);
      cfg.estimator.resample_threshold =
          e.value("resample_threshold", cfg.estimator.resample_threshold);
      cfg.estimator.kappa = e.value("kappa", cfg.estimator.kappa);
      cfg.estimator.jitter_fraction =
          e.value("jitter_fraction", cfg.estimator.jitter_fraction);
    }

    if (root.contains("sites")) read_sites(root.at("sites"), cfg);

    if (root.contains("budgets_s"))
      cfg.budgets_s = root.at("budgets_s").get<std::vector<double>>();
    if (root.contains("sensor_counts"))
      cfg.sensor_counts = root.at("sensor_counts").get<std::vector<int>>();
    cfg.repetitions = root.value("repetitions", cfg.repetitions);

    if (root.contains("search")) {
      const auto& s = root.at("search");
      cfg.search.stride = s.value("stride", cfg.search.stride);
      cfg.search.seeds = s.value("seeds", cfg.search.seeds);
      cfg.search.window = s.value("window", cfg.search.window);
      cfg.search.regularization = s.value("regularization", cfg.search.regularization);
      if (s.contains("metric")) cfg.search.metric = parse_metric(s.at("metric"));
      if (s.contains("roi")) {
        const auto& r = s.at("roi");
        cfg.search.roi = {r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(),
                          r.at(3).get<int>()};
      }
    }

    if (root.contains("roi_fractions"))
      cfg.roi_fractions = root.at("roi_fractions").get<std::vector<double>>();
    cfg.bench_repetitions = root.value("bench_repetitions", cfg.bench_repetitions);
    cfg.bench_budget_s = root.value("bench_budget_s", cfg.bench_budget_s);

    if (root.contains("classical_sensors")) {
      for (const auto& c : root.at("classical_sensors"))
        cfg.classical.push_back(
            {c.at("name").get<std::string>(), c.at("sigma_nt").get<double>() * 1e-9});
    }
    if (root.contains("crlb")) {
      const auto& c = root.at("crlb");
      cfg.crlb_tau_min_s = c.value("tau_min_s", cfg.crlb_tau_min_s);
      cfg.crlb_tau_max_s = c.value("tau_max_s", cfg.crlb_tau_max_s);
      cfg.crlb_points = c.value("points", cfg.crlb_points);
      cfg.crlb_t_total_s = c.value("t_total_s", cfg.crlb_t_total_s);
    }

    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("config field error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::unique_ptr<MainFieldProvider> make_main_field(const ExperimentConfig& config) {
  if (config.main_field_type == "constant")
    return std::make_unique<ConstantMainField>(config.main_field_value_nt);
  if (config.main_field_type == "dipole")
    return std::make_unique<DipoleMainField>(
        config.dipole_equator_nt, config.dipole_pole_lat, config.dipole_pole_lon);
  if (config.main_field_type == "raster")
    return std::make_unique<RasterMainField>(
        load_raster(config.main_field_raster_path, config.main_field_raster_format));
  throw ParseError("unknown main_field type '" + config.main_field_type + "'");
}

}  // namespace magloc
