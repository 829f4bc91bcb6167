#include "magloc/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "magloc/errors.hpp"

namespace magloc {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Lower bound on reported posterior spread, as a fraction of omega_max.
// Prevents exactly-zero variances from a collapsed particle cloud, which
// would make downstream covariance matrices singular.
constexpr double kSigmaFloorFraction = 1e-15;
}  // namespace

double EstimatorConfig::tau_min() const { return kPi / omega_max; }

double EstimatorConfig::effective_refinement_width() const {
  return refinement_width > 0.0 ? refinement_width
                                : 4.0 * omega_max / static_cast<double>(stage1_bins);
}

void EstimatorConfig::validate() const {
  if (!(omega_max > 0.0))
    throw ContractError("invalid-config", "omega_max must be positive");
  if (stage1_shots < 1)
    throw ContractError("invalid-config", "stage1_shots must be >= 1");
  if (stage1_bins < 2)
    throw ContractError("invalid-config", "stage1_bins must be >= 2");
  if (particle_count < 100)
    throw ContractError("invalid-config", "particle_count must be >= 100");
  if (!(resample_threshold > 0.0 && resample_threshold <= 1.0))
    throw ContractError("invalid-config", "resample_threshold must be in (0, 1]");
  if (!(kappa > 0.0))
    throw ContractError("invalid-config", "kappa must be positive");
  if (!(effective_refinement_width() > 0.0))
    throw ContractError("invalid-config", "refinement width must be positive");
}

Stage1Result stage1_coarse(const NvSensorModel& model, const EstimatorConfig& config,
                           double r_max, double true_omega, RngStream& rng) {
  model.validate();
  config.validate();
  const double tau = config.tau_min();
  const double cost = static_cast<double>(config.stage1_shots) * tau;
  if (cost > r_max)
    throw ContractError("budget-exhausted",
                        "stage-1 shots alone would overrun the sensing budget");

  const RamseyControl control(tau, 0.0);
  long ones = 0;
  for (long k = 0; k < config.stage1_shots; ++k)
    ones += sample_shot(model, control, true_omega, rng);

  // All shots share one control setting, so the outcome count is a
  // sufficient statistic; one batched update equals the sequential chain.
  FrequencyPosterior posterior =
      FrequencyPosterior::uniform_grid(config.omega_max, config.stage1_bins);
  posterior.update_batch(model, control, ones, config.stage1_shots - ones);

  const double omega_hat = posterior.mean();
  const double half_width = config.effective_refinement_width() / 2.0;
  const double lo =
      std::max(omega_hat - half_width, config.omega_max * kSigmaFloorFraction);
  const double hi = std::min(omega_hat + half_width, config.omega_max);
  return {omega_hat, posterior.stddev(), lo, hi, config.stage1_shots, cost};
}

FieldEstimate stage2_adaptive(double interval_lo, double interval_hi,
                              const NvSensorModel& model, EstimatorBudget budget,
                              const EstimatorConfig& config, double true_omega,
                              RngStream& rng) {
  model.validate();
  config.validate();
  if (!(interval_lo > 0.0) || !(interval_hi > interval_lo) ||
      interval_hi > config.omega_max * (1.0 + 1e-12))
    throw ContractError("empty-interval",
                        "refinement interval must be a nonempty subset of (0, omega_max]");
  if (!(budget.remaining() > 0.0))
    throw ContractError("budget-exhausted-before-first-shot",
                        "no sensing time left for stage 2");

  const double interval_width = interval_hi - interval_lo;
  const double jitter_std = config.jitter_fraction * interval_width;
  const double sigma_floor = config.omega_max * kSigmaFloorFraction;
  const double tau_cruise = model.t2_star / 2.0;

  FrequencyPosterior posterior = FrequencyPosterior::uniform_particles(
      interval_lo, interval_hi, config.particle_count);

  long shots = 0;
  while (true) {
    const double sigma = std::max(posterior.stddev(), sigma_floor);
    // kappa/sigma is the one-radian phase-spread rule; pi/W with
    // W = sqrt(12)*sigma keeps tau * (current interval width) <= pi so the
    // likelihood cannot alias across the region still holding mass.
    const double width_now = std::sqrt(12.0) * sigma;
    const double tau =
        std::min({tau_cruise, config.kappa / sigma, kPi / width_now});
    if (budget.spent + tau > budget.r_max) break;

    const RamseyControl control(tau, kPi / 2.0 - posterior.mean() * tau);
    const int outcome = sample_shot(model, control, true_omega, rng);
    posterior.update(model, control, outcome);
    budget.spent += tau;
    ++shots;

    if (posterior.ess() <
        config.resample_threshold * static_cast<double>(config.particle_count))
      posterior.systematic_resample(rng, jitter_std, sigma_floor, config.omega_max);
  }
  if (shots == 0)
    throw ContractError("budget-exhausted-before-first-shot",
                        "remaining budget cannot afford one stage-2 shot");

  const double omega_hat = posterior.mean();
  const double sigma_omega = std::max(posterior.stddev(), sigma_floor);
  return {omega_hat / model.gamma, sigma_omega / model.gamma, omega_hat,
          sigma_omega,             shots,                     budget.spent,
          false};
}

FieldEstimate estimate_field(const NvSensorModel& model, const EstimatorConfig& config,
                             double r_max, double true_omega, RngStream& rng) {
  config.validate();
  if (!(true_omega > 0.0) || !(true_omega < config.omega_max))
    throw ContractError("invalid-config", "true omega must lie in (0, omega_max)");

  RngStream rng_stage1 = rng.child(1);
  RngStream rng_stage2 = rng.child(2);

  const Stage1Result s1 =
      stage1_coarse(model, config, r_max, true_omega, rng_stage1);
  const EstimatorBudget after_stage1{r_max, s1.budget_spent};

  try {
    FieldEstimate est =
        stage2_adaptive(s1.interval_lo, s1.interval_hi, model, after_stage1,
                        config, true_omega, rng_stage2);
    est.shots_used += s1.shots;
    return est;
  } catch (const ContractError& e) {
    if (e.code() != "budget-exhausted-before-first-shot") throw;
    const double sigma_omega =
        std::max(s1.sigma_omega, config.omega_max * kSigmaFloorFraction);
    return {s1.omega_hat / model.gamma, sigma_omega / model.gamma,
            s1.omega_hat,               sigma_omega,
            s1.shots,                   s1.budget_spent,
            true};
  }
}

}  // namespace magloc
