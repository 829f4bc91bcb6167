#pragma once
#include "magloc/posterior.hpp"
#include "magloc/rng.hpp"
#include "magloc/sensor.hpp"

namespace magloc {

/// Total sensing-time budget and what has been spent of it, seconds.
struct EstimatorBudget {
  double r_max;
  double spent = 0.0;

  double remaining() const { return r_max - spent; }
};

/// Knobs of the two-stage estimator. Defaults target the stock sensor
/// (F0=0.88, F1=0.98, T2*=1.5 ms) and omega_max = 2*pi*2 MHz; all are
/// plain configuration, not physics.
struct EstimatorConfig {
  double omega_max = 1.2566370614359172e7; ///< dynamic-range ceiling, rad/s
  long stage1_shots = 160000;              ///< fixed-setting shots in stage 1
  int stage1_bins = 512;                   ///< stage-1 grid resolution
  /// Refinement interval width Delta, rad/s. <= 0 selects the default
  /// 4 * omega_max / stage1_bins.
  double refinement_width = 0.0;
  int particle_count = 1000;
  double resample_threshold = 0.5; ///< resample when ESS < threshold * N
  double kappa = 1.0;              ///< phase-spread rule: tau <= kappa / sigma
  double jitter_fraction = 1e-4;   ///< post-resample jitter, fraction of interval

  double tau_min() const;               ///< stage-1 sensing time pi / omega_max
  double effective_refinement_width() const;
  void validate() const;
};

/// Stage-1 output: coarse frequency estimate and the refinement interval.
struct Stage1Result {
  double omega_hat;    ///< posterior mean, rad/s
  double sigma_omega;  ///< posterior standard deviation, rad/s
  double interval_lo;  ///< refinement interval, clipped to (0, omega_max]
  double interval_hi;
  long shots;
  double budget_spent; ///< stage1_shots * tau_min, s
};

/// Final field estimate. b_hat is stored as omega_hat / gamma so the two
/// fields never drift apart.
struct FieldEstimate {
  double b_hat;       ///< T
  double sigma_b;     ///< posterior standard deviation, T (> 0)
  double omega_hat;   ///< rad/s
  double sigma_omega; ///< rad/s
  long shots_used;    ///< both stages
  double budget_spent;///< seconds, <= r_max
  bool stage1_only;   ///< stage 2 could not afford a single shot
};

/// Non-adaptive coarse scan: `stage1_shots` Ramsey shots at
/// tau = pi/omega_max, phase 0, inverted through an exact grid posterior
/// over stage1_bins bins of (0, omega_max]. Returns the posterior mean and
/// the interval [mean - Delta/2, mean + Delta/2] clipped to (0, omega_max].
/// Throws ContractError("budget-exhausted") if stage 1 alone would
/// overrun r_max.
Stage1Result stage1_coarse(const NvSensorModel& model, const EstimatorConfig& config,
                           double r_max, double true_omega, RngStream& rng);

/// Adaptive refinement on [interval_lo, interval_hi] with a particle
/// filter. Each iteration selects tau_k = min(T2*/2, kappa/sigma_k,
/// pi/W_k) where sigma_k is the current posterior spread and
/// W_k = sqrt(12)*sigma_k its uniform-equivalent interval width (the
/// anti-aliasing cap), sets the control phase so that
/// omega_hat * tau_k + phase = pi/2 (the maximum-sensitivity point),
/// draws one shot, and Bayes-updates; systematic resampling with jitter
/// triggers below the ESS threshold. Stops before any shot that would
/// overrun the budget. Throws
/// ContractError("budget-exhausted-before-first-shot") when not even one
/// shot fits, ContractError("empty-interval") on a degenerate interval.
FieldEstimate stage2_adaptive(double interval_lo, double interval_hi,
                              const NvSensorModel& model, EstimatorBudget budget,
                              const EstimatorConfig& config, double true_omega,
                              RngStream& rng);

/// Full two-stage run: stage1_coarse on rng.child(1), then stage2_adaptive
/// on rng.child(2) with the remaining budget. If stage 2 cannot take a
/// single shot the stage-1 mean and spread are returned with stage1_only
/// set. Deterministic under a fixed stream.
FieldEstimate estimate_field(const NvSensorModel& model, const EstimatorConfig& config,
                             double r_max, double true_omega, RngStream& rng);

}  // namespace magloc
