#pragma once
#include <vector>

#include "magloc/rng.hpp"
#include "magloc/sensor.hpp"

namespace magloc {

/// Discrete belief over the Larmor angular frequency: support points with
/// normalized nonnegative weights. Serves both as the stage-1 grid
/// posterior (fixed bin midpoints) and the stage-2 particle cloud.
class FrequencyPosterior {
 public:
  FrequencyPosterior(std::vector<double> support, std::vector<double> weights);

  /// Uniform posterior over `bins` midpoints of (0, omega_max].
  static FrequencyPosterior uniform_grid(double omega_max, int bins);

  /// `count` equally weighted particles at evenly spaced midpoints of
  /// [lo, hi] (stratified initialization, no randomness needed).
  static FrequencyPosterior uniform_particles(double lo, double hi, int count);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

  double mean() const;
  double variance() const;
  double stddev() const;
  /// Effective sample size 1 / sum(w_i^2).
  double ess() const;

  /// Multiply every weight by P(outcome | omega_i) under the given model
  /// and control, then renormalize. Support is unchanged. Throws
  /// ContractError("degenerate-posterior") if every likelihood is zero.
  void update(const NvSensorModel& model, const RamseyControl& control, int outcome);

  /// Joint update for `ones` 1-outcomes and `zeros` 0-outcomes observed at
  /// one fixed control setting. Equal to that many sequential update()
  /// calls (Bayes factorization), computed stably in log space.
  void update_batch(const NvSensorModel& model, const RamseyControl& control,
                    long ones, long zeros);

  /// Systematic resampling to equal weights, followed by Gaussian jitter
  /// of standard deviation `jitter_std`; jittered particles are clamped to
  /// [lo, hi].
  void systematic_resample(RngStream& rng, double jitter_std, double lo, double hi);

 private:
  void normalize();
  std::vector<double> support_;
  std::vector<double> weights_;
};

/// Pure-function form of FrequencyPosterior::update.
FrequencyPosterior bayes_update(const FrequencyPosterior& posterior,
                                const NvSensorModel& model,
                                const RamseyControl& control, int outcome);

}  // namespace magloc
