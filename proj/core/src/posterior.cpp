#include "magloc/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "magloc/errors.hpp"

namespace magloc {

FrequencyPosterior::FrequencyPosterior(std::vector<double> support,
                                       std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.empty() || support_.size() != weights_.size())
    throw ContractError("degenerate-posterior",
                        "support and weights must be nonempty and equal-sized");
  normalize();
}

FrequencyPosterior FrequencyPosterior::uniform_grid(double omega_max, int bins) {
  if (!(omega_max > 0.0) || bins < 1)
    throw ContractError("degenerate-posterior", "need omega_max > 0 and bins >= 1");
  std::vector<double> support(bins);
  const double width = omega_max / bins;
  for (int k = 0; k < bins; ++k) support[k] = (k + 0.5) * width;
  return {std::move(support), std::vector<double>(bins, 1.0 / bins)};
}

FrequencyPosterior FrequencyPosterior::uniform_particles(double lo, double hi,
                                                         int count) {
  if (!(hi > lo) || count < 1)
    throw ContractError("empty-interval", "need hi > lo and count >= 1");
  std::vector<double> support(count);
  const double width = (hi - lo) / count;
  for (int k = 0; k < count; ++k) support[k] = lo + (k + 0.5) * width;
  return {std::move(support), std::vector<double>(count, 1.0 / count)};
}

double FrequencyPosterior::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) m += weights_[k] * support_[k];
  return m;
}

double FrequencyPosterior::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double d = support_[k] - m;
    v += weights_[k] * d * d;
  }
  return v;
}

double FrequencyPosterior::stddev() const { return std::sqrt(variance()); }

double FrequencyPosterior::ess() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return s > 0.0 ? 1.0 / s : 0.0;
}

void FrequencyPosterior::update(const NvSensorModel& model,
                                const RamseyControl& control, int outcome) {
  const Contrast c = Contrast::from_model(model);
  const double decay = control.tau / model.t2_star;
  const double envelope = c.beta * std::exp(-decay * decay);
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double p0 =
        c.alpha + envelope * std::cos(support_[k] * control.tau + control.phase);
    weights_[k] *= outcome == 1 ? p0 : 1.0 - p0;
  }
  normalize();
}

void FrequencyPosterior::update_batch(const NvSensorModel& model,
                                      const RamseyControl& control, long ones,
                                      long zeros) {
  if (ones < 0 || zeros < 0)
    throw ContractError("degenerate-posterior", "negative outcome counts");
  if (ones == 0 && zeros == 0) return;
  const Contrast c = Contrast::from_model(model);
  const double decay = control.tau / model.t2_star;
  const double envelope = c.beta * std::exp(-decay * decay);

  std::vector<double> logw(support_.size());
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double p0 =
        c.alpha + envelope * std::cos(support_[k] * control.tau + control.phase);
    const double p1 = 1.0 - p0;
    // k * log(0) must yield -inf, not NaN, when the count is zero.
    double lw = weights_[k] > 0.0 ? std::log(weights_[k])
                                  : -std::numeric_limits<double>::infinity();
    if (ones > 0) lw += p0 > 0.0 ? ones * std::log(p0)
                                 : -std::numeric_limits<double>::infinity();
    if (zeros > 0) lw += p1 > 0.0 ? zeros * std::log(p1)
                                  : -std::numeric_limits<double>::infinity();
    logw[k] = lw;
    max_logw = std::max(max_logw, lw);
  }
  if (!std::isfinite(max_logw))
    throw ContractError("degenerate-posterior", "all likelihoods are zero");
  for (std::size_t k = 0; k < support_.size(); ++k)
    weights_[k] = std::exp(logw[k] - max_logw);
  normalize();
}

void FrequencyPosterior::systematic_resample(RngStream& rng, double jitter_std,
                                             double lo, double hi) {
  const std::size_t n = support_.size();
  std::vector<double> resampled(n);
  const double u0 = rng.uniform01();
  double cumulative = weights_[0];
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (u0 + k) / static_cast<double>(n);
    while (u > cumulative && j + 1 < n) cumulative += weights_[++j];
    resampled[k] = support_[j];
  }
  if (jitter_std > 0.0) {
    for (double& omega : resampled)
      omega = std::clamp(omega + jitter_std * rng.normal(), lo, hi);
  }
  support_ = std::move(resampled);
  std::fill(weights_.begin(), weights_.end(), 1.0 / static_cast<double>(n));
}

void FrequencyPosterior::normalize() {
  double total = 0.0;
  for (double w : weights_) {
    if (w < 0.0)
      throw ContractError("degenerate-posterior", "negative weight");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw ContractError("degenerate-posterior", "all likelihoods are zero");
  for (double& w : weights_) w /= total;
}

FrequencyPosterior bayes_update(const FrequencyPosterior& posterior,
                                const NvSensorModel& model,
                                const RamseyControl& control, int outcome) {
  FrequencyPosterior next = posterior;
  next.update(model, control, outcome);
  return next;
}

}  // namespace magloc
