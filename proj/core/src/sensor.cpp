#include "magloc/sensor.hpp"

#include <cmath>

#include "magloc/errors.hpp"

namespace magloc {

void NvSensorModel::validate() const {
  if (!(f0 >= 0.0 && f0 <= 1.0) || !(f1 >= 0.0 && f1 <= 1.0))
    throw ContractError("invalid-model", "readout fidelities must lie in [0, 1]");
  if (!(f0 + f1 > 1.0))
    throw ContractError("invalid-model",
                        "f0 + f1 must exceed 1 (contrast would be <= 0)");
  if (!(t2_star > 0.0))
    throw ContractError("invalid-model", "t2_star must be positive");
  if (!(gamma > 0.0))
    throw ContractError("invalid-model", "gamma must be positive");
}

RamseyControl::RamseyControl(double tau_s, double phase_rad) : tau(tau_s) {
  if (!(tau_s > 0.0))
    throw ContractError("invalid-control", "sensing time tau must be positive");
  if (!std::isfinite(phase_rad))
    throw ContractError("invalid-control", "control phase must be finite");
  phase = std::remainder(phase_rad, 2.0 * M_PI);
}

Contrast Contrast::from_model(const NvSensorModel& model) {
  model.validate();
  return {(1.0 + model.f0 - model.f1) / 2.0, (model.f0 + model.f1 - 1.0) / 2.0};
}

double outcome_probability(const NvSensorModel& model, const RamseyControl& control,
                           double omega) {
  const Contrast c = Contrast::from_model(model);
  const double decay = control.tau / model.t2_star;
  const double envelope = std::exp(-decay * decay);
  return c.alpha + c.beta * envelope * std::cos(omega * control.tau + control.phase);
}

double dp0_domega(const NvSensorModel& model, const RamseyControl& control,
                  double omega) {
  const Contrast c = Contrast::from_model(model);
  const double decay = control.tau / model.t2_star;
  const double envelope = std::exp(-decay * decay);
  return -control.tau * c.beta * envelope *
         std::sin(omega * control.tau + control.phase);
}

int sample_shot(const NvSensorModel& model, const RamseyControl& control,
                double omega, RngStream& rng) {
  const double p0 = outcome_probability(model, control, omega);
  return rng.bernoulli(p0) ? 1 : 0;
}

}  // namespace magloc
