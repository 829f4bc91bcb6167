#include "magloc/crlb.hpp"

#include <cmath>

#include "magloc/errors.hpp"

namespace magloc {

void ClassicalSensorModel::validate() const {
  if (!(sigma > 0.0))
    throw ContractError("invalid-sigma", "noise standard deviation must be positive");
}

double fisher_info(const NvSensorModel& model, const RamseyControl& control,
                   double omega) {
  const double p0 = outcome_probability(model, control, omega);
  const double dp = dp0_domega(model, control, omega);
  return dp * dp / (p0 * (1.0 - p0));
}

double fisher_max(const NvSensorModel& model, double tau) {
  model.validate();
  if (!(tau > 0.0))
    throw ContractError("invalid-control", "sensing time tau must be positive");
  const double contrast = model.f0 + model.f1 - 1.0;
  const double imbalance = model.f0 - model.f1;
  const double decay = tau / model.t2_star;
  return tau * tau * contrast * contrast / (1.0 - imbalance * imbalance) *
         std::exp(-2.0 * decay * decay);
}

double quantum_crlb_omega(const NvSensorModel& model, double tau) {
  return 1.0 / fisher_max(model, tau);
}

BudgetedCrlbPoint quantum_crlb_field(const NvSensorModel& model, double tau,
                                     double t_total) {
  if (!(tau > 0.0) || tau > t_total)
    throw ContractError("invalid-budget", "need 0 < tau <= t_total");
  const long shots = static_cast<long>(std::floor(t_total / tau));
  const double var_omega = quantum_crlb_omega(model, tau);
  return {tau, shots,
          var_omega / (model.gamma * model.gamma * static_cast<double>(shots))};
}

double classical_crlb(const ClassicalSensorModel& model) {
  model.validate();
  return model.sigma * model.sigma;
}

std::vector<std::pair<double, double>> advantage_window(
    const NvSensorModel& model, double sigma_classical, double t_total,
    const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw ContractError("empty-grid", "tau grid is empty");
  const double var_c = sigma_classical * sigma_classical;
  std::vector<std::pair<double, double>> windows;
  bool inside = false;
  double lo = 0.0, hi = 0.0;
  for (double tau : tau_grid) {
    const bool advantage = quantum_crlb_field(model, tau, t_total).variance_b < var_c;
    if (advantage) {
      if (!inside) lo = tau;
      hi = tau;
      inside = true;
    } else if (inside) {
      windows.emplace_back(lo, hi);
      inside = false;
    }
  }
  if (inside) windows.emplace_back(lo, hi);
  return windows;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw ContractError("empty-grid", "need 0 < lo < hi and points >= 2");
  std::vector<double> grid(points);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (points - 1);
  for (int k = 0; k < points; ++k) grid[k] = std::exp(log_lo + step * k);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace magloc
