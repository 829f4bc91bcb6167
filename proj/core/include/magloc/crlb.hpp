#pragma once
#include <utility>
#include <vector>

#include "magloc/sensor.hpp"

namespace magloc {

/// Classical scalar magnetometer with additive zero-mean Gaussian noise.
struct ClassicalSensorModel {
  double sigma; ///< noise standard deviation per measurement, T

  void validate() const;
};

/// One point of the budgeted quantum CRLB curve.
struct BudgetedCrlbPoint {
  double tau;        ///< sensing time per shot, s
  long shots;        ///< floor(t_total / tau), >= 1
  double variance_b; ///< bound on field-estimate variance, T^2
};

/// Fisher information about omega for one Ramsey shot at an arbitrary
/// control phase: tau^2 beta^2 exp(-2(tau/T2*)^2) sin^2(omega tau + phase)
/// / (p0 (1 - p0)).
double fisher_info(const NvSensorModel& model, const RamseyControl& control,
                   double omega);

/// Maximum per-shot Fisher information over the control phase:
/// tau^2 (F0+F1-1)^2 / (1 - (F0-F1)^2) * exp(-2(tau/T2*)^2).
double fisher_max(const NvSensorModel& model, double tau);

/// Per-shot variance bound on omega: 1 / fisher_max. (rad/s)^2.
double quantum_crlb_omega(const NvSensorModel& model, double tau);

/// Field-variance bound after spending a total sensing time `t_total` in
/// shots of length `tau`: quantum_crlb_omega / (gamma^2 * floor(t_total/tau)).
/// Partial final shots are discarded. Requires 0 < tau <= t_total.
BudgetedCrlbPoint quantum_crlb_field(const NvSensorModel& model, double tau,
                                     double t_total);

/// Classical CRLB: sigma^2 (T^2) for one Gaussian measurement.
double classical_crlb(const ClassicalSensorModel& model);

/// Maximal contiguous intervals of `tau_grid` (ascending, all in
/// (0, t_total]) where the budgeted quantum bound beats sigma_classical^2.
/// Each interval is reported as (first tau, last tau) of its grid run.
std::vector<std::pair<double, double>> advantage_window(
    const NvSensorModel& model, double sigma_classical, double t_total,
    const std::vector<double>& tau_grid);

/// Geometric (log-spaced) grid of `points` values spanning [lo, hi].
std::vector<double> log_spaced_grid(double lo, double hi, int points);

}  // namespace magloc
