#pragma once
#include "magloc/rng.hpp"

namespace magloc {

/// NV electron gyromagnetic ratio, 2*pi * 28.024 GHz/T, in rad s^-1 T^-1.
inline constexpr double kNvGamma = 1.7607998704844153e11;

/// Single-spin NV-center magnetometer parameters. Immutable value type.
struct NvSensorModel {
  double f0 = 0.88;        ///< readout fidelity of |0>, dimensionless
  double f1 = 0.98;        ///< readout fidelity of |1>, dimensionless
  double t2_star = 1.5e-3; ///< inhomogeneous dephasing time, s
  double gamma = kNvGamma; ///< gyromagnetic ratio, rad s^-1 T^-1

  /// Throws ContractError("invalid-model") unless 0<=f0,f1<=1, f0+f1>1,
  /// t2_star>0 and gamma>0. f0+f1 == 1 exactly is rejected: the contrast
  /// vanishes and the likelihood carries no frequency information.
  void validate() const;
};

/// One Ramsey sequence setting: free-evolution time and the phase of the
/// second pi/2 pulse. The phase is reduced into (-pi, pi] on construction
/// so settings differing by 2*pi are the same value.
struct RamseyControl {
  RamseyControl(double tau_s, double phase_rad);

  double tau;   ///< sensing time, s (> 0)
  double phase; ///< control phase, rad, reduced mod 2*pi
};

/// Readout constants alpha = (1+F0-F1)/2, beta = (F0+F1-1)/2.
struct Contrast {
  double alpha;
  double beta;

  static Contrast from_model(const NvSensorModel& model);
};

/// Probability of reading |0> after one Ramsey shot at Larmor frequency
/// `omega`: alpha + beta * exp(-(tau/T2*)^2) * cos(omega*tau + phase).
/// Always within [alpha-beta, alpha+beta], itself within [0, 1].
double outcome_probability(const NvSensorModel& model, const RamseyControl& control,
                           double omega);

/// d p0 / d omega = -tau * beta * exp(-(tau/T2*)^2) * sin(omega*tau + phase).
double dp0_domega(const NvSensorModel& model, const RamseyControl& control,
                  double omega);

/// One simulated shot: 1 (spin read in |0>) with probability p0, else 0.
/// Identical streams reproduce identical bit sequences.
int sample_shot(const NvSensorModel& model, const RamseyControl& control,
                double omega, RngStream& rng);

}  // namespace magloc
