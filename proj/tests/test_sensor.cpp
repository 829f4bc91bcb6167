#include <doctest.h>

#include <cmath>

#include "magloc/errors.hpp"
#include "magloc/rng.hpp"
#include "magloc/sensor.hpp"

using namespace magloc;

namespace {

const NvSensorModel kStock{0.88, 0.98, 1.5e-3, kNvGamma};
const NvSensorModel kPerfect{1.0, 1.0, 1.5e-3, kNvGamma};

// Independent oracle: central finite difference of the likelihood in
// omega, step chosen so truncation stays below 1e-7 relative.
double fd_dp0(const NvSensorModel& m, const RamseyControl& c, double omega) {
  const double h = 1e-4 / c.tau;
  const double hi = outcome_probability(m, c, omega + h);
  const double lo = outcome_probability(m, c, omega - h);
  return (hi - lo) / (2.0 * h);
}

}  // namespace

TEST_CASE("perfect fidelity, zero phase, short tau gives p0 near 1") {
  const RamseyControl c(1e-6, 0.0);
  const double p0 = outcome_probability(kPerfect, c, 0.0);
  const double envelope_loss = (c.tau / kPerfect.t2_star) * (c.tau / kPerfect.t2_star);
  CHECK(p0 <= 1.0);
  CHECK(p0 >= 1.0 - envelope_loss);
}

TEST_CASE("stock fidelities at the quadrature point give p0 = (1+F0-F1)/2") {
  // omega*tau + phase = pi/2 kills the cosine term.
  const double tau = 1e-6;
  const double omega = 2e6;
  const RamseyControl c(tau, M_PI / 2.0 - omega * tau);
  CHECK(outcome_probability(kStock, c, omega) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("fully dephased likelihood collapses to alpha") {
  const RamseyControl c(1.5, 0.3);  // tau = 1000 T2*
  const Contrast contrast = Contrast::from_model(kStock);
  CHECK(outcome_probability(kStock, c, 1e6) == doctest::Approx(contrast.alpha).epsilon(1e-15));
}

TEST_CASE("likelihood bounds hold over random settings") {
  RngStream rng(11);
  for (int k = 0; k < 500; ++k) {
    const NvSensorModel m{rng.uniform(0.55, 1.0), rng.uniform(0.55, 1.0), 1.5e-3,
                          kNvGamma};
    if (m.f0 + m.f1 <= 1.0) continue;
    const Contrast c = Contrast::from_model(m);
    const RamseyControl ctl(rng.uniform(1e-7, 3e-3), rng.uniform(-10.0, 10.0));
    const double p0 = outcome_probability(m, ctl, rng.uniform(0.0, 1.3e7));
    CHECK(p0 >= c.alpha - c.beta - 1e-15);
    CHECK(p0 <= c.alpha + c.beta + 1e-15);
    CHECK(p0 >= 0.0);
    CHECK(p0 <= 1.0);
  }
}

TEST_CASE("phase is periodic mod 2*pi") {
  const double tau = 5e-6, omega = 3e6, phase = 1.234;
  const RamseyControl a(tau, phase);
  const RamseyControl b(tau, phase + 2.0 * M_PI);
  CHECK(outcome_probability(kStock, a, omega) == outcome_probability(kStock, b, omega));
}

TEST_CASE("fringe amplitude decays monotonically in tau/T2*") {
  // Hold omega*tau + phase fixed while growing tau.
  const double target_phase = 0.7;
  const double omega = 4e6;
  double previous = 1.0;
  const Contrast c = Contrast::from_model(kStock);
  for (double tau : {1e-4, 3e-4, 6e-4, 1.2e-3, 2.4e-3}) {
    const RamseyControl ctl(tau, target_phase - omega * tau);
    const double amp = std::abs(outcome_probability(kStock, ctl, omega) - c.alpha);
    CHECK(amp < previous);
    previous = amp;
  }
}

TEST_CASE("derivative vanishes at the fringe extremum") {
  const double tau = 1e-6, omega = 2e6;
  const RamseyControl c(tau, -omega * tau);  // omega*tau + phase = 0
  CHECK(dp0_domega(kStock, c, omega) == 0.0);
}

TEST_CASE("derivative at quadrature, perfect fidelity, short tau is -tau/2") {
  const double tau = 1e-6, omega = 2e6;
  const RamseyControl c(tau, M_PI / 2.0 - omega * tau);
  CHECK(dp0_domega(kPerfect, c, omega) ==
        doctest::Approx(-tau / 2.0).epsilon(1e-6));
}

TEST_CASE("analytic derivative matches finite differences on a randomized grid") {
  RngStream rng(23);
  for (int k = 0; k < 100; ++k) {
    const NvSensorModel m{rng.uniform(0.7, 1.0), rng.uniform(0.7, 1.0), 1.5e-3,
                          kNvGamma};
    if (m.f0 + m.f1 <= 1.02) continue;
    const double tau = rng.uniform(2e-7, 1.2e-3);
    const double omega = rng.uniform(1e5, 1.25e7);
    // Keep the phase away from sin = 0 so relative error is well-defined.
    const double u = rng.uniform(0.15, M_PI - 0.15) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
    const RamseyControl c(tau, u - omega * tau);
    const double analytic = dp0_domega(m, c, omega);
    const double numeric = fd_dp0(m, c, omega);
    CHECK(std::abs(analytic - numeric) <= 1e-6 * std::abs(analytic));
  }
}

TEST_CASE("sample_shot is deterministic and honors p0") {
  const double tau = 1e-6, omega = 2e6;

  SUBCASE("p0 = 1 always returns 1") {
    const RamseyControl c(1e-9, -2e6 * 1e-9);
    RngStream rng(3);
    for (int k = 0; k < 200; ++k) CHECK(sample_shot(kPerfect, c, omega, rng) == 1);
  }

  SUBCASE("fixed seed reproduces the bit sequence") {
    const RamseyControl c(tau, 0.4);
    RngStream a(77), b(77);
    for (int k = 0; k < 2000; ++k)
      CHECK(sample_shot(kStock, c, omega, a) == sample_shot(kStock, c, omega, b));
  }

  SUBCASE("empirical mean concentrates around p0 = 0.45") {
    const RamseyControl c(tau, M_PI / 2.0 - omega * tau);
    RngStream rng(99);
    const int n = 100000;
    long ones = 0;
    for (int k = 0; k < n; ++k) ones += sample_shot(kStock, c, omega, rng);
    const double mean = static_cast<double>(ones) / n;
    CHECK(std::abs(mean - 0.45) < 3.0 * std::sqrt(0.45 * 0.55 / n));
  }
}

TEST_CASE("contract violations are rejected") {
  CHECK_THROWS_AS((NvSensorModel{0.5, 0.5, 1.5e-3, kNvGamma}.validate()), ContractError);
  CHECK_THROWS_AS((NvSensorModel{0.4, 0.5, 1.5e-3, kNvGamma}.validate()), ContractError);
  CHECK_THROWS_AS((NvSensorModel{0.9, 0.9, -1.0, kNvGamma}.validate()), ContractError);
  CHECK_THROWS_AS((NvSensorModel{0.9, 0.9, 1.5e-3, 0.0}.validate()), ContractError);
  CHECK_THROWS_AS(RamseyControl(0.0, 0.0), ContractError);
  CHECK_THROWS_AS(RamseyControl(-1e-6, 0.0), ContractError);
  CHECK_THROWS_AS(RamseyControl(1e-6, std::nan("")), ContractError);
}
