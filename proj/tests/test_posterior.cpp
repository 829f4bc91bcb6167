#include <doctest.h>

#include <cmath>

#include "magloc/errors.hpp"
#include "magloc/posterior.hpp"

using namespace magloc;

namespace {
const NvSensorModel kPerfect{1.0, 1.0, 1.5e-3, kNvGamma};
const NvSensorModel kStock{0.88, 0.98, 1.5e-3, kNvGamma};

double weight_sum(const FrequencyPosterior& p) {
  double s = 0.0;
  for (double w : p.weights()) s += w;
  return s;
}
}  // namespace

TEST_CASE("uniform grid covers (0, omega_max] with normalized weights") {
  const auto p = FrequencyPosterior::uniform_grid(1e7, 64);
  CHECK(p.size() == 64);
  CHECK(p.support().front() > 0.0);
  CHECK(p.support().back() <= 1e7);
  CHECK(weight_sum(p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.mean() == doctest::Approx(5e6).epsilon(1e-9));
}

TEST_CASE("hand-computed two-point Bayes update") {
  // Perfect fidelity and negligible dephasing at tau = 1:
  // p0(w) = (1 + cos w) / 2, so p0 = 0.9 at w1 = acos(0.8) and p0 = 0.45
  // at w2 = acos(-0.1); observing outcome 1 gives weights (2/3, 1/3).
  const NvSensorModel ideal{1.0, 1.0, 1e300, kNvGamma};
  const double w1 = std::acos(0.8);
  const double w2 = std::acos(-0.1);
  FrequencyPosterior p({w1, w2}, {0.5, 0.5});
  p.update(ideal, RamseyControl(1.0, 0.0), 1);
  CHECK(p.weights()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p.weights()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("uninformative likelihood leaves the posterior unchanged") {
  // tau 1000x beyond T2*: the fringe is fully dephased, p0 is constant.
  auto p = FrequencyPosterior::uniform_grid(1e7, 32);
  const auto before = p.weights();
  p.update(kStock, RamseyControl(1.5, 0.2), 1);
  for (std::size_t k = 0; k < before.size(); ++k)
    CHECK(p.weights()[k] == doctest::Approx(before[k]).epsilon(1e-9));
}

TEST_CASE("sequential updates equal the joint batched update") {
  const RamseyControl c(2e-7, 0.3);
  auto sequential = FrequencyPosterior::uniform_grid(1.2e7, 128);
  auto batched = sequential;
  // 3 ones and 2 zeros in any order.
  sequential.update(kStock, c, 1);
  sequential.update(kStock, c, 0);
  sequential.update(kStock, c, 1);
  sequential.update(kStock, c, 1);
  sequential.update(kStock, c, 0);
  batched.update_batch(kStock, c, 3, 2);
  for (std::size_t k = 0; k < sequential.size(); ++k)
    CHECK(batched.weights()[k] ==
          doctest::Approx(sequential.weights()[k]).epsilon(1e-11));
}

TEST_CASE("weights stay normalized and nonnegative through many updates") {
  auto p = FrequencyPosterior::uniform_grid(1.2e7, 256);
  RngStream rng(4);
  for (int k = 0; k < 300; ++k) {
    const RamseyControl c(rng.uniform(1e-7, 1e-4), rng.uniform(-3.0, 3.0));
    p.update(kStock, c, rng.bernoulli(0.5) ? 1 : 0);
    CHECK(weight_sum(p) == doctest::Approx(1.0).epsilon(1e-9));
    for (double w : p.weights()) CHECK(w >= 0.0);
  }
}

TEST_CASE("all-zero likelihood raises degenerate-posterior") {
  // Perfect fidelity at the dark fringe: p0 = 0 exactly, outcome 1 is
  // impossible.
  const NvSensorModel ideal{1.0, 1.0, 1e300, kNvGamma};
  const double omega = 1.0;
  FrequencyPosterior p({omega}, {1.0});
  const RamseyControl dark(1e-6, M_PI - omega * 1e-6);
  CHECK_THROWS_AS(p.update(ideal, dark, 1), ContractError);
}

TEST_CASE("systematic resampling preserves the distribution roughly") {
  auto p = FrequencyPosterior::uniform_particles(1e6, 2e6, 2000);
  // Tilt the weights toward one side.
  const RamseyControl c(3e-6, 0.1);
  p.update(kStock, c, 1);
  p.update(kStock, c, 1);
  const double mean_before = p.mean();
  const double sd_before = p.stddev();
  RngStream rng(17);
  p.systematic_resample(rng, 0.0, 1e6, 2e6);
  CHECK(p.ess() == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(p.mean() == doctest::Approx(mean_before).epsilon(1e-3));
  CHECK(p.stddev() == doctest::Approx(sd_before).epsilon(0.05));
}

TEST_CASE("resampling jitter respects the clamp bounds") {
  auto p = FrequencyPosterior::uniform_particles(1.0, 2.0, 500);
  RngStream rng(21);
  p.systematic_resample(rng, 10.0, 1.0, 2.0);  // huge jitter, tight clamp
  for (double w : p.support()) {
    CHECK(w >= 1.0);
    CHECK(w <= 2.0);
  }
}

TEST_CASE("ess of uniform weights is the particle count") {
  const auto p = FrequencyPosterior::uniform_particles(0.5, 1.5, 800);
  CHECK(p.ess() == doctest::Approx(800.0).epsilon(1e-12));
}

TEST_CASE("pure bayes_update leaves the input untouched") {
  const auto p = FrequencyPosterior::uniform_grid(1e7, 16);
  const auto before = p.weights();
  const auto q = bayes_update(p, kStock, RamseyControl(1e-6, 0.0), 1);
  CHECK(p.weights() == before);
  CHECK(q.size() == p.size());
  CHECK(q.support() == p.support());
}
