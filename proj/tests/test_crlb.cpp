#include <doctest.h>

#include <cmath>

#include "magloc/crlb.hpp"
#include "magloc/errors.hpp"
#include "magloc/rng.hpp"

using namespace magloc;

namespace {
const NvSensorModel kStock{0.88, 0.98, 1.5e-3, kNvGamma};
const NvSensorModel kPerfect{1.0, 1.0, 1.5e-3, kNvGamma};
}  // namespace

TEST_CASE("fisher_max closed form") {
  SUBCASE("perfect fidelity, short tau is ~tau^2") {
    const double tau = 1e-6;
    const double f = fisher_max(kPerfect, tau);
    CHECK(f == doctest::Approx(tau * tau).epsilon(1e-6));
  }

  SUBCASE("stock parameters at tau = 1 us") {
    // Direct evaluation: 1e-12 * 0.86^2 / 0.99 * exp(-2 (1/1500)^2).
    const double expected =
        1e-12 * (0.86 * 0.86 / 0.99) * std::exp(-2.0 * (1.0 / 1500.0) * (1.0 / 1500.0));
    const double f = fisher_max(kStock, 1e-6);
    CHECK(f == doctest::Approx(expected).epsilon(1e-14));
    CHECK(f == doctest::Approx(7.4707e-13).epsilon(1e-4));
  }

  SUBCASE("vanishes as tau -> 0") {
    CHECK(fisher_max(kStock, 1e-12) < 1e-23);
  }
}

TEST_CASE("quantum_crlb_omega is the reciprocal bound") {
  RngStream rng(5);
  for (int k = 0; k < 50; ++k) {
    const double tau = rng.uniform(1e-7, 2e-3);
    CHECK(quantum_crlb_omega(kStock, tau) * fisher_max(kStock, tau) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("perfect fidelity at tau = T2* equals e^2 / tau^2") {
    const double tau = kPerfect.t2_star;
    CHECK(quantum_crlb_omega(kPerfect, tau) ==
          doctest::Approx(std::exp(2.0) / (tau * tau)).epsilon(1e-12));
  }

  SUBCASE("strictly decreasing in beta at fixed fidelity imbalance") {
    // F0 - F1 = -0.1 held fixed while the contrast grows.
    double previous = 1e300;
    for (double mid : {0.80, 0.84, 0.88, 0.92}) {
      const NvSensorModel m{mid - 0.05, mid + 0.05, 1.5e-3, kNvGamma};
      const double bound = quantum_crlb_omega(m, 1e-5);
      CHECK(bound < previous);
      previous = bound;
    }
  }
}

TEST_CASE("budgeted field bound") {
  SUBCASE("single shot, perfect fidelity, short tau") {
    const double tau = 1e-6;
    const BudgetedCrlbPoint p = quantum_crlb_field(kPerfect, tau, tau);
    CHECK(p.shots == 1);
    CHECK(p.variance_b ==
          doctest::Approx(1.0 / (kNvGamma * kNvGamma * tau * tau)).epsilon(1e-6));
  }

  SUBCASE("doubling the budget halves the bound at fixed tau") {
    const double tau = 1.0 / 1024.0;  // divides the budgets exactly
    const BudgetedCrlbPoint a = quantum_crlb_field(kStock, tau, 1.0);
    const BudgetedCrlbPoint b = quantum_crlb_field(kStock, tau, 2.0);
    CHECK(b.variance_b == doctest::Approx(a.variance_b / 2.0).epsilon(1e-12));
  }

  SUBCASE("grid minimizer sits at T2*/2") {
    const auto grid = log_spaced_grid(1e-6, 1.4e-3, 200);
    double best_tau = 0.0, best_var = 1e300;
    for (double tau : grid) {
      const double v = quantum_crlb_field(kStock, tau, 1.5).variance_b;
      if (v < best_var) {
        best_var = v;
        best_tau = tau;
      }
    }
    const double target = kStock.t2_star / 2.0;
    const double step = grid[1] / grid[0];
    CHECK(best_tau / target < step);
    CHECK(target / best_tau < step);
  }

  SUBCASE("tau beyond the budget is rejected") {
    CHECK_THROWS_AS(quantum_crlb_field(kStock, 2.0, 1.0), ContractError);
  }
}

TEST_CASE("budgeted curve is unimodal under the continuous-shots relaxation") {
  const auto grid = log_spaced_grid(1e-6, 1.4e-3, 2000);
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    v[k] = quantum_crlb_omega(kStock, grid[k]) * grid[k] / 1.5;  // / (T/tau)
  int local_minima = 0;
  for (std::size_t k = 2; k < v.size(); ++k) {
    const bool was_down = v[k - 1] < v[k - 2];
    const bool now_up = v[k] > v[k - 1];
    if (was_down && now_up) ++local_minima;
  }
  CHECK(local_minima == 1);
}

TEST_CASE("classical bound") {
  CHECK(classical_crlb({1e-9}) == 1e-18);  // 1 nT -> 1 nT^2
  CHECK(classical_crlb({0.5}) == 0.25);
  CHECK_THROWS_AS(classical_crlb({0.0}), ContractError);
  CHECK_THROWS_AS(classical_crlb({-1.0}), ContractError);

  SUBCASE("Fisher information times the bound is 1") {
    RngStream rng(8);
    for (int k = 0; k < 100; ++k) {
      const double sigma = rng.uniform(1e-10, 1e-6);
      const double fisher = 1.0 / (sigma * sigma);
      CHECK(fisher * classical_crlb({sigma}) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("scale covariance") {
    RngStream rng(9);
    for (int k = 0; k < 50; ++k) {
      const double sigma = rng.uniform(1e-10, 1e-6);
      const double c = rng.uniform(0.1, 10.0);
      CHECK(classical_crlb({c * sigma}) ==
            doctest::Approx(c * c * classical_crlb({sigma})).epsilon(1e-12));
    }
  }
}

TEST_CASE("Fisher information assembled from likelihood primitives") {
  RngStream rng(13);

  SUBCASE("closed form equals the general expression at the optimal phase") {
    for (int k = 0; k < 100; ++k) {
      const double tau = rng.uniform(1e-6, 1.3e-3);
      const double omega = rng.uniform(1e5, 1.2e7);
      const RamseyControl c(tau, M_PI / 2.0 - omega * tau);
      CHECK(fisher_info(kStock, c, omega) ==
            doctest::Approx(fisher_max(kStock, tau)).epsilon(1e-10));
    }
  }

  SUBCASE("general phase matches (dp0/dw)^2 / (p0 (1-p0))") {
    for (int k = 0; k < 200; ++k) {
      const double tau = rng.uniform(1e-6, 1.3e-3);
      const double omega = rng.uniform(1e5, 1.2e7);
      const RamseyControl c(tau, rng.uniform(-3.0, 3.0));
      const double p0 = outcome_probability(kStock, c, omega);
      const double dp = dp0_domega(kStock, c, omega);
      const double assembled = dp * dp / (p0 * (1.0 - p0));
      CHECK(fisher_info(kStock, c, omega) ==
            doctest::Approx(assembled).epsilon(1e-10));
    }
  }
}

TEST_CASE("advantage windows") {
  const auto grid = log_spaced_grid(1e-6, 1.4e-3, 120);
  double min_var = 1e300;
  for (double tau : grid)
    min_var = std::min(min_var, quantum_crlb_field(kStock, tau, 1.5).variance_b);

  SUBCASE("no crossing gives an empty list") {
    const double sigma = std::sqrt(min_var) / 10.0;
    CHECK(advantage_window(kStock, sigma, 1.5, grid).empty());
  }

  SUBCASE("a beatable classical sensor produces a window containing T2*/2") {
    const double sigma = std::sqrt(10.0 * min_var);
    const auto windows = advantage_window(kStock, sigma, 1.5, grid);
    REQUIRE(!windows.empty());
    bool covers_optimum = false;
    for (const auto& [lo, hi] : windows)
      if (lo <= kStock.t2_star / 2.0 && kStock.t2_star / 2.0 <= hi) covers_optimum = true;
    CHECK(covers_optimum);
  }

  SUBCASE("an arbitrarily noisy classical sensor yields one full-grid window") {
    const auto windows = advantage_window(kStock, 1.0, 1.5, grid);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].first == grid.front());
    CHECK(windows[0].second == grid.back());
  }

  SUBCASE("empty grid is rejected") {
    CHECK_THROWS_AS(advantage_window(kStock, 1e-9, 1.5, {}), ContractError);
  }
}
