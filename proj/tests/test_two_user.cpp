#include "anece/metrics.hpp"
#include "anece/two_user.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace anece;
using namespace anece::testing;

namespace {

NetworkConfig correlated_pair(double kp_db, double rho, int n = 3) {
  return symmetric_config(2, n, kp_db, rho);
}

NetworkConfig random_pair(Rng& rng) {
  std::vector<UserSpec> users(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : users) {
    s.antennas = 3;
    s.power = 1.0 + 10.0 * u(rng);
    s.noise_var = 0.3 + u(rng);
    s.correlation = random_correlation(rng, 3);
  }
  return NetworkConfig(std::move(users), 3, 3);
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

bool descending(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] * (1.0 + 1e-12)) return false;
  return true;
}

// Random point on the budget simplex of each user.
PowerAllocation random_allocation(Rng& rng, const NetworkConfig& cfg) {
  std::exponential_distribution<double> e(1.0);
  PowerAllocation a;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> c(static_cast<std::size_t>(cfg.antennas(i)));
    for (auto& v : c) v = e(rng);
    const double s = sum(c);
    for (auto& v : c) v *= cfg.budget(i) / s;
    (i == 0 ? a.c1 : a.c2) = std::move(c);
  }
  return a;
}

}  // namespace

TEST_SUITE("two_user") {
  TEST_CASE("decoupled MSE allocation") {
    const NetworkConfig iso = correlated_pair(20.0, 0.0);
    const PowerAllocation u = mse_decoupled_allocation(iso);
    for (double c : u.c1) CHECK(c == doctest::Approx(iso.budget(0) / 3.0).epsilon(1e-9));
    for (double c : u.c2) CHECK(c == doctest::Approx(iso.budget(1) / 3.0).epsilon(1e-9));

    const NetworkConfig single = symmetric_config(2, 1, 10.0);
    const PowerAllocation s = mse_decoupled_allocation(single);
    CHECK(s.c1[0] == doctest::Approx(single.budget(0)));
    CHECK(s.c2[0] == doctest::Approx(single.budget(1)));

    Rng rng(70);
    for (int trial = 0; trial < 3; ++trial) {
      const NetworkConfig cfg = random_pair(rng);
      const PowerAllocation best = mse_decoupled_allocation(cfg);
      // Per-stream MSE loads need not be descending: the optimal load
      // (sqrt(a / nu) - 1) / a is not monotone in the stream gain a.
      CHECK(std::abs(sum(best.c1) - cfg.budget(0)) <= 1e-8 * cfg.budget(0));
      CHECK(std::abs(sum(best.c2) - cfg.budget(1)) <= 1e-8 * cfg.budget(1));
      const double j = two_user_objective(cfg, best).J2;
      CHECK(j <= two_user_objective(cfg, uniform_allocation(cfg)).J2 * (1.0 + 1e-12));
      for (int k = 0; k < 100; ++k) CHECK(j <= two_user_objective(cfg, random_allocation(rng, cfg)).J2 * (1.0 + 1e-12));
    }
  }

  TEST_CASE("alternating MI allocation") {
    const NetworkConfig iso = correlated_pair(10.0, 0.0);
    const MiAllocation u = mi_alternating_bisection(iso);
    CHECK(u.converged);
    for (double c : u.alloc.c1) CHECK(c == doctest::Approx(iso.budget(0) / 3.0).epsilon(1e-8));

    Rng rng(71);
    for (int trial = 0; trial < 3; ++trial) {
      const NetworkConfig cfg = random_pair(rng);
      const MiAllocation a = mi_alternating_bisection(cfg);
      CHECK(a.converged);
      CHECK(descending(a.alloc.c1));
      CHECK(descending(a.alloc.c2));
      CHECK(std::abs(sum(a.alloc.c1) - cfg.budget(0)) <= 1e-8 * cfg.budget(0));
      CHECK(std::abs(sum(a.alloc.c2) - cfg.budget(1)) <= 1e-8 * cfg.budget(1));
      for (std::size_t k = 1; k < a.history.size(); ++k) CHECK(a.history[k] >= a.history[k - 1] - 1e-12 * a.history[k]);
      CHECK(a.I2 >= two_user_objective(cfg, uniform_allocation(cfg)).I2 - 1e-12);
      for (int k = 0; k < 50; ++k) CHECK(a.I2 >= two_user_objective(cfg, random_allocation(rng, cfg)).I2 - 1e-12);
    }
    const MiAllocation capped = mi_alternating_bisection(correlated_pair(10.0, 0.8), 1e-300, 2);
    CHECK_FALSE(capped.converged);
    CHECK(capped.iterations == 2);
  }

  TEST_CASE("power regimes") {
    const NetworkConfig low = correlated_pair(-30.0, 0.8);
    const MiAllocation a = mi_alternating_bisection(low);
    CHECK(a.alloc.c1[0] > 0.99 * low.budget(0));
    CHECK(a.alloc.c2[0] > 0.99 * low.budget(1));
    CHECK_FALSE(convex_regime(low, a.alloc));

    const NetworkConfig high = correlated_pair(70.0, 0.8);
    const MiAllocation b = mi_alternating_bisection(high);
    const double mean = high.budget(0) / 3.0;
    for (double c : b.alloc.c1) CHECK(std::abs(c - mean) < 0.01 * mean);
    CHECK(convex_regime(high, b.alloc));

    const PowerAllocation s = single_stream_allocation(high);
    CHECK(sum(s.c1) == doctest::Approx(high.budget(0)));
    CHECK(s.c1[1] < 1e-11 * high.budget(0));
  }

  TEST_CASE("objective values") {
    const NetworkConfig cfg = symmetric_config(2, 2, 10.0);
    const TwoUserObjective zero = two_user_objective(cfg, {{0.0, 0.0}, {0.0, 0.0}});
    CHECK(zero.J2 == doctest::Approx(2.0 * 2.0 * 2.0));
    CHECK(zero.I2 == 0.0);

    const NetworkConfig scalar = symmetric_config(2, 1, 10.0);
    const double kp = scalar.budget(0);
    const TwoUserObjective v = two_user_objective(scalar, {{kp}, {kp}});
    CHECK(v.I2 == doctest::Approx(std::log2((1.0 + kp) * (1.0 + kp) / (1.0 + 2.0 * kp))));
  }

  TEST_CASE("assembled pilots reproduce the scalar objectives") {
    Rng rng(72);
    for (int trial = 0; trial < 5; ++trial) {
      const NetworkConfig cfg = random_pair(rng);
      const PowerAllocation a = random_allocation(rng, cfg);
      const PilotFactor pf = assemble_two_user_pilot(cfg, a);
      const TwoUserObjective o = two_user_objective(cfg, a);
      CHECK(user_mse(cfg, pf.F).total == doctest::Approx(o.J2).epsilon(1e-9));
      CHECK(pairwise_mi(cfg, pf.F, 0, 1) == doctest::Approx(o.I2).epsilon(1e-9));
      CHECK(user_power(cfg, pf.F, 0) == doctest::Approx(cfg.budget(0)).epsilon(1e-12));
      CHECK(user_power(cfg, pf.F, 1) == doctest::Approx(cfg.budget(1)).epsilon(1e-12));
    }
    const NetworkConfig iso = symmetric_config(2, 2, 20.0);
    const PilotFactor uni = assemble_two_user_pilot(iso, uniform_allocation(iso));
    CHECK(user_mse(iso, uni.F).total == doctest::Approx(two_user_objective(iso, uniform_allocation(iso)).J2));

    CHECK_THROWS_AS(mse_decoupled_allocation(symmetric_config(3, 1, 0.0)), ConfigError);
  }
}
