#include "anece/gradients.hpp"
#include "anece/metrics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace anece;
using namespace anece::testing;

namespace {

CMatrix zero_factor(const NetworkConfig& cfg) {
  return CMatrix(static_cast<std::size_t>(cfg.total_antennas()), static_cast<std::size_t>(cfg.rank()));
}

double barrier_sum(const NetworkConfig& cfg, const CMatrix& x) {
  double v = 0.0;
  for (int i = 0; i < cfg.users(); ++i) v -= std::log(power_slack(cfg, x, i));
  return v;
}

}  // namespace

TEST_SUITE("gradients") {
  TEST_CASE("gradients vanish at zero pilots") {
    const NetworkConfig cfg = symmetric_config(3, 2, 10.0);
    const CMatrix z = zero_factor(cfg);
    CHECK(grad_J_M(cfg, z).G.norm() == 0.0);
    CHECK(grad_I_M(cfg, z).G.norm() == 0.0);
    CHECK(grad_power_barrier(cfg, z, 1).G.norm() == 0.0);
  }

  TEST_CASE("finite-difference agreement on heterogeneous networks") {
    Rng rng(50);
    for (int trial = 0; trial < 6; ++trial) {
      const NetworkConfig cfg = random_config(rng, 2 + trial % 2, 2);
      const CMatrix f = random_feasible(rng, cfg, 0.7);
      for (int i = 0; i < cfg.users(); ++i) {
        const GradientResult g = grad_user_mse(cfg, f, i);
        CHECK(g.objective_value == doctest::Approx(user_mse(cfg, f).per_user[static_cast<std::size_t>(i)]));
        CHECK(relative_error(g.G, fd_gradient([&](const CMatrix& x) {
                               return user_mse(cfg, x).per_user[static_cast<std::size_t>(i)];
                             }, f)) < 1e-5);
      }
      const GradientResult gi = grad_I_M(cfg, f);
      CHECK(gi.objective_value == doctest::Approx(sum_mi(cfg, f).total).epsilon(1e-12));
      CHECK(relative_error(gi.G, fd_gradient([&](const CMatrix& x) { return sum_mi(cfg, x).total; }, f)) < 1e-4);
      CMatrix gb(f.rows(), f.cols());
      for (int i = 0; i < cfg.users(); ++i) gb += grad_power_barrier(cfg, f, i).G;
      CHECK(relative_error(gb, fd_gradient([&](const CMatrix& x) { return barrier_sum(cfg, x); }, f)) < 1e-5);
    }
  }

  TEST_CASE("MI gradient stays accurate at high power") {
    const NetworkConfig cfg = symmetric_config(3, 2, 50.0, 0.5);
    Rng rng(51);
    const CMatrix f = random_feasible(rng, cfg, 0.9);
    const double scale = std::sqrt(cfg.budget(0));
    // Differentiate in normalized units so the step is relative to |F|.
    const CMatrix g = grad_I_M(cfg, f).G * scale;
    const CMatrix ref = fd_gradient([&](const CMatrix& x) { return sum_mi(cfg, x * scale).total; }, f * (1.0 / scale), 1e-5);
    CHECK(relative_error(g, ref) < 1e-4);
  }

  TEST_CASE("power barrier near and beyond the boundary") {
    const NetworkConfig cfg = symmetric_config(2, 2, 10.0);
    Rng rng(52);
    const CMatrix dir = random_feasible(rng, cfg, 1.0);
    double previous = 0.0;
    for (double fill : {0.9, 0.99, 0.999, 0.9999}) {
      const double n = grad_power_barrier(cfg, dir * std::sqrt(fill), 0).G.norm();
      CHECK(n > previous);
      previous = n;
    }
    CHECK(previous > 1e3);
    CHECK_THROWS_AS(grad_power_barrier(cfg, dir * 1.01, 0), InfeasiblePoint);
  }

  TEST_CASE("receiver block extraction paths agree") {
    Rng rng(53);
    for (auto [ni, nj] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 2}, std::pair{4, 4}}) {
      const auto n = static_cast<std::size_t>(ni * nj);
      const CMatrix w = random_matrix(rng, n, n);
      const auto a = receiver_blocks(w, ni, nj);
      const auto b = receiver_blocks_indexed(w, ni, nj);
      REQUIRE(a.size() == b.size());
      for (std::size_t l = 0; l < a.size(); ++l) CHECK(max_abs_diff(a[l], b[l]) < 1e-12);
    }
    const NetworkConfig cfg = random_config(rng, 3, 3);
    const CMatrix f = random_feasible(rng, cfg);
    const auto blocks = receiver_blocks(gamma(cfg, f, 0, 2), cfg.antennas(0), cfg.antennas(2));
    const auto direct = gamma_blocks(cfg, f, 0, 2);
    for (std::size_t l = 0; l < blocks.size(); ++l) CHECK(max_abs_diff(blocks[l], direct[l]) < 1e-14);
  }

  TEST_CASE("fairness gradient") {
    const NetworkConfig cfg = symmetric_config(3, 1, 10.0, 0.0, 0.5);
    Rng rng(54);
    const CMatrix f = random_feasible(rng, cfg, 0.8);
    const auto mse = user_mse(cfg, f).per_user;
    const double t = 2.0;

    const double big = 1e6;
    const FairnessGradient far = grad_fairness(cfg, f, big, t, FairnessMode::mse);
    CHECK(far.d_eps == doctest::Approx(t - 3.0 / big).epsilon(1e-9));

    const double max_mse = *std::max_element(mse.begin(), mse.end());
    const double tight = max_mse + 1e-6;
    const FairnessGradient near = grad_fairness(cfg, f, tight, t, FairnessMode::mse);
    CHECK(near.d_eps == doctest::Approx(-1e6).epsilon(1e-3));

    double worst_mi = 1e300;
    for (const auto& p : sum_mi(cfg, f).per_pair) worst_mi = std::min(worst_mi, p.value);
    for (auto mode : {FairnessMode::mse, FairnessMode::mi}) {
      const double eps = mode == FairnessMode::mse ? 1.5 * max_mse : -0.5 * worst_mi;
      const FairnessGradient g = grad_fairness(cfg, f, eps, t, mode);
      CHECK(g.objective_value == doctest::Approx(fairness_objective(cfg, f, eps, t, mode)).epsilon(1e-12));
      CHECK(relative_error(g.G, fd_gradient([&](const CMatrix& x) { return fairness_objective(cfg, x, eps, t, mode); },
                                            f)) < (mode == FairnessMode::mse ? 1e-5 : 1e-4));
      const double d = fd_derivative([&](double e) { return fairness_objective(cfg, f, e, t, mode); }, eps);
      CHECK(g.d_eps == doctest::Approx(d).epsilon(1e-6));
    }
    CHECK_THROWS_AS(grad_fairness(cfg, f, 0.5 * max_mse, t, FairnessMode::mse), InfeasiblePoint);
    CHECK_THROWS_AS(grad_fairness(cfg, f, -2.0 * worst_mi, t, FairnessMode::mi), InfeasiblePoint);
  }

  TEST_CASE("small gradient steps descend") {
    Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
      const NetworkConfig cfg = random_config(rng, 3, 2);
      const CMatrix f = random_feasible(rng, cfg, 0.5);
      const double t = 1.0;
      auto g1 = [&](const CMatrix& x) { return t * user_mse(cfg, x).total + barrier_sum(cfg, x); };
      auto g2 = [&](const CMatrix& x) { return -t * sum_mi(cfg, x).total + barrier_sum(cfg, x); };
      CMatrix d1 = grad_J_M(cfg, f).G * t;
      CMatrix d2 = grad_I_M(cfg, f).G * (-t);
      for (int i = 0; i < cfg.users(); ++i) {
        const CMatrix b = grad_power_barrier(cfg, f, i).G;
        d1 += b;
        d2 += b;
      }
      const double step1 = 1e-4 * f.norm() / d1.norm();
      const double step2 = 1e-4 * f.norm() / d2.norm();
      CHECK(g1(f - d1 * step1) < g1(f));
      CHECK(g2(f - d2 * step2) < g2(f));
    }
  }
}
