#include "anece/two_user.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace anece {
namespace {

constexpr double kFloor = 1e-12;  // relative to the budget
constexpr int kBisections = 200;

void require_two_users(const NetworkConfig& cfg) {
  if (cfg.users() != 2) throw ConfigError("two-user solvers need M = 2");
}

// Marginal gain of stream k at load c; strictly decreasing in c.
using Marginal = std::function<double(std::size_t k, double c)>;

// Loads c_k >= floor with marginal_k(c_k) = nu for active streams and
// sum c_k = budget.
std::vector<double> fill(std::size_t n, double budget, const Marginal& marginal) {
  const double floor = kFloor * budget;
  auto load = [&](std::size_t k, double nu) {
    if (marginal(k, floor) <= nu) return floor;
    double lo = floor;
    double hi = std::max(budget, floor * 2.0);
    while (marginal(k, hi) > nu) hi *= 2.0;
    for (int it = 0; it < kBisections && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (marginal(k, mid) > nu ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto total = [&](double nu, std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += (c[k] = load(k, nu));
    return s;
  };
  std::vector<double> c(n);
  double hi = 0.0;
  for (std::size_t k = 0; k < n; ++k) hi = std::max(hi, marginal(k, floor));
  double lo = hi;
  while (total(lo, c) < budget) lo *= 0.5;
  for (int it = 0; it < kBisections && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid, c) > budget ? lo : hi) = mid;
  }
  total(0.5 * (lo + hi), c);
  // Close the residual budget gap on the active streams.
  double active = 0.0;
  double floors = 0.0;
  for (double v : c) (v > floor ? active : floors) += v;
  if (active > 0.0)
    for (double& v : c)
      if (v > floor) v *= (budget - floors) / active;
  return c;
}

// d/dx of ln((s2 + a x)(s1 + a y) / (s1 s2 + s1 a x + s2 a y)) where x is the
// load of the user whose partner noise is s2.
double mi_marginal(double a, double x, double y, double s_own, double s_other) {
  const double d = s_own * s_other + s_own * a * x + s_other * a * y;
  return s_other * a * a * y / ((s_other + a * x) * d);
}

double budget_norm(const NetworkConfig& cfg) { return std::max(cfg.budget(0), cfg.budget(1)); }

}  // namespace

PowerAllocation mse_decoupled_allocation(const NetworkConfig& cfg) {
  require_two_users(cfg);
  const auto& l1 = cfg.eigenvalues(0);
  const auto& l2 = cfg.eigenvalues(1);
  // User 2's loads only enter user 1's MSE and vice versa.
  auto marginal_for = [](const std::vector<double>& own, const std::vector<double>& rx, double s2) {
    return [&own, &rx, s2](std::size_t k, double c) {
      double g = 0.0;
      for (double lr : rx) {
        const double a = lr * own[k] / s2;
        g += a / ((1.0 + a * c) * (1.0 + a * c));
      }
      return g;
    };
  };
  PowerAllocation out;
  out.c1 = fill(l1.size(), cfg.budget(0), marginal_for(l1, l2, cfg.noise(1)));
  out.c2 = fill(l2.size(), cfg.budget(1), marginal_for(l2, l1, cfg.noise(0)));
  return out;
}

MiAllocation mi_alternating_bisection(const NetworkConfig& cfg, double tol, int max_iterations) {
  require_two_users(cfg);
  const auto& l1 = cfg.eigenvalues(0);
  const auto& l2 = cfg.eigenvalues(1);
  const double s1 = cfg.noise(0);
  const double s2 = cfg.noise(1);
  MiAllocation out;
  out.alloc = uniform_allocation(cfg);
  auto& c1 = out.alloc.c1;
  auto& c2 = out.alloc.c2;
  const double scale = budget_norm(cfg);
  for (out.iterations = 1; out.iterations <= max_iterations; ++out.iterations) {
    const auto prev1 = c1;
    const auto prev2 = c2;
    c1 = fill(l1.size(), cfg.budget(0), [&](std::size_t l, double x) {
      double g = 0.0;
      for (std::size_t k = 0; k < l2.size(); ++k) g += mi_marginal(l1[l] * l2[k], x, c2[k], s1, s2);
      return g;
    });
    c2 = fill(l2.size(), cfg.budget(1), [&](std::size_t k, double y) {
      double g = 0.0;
      for (std::size_t l = 0; l < l1.size(); ++l) g += mi_marginal(l1[l] * l2[k], y, c1[l], s2, s1);
      return g;
    });
    out.history.push_back(two_user_objective(cfg, out.alloc).I2);
    double step = 0.0;
    for (std::size_t l = 0; l < c1.size(); ++l) step += (c1[l] - prev1[l]) * (c1[l] - prev1[l]);
    for (std::size_t k = 0; k < c2.size(); ++k) step += (c2[k] - prev2[k]) * (c2[k] - prev2[k]);
    if (std::sqrt(step) <= tol * scale) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, max_iterations);
  out.I2 = two_user_objective(cfg, out.alloc).I2;
  return out;
}

TwoUserObjective two_user_objective(const NetworkConfig& cfg, const PowerAllocation& alloc) {
  require_two_users(cfg);
  const auto& l1 = cfg.eigenvalues(0);
  const auto& l2 = cfg.eigenvalues(1);
  const double s1 = cfg.noise(0);
  const double s2 = cfg.noise(1);
  TwoUserObjective out;
  for (std::size_t l = 0; l < l1.size(); ++l)
    for (std::size_t k = 0; k < l2.size(); ++k) {
      const double a = l1[l] * l2[k];
      const double x = alloc.c1.at(l);
      const double y = alloc.c2.at(k);
      out.J2 += 1.0 / (1.0 + a * y / s1) + 1.0 / (1.0 + a * x / s2);
      out.I2 += std::log2((s2 + a * x) * (s1 + a * y) / (s1 * s2 + s1 * a * x + s2 * a * y));
    }
  return out;
}

PilotFactor assemble_two_user_pilot(const NetworkConfig& cfg, const PowerAllocation& alloc) {
  require_two_users(cfg);
  if (cfg.rank() < std::max(cfg.antennas(0), cfg.antennas(1)))
    throw ConfigError("two-user pilots need r >= max(N_1, N_2)");
  CMatrix F(static_cast<std::size_t>(cfg.total_antennas()), static_cast<std::size_t>(cfg.rank()));
  for (int i = 0; i < 2; ++i) {
    const auto& c = i == 0 ? alloc.c1 : alloc.c2;
    const auto& lam = cfg.eigenvalues(i);
    for (std::size_t l = 0; l < lam.size(); ++l)
      F(static_cast<std::size_t>(cfg.offset(i)) + l, l) = std::sqrt(std::max(c.at(l), 0.0) * lam[l]);
  }
  return make_factor(cfg, std::move(F));
}

bool convex_regime(const NetworkConfig& cfg, const PowerAllocation& alloc) {
  require_two_users(cfg);
  const auto& l1 = cfg.eigenvalues(0);
  const auto& l2 = cfg.eigenvalues(1);
  const double rhs = cfg.noise(0) * cfg.noise(1) / 2.0;
  for (std::size_t l = 0; l < l1.size(); ++l)
    for (std::size_t k = 0; k < l2.size(); ++k) {
      const double a = l1[l] * l2[k];
      if (alloc.c1.at(l) * alloc.c2.at(k) * a * a < rhs) return false;
    }
  return true;
}

PowerAllocation uniform_allocation(const NetworkConfig& cfg) {
  require_two_users(cfg);
  return {std::vector<double>(static_cast<std::size_t>(cfg.antennas(0)), cfg.budget(0) / cfg.antennas(0)),
          std::vector<double>(static_cast<std::size_t>(cfg.antennas(1)), cfg.budget(1) / cfg.antennas(1))};
}

PowerAllocation single_stream_allocation(const NetworkConfig& cfg) {
  require_two_users(cfg);
  PowerAllocation out;
  for (int i = 0; i < 2; ++i) {
    const double kp = cfg.budget(i);
    const auto n = static_cast<std::size_t>(cfg.antennas(i));
    std::vector<double> c(n, kFloor * kp);
    c[0] = kp - kFloor * kp * static_cast<double>(n - 1);
    (i == 0 ? out.c1 : out.c2) = std::move(c);
  }
  return out;
}

}  // namespace anece
