#pragma once

#include "anece/model.hpp"

#include <vector>

namespace anece {

// Per-eigenmode pilot energies c_{i,l} = lambda_{i,l}^2 / lambda~_{i,l} for M = 2.
struct PowerAllocation {
  std::vector<double> c1;
  std::vector<double> c2;
};

PowerAllocation mse_decoupled_allocation(const NetworkConfig& cfg);

struct MiAllocation {
  PowerAllocation alloc;
  double I2 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // I2 after each outer iteration
};
// Alternates exact maximization over c1 and c2, starting from uniform power,
// until the step norm falls below tol * max(K P_1, K P_2).
MiAllocation mi_alternating_bisection(const NetworkConfig& cfg, double tol = 1e-10,
                                      int max_iterations = 10000);

struct TwoUserObjective {
  double J2 = 0.0;
  double I2 = 0.0;
};
TwoUserObjective two_user_objective(const NetworkConfig& cfg, const PowerAllocation& alloc);

// S_1 F = [diag(sqrt(c1 * lambda~_1)), 0], S_2 F likewise.
PilotFactor assemble_two_user_pilot(const NetworkConfig& cfg, const PowerAllocation& alloc);

// c1_l c2_k >= sigma_1^2 sigma_2^2 / (2 lambda~_1l^2 lambda~_2k^2) for every (l, k).
bool convex_regime(const NetworkConfig& cfg, const PowerAllocation& alloc);

// Reference allocations for the two asymptotic regimes.
PowerAllocation uniform_allocation(const NetworkConfig& cfg);
PowerAllocation single_stream_allocation(const NetworkConfig& cfg);

}  // namespace anece
