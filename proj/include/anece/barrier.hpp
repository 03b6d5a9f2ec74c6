#pragma once

#include "anece/model.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace anece {

struct BarrierSettings {
  double t0 = 1.0;
  double mu = 10.0;
  double eps1 = 1e-6;  // outer stop: m / t < eps1
  double eps2 = 1e-6;  // inner stop: ||grad g_p - grad g_{p-1}|| <= eps2
  int Np = 500;
  double ls_alpha = 0.3;
  double ls_beta = 0.5;
  int max_outer = 64;
  // Raise t0 to the central-path weight closest to the start point.
  bool center_t0 = true;

  void validate() const;
};

enum class SolveStatus { converged, iteration_cap, line_search_failure };
std::string_view to_string(SolveStatus s);

struct OuterRecord {
  double t = 0.0;
  double objective = 0.0;      // unscaled objective at the end of the inner loop
  double barrier_value = 0.0;  // t f + sum -ln psi in solver units
  int inner_iterations = 0;
  bool inner_converged = false;
  bool line_search_stalled = false;
  bool precision_limited = false;  // inner loop ended at round-off level
  std::vector<double> slacks;       // solver-unit slacks
  std::vector<double> power_slack;  // K P_i - Tr(P_i P_i^H)
  std::vector<double> values;       // barrier value after every accepted step
  std::optional<RankReport> rank;
};

struct SolveTrace {
  std::vector<OuterRecord> outer;
  SolveStatus status = SolveStatus::converged;
  int total_iterations = 0;
  bool rank_collapse = false;
  int collapsed_user = -1;
};

// Smooth objective f on R^n with constraints psi_k(x) > 0.
struct BarrierProblem {
  std::size_t dimension = 0;
  // f(x); fills grad when non-empty.
  std::function<double(std::span<const double> x, std::span<double> grad)> objective;
  // Writes psi_k(x) into slacks; when grads is non-null also fills one gradient
  // per constraint. Returns false when the point is outside the domain.
  std::function<bool(std::span<const double> x, std::vector<double>& slacks,
                     std::vector<std::vector<double>>* grads)>
      constraints;
  // Optional: turns solver objective units back into problem units and
  // annotates the outer record.
  std::function<void(std::span<const double> x, OuterRecord& rec)> annotate;
};

struct BarrierResult {
  std::vector<double> x;
  SolveTrace trace;
};

// Log-barrier gradient descent with backtracking. Throws InfeasiblePoint when
// x0 is not strictly feasible.
BarrierResult minimize_barrier(const BarrierProblem& problem, std::vector<double> x0,
                               const BarrierSettings& settings);

struct DesignResult {
  PilotFactor factor;
  SolveTrace trace;
  double eps = 0.0;  // fairness level for the min-max solvers
};

DesignResult solve_min_sum_mse(const NetworkConfig& cfg, const BarrierSettings& settings = {},
                               const CMatrix* start = nullptr);
DesignResult solve_max_sum_mi(const NetworkConfig& cfg, const BarrierSettings& settings = {},
                              const CMatrix* start = nullptr);
DesignResult solve_minmax_mse(const NetworkConfig& cfg, const BarrierSettings& settings = {});
DesignResult solve_minmax_mi(const NetworkConfig& cfg, const BarrierSettings& settings = {});

// Starting point used by the fairness solvers: sqrt(D) Qbar_m when the shape
// allows it, the baseline DFT factor otherwise.
CMatrix fairness_start(const NetworkConfig& cfg);

}  // namespace anece
