#include "anece/barrier.hpp"

#include "anece/gradients.hpp"
#include "anece/kernels.hpp"

#include <cmath>
#include <limits>

namespace anece {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) { return kernels::active().dot(a.data(), b.data(), a.size()); }
void axpy(double alpha, const Vec& x, Vec& y) { kernels::active().axpy(alpha, x.data(), y.data(), x.size()); }

class BarrierFunction {
 public:
  BarrierFunction(const BarrierProblem& p) : p_(p) {}

  // t f(x) - sum ln psi_k(x); +inf outside the domain.
  double value(const Vec& x, double t) const {
    Vec slacks;
    if (!p_.constraints(x, slacks, nullptr)) return kInf;
    double v = t * p_.objective(x, {});
    for (double s : slacks) {
      if (!(s > 0.0)) return kInf;
      v -= std::log(s);
    }
    return std::isfinite(v) ? v : kInf;
  }

  // Gradients of f and of the barrier sum separately.
  void split_gradient(const Vec& x, Vec& objective, Vec& barrier) const {
    Vec slacks;
    std::vector<Vec> jac;
    if (!p_.constraints(x, slacks, &jac)) throw InfeasiblePoint("barrier evaluated outside the domain");
    objective.assign(x.size(), 0.0);
    barrier.assign(x.size(), 0.0);
    p_.objective(x, objective);
    for (std::size_t k = 0; k < slacks.size(); ++k) axpy(-1.0 / slacks[k], jac[k], barrier);
  }

  double value_and_gradient(const Vec& x, double t, Vec& grad) const {
    Vec slacks;
    std::vector<Vec> jac;
    if (!p_.constraints(x, slacks, &jac)) throw InfeasiblePoint("barrier evaluated outside the domain");
    grad.assign(x.size(), 0.0);
    double v = t * p_.objective(x, grad);
    for (double& g : grad) g *= t;
    for (std::size_t k = 0; k < slacks.size(); ++k) {
      if (!(slacks[k] > 0.0)) throw InfeasiblePoint("barrier evaluated outside the domain");
      v -= std::log(slacks[k]);
      axpy(-1.0 / slacks[k], jac[k], grad);
    }
    return v;
  }

  std::size_t constraint_count(const Vec& x) const {
    Vec slacks;
    p_.constraints(x, slacks, nullptr);
    return slacks.size();
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  const BarrierProblem& p_;
};

}  // namespace

void BarrierSettings::validate() const {
  if (!(t0 > 0.0)) throw ConfigError("barrier t0 must be positive");
  if (!(mu > 1.0)) throw ConfigError("barrier mu must exceed 1");
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw ConfigError("barrier tolerances must be positive");
  if (Np < 1 || max_outer < 1) throw ConfigError("barrier iteration caps must be positive");
  if (!(ls_alpha > 0.0 && ls_alpha < 0.5)) throw ConfigError("line-search alpha must lie in (0, 0.5)");
  if (!(ls_beta > 0.0 && ls_beta < 1.0)) throw ConfigError("line-search beta must lie in (0, 1)");
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_cap: return "iteration_cap";
    case SolveStatus::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

BarrierResult minimize_barrier(const BarrierProblem& problem, Vec x0, const BarrierSettings& settings) {
  settings.validate();
  if (x0.size() != problem.dimension) throw ConfigError("start point has the wrong dimension");
  const BarrierFunction g(problem);
  if (!std::isfinite(g.value(x0, settings.t0))) throw InfeasiblePoint("start point is not strictly feasible");

  BarrierResult out;
  out.x = std::move(x0);
  Vec& x = out.x;
  const auto m = static_cast<double>(g.constraint_count(x));
  auto& trace = out.trace;
  trace.status = SolveStatus::iteration_cap;

  double t = settings.t0;
  if (settings.center_t0) {
    // argmin_t ||t grad f + grad phi|| at the start point.
    Vec gf, gb;
    g.split_gradient(x, gf, gb);
    const double ff = dot(gf, gf);
    if (ff > 0.0) t = std::max(t, -dot(gf, gb) / ff);
  }
  double carried_step = 0.0;
  Vec grad;
  Vec prev_grad;
  Vec prev_x;
  Vec trial(x.size());
  for (int outer = 0; outer < settings.max_outer; ++outer) {
    OuterRecord rec;
    rec.t = t;
    double value = g.value_and_gradient(x, t, grad);
    double step = carried_step > 0.0 ? carried_step : 1.0 / std::max(std::sqrt(dot(grad, grad)), 1e-300);
    bool have_prev = false;
    for (int p = 0; p < settings.Np; ++p) {
      if (have_prev) {
        // Barzilai-Borwein trial step from the last pair of iterates.
        Vec s = x;
        axpy(-1.0, prev_x, s);
        Vec y = grad;
        axpy(-1.0, prev_grad, y);
        const double sy = dot(s, y);
        if (sy > 0.0) step = dot(s, s) / sy;
        else step *= 2.0;
      }
      const double g2 = dot(grad, grad);
      const double xnorm = std::sqrt(dot(x, x));
      const double first_step = step;
      double trial_value = BarrierFunction::kInf;
      bool accepted = false;
      while (step * std::sqrt(g2) > 1e-15 * (1.0 + xnorm)) {
        trial = x;
        axpy(-step, grad, trial);
        trial_value = g.value(trial, t);
        if (trial_value <= value - settings.ls_alpha * step * g2) {
          accepted = true;
          break;
        }
        step *= settings.ls_beta;
      }
      if (!accepted) {
        // Predicted decrease of the first trial below round-off of the value.
        if (settings.ls_alpha * first_step * g2 <= 1e-11 * (1.0 + std::abs(value))) rec.precision_limited = true;
        else rec.line_search_stalled = true;
        break;
      }
      prev_x = x;
      prev_grad = grad;
      x = trial;
      g.value_and_gradient(x, t, grad);
      // Keep the value Armijo accepted so the recorded sequence is exactly monotone.
      value = trial_value;
      rec.values.push_back(value);
      ++rec.inner_iterations;
      have_prev = true;
      Vec diff = grad;
      axpy(-1.0, prev_grad, diff);
      if (std::sqrt(dot(diff, diff)) <= settings.eps2) {
        rec.inner_converged = true;
        break;
      }
    }
    carried_step = step;
    trace.total_iterations += rec.inner_iterations;
    rec.barrier_value = value;
    rec.objective = problem.objective(x, {});
    problem.constraints(x, rec.slacks, nullptr);
    if (problem.annotate) problem.annotate(x, rec);
    const bool stalled = rec.line_search_stalled;
    trace.outer.push_back(std::move(rec));
    if (m / t < settings.eps1) {
      trace.status = stalled ? SolveStatus::line_search_failure : SolveStatus::converged;
      break;
    }
    t *= settings.mu;
  }
  return out;
}

}  // namespace anece
