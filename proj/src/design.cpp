#include "anece/barrier.hpp"

#include "anece/closed_form.hpp"
#include "anece/gradients.hpp"
#include "anece/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace anece {
namespace {

using Vec = std::vector<double>;

// Real coordinates x = [Re F, Im F, (e)] with F = f_scale * X.
struct Packing {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double f_scale = 1.0;
  bool with_level = false;

  std::size_t entries() const { return rows * cols; }
  std::size_t dimension() const { return 2 * entries() + (with_level ? 1 : 0); }

  CMatrix unpack(std::span<const double> x) const {
    CMatrix F(rows, cols);
    auto v = F.values();
    for (std::size_t k = 0; k < entries(); ++k) v[k] = cplx(x[k], x[entries() + k]) * f_scale;
    return F;
  }
  Vec pack(const CMatrix& F, double level = 0.0) const {
    Vec x(dimension());
    const auto v = F.values();
    for (std::size_t k = 0; k < entries(); ++k) {
      x[k] = v[k].real() / f_scale;
      x[entries() + k] = v[k].imag() / f_scale;
    }
    if (with_level) x.back() = level;
    return x;
  }
  // Adds weight * d/dX of a function whose complex F-gradient is G.
  void add_gradient(std::span<double> grad, const CMatrix& G, double weight) const {
    const auto v = G.values();
    const double w = weight * f_scale;
    for (std::size_t k = 0; k < entries(); ++k) {
      grad[k] += w * v[k].real();
      grad[entries() + k] += w * v[k].imag();
    }
  }
};

Packing make_packing(const NetworkConfig& cfg, bool with_level) {
  double kp = 0.0;
  for (int i = 0; i < cfg.users(); ++i) kp = std::max(kp, cfg.budget(i));
  return {static_cast<std::size_t>(cfg.total_antennas()), static_cast<std::size_t>(cfg.rank()),
          std::sqrt(kp), with_level};
}

// Power constraints as slacks relative to each budget.
bool power_constraints(const NetworkConfig& cfg, const Packing& pk, const CMatrix& F, Vec& slacks,
                       std::vector<Vec>* grads) {
  for (int i = 0; i < cfg.users(); ++i) {
    const double kp = cfg.budget(i);
    const double s = power_slack(cfg, F, i) / kp;
    slacks.push_back(s);
    if (!(s > 0.0)) return false;
    if (grads) {
      Vec g(pk.dimension(), 0.0);
      pk.add_gradient(g, power_operator(cfg, F, i), -2.0 / kp);
      grads->push_back(std::move(g));
    }
  }
  return true;
}

void annotate_power(const NetworkConfig& cfg, const Packing& pk, std::span<const double> x, OuterRecord& rec) {
  const CMatrix F = pk.unpack(x);
  for (int i = 0; i < cfg.users(); ++i) rec.power_slack.push_back(power_slack(cfg, F, i));
  try {
    rec.rank = validate_anece(cfg, assemble_pilot(cfg, make_factor(cfg, F)));
  } catch (const LinalgError&) {
    rec.rank.reset();
  }
}

void finish(const NetworkConfig& cfg, DesignResult& res) {
  const RankReport rank = validate_anece(cfg, assemble_pilot(cfg, res.factor));
  res.trace.rank_collapse = !rank.ok();
  res.trace.collapsed_user = rank.degenerate_user;
}

CMatrix sum_start(const NetworkConfig& cfg, const CMatrix* start) {
  CMatrix F = start ? *start : baseline_first_factor(cfg).F;
  if (F.rows() != static_cast<std::size_t>(cfg.total_antennas()) ||
      F.cols() != static_cast<std::size_t>(cfg.rank()))
    throw ConfigError("start factor must be N_T x r");
  return scale_to_budget(cfg, std::move(F), 0.999);
}

double nonzero(double v) { return std::abs(v) > 0.0 ? std::abs(v) : 1.0; }

}  // namespace

CMatrix fairness_start(const NetworkConfig& cfg) {
  CMatrix F;
  try {
    F = dft_budget_factor(cfg).F;
  } catch (const ConfigError&) {
    F = baseline_first_factor(cfg).F;
  }
  return scale_to_budget(cfg, std::move(F), 0.999);
}

DesignResult solve_min_sum_mse(const NetworkConfig& cfg, const BarrierSettings& settings, const CMatrix* start) {
  const Packing pk = make_packing(cfg, false);
  const CMatrix F0 = sum_start(cfg, start);
  const double f_scale = nonzero(user_mse(cfg, F0).total);

  BarrierProblem prob;
  prob.dimension = pk.dimension();
  prob.objective = [&](std::span<const double> x, std::span<double> grad) {
    const CMatrix F = pk.unpack(x);
    if (grad.empty()) return user_mse(cfg, F).total / f_scale;
    const GradientResult r = grad_J_M(cfg, F);
    pk.add_gradient(grad, r.G, 1.0 / f_scale);
    return r.objective_value / f_scale;
  };
  prob.constraints = [&](std::span<const double> x, Vec& slacks, std::vector<Vec>* grads) {
    return power_constraints(cfg, pk, pk.unpack(x), slacks, grads);
  };
  prob.annotate = [&](std::span<const double> x, OuterRecord& rec) {
    rec.objective *= f_scale;
    annotate_power(cfg, pk, x, rec);
  };

  BarrierResult r = minimize_barrier(prob, pk.pack(F0), settings);
  DesignResult res{make_factor(cfg, pk.unpack(r.x)), std::move(r.trace), 0.0};
  finish(cfg, res);
  return res;
}

DesignResult solve_max_sum_mi(const NetworkConfig& cfg, const BarrierSettings& settings, const CMatrix* start) {
  const Packing pk = make_packing(cfg, false);
  const CMatrix F0 = sum_start(cfg, start);
  const double f_scale = nonzero(sum_mi(cfg, F0).total);

  BarrierProblem prob;
  prob.dimension = pk.dimension();
  prob.objective = [&](std::span<const double> x, std::span<double> grad) {
    const CMatrix F = pk.unpack(x);
    if (grad.empty()) return -sum_mi(cfg, F).total / f_scale;
    const GradientResult r = grad_I_M(cfg, F);
    pk.add_gradient(grad, r.G, -1.0 / f_scale);
    return -r.objective_value / f_scale;
  };
  prob.constraints = [&](std::span<const double> x, Vec& slacks, std::vector<Vec>* grads) {
    return power_constraints(cfg, pk, pk.unpack(x), slacks, grads);
  };
  prob.annotate = [&](std::span<const double> x, OuterRecord& rec) {
    rec.objective *= -f_scale;
    annotate_power(cfg, pk, x, rec);
  };

  BarrierResult r = minimize_barrier(prob, pk.pack(F0), settings);
  DesignResult res{make_factor(cfg, pk.unpack(r.x)), std::move(r.trace), 0.0};
  finish(cfg, res);
  return res;
}

DesignResult solve_minmax_mse(const NetworkConfig& cfg, const BarrierSettings& settings) {
  const Packing pk = make_packing(cfg, true);
  const CMatrix F0 = fairness_start(cfg);
  const auto m0 = user_mse(cfg, F0).per_user;
  const double eps0 = 1.01 * *std::max_element(m0.begin(), m0.end());
  const double e_scale = nonzero(eps0);

  BarrierProblem prob;
  prob.dimension = pk.dimension();
  prob.objective = [&](std::span<const double> x, std::span<double> grad) {
    if (!grad.empty()) grad.back() += 1.0;
    return x.back();
  };
  prob.constraints = [&](std::span<const double> x, Vec& slacks, std::vector<Vec>* grads) {
    const CMatrix F = pk.unpack(x);
    if (!power_constraints(cfg, pk, F, slacks, grads)) return false;
    for (int i = 0; i < cfg.users(); ++i) {
      if (grads) {
        const GradientResult r = grad_user_mse(cfg, F, i);
        slacks.push_back(x.back() - r.objective_value / e_scale);
        Vec g(pk.dimension(), 0.0);
        pk.add_gradient(g, r.G, -1.0 / e_scale);
        g.back() = 1.0;
        grads->push_back(std::move(g));
      }
    }
    if (!grads)
      for (double v : user_mse(cfg, F).per_user) slacks.push_back(x.back() - v / e_scale);
    return std::all_of(slacks.begin(), slacks.end(), [](double s) { return s > 0.0; });
  };
  prob.annotate = [&](std::span<const double> x, OuterRecord& rec) {
    rec.objective *= e_scale;
    annotate_power(cfg, pk, x, rec);
  };

  BarrierResult r = minimize_barrier(prob, pk.pack(F0, eps0 / e_scale), settings);
  DesignResult res{make_factor(cfg, pk.unpack(r.x)), std::move(r.trace), r.x.back() * e_scale};
  finish(cfg, res);
  return res;
}

DesignResult solve_minmax_mi(const NetworkConfig& cfg, const BarrierSettings& settings) {
  const Packing pk = make_packing(cfg, true);
  const CMatrix F0 = fairness_start(cfg);
  // The level bounds every pair log-determinant -MI_ij from above.
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : sum_mi(cfg, F0).per_pair) worst = std::max(worst, -p.value);
  const double eps0 = worst + 0.01 * std::max(std::abs(worst), 1e-12);
  const double e_scale = nonzero(eps0);

  BarrierProblem prob;
  prob.dimension = pk.dimension();
  prob.objective = [&](std::span<const double> x, std::span<double> grad) {
    if (!grad.empty()) grad.back() += 1.0;
    return x.back();
  };
  prob.constraints = [&](std::span<const double> x, Vec& slacks, std::vector<Vec>* grads) {
    const CMatrix F = pk.unpack(x);
    if (!power_constraints(cfg, pk, F, slacks, grads)) return false;
    if (grads) {
      for (int i = 0; i < cfg.users(); ++i)
        for (int j = i + 1; j < cfg.users(); ++j) {
          const GradientResult r = grad_pair_mi(cfg, F, i, j);
          slacks.push_back(x.back() + r.objective_value / e_scale);
          Vec g(pk.dimension(), 0.0);
          pk.add_gradient(g, r.G, 1.0 / e_scale);
          g.back() = 1.0;
          grads->push_back(std::move(g));
        }
    } else {
      for (const auto& p : sum_mi(cfg, F).per_pair) slacks.push_back(x.back() + p.value / e_scale);
    }
    return std::all_of(slacks.begin(), slacks.end(), [](double s) { return s > 0.0; });
  };
  prob.annotate = [&](std::span<const double> x, OuterRecord& rec) {
    rec.objective *= e_scale;
    annotate_power(cfg, pk, x, rec);
  };

  BarrierResult r = minimize_barrier(prob, pk.pack(F0, eps0 / e_scale), settings);
  DesignResult res{make_factor(cfg, pk.unpack(r.x)), std::move(r.trace), r.x.back() * e_scale};
  finish(cfg, res);
  return res;
}

}  // namespace anece
