#include "anece/gradients.hpp"

#include "anece/metrics.hpp"

#include <cmath>
#include <numbers>

namespace anece {
namespace {

// Gradient of sum_l Tr(W_l G_l) with G_l = c_l Phi Q_l Phi^H, Phi = S_s F,
// Psi = Sbar_(r) F and Q_l = (I + c_l Psi^H Psi)^{-1}:
//   2 c_l (S_s^T W_l Phi Q_l - c_l Sbar^T Psi Q_l Phi^H W_l Phi Q_l).
// Working with the r x r inverse avoids cancelling O(c^2) terms at high power.
CMatrix pair_gradient(const NetworkConfig& cfg, const CMatrix& F, const std::vector<CMatrix>& w_blocks,
                      int receiver, int transmitter) {
  const CMatrix phi = user_rows(cfg, F, transmitter);
  const CMatrix psi = other_rows(cfg, F, receiver);
  const CMatrix psi_gram = mul_adj_left(psi, psi);
  const CMatrix eye = CMatrix::identity(F.cols());
  const double s2 = cfg.noise(receiver);
  const auto& lam = cfg.eigenvalues(receiver);
  CMatrix own(phi.rows(), F.cols());
  CMatrix other(psi.rows(), F.cols());
  for (std::size_t l = 0; l < lam.size(); ++l) {
    const double c = lam[l] / s2;
    const CMatrix q = hermitian_part(solve_hpd(add_identity(psi_gram * c, 1.0), eye));
    const CMatrix wpq = w_blocks[l] * phi * q;
    own += wpq * (2.0 * c);
    other -= psi * (q * mul_adj_left(phi, wpq)) * (2.0 * c * c);
  }
  CMatrix out(F.rows(), F.cols());
  add_user_rows(cfg, out, own, transmitter);
  add_other_rows(cfg, out, other, receiver);
  return out;
}

void require_feasible(double slack, const char* what) {
  if (!(slack > 0.0)) throw InfeasiblePoint(what);
}

}  // namespace

GradientResult grad_user_mse(const NetworkConfig& cfg, const CMatrix& F, int i) {
  const CMatrix psi = other_rows(cfg, F, i);
  const CMatrix a = gram(psi);
  const CMatrix eye = CMatrix::identity(a.rows());
  GradientResult out{CMatrix(F.rows(), F.cols()), 0.0};
  CMatrix rows(psi.rows(), psi.cols());
  for (double lam : cfg.eigenvalues(i)) {
    const double c = lam / cfg.noise(i);
    const CMatrix m = add_identity(a * c, 1.0);
    const CMatrix once = solve_hpd(m, psi);
    const CMatrix twice = solve_hpd(m, once);
    rows -= twice * (2.0 * c);
    out.objective_value += solve_hpd(m, eye).trace().real();
  }
  add_other_rows(cfg, out.G, rows, i);
  return out;
}

GradientResult grad_J_M(const NetworkConfig& cfg, const CMatrix& F) {
  GradientResult out{CMatrix(F.rows(), F.cols()), 0.0};
  for (int i = 0; i < cfg.users(); ++i) {
    GradientResult g = grad_user_mse(cfg, F, i);
    out.G += g.G;
    out.objective_value += g.objective_value;
  }
  return out;
}

double power_slack(const NetworkConfig& cfg, const CMatrix& F, int i) {
  return cfg.budget(i) - user_power(cfg, F, i);
}

GradientResult grad_power_barrier(const NetworkConfig& cfg, const CMatrix& F, int i) {
  const double psi = power_slack(cfg, F, i);
  require_feasible(psi, "power constraint violated");
  return {power_operator(cfg, F, i) * (2.0 / psi), -std::log(psi)};
}

std::vector<CMatrix> receiver_blocks(const CMatrix& W, int ni, int nj) {
  const CMatrix t = commutation(static_cast<std::size_t>(nj), static_cast<std::size_t>(ni));
  const CMatrix swapped = mul_adj_left(t, W * t);
  std::vector<CMatrix> out;
  const auto bj = static_cast<std::size_t>(nj);
  for (std::size_t l = 0; l < static_cast<std::size_t>(ni); ++l)
    out.push_back(swapped.block(l * bj, l * bj, bj, bj));
  return out;
}

std::vector<CMatrix> receiver_blocks_indexed(const CMatrix& W, int ni, int nj) {
  std::vector<CMatrix> out;
  const auto si = static_cast<std::size_t>(ni);
  const auto sj = static_cast<std::size_t>(nj);
  for (std::size_t l = 0; l < si; ++l) {
    CMatrix b(sj, sj);
    for (std::size_t a = 0; a < sj; ++a)
      for (std::size_t c = 0; c < sj; ++c) b(a, c) = W(a * si + l, c * si + l);
    out.push_back(std::move(b));
  }
  return out;
}

GradientResult grad_pair_mi(const NetworkConfig& cfg, const CMatrix& F, int i, int j) {
  const CMatrix g = gamma(cfg, F, i, j);
  const CMatrix gt = gamma_t(cfg, F, j, i);
  const CMatrix d = CMatrix::identity(g.rows()) - g * gt;
  // W1 = Gamma_T D^{-1} and W2 = D^{-1} Gamma are Hermitian.
  const CMatrix w1 = hermitian_part(solve(d.adjoint(), gt).adjoint());
  const CMatrix w2 = hermitian_part(solve(d, g));

  const int ni = cfg.antennas(i);
  const int nj = cfg.antennas(j);
  std::vector<CMatrix> outer;
  for (int c = 0; c < nj; ++c)
    outer.push_back(w2.block(static_cast<std::size_t>(c * ni), static_cast<std::size_t>(c * ni),
                             static_cast<std::size_t>(ni), static_cast<std::size_t>(ni)));

  CMatrix g_f = pair_gradient(cfg, F, receiver_blocks(w1, ni, nj), i, j);
  g_f += pair_gradient(cfg, F, outer, j, i);
  return {g_f * (1.0 / std::numbers::ln2), std::max(0.0, -log2_abs_det(d))};
}

GradientResult grad_I_M(const NetworkConfig& cfg, const CMatrix& F) {
  GradientResult out{CMatrix(F.rows(), F.cols()), 0.0};
  for (int i = 0; i < cfg.users(); ++i)
    for (int j = i + 1; j < cfg.users(); ++j) {
      GradientResult g = grad_pair_mi(cfg, F, i, j);
      out.G += g.G;
      out.objective_value += g.objective_value;
    }
  return out;
}

FairnessGradient grad_fairness(const NetworkConfig& cfg, const CMatrix& F, double eps, double t,
                               FairnessMode mode) {
  FairnessGradient out{t, CMatrix(F.rows(), F.cols()), t * eps};
  for (int i = 0; i < cfg.users(); ++i) {
    GradientResult b = grad_power_barrier(cfg, F, i);
    out.G += b.G;
    out.objective_value += b.objective_value;
  }
  if (mode == FairnessMode::mse) {
    for (int i = 0; i < cfg.users(); ++i) {
      GradientResult m = grad_user_mse(cfg, F, i);
      const double slack = eps - m.objective_value;
      require_feasible(slack, "fairness level below a user MSE");
      out.d_eps -= 1.0 / slack;
      out.G += m.G * (1.0 / slack);
      out.objective_value -= std::log(slack);
    }
  } else {
    for (int i = 0; i < cfg.users(); ++i)
      for (int j = i + 1; j < cfg.users(); ++j) {
        GradientResult m = grad_pair_mi(cfg, F, i, j);
        const double slack = eps + m.objective_value;
        require_feasible(slack, "fairness level below a pair log-determinant");
        out.d_eps -= 1.0 / slack;
        out.G -= m.G * (1.0 / slack);
        out.objective_value -= std::log(slack);
      }
  }
  return out;
}

double fairness_objective(const NetworkConfig& cfg, const CMatrix& F, double eps, double t,
                          FairnessMode mode) {
  double v = t * eps;
  for (int i = 0; i < cfg.users(); ++i) {
    const double psi = power_slack(cfg, F, i);
    require_feasible(psi, "power constraint violated");
    v -= std::log(psi);
  }
  if (mode == FairnessMode::mse) {
    for (double m : user_mse(cfg, F).per_user) {
      require_feasible(eps - m, "fairness level below a user MSE");
      v -= std::log(eps - m);
    }
  } else {
    for (const auto& p : sum_mi(cfg, F).per_pair) {
      require_feasible(eps + p.value, "fairness level below a pair log-determinant");
      v -= std::log(eps + p.value);
    }
  }
  return v;
}

}  // namespace anece
