#include "anece/closed_form.hpp"

#include "anece/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anece {

CMatrix dft_matrix(int n) {
  if (n < 1) throw ConfigError("DFT size must be >= 1");
  CMatrix q(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // Reduce the exponent first so large products keep full phase accuracy.
      const long e = (static_cast<long>(a) * b) % n;
      q(a, b) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(e) / n);
    }
  return q;
}

QmSplit qm_split(int users, int antennas, int m) {
  if (users < 2 || antennas < 1) throw ConfigError("qm_split needs M >= 2 and N >= 1");
  if (m < 0 || m >= users) throw ConfigError("closed-form index m must lie in [0, M-1]");
  const CMatrix q = dft_matrix(users * antennas);
  const auto rows = q.rows();
  QmSplit s{CMatrix(rows, static_cast<std::size_t>(antennas)),
            CMatrix(rows, static_cast<std::size_t>((users - 1) * antennas))};
  std::size_t in = 0;
  std::size_t out = 0;
  for (int c = 0; c < users * antennas; ++c) {
    const CMatrix column = q.cols_range(static_cast<std::size_t>(c), 1);
    if (c % users == m)
      s.Qm.set_block(0, in++, column);
    else
      s.Qbar.set_block(0, out++, column);
  }
  return s;
}

ClosedFormContext closed_form_context(const NetworkConfig& cfg, int m) {
  if (!cfg.symmetric_isotropic()) throw ConfigError("closed form requires a symmetric isotropic network");
  const double M = cfg.users();
  const double N = cfg.antennas(0);
  const double s2 = cfg.noise(0);
  ClosedFormContext c;
  c.m = m;
  c.alpha_d = cfg.budget(0) / (N * N * (M - 1.0));
  const double a = c.alpha_d / s2;
  const double na = N * a;
  const double big = 1.0 + M * na;
  c.beta = (2.0 * na * (1.0 + na) + na * na * (M - 1.0)) / ((1.0 + na) * (1.0 + na));
  c.Gamma = (a * M * N - na / (1.0 + na)) / big;
  c.mu_mse = N * (M - 1.0 + c.beta) / (big * big * s2);
  // Every pair block equals Gamma I, so I_M = -(M(M-1)/2) N^2 log2(1 - Gamma^2)
  // and grad I_M = 2 mu F follows from scaling F, with mu = Gamma Gamma' / ((1 - Gamma^2) ln 2).
  const double u = a * M * N - na / (1.0 + na);
  const double du = M * N - N / ((1.0 + na) * (1.0 + na));
  const double dgamma = (du * big - u * M * N) / (big * big);
  c.mu_mi = c.Gamma * dgamma / ((1.0 - c.Gamma * c.Gamma) * std::numbers::ln2 * s2);
  return c;
}

PilotFactor closed_form_factor(const NetworkConfig& cfg, int m) {
  if (!cfg.symmetric_isotropic()) throw ConfigError("closed-form pilots require a symmetric isotropic network");
  const double M = cfg.users();
  const double N = cfg.antennas(0);
  const double alpha = cfg.budget(0) / (N * N * (M - 1.0));
  return make_factor(cfg, qm_split(cfg.users(), cfg.antennas(0), m).Qbar * std::sqrt(alpha));
}

PilotFactor dft_budget_factor(const NetworkConfig& cfg, int m) {
  if (!cfg.equal_antennas() || cfg.rank() != (cfg.users() - 1) * cfg.antennas(0))
    throw ConfigError("DFT closed-form pilots need equal antenna counts and r = (M-1)N");
  return make_factor(cfg, scale_to_budget(cfg, qm_split(cfg.users(), cfg.antennas(0), m).Qbar));
}

PilotFactor baseline_first_factor(const NetworkConfig& cfg) {
  const CMatrix qt = dft_matrix(cfg.total_antennas()).cols_range(0, static_cast<std::size_t>(cfg.rank()));
  return make_factor(cfg, scale_to_budget(cfg, qt));
}

namespace {

// sign = +1 for the minimization form grad + 2 sum mu B F, -1 for maximization.
KktResult kkt(const NetworkConfig& cfg, const CMatrix& F, const CMatrix& grad, double sign,
              const std::vector<double>* supplied) {
  KktResult out;
  CMatrix lag = grad;
  for (int i = 0; i < cfg.users(); ++i) {
    const CMatrix bf = power_operator(cfg, F, i);
    double mu = 0.0;
    if (supplied) {
      mu = supplied->at(static_cast<std::size_t>(i));
    } else if (const double d = bf.squared_norm(); d > 0.0) {
      mu = std::max(0.0, -sign * inner(bf, grad).real() / (2.0 * d));
    }
    out.mu.push_back(mu);
    lag += bf * (2.0 * sign * mu);
  }
  const double g = grad.norm();
  out.residual = g > 0.0 ? lag.norm() / g : lag.norm();
  return out;
}

}  // namespace

KktResult kkt_residual_mse(const NetworkConfig& cfg, const CMatrix& F) {
  return kkt(cfg, F, grad_J_M(cfg, F).G, 1.0, nullptr);
}

KktResult kkt_residual_mse(const NetworkConfig& cfg, const CMatrix& F, const std::vector<double>& mu) {
  return kkt(cfg, F, grad_J_M(cfg, F).G, 1.0, &mu);
}

KktResult kkt_residual_mi(const NetworkConfig& cfg, const CMatrix& F) {
  return kkt(cfg, F, grad_I_M(cfg, F).G, -1.0, nullptr);
}

KktResult kkt_residual_mi(const NetworkConfig& cfg, const CMatrix& F, const std::vector<double>& mu) {
  return kkt(cfg, F, grad_I_M(cfg, F).G, -1.0, &mu);
}

DeterminantBounds kron_determinant_bounds(const CMatrix& a, const CMatrix& b, const CMatrix& c, const CMatrix& d) {
  if (a.rows() != c.rows() || b.rows() != d.rows()) throw ConfigError("kron bounds need matching dimensions");
  const auto la = hermitian_evd(a).values;
  const auto lb = hermitian_evd(b).values;
  const auto lc = hermitian_evd(c).values;
  const auto ld = hermitian_evd(d).values;
  const std::size_t n = la.size();
  const std::size_t m = lb.size();
  DeterminantBounds out{1.0, 1.0};
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < m; ++l) {
      out.lower *= la[k] * lb[l] + lc[k] * ld[l];
      out.upper *= la[k] * lb[l] + lc[n - 1 - k] * ld[m - 1 - l];
    }
  return out;
}

}  // namespace anece
