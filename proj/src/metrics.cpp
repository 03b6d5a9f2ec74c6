#include "anece/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anece {
namespace {

// R_i^{H/2} = diag(sqrt(lambda)) U^H as a dense matrix.
CMatrix sqrt_corr_adj(const NetworkConfig& cfg, int i) {
  CMatrix out = cfg.eigenvectors(i).adjoint();
  const auto& lam = cfg.eigenvalues(i);
  for (std::size_t l = 0; l < out.rows(); ++l)
    for (std::size_t c = 0; c < out.cols(); ++c) out(l, c) *= std::sqrt(lam[l]);
  return out;
}

// Rbar^{H/2} conj(P) built from dense per-user square roots.
CMatrix composite_from_pilot(const NetworkConfig& cfg, const PilotFactor& pf) {
  const StackedPilot sp = assemble_pilot(cfg, pf);
  const auto nt = static_cast<std::size_t>(cfg.total_antennas());
  CMatrix rbar(nt, nt);
  for (int i = 0; i < cfg.users(); ++i)
    rbar.set_block(static_cast<std::size_t>(cfg.offset(i)), static_cast<std::size_t>(cfg.offset(i)),
                   sqrt_corr_adj(cfg, i));
  return rbar * sp.P.conj();
}

struct PairCovariances {
  CMatrix g_ij;     // S_j A kron R_i^{H/2}
  CMatrix g_tji;    // R_j^{H/2} kron S_i A
  CMatrix k_yi;
  CMatrix k_ytj;
};

PairCovariances pair_covariances(const NetworkConfig& cfg, const PilotFactor& pf, int i, int j) {
  const CMatrix a = composite_from_pilot(cfg, pf);
  const Selection si = selection(cfg, i);
  const Selection sj = selection(cfg, j);
  const CMatrix ri = sqrt_corr_adj(cfg, i);
  const CMatrix rj = sqrt_corr_adj(cfg, j);
  const CMatrix gbar_i = kron(si.Sbar * a, ri);
  const CMatrix gbar_tj = kron(rj, sj.Sbar * a);
  PairCovariances pc;
  pc.g_ij = kron(sj.S * a, ri);
  pc.g_tji = kron(rj, si.S * a);
  pc.k_yi = add_identity(hermitian_part(mul_adj_left(gbar_i, gbar_i)), cfg.noise(i));
  pc.k_ytj = add_identity(hermitian_part(mul_adj_left(gbar_tj, gbar_tj)), cfg.noise(j));
  return pc;
}

double gaussian_mi(const CMatrix& kx, const CMatrix& ky, const CMatrix& kxy) {
  const std::size_t nx = kx.rows();
  CMatrix joint(nx + ky.rows(), nx + ky.rows());
  joint.set_block(0, 0, kx);
  joint.set_block(nx, nx, ky);
  joint.set_block(0, nx, kxy);
  joint.set_block(nx, 0, kxy.adjoint());
  return logdet_hpd(kx) + logdet_hpd(ky) - logdet_hpd(joint);
}

void check_pair(const NetworkConfig& cfg, int i, int j) {
  if (i < 0 || j < 0 || i >= cfg.users() || j >= cfg.users() || i == j)
    throw ConfigError("pair indices must be distinct users");
}

}  // namespace

MseResult user_mse(const NetworkConfig& cfg, const CMatrix& F) {
  MseResult out;
  for (int i = 0; i < cfg.users(); ++i) {
    const HermitianEig e = hermitian_evd(gram(other_rows(cfg, F, i)));
    double acc = 0.0;
    for (double lam : cfg.eigenvalues(i)) {
      const double c = lam / cfg.noise(i);
      for (double a : e.values) acc += 1.0 / (1.0 + c * std::max(a, 0.0));
    }
    out.per_user.push_back(acc);
    out.total += acc;
  }
  return out;
}

double ml_mse(const NetworkConfig& cfg, const CMatrix& F) {
  double total = 0.0;
  for (int i = 0; i < cfg.users(); ++i) {
    const CMatrix x = gram(other_rows(cfg, F, i));
    if (!is_hpd(x)) throw LinalgError("effective pilot of user " + std::to_string(i) + " is rank deficient");
    const HermitianEig e = hermitian_evd(x);
    double tr_inv = 0.0;
    for (double a : e.values) tr_inv += 1.0 / a;
    for (double lam : cfg.eigenvalues(i)) total += cfg.noise(i) * tr_inv / lam;
  }
  return total;
}

std::vector<CMatrix> gamma_blocks(const NetworkConfig& cfg, const CMatrix& F, int receiver,
                                  int transmitter) {
  check_pair(cfg, receiver, transmitter);
  const CMatrix phi = user_rows(cfg, F, transmitter);
  const CMatrix psi = other_rows(cfg, F, receiver);
  const CMatrix psi_gram = mul_adj_left(psi, psi);
  const CMatrix phi_h = phi.adjoint();
  std::vector<CMatrix> blocks;
  for (double lam : cfg.eigenvalues(receiver)) {
    const CMatrix core = add_identity(psi_gram * lam, cfg.noise(receiver));
    blocks.push_back(hermitian_part(phi * solve_hpd(core, phi_h)) * lam);
  }
  return blocks;
}

CMatrix gamma(const NetworkConfig& cfg, const CMatrix& F, int i, int j) {
  const auto blocks = gamma_blocks(cfg, F, i, j);
  const auto ni = static_cast<std::size_t>(cfg.antennas(i));
  const auto nj = static_cast<std::size_t>(cfg.antennas(j));
  CMatrix g(ni * nj, ni * nj);
  for (std::size_t l = 0; l < ni; ++l)
    for (std::size_t a = 0; a < nj; ++a)
      for (std::size_t b = 0; b < nj; ++b) g(a * ni + l, b * ni + l) = blocks[l](a, b);
  return g;
}

CMatrix gamma_t(const NetworkConfig& cfg, const CMatrix& F, int j, int i) {
  const auto blocks = gamma_blocks(cfg, F, j, i);
  const auto ni = static_cast<std::size_t>(cfg.antennas(i));
  const auto nj = static_cast<std::size_t>(cfg.antennas(j));
  CMatrix g(ni * nj, ni * nj);
  for (std::size_t c = 0; c < nj; ++c) g.set_block(c * ni, c * ni, blocks[c]);
  return g;
}

double pairwise_mi(const NetworkConfig& cfg, const CMatrix& F, int i, int j) {
  const CMatrix prod = gamma(cfg, F, i, j) * gamma_t(cfg, F, j, i);
  const CMatrix m = CMatrix::identity(prod.rows()) - prod;
  return std::max(0.0, -log2_abs_det(m));
}

MiResult sum_mi(const NetworkConfig& cfg, const CMatrix& F) {
  MiResult out;
  for (int i = 0; i < cfg.users(); ++i)
    for (int j = i + 1; j < cfg.users(); ++j) {
      const double v = pairwise_mi(cfg, F, i, j);
      out.per_pair.push_back({i, j, v});
      out.total += v;
    }
  return out;
}

double mi_joint_covariance(const NetworkConfig& cfg, const PilotFactor& pf, int i, int j) {
  check_pair(cfg, i, j);
  const PairCovariances pc = pair_covariances(cfg, pf, i, j);
  return gaussian_mi(pc.k_yi, pc.k_ytj, mul_adj_left(pc.g_ij, pc.g_tji));
}

double mi_estimate_oracle(const NetworkConfig& cfg, const PilotFactor& pf, int i, int j) {
  check_pair(cfg, i, j);
  const CMatrix a = composite_from_pilot(cfg, pf);
  if (numerical_rank(user_rows(cfg, a, i)) != static_cast<std::size_t>(cfg.antennas(i)) ||
      numerical_rank(user_rows(cfg, a, j)) != static_cast<std::size_t>(cfg.antennas(j)))
    throw LinalgError("estimate-based MI needs full-rank effective pilots");
  const PairCovariances pc = pair_covariances(cfg, pf, i, j);
  // Estimators h_ij,i = W_i y_i and h_ij,j = W_j y_T,j.
  const CMatrix wi = solve_hpd(pc.k_yi, pc.g_ij.adjoint()).adjoint();
  const CMatrix wj = solve_hpd(pc.k_ytj, pc.g_tji.adjoint()).adjoint();
  const CMatrix k_hi = hermitian_part(mul_adj_right(wi * pc.k_yi, wi));
  const CMatrix k_hj = hermitian_part(mul_adj_right(wj * pc.k_ytj, wj));
  const CMatrix cross = mul_adj_right(wi * mul_adj_left(pc.g_ij, pc.g_tji), wj);
  if (!is_hpd(k_hi) || !is_hpd(k_hj)) throw LinalgError("estimate covariance is singular");
  return gaussian_mi(k_hi, k_hj, cross);
}

EveResult eve_mse(const NetworkConfig& cfg, const StackedPilot& sp) {
  CMatrix x = effective_factor(cfg, sp);
  for (int i = 0; i < cfg.users(); ++i) {
    const double s = std::sqrt(cfg.eve_variance(i));
    for (int l = 0; l < cfg.antennas(i); ++l)
      for (std::size_t c = 0; c < x.cols(); ++c) x(static_cast<std::size_t>(cfg.offset(i) + l), c) *= s;
  }
  const Svd d = svd(x, true);
  const std::size_t rank = numerical_rank(x);
  EveResult out;
  for (int i = 0; i < cfg.users(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d.U.cols(); ++k) {
      double w = 0.0;
      for (int l = 0; l < cfg.antennas(i); ++l) w += std::norm(d.U(static_cast<std::size_t>(cfg.offset(i) + l), k));
      acc += k < rank ? w / (1.0 + d.s[k] * d.s[k]) : w;
    }
    const double tr = cfg.eve_variance(i) * cfg.eve_antennas() * acc;
    out.per_user.push_back(tr);
    out.normalized += tr / (cfg.eve_antennas() * cfg.antennas(i));
  }
  out.normalized /= cfg.users();
  return out;
}

std::pair<double, double> normalize(const NetworkConfig& cfg, double j_total, double i_total) {
  if (!cfg.equal_antennas()) throw ConfigError("normalization requires equal antenna counts");
  const double m = cfg.users();
  const double n = cfg.antennas(0);
  const double base = m * (m - 1.0) * n * n;
  return {j_total / base, i_total / (base / 2.0)};
}

MetricReport evaluate_all(const NetworkConfig& cfg, const PilotFactor& pf) {
  MetricReport rep;
  rep.mse = user_mse(cfg, pf.F);
  rep.mi = sum_mi(cfg, pf.F);
  rep.eve = eve_mse(cfg, assemble_pilot(cfg, pf));
  if (cfg.equal_antennas()) {
    std::tie(rep.J_norm, rep.I_norm) = normalize(cfg, rep.mse.total, rep.mi.total);
  } else {
    rep.J_norm = rep.I_norm = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

double fairness_ratio(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi <= 0.0) return 1.0;
  if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

}  // namespace anece
