#include "anece/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace anece {
namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

NetworkConfig::NetworkConfig(std::vector<UserSpec> users, int pilot_length, int rank,
                             int eve_antennas)
    : users_(std::move(users)), pilot_length_(pilot_length), rank_(rank), eve_antennas_(eve_antennas) {
  check(users_.size() >= 2, "at least two users are required");
  check(eve_antennas_ >= 1, "Eve needs at least one antenna");
  int min_n = users_.front().antennas;
  for (std::size_t i = 0; i < users_.size(); ++i) {
    UserSpec& u = users_[i];
    const std::string who = "user " + std::to_string(i) + ": ";
    check(u.antennas >= 1, who + "antenna count must be >= 1");
    check(u.power > 0.0 && std::isfinite(u.power), who + "power must be positive");
    check(u.noise_var > 0.0 && std::isfinite(u.noise_var), who + "noise variance must be positive");
    check(u.eve_var > 0.0 && std::isfinite(u.eve_var), who + "Eve channel variance must be positive");
    const auto n = static_cast<std::size_t>(u.antennas);
    if (u.correlation.empty()) u.correlation = CMatrix::identity(n);
    check(u.correlation.rows() == n && u.correlation.cols() == n, who + "correlation has wrong size");
    check(is_hermitian(u.correlation, 1e-10), who + "correlation must be Hermitian");
    u.correlation = hermitian_part(u.correlation);
    check(std::abs(u.correlation.trace().real() - u.antennas) <= 1e-9 * u.antennas,
          who + "correlation trace must equal the antenna count");
    HermitianEig e = hermitian_evd(u.correlation);
    check(e.values.back() > 1e-12 * e.values.front(), who + "correlation must be positive definite");
    eig_.push_back(std::move(e));
    offsets_.push_back(total_);
    total_ += u.antennas;
    min_n = std::min(min_n, u.antennas);
  }
  check(rank_ >= total_ - min_n && rank_ <= total_ - 1,
        "rank must satisfy N_T - N_min <= r <= N_T - 1");
  check(pilot_length_ >= rank_, "pilot length must be >= rank");
}

NetworkConfig NetworkConfig::symmetric(int users, int antennas, double kp, double rho,
                                       double noise_var) {
  const int r = (users - 1) * antennas;
  std::vector<UserSpec> specs(static_cast<std::size_t>(users));
  for (auto& u : specs) {
    u.antennas = antennas;
    u.power = kp / r;
    u.noise_var = noise_var;
    u.correlation = exp_correlation(antennas, rho);
  }
  return NetworkConfig(std::move(specs), r, r);
}

bool NetworkConfig::equal_antennas() const {
  return std::all_of(users_.begin(), users_.end(),
                     [&](const UserSpec& u) { return u.antennas == users_.front().antennas; });
}

bool NetworkConfig::symmetric_isotropic() const {
  if (!equal_antennas()) return false;
  const auto& f = users_.front();
  for (int i = 0; i < users(); ++i) {
    const auto& u = users_[static_cast<std::size_t>(i)];
    if (std::abs(u.power - f.power) > 1e-12 * f.power) return false;
    if (std::abs(u.noise_var - f.noise_var) > 1e-12 * f.noise_var) return false;
    if (max_abs_diff(u.correlation, CMatrix::identity(static_cast<std::size_t>(u.antennas))) > 1e-12)
      return false;
  }
  return rank_ == (users() - 1) * f.antennas;
}

NetworkConfig NetworkConfig::with_budget(double kp) const {
  auto specs = users_;
  for (auto& u : specs) u.power = kp / pilot_length_;
  return NetworkConfig(std::move(specs), pilot_length_, rank_, eve_antennas_);
}

CMatrix exp_correlation(int n, double rho) {
  if (n < 1) throw ConfigError("correlation size must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("correlation coefficient must lie in [0, 1)");
  CMatrix r(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) r(l, k) = std::pow(rho, std::abs(l - k));
  return r;
}

Selection selection(const NetworkConfig& cfg, int i) {
  if (i < 0 || i >= cfg.users()) throw ConfigError("user index out of range");
  const auto nt = static_cast<std::size_t>(cfg.total_antennas());
  const auto ni = static_cast<std::size_t>(cfg.antennas(i));
  Selection s{CMatrix(ni, nt), CMatrix(nt - ni, nt)};
  for (std::size_t k = 0; k < ni; ++k) s.S(k, cfg.offset(i) + k) = 1.0;
  std::size_t row = 0;
  for (int j = 0; j < cfg.users(); ++j) {
    if (j == i) continue;
    for (int k = 0; k < cfg.antennas(j); ++k) s.Sbar(row++, cfg.offset(j) + k) = 1.0;
  }
  return s;
}

CMatrix user_rows(const NetworkConfig& cfg, const CMatrix& x, int i) {
  return x.rows_range(cfg.offset(i), cfg.antennas(i));
}

CMatrix other_rows(const NetworkConfig& cfg, const CMatrix& x, int i) {
  const auto ni = static_cast<std::size_t>(cfg.antennas(i));
  CMatrix out(x.rows() - ni, x.cols());
  const auto off = static_cast<std::size_t>(cfg.offset(i));
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::size_t row = 0;
    for (std::size_t k = 0; k < x.rows(); ++k)
      if (k < off || k >= off + ni) out(row++, j) = x(k, j);
  }
  return out;
}

void add_user_rows(const NetworkConfig& cfg, CMatrix& target, const CMatrix& rows, int i) {
  const auto off = static_cast<std::size_t>(cfg.offset(i));
  for (std::size_t j = 0; j < rows.cols(); ++j)
    for (std::size_t k = 0; k < rows.rows(); ++k) target(off + k, j) += rows(k, j);
}

void add_other_rows(const NetworkConfig& cfg, CMatrix& target, const CMatrix& rows, int i) {
  const auto off = static_cast<std::size_t>(cfg.offset(i));
  const auto ni = static_cast<std::size_t>(cfg.antennas(i));
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    std::size_t row = 0;
    for (std::size_t k = 0; k < target.rows(); ++k)
      if (k < off || k >= off + ni) target(k, j) += rows(row++, j);
  }
}

CMatrix default_v(int r, int k) {
  if (r < 1 || k < r) throw ConfigError("default_v requires 1 <= r <= K");
  CMatrix v(static_cast<std::size_t>(r), static_cast<std::size_t>(k));
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < k; ++b) {
      const double ph = -2.0 * std::numbers::pi * ((static_cast<long>(a) * b) % k) / k;
      v(a, b) = std::polar(scale, ph);
    }
  return v;
}

PilotFactor make_factor(const NetworkConfig& cfg, CMatrix F) {
  if (F.rows() != static_cast<std::size_t>(cfg.total_antennas()) ||
      F.cols() != static_cast<std::size_t>(cfg.rank()))
    throw ConfigError("pilot factor must be N_T x r");
  return {std::move(F), default_v(cfg.rank(), cfg.pilot_length())};
}

StackedPilot assemble_pilot(const NetworkConfig& cfg, const PilotFactor& pf) {
  if (pf.F.rows() != static_cast<std::size_t>(cfg.total_antennas()) || pf.F.cols() != pf.V.rows())
    throw ConfigError("pilot factor dimensions do not match the configuration");
  const CMatrix fv = pf.F.conj() * pf.V.conj();
  CMatrix p(fv.rows(), fv.cols());
  // Block i of Rbar^{-T/2} is conj(U_i) diag(lambda_i^{-1/2}).
  for (int i = 0; i < cfg.users(); ++i) {
    CMatrix rows = user_rows(cfg, fv, i);
    const auto& lam = cfg.eigenvalues(i);
    for (std::size_t l = 0; l < rows.rows(); ++l)
      for (std::size_t c = 0; c < rows.cols(); ++c) rows(l, c) /= std::sqrt(lam[l]);
    p.set_block(static_cast<std::size_t>(cfg.offset(i)), 0, cfg.eigenvectors(i).conj() * rows);
  }
  return {std::move(p)};
}

CMatrix effective_factor(const NetworkConfig& cfg, const StackedPilot& sp) {
  if (sp.P.rows() != static_cast<std::size_t>(cfg.total_antennas()))
    throw ConfigError("stacked pilot must have N_T rows");
  const CMatrix pc = sp.P.conj();
  CMatrix g(pc.rows(), pc.cols());
  // Block i of Rbar^{H/2} is diag(lambda_i^{1/2}) U_i^H.
  for (int i = 0; i < cfg.users(); ++i) {
    CMatrix rows = mul_adj_left(cfg.eigenvectors(i), user_rows(cfg, pc, i));
    const auto& lam = cfg.eigenvalues(i);
    for (std::size_t l = 0; l < rows.rows(); ++l)
      for (std::size_t c = 0; c < rows.cols(); ++c) rows(l, c) *= std::sqrt(lam[l]);
    g.set_block(static_cast<std::size_t>(cfg.offset(i)), 0, rows);
  }
  return g;
}

double user_power(const NetworkConfig& cfg, const CMatrix& F, int i) {
  const auto& lam = cfg.eigenvalues(i);
  const auto off = static_cast<std::size_t>(cfg.offset(i));
  double acc = 0.0;
  for (std::size_t l = 0; l < lam.size(); ++l) {
    double row = 0.0;
    for (std::size_t c = 0; c < F.cols(); ++c) row += std::norm(F(off + l, c));
    acc += row / lam[l];
  }
  return acc;
}

double stacked_power(const NetworkConfig& cfg, const StackedPilot& sp, int i) {
  return user_rows(cfg, sp.P, i).squared_norm();
}

CMatrix power_operator(const NetworkConfig& cfg, const CMatrix& F, int i) {
  CMatrix out(F.rows(), F.cols());
  const auto& lam = cfg.eigenvalues(i);
  const auto off = static_cast<std::size_t>(cfg.offset(i));
  for (std::size_t l = 0; l < lam.size(); ++l)
    for (std::size_t c = 0; c < F.cols(); ++c) out(off + l, c) = F(off + l, c) / lam[l];
  return out;
}

CMatrix scale_to_budget(const NetworkConfig& cfg, CMatrix F, double fraction) {
  for (int i = 0; i < cfg.users(); ++i) {
    const double p = user_power(cfg, F, i);
    if (p <= 0.0) throw ConfigError("cannot scale a zero user block to the power budget");
    const double s = std::sqrt(fraction * cfg.budget(i) / p);
    const auto off = static_cast<std::size_t>(cfg.offset(i));
    for (std::size_t l = 0; l < static_cast<std::size_t>(cfg.antennas(i)); ++l)
      for (std::size_t c = 0; c < F.cols(); ++c) F(off + l, c) *= s;
  }
  return F;
}

RankReport validate_anece(const NetworkConfig& cfg, const StackedPilot& sp) {
  RankReport rep;
  const int nt = cfg.total_antennas();
  rep.pilot_rank = numerical_rank(sp.P);
  rep.rank_ok = rep.pilot_rank == static_cast<std::size_t>(cfg.rank()) && cfg.rank() <= nt - 1;
  rep.others_ok = true;
  for (int i = 0; i < cfg.users(); ++i) {
    const std::size_t rk = numerical_rank(other_rows(cfg, sp.P, i));
    rep.others_rank.push_back(rk);
    if (rk != static_cast<std::size_t>(nt - cfg.antennas(i))) {
      if (rep.others_ok) rep.degenerate_user = i;
      rep.others_ok = false;
    }
  }
  return rep;
}

}  // namespace anece
