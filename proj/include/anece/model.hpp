#pragma once

#include "anece/linalg.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace anece {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UserSpec {
  int antennas = 1;
  double power = 1.0;       // P_i, linear, per pilot sample
  double noise_var = 1.0;   // sigma_i^2
  CMatrix correlation;      // R_i; empty means identity
  double eve_var = 1.0;     // variance of the channel from user i to Eve
};

// A validated network instance. Users are indexed from 0.
class NetworkConfig {
 public:
  NetworkConfig(std::vector<UserSpec> users, int pilot_length, int rank, int eve_antennas = 1);

  // N users of N antennas each, R_i = exp_correlation(N, rho), K = r = (M-1)N.
  static NetworkConfig symmetric(int users, int antennas, double kp, double rho = 0.0,
                                 double noise_var = 1.0);

  int users() const { return static_cast<int>(users_.size()); }
  int antennas(int i) const { return user(i).antennas; }
  int total_antennas() const { return total_; }
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  double power(int i) const { return user(i).power; }
  double budget(int i) const { return pilot_length_ * user(i).power; }  // K P_i
  double noise(int i) const { return user(i).noise_var; }
  double eve_variance(int i) const { return user(i).eve_var; }
  const CMatrix& correlation(int i) const { return user(i).correlation; }
  // Eigenpairs of R_i, descending; sqrt(R) = vectors * diag(sqrt(values)).
  const std::vector<double>& eigenvalues(int i) const { return eig_.at(static_cast<std::size_t>(i)).values; }
  const CMatrix& eigenvectors(int i) const { return eig_.at(static_cast<std::size_t>(i)).vectors; }
  int pilot_length() const { return pilot_length_; }
  int rank() const { return rank_; }
  int eve_antennas() const { return eve_antennas_; }
  const std::vector<UserSpec>& specs() const { return users_; }

  bool equal_antennas() const;
  // Equal N, P, sigma^2, identity correlation and r = (M-1)N.
  bool symmetric_isotropic() const;

  // Same network with every budget set so that K P_i = kp.
  NetworkConfig with_budget(double kp) const;

 private:
  const UserSpec& user(int i) const { return users_.at(static_cast<std::size_t>(i)); }

  std::vector<UserSpec> users_;
  std::vector<HermitianEig> eig_;
  std::vector<int> offsets_;
  int total_ = 0;
  int pilot_length_ = 0;
  int rank_ = 0;
  int eve_antennas_ = 1;
};

// Toeplitz matrix with entries rho^|l-k|.
CMatrix exp_correlation(int n, double rho);

// Explicit selection operators S_i and Sbar_(i).
struct Selection {
  CMatrix S;
  CMatrix Sbar;
};
Selection selection(const NetworkConfig& cfg, int i);

// Row-block helpers equivalent to S_i X, Sbar_(i) X and their transposes.
CMatrix user_rows(const NetworkConfig& cfg, const CMatrix& x, int i);
CMatrix other_rows(const NetworkConfig& cfg, const CMatrix& x, int i);
void add_user_rows(const NetworkConfig& cfg, CMatrix& target, const CMatrix& rows, int i);
void add_other_rows(const NetworkConfig& cfg, CMatrix& target, const CMatrix& rows, int i);

struct PilotFactor {
  CMatrix F;  // N_T x r
  CMatrix V;  // r x K, V V^H = I
};

struct StackedPilot {
  CMatrix P;  // N_T x K
};

// First r rows of the K-point DFT scaled by 1/sqrt(K).
CMatrix default_v(int r, int k);
PilotFactor make_factor(const NetworkConfig& cfg, CMatrix F);

// P = Rbar^{-T/2} conj(F) conj(V).
StackedPilot assemble_pilot(const NetworkConfig& cfg, const PilotFactor& pf);
// G = Rbar^{H/2} conj(P); satisfies G G^H = F F^H for assembled pilots.
CMatrix effective_factor(const NetworkConfig& cfg, const StackedPilot& sp);

// Tr(P_i P_i^H) evaluated in factor space.
double user_power(const NetworkConfig& cfg, const CMatrix& F, int i);
double stacked_power(const NetworkConfig& cfg, const StackedPilot& sp, int i);
// Rbar^{-1/2} S_i^T S_i Rbar^{-H/2} F, the power form's linear map.
CMatrix power_operator(const NetworkConfig& cfg, const CMatrix& F, int i);
// Scales each user block so that its power equals fraction * K P_i.
CMatrix scale_to_budget(const NetworkConfig& cfg, CMatrix F, double fraction = 1.0);

struct RankReport {
  std::size_t pilot_rank = 0;
  std::vector<std::size_t> others_rank;  // rank(Pbar_(i)) per user
  bool rank_ok = false;                  // rank(P) = r <= N_T - 1
  bool others_ok = false;                // rank(Pbar_(i)) = N_T - N_i for all i
  int degenerate_user = -1;              // first user failing the second condition
  bool ok() const { return rank_ok && others_ok; }
};
RankReport validate_anece(const NetworkConfig& cfg, const StackedPilot& sp);

}  // namespace anece
