#pragma once

#include "anece/model.hpp"

#include <stdexcept>
#include <vector>

namespace anece {

// Gradients use the convention d/dRe + j d/dIm with respect to F.
struct GradientResult {
  CMatrix G;
  double objective_value = 0.0;
};

class InfeasiblePoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

GradientResult grad_user_mse(const NetworkConfig& cfg, const CMatrix& F, int i);
GradientResult grad_J_M(const NetworkConfig& cfg, const CMatrix& F);

// psi_i = K P_i - Tr(P_i P_i^H) and the barrier -ln(psi_i).
double power_slack(const NetworkConfig& cfg, const CMatrix& F, int i);
GradientResult grad_power_barrier(const NetworkConfig& cfg, const CMatrix& F, int i);

GradientResult grad_pair_mi(const NetworkConfig& cfg, const CMatrix& F, int i, int j);
GradientResult grad_I_M(const NetworkConfig& cfg, const CMatrix& F);

// Diagonal N_j x N_j blocks of T^T W T, one per receive eigenmode of user i,
// for W ordered like Gamma_{i,j}. The index path must agree with the
// commutation path; both are exposed for that check.
std::vector<CMatrix> receiver_blocks(const CMatrix& W, int ni, int nj);
std::vector<CMatrix> receiver_blocks_indexed(const CMatrix& W, int ni, int nj);

enum class FairnessMode { mse, mi };

// Gradient of t*eps + sum_i B_P,i + fairness barriers, jointly in (eps, F).
// MSE: barriers -ln(eps - MSE_i). MI: barriers -ln(eps + MI_ij), i.e. the
// per-pair constraint log2|I - Gamma Gamma_T| <= eps.
struct FairnessGradient {
  double d_eps = 0.0;
  CMatrix G;
  double objective_value = 0.0;
};
FairnessGradient grad_fairness(const NetworkConfig& cfg, const CMatrix& F, double eps, double t,
                               FairnessMode mode);
double fairness_objective(const NetworkConfig& cfg, const CMatrix& F, double eps, double t,
                          FairnessMode mode);

}  // namespace anece
