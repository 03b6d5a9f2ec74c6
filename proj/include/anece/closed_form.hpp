#pragma once

#include "anece/model.hpp"

#include <vector>

namespace anece {

// Unnormalized n-point DFT, w = exp(-j 2 pi / n).
CMatrix dft_matrix(int n);

struct QmSplit {
  CMatrix Qm;     // NM x N: columns m, m+M, ..., m+(N-1)M
  CMatrix Qbar;   // NM x (M-1)N: remaining columns in order
};
QmSplit qm_split(int users, int antennas, int m);

// Scalars behind the symmetric closed form. Noise enters through alpha / sigma^2.
struct ClosedFormContext {
  int m = 0;
  double alpha_d = 0.0;  // KP / (N^2 (M-1))
  double beta = 0.0;
  double Gamma = 0.0;
  double mu_mse = 0.0;
  double mu_mi = 0.0;
};
ClosedFormContext closed_form_context(const NetworkConfig& cfg, int m = 0);

// sqrt(KP / (N^2 (M-1))) Qbar_m; symmetric isotropic configurations only.
PilotFactor closed_form_factor(const NetworkConfig& cfg, int m = 0);
// Qbar_m with each user block scaled to its budget under its own R_i.
// Requires equal antenna counts and r = (M-1)N.
PilotFactor dft_budget_factor(const NetworkConfig& cfg, int m = 0);
// sqrt(D) Q_t: first r columns of the N_T-point DFT, user blocks at budget.
PilotFactor baseline_first_factor(const NetworkConfig& cfg);

struct KktResult {
  double residual = 0.0;
  std::vector<double> mu;
};
// Least-squares multipliers, clamped at zero.
KktResult kkt_residual_mse(const NetworkConfig& cfg, const CMatrix& F);
KktResult kkt_residual_mse(const NetworkConfig& cfg, const CMatrix& F, const std::vector<double>& mu);
KktResult kkt_residual_mi(const NetworkConfig& cfg, const CMatrix& F);
KktResult kkt_residual_mi(const NetworkConfig& cfg, const CMatrix& F, const std::vector<double>& mu);

// Spectral bounds on |A (x) B + C (x) D| for PSD A, C (n x n) and B, D (m x m):
// the lower bound pairs both spectra in descending order, the upper bound
// reverses the order of the C and D spectra.
struct DeterminantBounds {
  double lower = 0.0;
  double upper = 0.0;
};
DeterminantBounds kron_determinant_bounds(const CMatrix& a, const CMatrix& b, const CMatrix& c, const CMatrix& d);

}  // namespace anece
