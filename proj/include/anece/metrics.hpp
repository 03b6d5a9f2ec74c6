#pragma once

#include "anece/model.hpp"

#include <utility>
#include <vector>

namespace anece {

// Every factor-space evaluator depends on F only through F F^H, so any
// N_T x n factor with that product (for example effective_factor(P)) works.

struct MseResult {
  std::vector<double> per_user;
  double total = 0.0;
};
MseResult user_mse(const NetworkConfig& cfg, const CMatrix& F);
double ml_mse(const NetworkConfig& cfg, const CMatrix& F);

struct PairValue {
  int i = 0;
  int j = 0;
  double value = 0.0;
};
struct MiResult {
  std::vector<PairValue> per_pair;  // i < j, lexicographic
  double total = 0.0;
};
double pairwise_mi(const NetworkConfig& cfg, const CMatrix& F, int i, int j);
MiResult sum_mi(const NetworkConfig& cfg, const CMatrix& F);

// Gamma_{i,j} is block diagonal over user i's receive eigenmodes:
// Gamma_{i,j} = sum_l G_l kron e_l e_l^T with G_l of size N_j x N_j.
std::vector<CMatrix> gamma_blocks(const NetworkConfig& cfg, const CMatrix& F, int receiver,
                                  int transmitter);
// Dense Gamma_{i,j} (N_j N_i square, user j index outer) and Gamma_{T,j,i}.
CMatrix gamma(const NetworkConfig& cfg, const CMatrix& F, int i, int j);
CMatrix gamma_t(const NetworkConfig& cfg, const CMatrix& F, int j, int i);

// Cross-check oracles evaluated from the assembled pilot and full R_i^{1/2}.
double mi_joint_covariance(const NetworkConfig& cfg, const PilotFactor& pf, int i, int j);
// Mutual information of the two MMSE estimates of h_{i,j}; throws LinalgError
// when the rank hypotheses fail.
double mi_estimate_oracle(const NetworkConfig& cfg, const PilotFactor& pf, int i, int j);

struct EveResult {
  std::vector<double> per_user;  // Tr K_{Delta h_{E,i}}
  double normalized = 0.0;       // (1/M) sum Tr / (N_E N_i)
};
EveResult eve_mse(const NetworkConfig& cfg, const StackedPilot& sp);

// J / (M(M-1)N^2) and I / (M(M-1)N^2/2); requires equal antenna counts.
std::pair<double, double> normalize(const NetworkConfig& cfg, double j_total, double i_total);

struct MetricReport {
  MseResult mse;
  MiResult mi;
  EveResult eve;
  double J_norm = 0.0;
  double I_norm = 0.0;
};
MetricReport evaluate_all(const NetworkConfig& cfg, const PilotFactor& pf);

// max / min over positive entries; 1 for a single entry.
double fairness_ratio(const std::vector<double>& values);

}  // namespace anece
