#pragma once

#include "anece/barrier.hpp"
#include "anece/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace anece {

enum class Method { closed_form, first, mse_opt, mi_opt, mse_fair, mi_fair, two_user_mse, two_user_mi, uniform };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);  // throws ConfigError

struct Design {
  PilotFactor factor;
  int iterations = 0;
  std::string status = "ok";
};
// Builds a pilot with the named method. Solver failures are reported in
// status; configuration errors throw.
Design design(const NetworkConfig& cfg, Method method, const BarrierSettings& settings = {});

struct ExperimentSpec {
  nlohmann::json config;        // network config; KP_dB and rho are overridden per grid point
  std::vector<Method> methods;
  std::vector<double> kp_db;    // empty: keep the config's power
  std::vector<double> rho;      // empty: keep the config's correlation
  std::uint64_t seed = 0;
  int threads = 0;              // 0: hardware concurrency
  BarrierSettings settings;

  void validate() const;
};
// {"config": {...} | "config_file": path, "methods": [...], "KP_dB": [...],
//  "rho": [...], "seed": n, "threads": n, "solver": {t0, mu, eps1, eps2, Np}}
ExperimentSpec parse_spec(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

struct ResultRow {
  std::string method;
  double kp_db = 0.0;
  double rho = 0.0;
  double J_norm = 0.0;
  double I_norm = 0.0;
  double eve_norm = 0.0;
  double J_M = 0.0;
  double I_M = 0.0;
  double mse_fairness = 1.0;
  double mi_fairness = 1.0;
  std::vector<double> mse;  // per user
  std::vector<double> mi;   // per pair, (1,2), (1,3), ..., (M-1,M)
  int iterations = 0;
  double kkt_residual = 0.0;
  bool rank_ok = false;
  std::string status;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable {
  int users = 0;
  std::vector<ResultRow> rows;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

ResultRow evaluate_method(const NetworkConfig& cfg, Method method, const BarrierSettings& settings,
                          double kp_db, double rho);
// Rows in grid order (KP outer, rho inner, methods innermost).
ResultTable run(const ExperimentSpec& spec);

std::vector<std::string> csv_header(int users);
std::string to_csv(const ResultTable& t);
nlohmann::json to_json(const ResultTable& t);
ResultTable parse_csv(const std::string& text);
ResultTable parse_json(const nlohmann::json& j);

enum class Format { csv, json };
void emit(const ResultTable& t, Format format, const std::filesystem::path& path);

struct FairnessRow {
  double kp_db = 0.0;
  double mse_sum_ratio = 0.0;
  double mse_fair_ratio = 0.0;
  double mi_sum_ratio = 0.0;
  double mi_fair_ratio = 0.0;
};
std::vector<FairnessRow> compare_fairness(const nlohmann::json& config, const std::vector<double>& kp_db,
                                          const BarrierSettings& settings = {}, int threads = 0);
std::string fairness_csv(const std::vector<FairnessRow>& rows);

// Applies KP_dB = 10 log10(K P) to every user.
nlohmann::json with_kp_db(nlohmann::json config, double kp_db);
nlohmann::json with_rho(nlohmann::json config, double rho);

}  // namespace anece
