#pragma once

#include "anece/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace anece {

// Network config keys: M, N (scalar or per user), P or KP_dB, sigma2, rho or R,
// K, r, N_E, sigmaE2. Scalars broadcast to every user. Defaults: P = 1,
// sigma2 = 1, rho = 0, r = N_T - min N_i, K = r, N_E = 1, sigmaE2 = 1.
NetworkConfig parse_config(const nlohmann::json& j);
NetworkConfig load_config(const std::filesystem::path& path);

// Matrices are {"rows", "cols", "data"} with data a row-major list of [re, im].
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

struct PilotFile {
  std::optional<PilotFactor> factor;
  StackedPilot stacked;
};
// Writes F, V and the assembled P.
nlohmann::json pilot_to_json(const NetworkConfig& cfg, const PilotFactor& pf);
// Accepts {F, V}, {F}, or {P}. F without V uses the default V.
PilotFile pilot_from_json(const NetworkConfig& cfg, const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace anece
