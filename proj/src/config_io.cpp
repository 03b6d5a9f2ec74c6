#include "anece/config_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace anece {
namespace {

using nlohmann::json;

// A scalar broadcasts to every user; an array must have one entry per user.
template <class T>
std::vector<T> per_user(const json& j, const char* key, int users, T fallback) {
  if (!j.contains(key)) return std::vector<T>(static_cast<std::size_t>(users), fallback);
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<T>(static_cast<std::size_t>(users), v.get<T>());
  if (!v.is_array() || v.size() != static_cast<std::size_t>(users))
    throw ConfigError(std::string(key) + " must be a number or an array of length M");
  return v.get<std::vector<T>>();
}

}  // namespace

NetworkConfig parse_config(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("M")) throw ConfigError("config needs M");
    const int m = j.at("M").get<int>();
    if (m < 2) throw ConfigError("M must be >= 2");
    const auto n = per_user<int>(j, "N", m, 1);
    const auto sigma2 = per_user<double>(j, "sigma2", m, 1.0);
    const auto eve = per_user<double>(j, "sigmaE2", m, 1.0);

    int nt = 0;
    int nmin = n.front();
    for (int v : n) {
      if (v < 1) throw ConfigError("antenna counts must be >= 1");
      nt += v;
      nmin = std::min(nmin, v);
    }
    const int r = j.value("r", nt - nmin);
    const int k = j.value("K", r);
    if (k < 1) throw ConfigError("K must be >= 1");

    std::vector<double> power;
    if (j.contains("KP_dB")) {
      if (j.contains("P")) throw ConfigError("give either P or KP_dB, not both");
      for (double db : per_user<double>(j, "KP_dB", m, 0.0)) power.push_back(std::pow(10.0, db / 10.0) / k);
    } else {
      power = per_user<double>(j, "P", m, 1.0);
    }

    std::vector<UserSpec> users(static_cast<std::size_t>(m));
    if (j.contains("R")) {
      if (j.contains("rho")) throw ConfigError("give either rho or R, not both");
      const json& rs = j.at("R");
      if (!rs.is_array() || rs.size() != static_cast<std::size_t>(m)) throw ConfigError("R must list M matrices");
      for (int i = 0; i < m; ++i) users[static_cast<std::size_t>(i)].correlation = matrix_from_json(rs.at(static_cast<std::size_t>(i)));
    } else {
      const auto rho = per_user<double>(j, "rho", m, 0.0);
      for (int i = 0; i < m; ++i) {
        const auto u = static_cast<std::size_t>(i);
        users[u].correlation = exp_correlation(n[u], rho[u]);
      }
    }
    for (std::size_t i = 0; i < users.size(); ++i) {
      users[i].antennas = n[i];
      users[i].power = power[i];
      users[i].noise_var = sigma2[i];
      users[i].eve_var = eve[i];
    }
    return NetworkConfig(std::move(users), k, r, j.value("N_E", 1));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

NetworkConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

json matrix_to_json(const CMatrix& m) {
  json data = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t c = 0; c < m.cols(); ++c) data.push_back({m(i, c).real(), m(i, c).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const json& data = j.at("data");
    if (!data.is_array() || data.size() != rows * cols) throw ConfigError("matrix data does not match rows x cols");
    CMatrix m(rows, cols);
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t c = 0; c < cols; ++c, ++k) {
        const json& e = data[k];
        if (!e.is_array() || e.size() != 2) throw ConfigError("matrix entries must be [re, im] pairs");
        m(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
      }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed matrix: ") + e.what());
  }
}

json pilot_to_json(const NetworkConfig& cfg, const PilotFactor& pf) {
  return {{"F", matrix_to_json(pf.F)}, {"V", matrix_to_json(pf.V)}, {"P", matrix_to_json(assemble_pilot(cfg, pf).P)}};
}

PilotFile pilot_from_json(const NetworkConfig& cfg, const json& j) {
  PilotFile out;
  if (j.contains("F")) {
    CMatrix f = matrix_from_json(j.at("F"));
    PilotFactor pf = make_factor(cfg, std::move(f));
    if (j.contains("V")) {
      pf.V = matrix_from_json(j.at("V"));
      if (pf.V.rows() != static_cast<std::size_t>(cfg.rank()) ||
          pf.V.cols() != static_cast<std::size_t>(cfg.pilot_length()))
        throw ConfigError("V must be r x K");
    }
    out.stacked = assemble_pilot(cfg, pf);
    out.factor = std::move(pf);
  } else if (j.contains("P")) {
    out.stacked.P = matrix_from_json(j.at("P"));
    if (out.stacked.P.rows() != static_cast<std::size_t>(cfg.total_antennas()))
      throw ConfigError("P must have N_T rows");
  } else {
    throw ConfigError("pilot file needs F or P");
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace anece
