#include "anece/experiment.hpp"

#include "anece/closed_form.hpp"
#include "anece/config_io.hpp"
#include "anece/two_user.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

namespace anece {
namespace {

using nlohmann::json;

constexpr std::pair<Method, std::string_view> kMethods[] = {
    {Method::closed_form, "closed-form"}, {Method::first, "first"},
    {Method::mse_opt, "mse-opt"},         {Method::mi_opt, "mi-opt"},
    {Method::mse_fair, "mse-fair"},       {Method::mi_fair, "mi-fair"},
    {Method::two_user_mse, "two-user-mse"}, {Method::two_user_mi, "two-user-mi"},
    {Method::uniform, "uniform"},
};

bool mi_targeted(Method m) {
  return m == Method::mi_opt || m == Method::mi_fair || m == Method::two_user_mi || m == Method::uniform;
}

// Runs body(0..n-1) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t n, int threads, Body body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) body(k);
    });
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ConfigError("not a number: " + s);
  return v;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }
double num(const json& j) { return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>(); }

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

double grid_rho(const json& config) {
  if (config.contains("rho")) {
    const json& r = config.at("rho");
    return r.is_array() ? r.at(0).get<double>() : r.get<double>();
  }
  return 0.0;
}

double grid_kp_db(const NetworkConfig& cfg) { return 10.0 * std::log10(cfg.budget(0)); }

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [k, v] : kMethods)
    if (k == m) return v;
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (const auto& [k, v] : kMethods)
    if (v == name) return k;
  throw ConfigError("unknown method: " + std::string(name));
}

Design design(const NetworkConfig& cfg, Method method, const BarrierSettings& settings) {
  auto from_solver = [](DesignResult r) {
    Design d{std::move(r.factor), r.trace.total_iterations, std::string(to_string(r.trace.status))};
    if (r.trace.rank_collapse) d.status += ";rank_collapse";
    return d;
  };
  switch (method) {
    case Method::closed_form:
      return {cfg.symmetric_isotropic() ? closed_form_factor(cfg) : dft_budget_factor(cfg), 0, "ok"};
    case Method::first: return {baseline_first_factor(cfg), 0, "ok"};
    case Method::mse_opt: return from_solver(solve_min_sum_mse(cfg, settings));
    case Method::mi_opt: return from_solver(solve_max_sum_mi(cfg, settings));
    case Method::mse_fair: return from_solver(solve_minmax_mse(cfg, settings));
    case Method::mi_fair: return from_solver(solve_minmax_mi(cfg, settings));
    case Method::two_user_mse: return {assemble_two_user_pilot(cfg, mse_decoupled_allocation(cfg)), 0, "ok"};
    case Method::two_user_mi: {
      const MiAllocation a = mi_alternating_bisection(cfg);
      return {assemble_two_user_pilot(cfg, a.alloc), a.iterations, a.converged ? "converged" : "iteration_cap"};
    }
    case Method::uniform: return {assemble_two_user_pilot(cfg, uniform_allocation(cfg)), 0, "ok"};
  }
  throw ConfigError("unknown method");
}

void ExperimentSpec::validate() const {
  if (methods.empty()) throw ConfigError("experiment needs at least one method");
  if (!config.is_object()) throw ConfigError("experiment needs a network config");
  settings.validate();
}

ExperimentSpec parse_spec(const json& j, const std::filesystem::path& base_dir) {
  ExperimentSpec s;
  try {
    if (j.contains("config")) s.config = j.at("config");
    else if (j.contains("config_file")) s.config = read_json(base_dir / j.at("config_file").get<std::string>());
    for (const auto& m : j.value("methods", json::array())) s.methods.push_back(method_from_string(m.get<std::string>()));
    s.kp_db = j.value("KP_dB", std::vector<double>{});
    s.rho = j.value("rho", std::vector<double>{});
    s.seed = j.value("seed", std::uint64_t{0});
    s.threads = j.value("threads", 0);
    if (j.contains("solver")) {
      const json& b = j.at("solver");
      s.settings.t0 = b.value("t0", s.settings.t0);
      s.settings.mu = b.value("mu", s.settings.mu);
      s.settings.eps1 = b.value("eps1", s.settings.eps1);
      s.settings.eps2 = b.value("eps2", s.settings.eps2);
      s.settings.Np = b.value("Np", s.settings.Np);
      s.settings.max_outer = b.value("max_outer", s.settings.max_outer);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment spec: ") + e.what());
  }
  s.validate();
  return s;
}

json with_kp_db(json config, double kp_db) {
  config.erase("P");
  config["KP_dB"] = kp_db;
  return config;
}

json with_rho(json config, double rho) {
  config.erase("R");
  config["rho"] = rho;
  return config;
}

ResultRow evaluate_method(const NetworkConfig& cfg, Method method, const BarrierSettings& settings,
                          double kp_db, double rho) {
  ResultRow row;
  row.method = std::string(to_string(method));
  row.kp_db = kp_db;
  row.rho = rho;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const Design d = design(cfg, method, settings);
    const MetricReport rep = evaluate_all(cfg, d.factor);
    row.J_norm = rep.J_norm;
    row.I_norm = rep.I_norm;
    row.eve_norm = rep.eve.normalized;
    row.J_M = rep.mse.total;
    row.I_M = rep.mi.total;
    row.mse = rep.mse.per_user;
    for (const auto& p : rep.mi.per_pair) row.mi.push_back(p.value);
    row.mse_fairness = fairness_ratio(row.mse);
    row.mi_fairness = fairness_ratio(row.mi);
    row.iterations = d.iterations;
    row.kkt_residual = mi_targeted(method) ? kkt_residual_mi(cfg, d.factor.F).residual
                                           : kkt_residual_mse(cfg, d.factor.F).residual;
    row.rank_ok = validate_anece(cfg, assemble_pilot(cfg, d.factor)).ok();
    row.status = d.status;
  } catch (const std::exception& e) {
    const auto users = static_cast<std::size_t>(cfg.users());
    row.J_norm = row.I_norm = row.eve_norm = row.J_M = row.I_M = nan;
    row.mse_fairness = row.mi_fairness = row.kkt_residual = nan;
    row.mse.assign(users, nan);
    row.mi.assign(users * (users - 1) / 2, nan);
    row.rank_ok = false;
    row.status = sanitize(std::string("error: ") + e.what());
  }
  return row;
}

ResultTable run(const ExperimentSpec& spec) {
  spec.validate();
  struct Point {
    json config;
    double kp_db;
    double rho;
  };
  std::vector<Point> grid;
  const std::vector<std::optional<double>> kps =
      spec.kp_db.empty() ? std::vector<std::optional<double>>{std::nullopt}
                         : std::vector<std::optional<double>>(spec.kp_db.begin(), spec.kp_db.end());
  const std::vector<std::optional<double>> rhos =
      spec.rho.empty() ? std::vector<std::optional<double>>{std::nullopt}
                       : std::vector<std::optional<double>>(spec.rho.begin(), spec.rho.end());
  for (const auto& kp : kps)
    for (const auto& rho : rhos) {
      json c = spec.config;
      if (kp) c = with_kp_db(std::move(c), *kp);
      if (rho) c = with_rho(std::move(c), *rho);
      const double r = grid_rho(c);
      grid.push_back({std::move(c), kp.value_or(std::numeric_limits<double>::quiet_NaN()), r});
    }

  // Parse every grid point up front so config errors stay fatal.
  std::vector<NetworkConfig> cfgs;
  for (auto& p : grid) {
    cfgs.push_back(parse_config(p.config));
    if (std::isnan(p.kp_db)) p.kp_db = grid_kp_db(cfgs.back());
  }

  ResultTable table;
  table.users = cfgs.front().users();
  const std::size_t nm = spec.methods.size();
  table.rows.resize(grid.size() * nm);
  parallel_for(table.rows.size(), spec.threads, [&](std::size_t k) {
    const std::size_t g = k / nm;
    table.rows[k] = evaluate_method(cfgs[g], spec.methods[k % nm], spec.settings, grid[g].kp_db, grid[g].rho);
  });
  return table;
}

std::vector<std::string> csv_header(int users) {
  std::vector<std::string> h = {"method", "KP_dB", "rho", "J_norm", "I_norm", "eve_norm",
                                "J_M", "I_M", "mse_fairness", "mi_fairness"};
  for (int i = 1; i <= users; ++i) h.push_back("mse_" + std::to_string(i));
  for (int i = 1; i <= users; ++i)
    for (int j = i + 1; j <= users; ++j) h.push_back("mi_" + std::to_string(i) + "_" + std::to_string(j));
  for (const char* c : {"iterations", "kkt_residual", "rank_ok", "status"}) h.emplace_back(c);
  return h;
}

std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  const auto header = csv_header(t.users);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& r : t.rows) {
    out << r.method;
    for (double v : {r.kp_db, r.rho, r.J_norm, r.I_norm, r.eve_norm, r.J_M, r.I_M, r.mse_fairness, r.mi_fairness})
      out << ',' << fmt(v);
    for (double v : r.mse) out << ',' << fmt(v);
    for (double v : r.mi) out << ',' << fmt(v);
    out << ',' << r.iterations << ',' << fmt(r.kkt_residual) << ',' << (r.rank_ok ? 1 : 0) << ','
        << sanitize(r.status) << '\n';
  }
  return out.str();
}

ResultTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  }
  ResultTable t;
  t.users = static_cast<int>(std::count_if(header.begin(), header.end(),
                                           [](const std::string& h) { return h.rfind("mse_", 0) == 0 && h != "mse_fairness"; }));
  if (header != csv_header(t.users)) throw ConfigError("unexpected CSV header");
  const auto users = static_cast<std::size_t>(t.users);
  const std::size_t pairs = users * (users - 1) / 2;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
    if (!line.empty() && line.back() == ',') c.emplace_back();
    if (c.size() != header.size()) throw ConfigError("CSV row has the wrong number of fields");
    ResultRow r;
    std::size_t k = 0;
    r.method = c[k++];
    for (double* f : {&r.kp_db, &r.rho, &r.J_norm, &r.I_norm, &r.eve_norm, &r.J_M, &r.I_M, &r.mse_fairness,
                      &r.mi_fairness})
      *f = parse_double(c[k++]);
    for (std::size_t i = 0; i < users; ++i) r.mse.push_back(parse_double(c[k++]));
    for (std::size_t i = 0; i < pairs; ++i) r.mi.push_back(parse_double(c[k++]));
    r.iterations = std::stoi(c[k++]);
    r.kkt_residual = parse_double(c[k++]);
    r.rank_ok = c[k++] == "1";
    r.status = c[k++];
    t.rows.push_back(std::move(r));
  }
  return t;
}

json to_json(const ResultTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json mse = json::array();
    json mi = json::array();
    for (double v : r.mse) mse.push_back(num(v));
    for (double v : r.mi) mi.push_back(num(v));
    rows.push_back({{"method", r.method},
                    {"KP_dB", num(r.kp_db)},
                    {"rho", num(r.rho)},
                    {"J_norm", num(r.J_norm)},
                    {"I_norm", num(r.I_norm)},
                    {"eve_norm", num(r.eve_norm)},
                    {"J_M", num(r.J_M)},
                    {"I_M", num(r.I_M)},
                    {"mse_fairness", num(r.mse_fairness)},
                    {"mi_fairness", num(r.mi_fairness)},
                    {"mse", std::move(mse)},
                    {"mi", std::move(mi)},
                    {"iterations", r.iterations},
                    {"kkt_residual", num(r.kkt_residual)},
                    {"rank_ok", r.rank_ok},
                    {"status", r.status}});
  }
  return {{"users", t.users}, {"rows", std::move(rows)}};
}

ResultTable parse_json(const json& j) {
  try {
    ResultTable t;
    t.users = j.at("users").get<int>();
    for (const auto& o : j.at("rows")) {
      ResultRow r;
      r.method = o.at("method").get<std::string>();
      r.kp_db = num(o.at("KP_dB"));
      r.rho = num(o.at("rho"));
      r.J_norm = num(o.at("J_norm"));
      r.I_norm = num(o.at("I_norm"));
      r.eve_norm = num(o.at("eve_norm"));
      r.J_M = num(o.at("J_M"));
      r.I_M = num(o.at("I_M"));
      r.mse_fairness = num(o.at("mse_fairness"));
      r.mi_fairness = num(o.at("mi_fairness"));
      for (const auto& v : o.at("mse")) r.mse.push_back(num(v));
      for (const auto& v : o.at("mi")) r.mi.push_back(num(v));
      r.iterations = o.at("iterations").get<int>();
      r.kkt_residual = num(o.at("kkt_residual"));
      r.rank_ok = o.at("rank_ok").get<bool>();
      r.status = o.at("status").get<std::string>();
      t.rows.push_back(std::move(r));
    }
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result table: ") + e.what());
  }
}

void emit(const ResultTable& t, Format format, const std::filesystem::path& path) {
  write_text(path, format == Format::csv ? to_csv(t) : to_json(t).dump(2) + "\n");
}

std::vector<FairnessRow> compare_fairness(const json& config, const std::vector<double>& kp_db,
                                          const BarrierSettings& settings, int threads) {
  std::vector<NetworkConfig> cfgs;
  for (double kp : kp_db) cfgs.push_back(parse_config(with_kp_db(config, kp)));
  constexpr Method kRuns[] = {Method::mse_opt, Method::mse_fair, Method::mi_opt, Method::mi_fair};
  std::vector<double> ratios(cfgs.size() * 4);
  parallel_for(ratios.size(), threads, [&](std::size_t k) {
    const NetworkConfig& cfg = cfgs[k / 4];
    const Design d = design(cfg, kRuns[k % 4], settings);
    if (k % 4 < 2) {
      ratios[k] = fairness_ratio(user_mse(cfg, d.factor.F).per_user);
    } else {
      std::vector<double> mi;
      for (const auto& p : sum_mi(cfg, d.factor.F).per_pair) mi.push_back(p.value);
      ratios[k] = fairness_ratio(mi);
    }
  });
  std::vector<FairnessRow> out;
  for (std::size_t g = 0; g < cfgs.size(); ++g)
    out.push_back({kp_db[g], ratios[4 * g], ratios[4 * g + 1], ratios[4 * g + 2], ratios[4 * g + 3]});
  return out;
}

std::string fairness_csv(const std::vector<FairnessRow>& rows) {
  std::string out = "KP_dB,mse_sum_ratio,mse_fair_ratio,mi_sum_ratio,mi_fair_ratio\n";
  for (const auto& r : rows)
    out += fmt(r.kp_db) + ',' + fmt(r.mse_sum_ratio) + ',' + fmt(r.mse_fair_ratio) + ',' + fmt(r.mi_sum_ratio) +
           ',' + fmt(r.mi_fair_ratio) + '\n';
  return out;
}

}  // namespace anece
