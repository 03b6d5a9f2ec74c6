#include "anece/config_io.hpp"
#include "anece/experiment.hpp"
#include "anece/kernels.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace anece;
using nlohmann::json;

namespace {

json report_json(const NetworkConfig& cfg, const CMatrix& F, const StackedPilot& sp, const std::string& metrics) {
  json out;
  std::istringstream list(metrics);
  for (std::string m; std::getline(list, m, ',');) {
    if (m == "mse") {
      const MseResult r = user_mse(cfg, F);
      out["mse"] = {{"per_user", r.per_user}, {"total", r.total}};
      if (cfg.equal_antennas()) out["J_norm"] = normalize(cfg, r.total, 0.0).first;
    } else if (m == "mi") {
      const MiResult r = sum_mi(cfg, F);
      json pairs = json::array();
      for (const auto& p : r.per_pair) pairs.push_back({{"i", p.i + 1}, {"j", p.j + 1}, {"value", p.value}});
      out["mi"] = {{"per_pair", pairs}, {"total", r.total}};
      if (cfg.equal_antennas()) out["I_norm"] = normalize(cfg, 0.0, r.total).second;
    } else if (m == "eve") {
      const EveResult r = eve_mse(cfg, sp);
      out["eve"] = {{"per_user", r.per_user}, {"normalized", r.normalized}};
    } else {
      throw ConfigError("unknown metric: " + m);
    }
  }
  const RankReport rank = validate_anece(cfg, sp);
  out["rank_ok"] = rank.ok();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-eavesdropping pilot design and evaluation"};
  app.require_subcommand(1);
  std::string kernels;
  app.add_option("--kernels", kernels, "Force a kernel backend (scalar or avx2)");

  BarrierSettings settings;
  auto add_solver_options = [&](CLI::App* sub) {
    sub->add_option("--t0", settings.t0, "Initial barrier weight");
    sub->add_option("--mu", settings.mu, "Barrier weight growth factor");
    sub->add_option("--eps1", settings.eps1, "Outer tolerance");
    sub->add_option("--eps2", settings.eps2, "Inner tolerance");
    sub->add_option("--np", settings.Np, "Inner iteration cap");
  };

  std::string config_path, method_name = "mse-opt", out_path, pilot_path, metrics = "mse,mi,eve", spec_path;
  std::string format = "csv";
  std::vector<double> kp_grid;
  int threads = 0;

  auto* design_cmd = app.add_subcommand("design", "Design a pilot and write it as JSON");
  design_cmd->add_option("--config", config_path, "Network config JSON")->required();
  design_cmd->add_option("--method", method_name, "Design method");
  design_cmd->add_option("--out", out_path, "Output pilot JSON")->required();
  add_solver_options(design_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a pilot");
  eval_cmd->add_option("--config", config_path, "Network config JSON")->required();
  eval_cmd->add_option("--pilot", pilot_path, "Pilot JSON")->required();
  eval_cmd->add_option("--metrics", metrics, "Comma-separated subset of mse,mi,eve");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment grid");
  sweep_cmd->add_option("--spec", spec_path, "Experiment spec JSON")->required();
  sweep_cmd->add_option("--out", out_path, "Output table")->required();
  sweep_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* fair_cmd = app.add_subcommand("fairness", "Compare fair and sum designs over a power grid");
  fair_cmd->add_option("--config", config_path, "Network config JSON")->required();
  fair_cmd->add_option("--kp-db", kp_grid, "KP grid in dB")->required();
  fair_cmd->add_option("--out", out_path, "Output CSV")->required();
  fair_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");
  add_solver_options(fair_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels.empty()) {
      const auto b = kernels == "scalar" ? kernels::Backend::scalar : kernels::Backend::avx2;
      if (!kernels::available(b)) throw ConfigError("kernel backend not available: " + kernels);
      kernels::select(b);
    }
    if (*design_cmd) {
      const NetworkConfig cfg = load_config(config_path);
      const Design d = design(cfg, method_from_string(method_name), settings);
      json out = pilot_to_json(cfg, d.factor);
      out["method"] = method_name;
      out["status"] = d.status;
      out["iterations"] = d.iterations;
      write_text(out_path, out.dump(2) + "\n");
      std::cout << method_name << ": " << d.status << "\n";
    } else if (*eval_cmd) {
      const NetworkConfig cfg = load_config(config_path);
      const PilotFile pf = pilot_from_json(cfg, read_json(pilot_path));
      // Metrics only depend on F F^H, which the effective factor reproduces.
      const CMatrix F = pf.factor ? pf.factor->F : effective_factor(cfg, pf.stacked);
      std::cout << report_json(cfg, F, pf.stacked, metrics).dump(2) << "\n";
    } else if (*sweep_cmd) {
      const std::filesystem::path sp(spec_path);
      const ExperimentSpec spec = parse_spec(read_json(sp), sp.parent_path());
      const ResultTable table = run(spec);
      emit(table, format == "csv" ? Format::csv : Format::json, out_path);
      std::cout << table.rows.size() << " rows written to " << out_path << "\n";
    } else if (*fair_cmd) {
      const json config = read_json(config_path);
      write_text(out_path, fairness_csv(compare_fairness(config, kp_grid, settings, threads)));
      std::cout << "fairness table written to " << out_path << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
