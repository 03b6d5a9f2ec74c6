#include "anece/closed_form.hpp"
#include "anece/config_io.hpp"
#include "anece/experiment.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace anece;
using namespace anece::testing;
using nlohmann::json;

namespace {

ExperimentSpec scalar_spec() {
  return parse_spec({{"config", {{"M", 2}, {"N", 1}}},
                     {"methods", {"closed-form", "first", "mse-opt", "mi-opt", "two-user-mse", "two-user-mi", "uniform"}},
                     {"KP_dB", {10.0, 25.0}},
                     {"threads", 1}});
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "anece_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config parsing") {
    const NetworkConfig cfg = parse_config({{"M", 3}, {"N", 2}, {"KP_dB", 20.0}, {"sigma2", {1.0, 0.6, 0.1}}, {"rho", 0.5}});
    CHECK(cfg.users() == 3);
    CHECK(cfg.rank() == 4);
    CHECK(cfg.pilot_length() == 4);
    CHECK(cfg.budget(2) == doctest::Approx(100.0));
    CHECK(cfg.noise(2) == doctest::Approx(0.1));
    CHECK(cfg.correlation(1)(0, 1).real() == doctest::Approx(0.5));

    const NetworkConfig defaults = parse_config({{"M", 2}});
    CHECK(defaults.antennas(0) == 1);
    CHECK(defaults.power(1) == 1.0);
    CHECK(defaults.eve_antennas() == 1);
    CHECK(defaults.symmetric_isotropic());

    const NetworkConfig explicit_r = parse_config(
        {{"M", 2}, {"N", 2}, {"K", 5}, {"r", 3}, {"P", {1.0, 2.0}}, {"N_E", 2}, {"sigmaE2", 0.5},
         {"R", {matrix_to_json(CMatrix::identity(2)), matrix_to_json(exp_correlation(2, 0.3))}}});
    CHECK(explicit_r.pilot_length() == 5);
    CHECK(explicit_r.rank() == 3);
    CHECK(explicit_r.budget(1) == doctest::Approx(10.0));
    CHECK(explicit_r.eve_variance(0) == 0.5);
    CHECK(max_abs_diff(explicit_r.correlation(1), exp_correlation(2, 0.3)) < 1e-15);

    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS(parse_config({{"N", 2}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"M", 1}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"M", 2}, {"P", 1.0}, {"KP_dB", 0.0}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"M", 3}, {"sigma2", {1.0, 2.0}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"M", 2}, {"rho", 1.0}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"M", 2}, {"N", "two"}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"M", 2}, {"N", 2}, {"r", 1}}), ConfigError);
  }

  TEST_CASE("matrix and pilot serialization") {
    Rng rng(80);
    const CMatrix m = random_matrix(rng, 3, 2);
    const json j = matrix_to_json(m);
    CHECK(j.at("rows") == 3);
    CHECK(j.at("data").size() == 6);
    CHECK(matrix_from_json(j) == m);
    CHECK(matrix_from_json(json::parse(j.dump())) == m);
    CHECK_THROWS_AS(matrix_from_json({{"rows", 2}, {"cols", 2}, {"data", {{1.0, 0.0}}}}), ConfigError);
    CHECK_THROWS_AS(matrix_from_json({{"rows", 1}, {"cols", 1}, {"data", {{1.0, 0.0, 2.0}}}}), ConfigError);

    const NetworkConfig cfg = random_config(rng, 3, 2);
    const PilotFactor pf = make_factor(cfg, random_feasible(rng, cfg));
    const json pj = pilot_to_json(cfg, pf);
    const PilotFile back = pilot_from_json(cfg, json::parse(pj.dump()));
    REQUIRE(back.factor.has_value());
    CHECK(back.factor->F == pf.F);
    CHECK(back.factor->V == pf.V);
    CHECK(back.stacked.P == assemble_pilot(cfg, pf).P);

    const PilotFile from_p = pilot_from_json(cfg, {{"P", pj.at("P")}});
    CHECK_FALSE(from_p.factor.has_value());
    CHECK(max_abs_diff(gram(effective_factor(cfg, from_p.stacked)), gram(pf.F)) < 1e-10 * gram(pf.F).norm());
    CHECK_THROWS_AS(pilot_from_json(cfg, json::object()), ConfigError);
  }

  TEST_CASE("spec parsing") {
    const auto cfg_path = scratch("spec_config.json");
    write_text(cfg_path, json({{"M", 2}, {"N", 2}}).dump());
    const ExperimentSpec s = parse_spec(
        {{"config_file", cfg_path.filename().string()}, {"methods", {"first"}}, {"rho", {0.0, 0.5}}, {"seed", 7},
         {"solver", {{"t0", 2.0}, {"mu", 20.0}, {"eps1", 1e-5}, {"eps2", 1e-7}, {"Np", 100}}}},
        cfg_path.parent_path());
    CHECK(s.config.at("N") == 2);
    CHECK(s.rho == std::vector<double>{0.0, 0.5});
    CHECK(s.seed == 7);
    CHECK(s.settings.t0 == 2.0);
    CHECK(s.settings.mu == 20.0);
    CHECK(s.settings.eps2 == 1e-7);
    CHECK(s.settings.Np == 100);

    CHECK_THROWS_AS(parse_spec({{"config", {{"M", 2}}}, {"methods", json::array()}}), ConfigError);
    CHECK_THROWS_AS(parse_spec({{"config", {{"M", 2}}}, {"methods", {"best"}}}), ConfigError);
    CHECK_THROWS_AS(parse_spec({{"methods", {"first"}}}), ConfigError);
    CHECK_THROWS_AS(parse_spec({{"config", {{"M", 2}}}, {"methods", {"first"}}, {"solver", {{"mu", 0.5}}}}), ConfigError);
    CHECK(method_from_string("two-user-mi") == Method::two_user_mi);
    CHECK(to_string(Method::mse_fair) == "mse-fair");
  }

  TEST_CASE("grid helpers") {
    const json c = with_kp_db({{"M", 2}, {"P", 3.0}}, 20.0);
    CHECK_FALSE(c.contains("P"));
    CHECK(parse_config(c).budget(0) == doctest::Approx(100.0));
    const json r = with_rho({{"M", 2}, {"N", 2}}, 0.4);
    CHECK(parse_config(r).correlation(0)(1, 0).real() == doctest::Approx(0.4));
  }

  TEST_CASE("single-stream networks make every method agree") {
    const ResultTable t = run(scalar_spec());
    REQUIRE(t.rows.size() == 14);
    for (std::size_t g = 0; g < 2; ++g) {
      const ResultRow& ref = t.rows[g * 7];
      CHECK(ref.kp_db == (g == 0 ? 10.0 : 25.0));
      for (std::size_t k = 0; k < 7; ++k) {
        const ResultRow& r = t.rows[g * 7 + k];
        CHECK(r.method == std::string(to_string(scalar_spec().methods[k])));
        CHECK(std::abs(r.J_norm - ref.J_norm) < 1e-3 * ref.J_norm);
        CHECK(std::abs(r.I_norm - ref.I_norm) < 1e-3 * ref.I_norm);
        CHECK(r.mse_fairness >= 1.0);
        CHECK(r.mi_fairness >= 1.0);
        CHECK(r.rank_ok);
        CHECK(std::isfinite(r.kkt_residual));
      }
    }
  }

  TEST_CASE("high-power closed-form row") {
    const ResultTable t = run(parse_spec(
        {{"config", {{"M", 3}, {"N", 4}}}, {"methods", {"closed-form"}}, {"KP_dB", {60.0}}, {"rho", {0.0}}}));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].J_norm * 1e6 == doctest::Approx(16.0 / 3.0).epsilon(0.01));
  }

  TEST_CASE("failures stay in their rows") {
    const ExperimentSpec s =
        parse_spec({{"config", {{"M", 3}}}, {"methods", {"first", "two-user-mse"}}, {"KP_dB", {0.0, 10.0, 20.0}}});
    const ResultTable t = run(s);
    REQUIRE(t.rows.size() == 6);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      if (k % 2 == 0) {
        CHECK(t.rows[k].status == "ok");
      } else {
        CHECK(t.rows[k].status.rfind("error: ", 0) == 0);
        CHECK(std::isnan(t.rows[k].J_norm));
        CHECK(t.rows[k].mse.size() == 3);
        CHECK(t.rows[k].mi.size() == 3);
      }
    }
    const ResultTable csv = parse_csv(to_csv(t));
    CHECK(csv.rows[1].status == t.rows[1].status);
    CHECK(std::isnan(csv.rows[1].J_norm));
    CHECK(std::isnan(parse_json(to_json(t)).rows[1].mse[2]));
    CHECK_THROWS_AS(run(parse_spec({{"config", {{"M", 3}, {"rho", 2.0}}}, {"methods", {"first"}}})), ConfigError);
  }

  TEST_CASE("output formats") {
    const auto header = csv_header(3);
    const std::vector<std::string> expected = {
        "method", "KP_dB", "rho", "J_norm", "I_norm", "eve_norm", "J_M", "I_M", "mse_fairness", "mi_fairness",
        "mse_1", "mse_2", "mse_3", "mi_1_2", "mi_1_3", "mi_2_3", "iterations", "kkt_residual", "rank_ok", "status"};
    CHECK(header == expected);

    const ResultTable empty{3, {}};
    const std::string text = to_csv(empty);
    CHECK(text == "method,KP_dB,rho,J_norm,I_norm,eve_norm,J_M,I_M,mse_fairness,mi_fairness,mse_1,mse_2,mse_3,"
                  "mi_1_2,mi_1_3,mi_2_3,iterations,kkt_residual,rank_ok,status\n");
    CHECK(parse_csv(text) == empty);
    CHECK(parse_json(to_json(empty)) == empty);

    const ResultTable t = run(scalar_spec());
    CHECK(parse_csv(to_csv(t)) == t);
    CHECK(parse_json(json::parse(to_json(t).dump())) == t);

    const auto csv_path = scratch("table.csv");
    const auto json_path = scratch("table.json");
    emit(t, Format::csv, csv_path);
    emit(t, Format::json, json_path);
    std::ifstream c(csv_path);
    const std::string on_disk((std::istreambuf_iterator<char>(c)), std::istreambuf_iterator<char>());
    CHECK(on_disk == to_csv(t));
    CHECK(parse_json(read_json(json_path)) == t);
    CHECK_THROWS_AS(parse_csv("a,b\n"), ConfigError);
    CHECK_THROWS_AS(emit(t, Format::csv, scratch("missing_dir") / "x" / "t.csv"), std::runtime_error);
  }

  TEST_CASE("runs are deterministic") {
    ExperimentSpec s = parse_spec({{"config", {{"M", 3}, {"N", 1}}},
                                   {"methods", {"closed-form", "mse-opt", "mi-fair"}},
                                   {"KP_dB", {10.0}},
                                   {"rho", {0.0, 0.5}},
                                   {"seed", 3}});
    s.threads = 1;
    const std::string a = to_csv(run(s));
    s.threads = 3;
    const std::string b = to_csv(run(s));
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 3 * 2);
  }

  TEST_CASE("fairness comparison on a symmetric network") {
    const auto rows = compare_fairness({{"M", 3}, {"N", 1}}, {10.0}, {}, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mse_sum_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rows[0].mse_fair_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rows[0].mi_sum_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rows[0].mi_fair_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fairness_csv(rows).rfind("KP_dB,mse_sum_ratio,mse_fair_ratio,mi_sum_ratio,mi_fair_ratio\n10,", 0) == 0);
  }
}
