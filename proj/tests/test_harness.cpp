// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "shotfield/harness.hpp"
#include "shotfield/stats.hpp"
#include "shotfield/limits.hpp"
#include "test_util.hpp"

using namespace shotfield;
using namespace shotfield::harness;

namespace {

ExperimentConfig poisson_config() {
  ExperimentConfig c;
  c.name = "poisson_smoke";
  c.process = ProcessKind::poisson;
  c.law = amplitudes::AmplitudeLaw::exponential(1.0);
  c.response = shotnoise::ResponseFn::gauss_bump(1.0, 1.0);
  c.window = Window{1, 10.0, Boundary::padded, 0.0};
  c.query.positions = {make_point(5.0)};
  c.query.weights = {1.0};
  c.lambda_grid = {10.0};
  c.replicates = 200;
  c.seed = 1234;
  c.emit_samples = true;
  return c;
}

ExperimentConfig dpp_config() {
  ExperimentConfig c;
  c.name = "dpp_smoke";
  c.process = ProcessKind::dpp;
  c.dpp_epsilon = 0.5;
  c.law = amplitudes::AmplitudeLaw::deterministic(1.0);
  c.response = shotnoise::ResponseFn::ball_indicator(0.3);
  c.window = Window{1, 4.0, Boundary::torus, 0.0};
  c.query.positions = {make_point(2.0)};
  c.query.weights = {1.0};
  c.lambda_grid = {20.0};
  c.replicates = 400;
  c.seed = 77;
  c.centralize = false;
  c.emit_samples = false;
  return c;
}

}  // namespace

TEST_CASE("config json round trip") {
  ExperimentConfig c = poisson_config();
  c.assertions = {{"ks_p_final", 0.01}, {"variance_final_rel_gap", 0.05}};
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.name == c.name);
  CHECK(back.lambda_grid == c.lambda_grid);
  CHECK(back.replicates == c.replicates);
  CHECK(back.seed == c.seed);
  CHECK(back.assertions.size() == 2);
  CHECK(back.query.positions[0][0] == c.query.positions[0][0]);
  back.validate();
}

TEST_CASE("config validation rejects bad setups") {
  ExperimentConfig c = poisson_config();
  c.lambda_grid = {10.0, 10.0};
  CHECK_THROWS(c.validate());

  c = poisson_config();
  c.replicates = 50;
  CHECK_THROWS(c.validate());

  c = poisson_config();
  c.window.boundary = Boundary::torus;
  CHECK_THROWS(c.validate());

  c = dpp_config();
  c.window.length = 0.5;  // shorter than the kick support
  CHECK_THROWS(c.validate());

  c = dpp_config();
  c.compute_fredholm = true;
  c.centralize = true;
  CHECK_THROWS(c.validate());
}

TEST_CASE("smoke run produces one row with persisted fields") {
  const auto rep = run_experiment(poisson_config());
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows.front();
  CHECK(row.replicates == 200);
  CHECK(row.raw_fields.size() == 200);
  CHECK(row.scaled_fields.size() == 200);
  CHECK(row.reduced.size() == 200);
  CHECK(row.empirical.n == 200);
  CHECK(row.theory.variance_limit ==
        doctest::Approx(2.0 * std::sqrt(M_PI / 2.0)).epsilon(1e-6));
  CHECK(rep.all_passed);
}

TEST_CASE("determinism across thread counts") {
  ExperimentConfig c = poisson_config();
  c.replicates = 500;
  c.lambda_grid = {10.0, 20.0};
  c.threads = 1;
  const std::string a = run_experiment(c).to_json();
  c.threads = 2;
  const std::string b = run_experiment(c).to_json();
  c.threads = 4;
  const std::string d = run_experiment(c).to_json();
  CHECK(a == b);
  CHECK(a == d);
}

TEST_CASE("restricted and full poisson sampling agree in law") {
  ExperimentConfig c = poisson_config();
  c.window = Window{1, 60.0, Boundary::padded, 0.0};
  c.query.positions = {make_point(30.0)};
  c.replicates = 4000;
  c.restrict_sampling = true;
  const auto r1 = run_experiment(c);
  CHECK(r1.rows[0].sampling_mode == "poisson_restricted");
  c.restrict_sampling = false;
  c.seed = 999;  // independent draw of the same law
  const auto r2 = run_experiment(c);
  CHECK(r2.rows[0].sampling_mode == "poisson_padded");

  const auto& e1 = r1.rows[0].empirical;
  const auto& e2 = r2.rows[0].empirical;
  const double se = std::sqrt(e1.variance / e1.n + e2.variance / e2.n);
  CHECK(std::abs(e1.mean - e2.mean) <= 5.0 * se);
  const double lap_se =
      std::hypot(e1.laplace_se, e2.laplace_se);
  CHECK(std::abs(e1.laplace_mc - e2.laplace_mc) <= 5.0 * lap_se);
}

TEST_CASE("restricted and full dpp sampling agree in law") {
  ExperimentConfig c = dpp_config();
  c.replicates = 3000;
  c.restrict_sampling = true;
  const auto r1 = run_experiment(c);
  CHECK(r1.rows[0].sampling_mode == "dpp_restricted_torus");
  CHECK(r1.rows[0].sampling_extent < 1.0);

  c.restrict_sampling = false;
  c.seed = 31;
  const auto r2 = run_experiment(c);
  CHECK(r2.rows[0].sampling_mode == "dpp_torus");

  const auto& e1 = r1.rows[0].empirical;
  const auto& e2 = r2.rows[0].empirical;
  const double lap_se = std::hypot(e1.laplace_se, e2.laplace_se);
  CHECK(std::abs(e1.laplace_mc - e2.laplace_mc) <= 5.0 * lap_se);
  const double se = std::sqrt(e1.variance / e1.n + e2.variance / e2.n);
  CHECK(std::abs(e1.mean - e2.mean) <= 5.0 * se);
}

TEST_CASE("gaussian mini sweep variance and ks behave") {
  ExperimentConfig c = poisson_config();
  c.replicates = 3000;
  c.lambda_grid = {10.0, 100.0};
  c.assertions = {{"variance_final_rel_gap", 0.10},
                  {"ks_p_final", 0.001}};
  const auto rep = run_experiment(c);
  const auto& last = rep.rows.back();
  CHECK(test_util::close_rel(last.empirical.variance,
                             last.theory.variance_limit, 0.1));
  CHECK(last.empirical.ks_p > 0.001);
  CHECK(rep.all_passed);
  // The mean of the centered field is near zero.
  const double se =
      std::sqrt(last.empirical.variance / static_cast<double>(last.empirical.n));
  CHECK(std::abs(last.empirical.mean) <= 4.0 * se);
}

TEST_CASE("stable mini sweep recovers the scale") {
  ExperimentConfig c = poisson_config();
  c.name = "stable_smoke";
  c.law = amplitudes::AmplitudeLaw::pareto(1.5, 1.0);
  c.replicates = 5000;
  c.lambda_grid = {2000.0};
  const auto rep = run_experiment(c);
  const auto& row = rep.rows.back();
  CHECK(row.theory.sigma > 0.0);
  CHECK(std::abs(row.empirical.sigma_hat / row.theory.sigma - 1.0) < 0.2);
  CHECK(row.empirical.cf_distance < 0.1);
}

TEST_CASE("prelimit oracle assertion passes on a small run") {
  ExperimentConfig c = poisson_config();
  c.replicates = 20'000;
  c.lambda_grid = {10.0};
  c.law = amplitudes::AmplitudeLaw::deterministic(1.0);
  c.compute_prelimit = true;
  c.assertions = {{"laplace_mc_vs_prelimit_each", 4.0}};
  const auto rep = run_experiment(c);
  REQUIRE(rep.rows[0].theory.prelimit_laplace.has_value());
  CHECK(rep.all_passed);
}

TEST_CASE("fredholm oracle assertion passes on a small run") {
  ExperimentConfig c = dpp_config();
  c.response = shotnoise::ResponseFn::gauss_bump(1.0, 0.05);
  c.replicates = 8000;
  c.lambda_grid = {15.0};
  c.compute_fredholm = true;
  c.fredholm_panel_order = 4;
  c.assertions = {{"laplace_mc_vs_fredholm_each", 4.0},
                  {"fredholm_self_convergence", 1e-4}};
  const auto rep = run_experiment(c);
  REQUIRE(rep.rows[0].theory.fredholm_laplace.has_value());
  CHECK(rep.all_passed);
}

TEST_CASE("outputs are written") {
  namespace fs = std::filesystem;
  const std::string dir = "harness_out_test";
  fs::remove_all(dir);
  ExperimentConfig c = poisson_config();
  c.replicates = 150;
  const auto rep = run_experiment(c);
  write_outputs(rep, dir);
  CHECK(fs::exists(dir + "/report.json"));
  CHECK(fs::exists(dir + "/samples.csv"));
  CHECK(fs::exists(dir + "/theory.csv"));
  CHECK(fs::exists(dir + "/plotdata/variance_vs_lambda.csv"));
  CHECK(fs::exists(dir + "/plotdata/ecf_vs_cf_0.csv"));
  CHECK(fs::exists(dir + "/plotdata/ecdf_vs_limit_0.csv"));

  std::ifstream is(dir + "/samples.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "lambda,replicate_id,z_index,I,I_tilde");
  std::size_t lines = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 150);
  fs::remove_all(dir);
}

TEST_CASE("two dimensional runs for both process types") {
  ExperimentConfig c;
  c.name = "planar_poisson";
  c.process = ProcessKind::poisson;
  c.law = amplitudes::AmplitudeLaw::exponential(1.0);
  c.response = shotnoise::ResponseFn::gauss_bump(1.0, 0.4);
  c.window = Window{2, 8.0, Boundary::padded, 0.0};
  c.query.positions = {make_point(4.0, 4.0)};
  c.query.weights = {1.0};
  c.lambda_grid = {40.0};
  c.replicates = 1500;
  c.seed = 5150;
  {
    const auto rep = run_experiment(c);
    const auto& row = rep.rows[0];
    // Limit variance m2 * Int l^2 = 2 * (pi/2) w^2 in the plane.
    CHECK(row.theory.variance_limit ==
          doctest::Approx(2.0 * 0.5 * M_PI * 0.16).epsilon(1e-6));
    CHECK(test_util::close_rel(row.empirical.variance,
                               row.theory.variance_limit, 0.25));
  }

  ExperimentConfig d;
  d.name = "planar_dpp";
  d.process = ProcessKind::dpp;
  d.dpp_epsilon = 0.5;
  d.law = amplitudes::AmplitudeLaw::deterministic(1.0);
  d.response = shotnoise::ResponseFn::ball_indicator(0.25);
  d.response = shotnoise::ResponseFn::ball_indicator(0.2);
  d.window = Window{2, 0.6, Boundary::torus, 0.0};
  d.query.positions = {make_point(0.3, 0.3)};
  d.query.weights = {1.0};
  d.lambda_grid = {175.0};
  d.replicates = 800;
  d.seed = 5151;
  d.centralize = false;
  {
    const auto rep = run_experiment(d);
    const auto& row = rep.rows[0];
    // At this kernel bandwidth the covering region cannot beat the
    // window, so the run stays on the configured torus.
    CHECK(row.sampling_mode == "dpp_torus");
    CHECK(row.kernel_scale_ratio >= 50.0);
    // Mean of the raw field: lambda * c_l (unit amplitudes).
    const auto mom = stats::sample_moments(row.reduced);
    const double target = 175.0 * M_PI * 0.2 * 0.2;
    const double se = std::sqrt(mom.variance / row.reduced.size());
    CHECK(std::abs(mom.mean - target) <= 4.0 * se);
  }
}

TEST_CASE("joint check with one-hot weights equals the marginal check") {
  Rng rng(64);
  const auto law = amplitudes::AmplitudeLaw::exponential(1.0);
  const auto resp = shotnoise::ResponseFn::gauss_bump(1.0, 0.5);
  const std::vector<double> grid{-1.0, -0.5, 0.5, 1.0};

  // Two-column sample matrix; the second column is noise.
  const std::size_t n = 2000;
  std::vector<double> matrix(2 * n);
  std::vector<double> first(n);
  const double sd = std::sqrt(2.0 * resp.integral(1) * resp.sup_bound()) * 0.4;
  for (std::size_t r = 0; r < n; ++r) {
    matrix[2 * r] = sd * rng.normal();
    matrix[2 * r + 1] = rng.normal();
    first[r] = matrix[2 * r];
  }
  shotnoise::FddQuery joint;
  joint.positions = {make_point(1.0), make_point(3.0)};
  joint.weights = {1.0, 0.0};
  shotnoise::FddQuery marginal;
  marginal.positions = {make_point(1.0)};
  marginal.weights = {1.0};

  const auto a = fdd_joint_check(matrix, joint, law, resp, 1, grid);
  const auto b = fdd_joint_check(first, marginal, law, resp, 1, grid);
  CHECK(a.gaussian);
  CHECK(a.variance_limit == doctest::Approx(b.variance_limit).epsilon(1e-9));
  CHECK(a.ks_stat == doctest::Approx(b.ks_stat).epsilon(1e-12));
  CHECK(a.ks_p == doctest::Approx(b.ks_p).epsilon(1e-12));
  CHECK(a.cf_distance == doctest::Approx(b.cf_distance).epsilon(1e-12));

  // Coincident positions: the reduced variance carries (s1+s2)^2.
  shotnoise::FddQuery pair;
  pair.positions = {make_point(1.0), make_point(1.0)};
  pair.weights = {0.6, 0.4};
  const auto c = fdd_joint_check(matrix, pair, law, resp, 1, grid);
  CHECK(c.variance_limit == doctest::Approx(b.variance_limit).epsilon(1e-8));

  CHECK_THROWS(fdd_joint_check(std::vector<double>(3), joint, law, resp, 1, grid));
}

TEST_CASE("unknown assertion type is rejected") {
  ExperimentConfig c = poisson_config();
  c.assertions = {{"bogus_check", 1.0}};
  CHECK_THROWS(run_experiment(c));
}
