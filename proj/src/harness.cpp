// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "shotfield/fredholm.hpp"
#include "shotfield/limits.hpp"
#include "shotfield/pointproc.hpp"
#include "shotfield/stats.hpp"

namespace shotfield::harness {

using amplitudes::AmplitudeLaw;
using shotnoise::FddQuery;
using shotnoise::ResponseFn;

void ExperimentConfig::validate() const {
  SF_REQUIRE(!lambda_grid.empty(), "config: lambda grid must not be empty");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    SF_REQUIRE(lambda_grid[i] > lambda_grid[i - 1],
               "config: lambda grid must be strictly increasing");
  SF_REQUIRE(replicates >= 100, "config: at least 100 replicates required");
  if (process == ProcessKind::poisson) {
    SF_REQUIRE(window.boundary == Boundary::padded,
               "config: poisson experiments run in padded mode");
  } else {
    SF_REQUIRE(window.boundary == Boundary::torus,
               "config: dpp experiments run in torus mode");
    // Wrap-around control: generous margin for tailed responses, the
    // exact support plus kernel clearance for the indicator.
    const double r = response.effective_radius();
    if (response.compact_support())
      SF_REQUIRE(window.length >= 2.05 * r,
                 "config: torus shorter than the kick support");
    else
      SF_REQUIRE(window.length >= 10.0 * r,
                 "config: torus must be at least 10 effective radii");
    // The window must dwarf the kernel bandwidth at every intensity in
    // the sweep (the bandwidth is largest at the smallest intensity).
    const double s_max = std::pow(M_PI, -0.5) *
                         std::pow(lambda_grid.front(),
                                  -(1.0 + dpp_epsilon) / window.dim);
    SF_REQUIRE(window.length >= 50.0 * s_max,
               "config: torus must be at least 50 kernel bandwidths");
  }
  Window effective = window;
  if (effective.boundary == Boundary::padded)
    effective.pad = std::max(effective.pad, response.effective_radius());
  query.validate(effective, response);
  if (compute_prelimit)
    SF_REQUIRE(process == ProcessKind::poisson && centralize,
               "config: the pre-limit oracle applies to centralized poisson runs");
  if (compute_fredholm)
    SF_REQUIRE(process == ProcessKind::dpp && !centralize,
               "config: the determinant oracle applies to raw dpp fields");
  if (!stats.cf_grid.empty())
    for (double t : stats.cf_grid)
      SF_REQUIRE(std::isfinite(t), "config: cf grid must be finite");
}

namespace {

nlohmann::ordered_json window_to_json(const Window& w) {
  return {{"dim", w.dim},
          {"length", w.length},
          {"boundary", w.boundary == Boundary::torus ? "torus" : "padded"}};
}

Window window_from_json(const nlohmann::json& j) {
  Window w;
  w.dim = j.at("dim").get<int>();
  w.length = j.at("length").get<double>();
  const std::string b = j.at("boundary").get<std::string>();
  SF_REQUIRE(b == "torus" || b == "padded", "window: unknown boundary mode");
  w.boundary = b == "torus" ? Boundary::torus : Boundary::padded;
  return w;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  if (process == ProcessKind::poisson)
    j["process"] = {{"kind", "poisson"}};
  else
    j["process"] = {{"kind", "dpp"}, {"epsilon", dpp_epsilon}};
  j["amplitude"] = nlohmann::ordered_json::parse(law.to_json());
  j["response"] = nlohmann::ordered_json::parse(response.to_json());
  j["window"] = window_to_json(window);
  nlohmann::ordered_json positions = nlohmann::ordered_json::array();
  for (const Point& z : query.positions) {
    nlohmann::ordered_json p = nlohmann::ordered_json::array();
    for (int a = 0; a < window.dim; ++a) p.push_back(z[a]);
    positions.push_back(p);
  }
  j["query"] = {{"positions", positions}, {"weights", query.weights}};
  // The worker thread count is a runtime knob, deliberately left out:
  // report bytes depend only on the experiment definition.
  j["lambda_grid"] = lambda_grid;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["centralize"] = centralize;
  j["emit_samples"] = emit_samples;
  j["compute_prelimit"] = compute_prelimit;
  j["compute_fredholm"] = compute_fredholm;
  j["fredholm_panel_order"] = fredholm_panel_order;
  j["restrict_sampling"] = restrict_sampling;
  j["cf_grid"] = stats.cf_grid;
  nlohmann::ordered_json asserts = nlohmann::ordered_json::array();
  for (const AssertionSpec& a : assertions)
    asserts.push_back({{"type", a.type}, {"value", a.value}});
  j["assertions"] = asserts;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.name = j.value("name", std::string("experiment"));
  const auto& pj = j.at("process");
  const std::string pk = pj.at("kind").get<std::string>();
  if (pk == "poisson") {
    c.process = ProcessKind::poisson;
  } else if (pk == "dpp") {
    c.process = ProcessKind::dpp;
    c.dpp_epsilon = pj.at("epsilon").get<double>();
  } else {
    throw invalid_input("config: unknown process kind '" + pk + "'");
  }
  c.law = AmplitudeLaw::from_json(j.at("amplitude").dump());
  c.response = ResponseFn::from_json(j.at("response").dump());
  c.window = window_from_json(j.at("window"));
  c.query.positions.clear();
  for (const auto& p : j.at("query").at("positions")) {
    Point z;
    for (std::size_t a = 0; a < p.size() && a < 2; ++a)
      z[static_cast<int>(a)] = p[a].get<double>();
    c.query.positions.push_back(z);
  }
  c.query.weights = j.at("query").at("weights").get<std::vector<double>>();
  c.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  c.replicates = j.at("replicates").get<int>();
  c.seed = j.value("seed", std::uint64_t{1});
  c.threads = j.value("threads", 0);
  c.centralize = j.value("centralize", true);
  c.emit_samples = j.value("emit_samples", true);
  c.compute_prelimit = j.value("compute_prelimit", false);
  c.compute_fredholm = j.value("compute_fredholm", false);
  c.fredholm_panel_order = j.value("fredholm_panel_order", 4);
  c.restrict_sampling = j.value("restrict_sampling", true);
  if (j.contains("cf_grid"))
    c.stats.cf_grid = j.at("cf_grid").get<std::vector<double>>();
  if (j.contains("assertions"))
    for (const auto& a : j.at("assertions"))
      c.assertions.push_back(
          {a.at("type").get<std::string>(), a.value("value", 0.0)});
  return c;
}

namespace {

// Sampling geometry for one intensity row.  When the query support is
// small against the window, the run samples only a covering region:
// for poisson this is exact by independence; for the determinantal
// process the covering torus carries the same kernel on the support
// (restriction property), with a clearance of many kernel bandwidths
// before the seam.
struct Geometry {
  Window sample_window;
  FddQuery query;              // shifted into sampling coordinates
  bool plain_displacement = false;  // evaluate kicks without wrapping
  std::string mode;
  double extent = 0.0;
};

Geometry make_geometry(const ExperimentConfig& cfg, double lambda) {
  const int d = cfg.window.dim;
  const double r_tol = cfg.response.effective_radius();

  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const Point& z : cfg.query.positions)
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], z[a]);
      hi[a] = std::max(hi[a], z[a]);
    }
  double span = 0.0;
  for (int a = 0; a < d; ++a) span = std::max(span, hi[a] - lo[a]);

  Geometry g;
  g.query = cfg.query;

  if (cfg.process == ProcessKind::poisson) {
    const double side = span + 2.0 * r_tol;
    const bool shrink = cfg.restrict_sampling &&
                        side < 0.9 * (cfg.window.length + 2.0 * r_tol);
    if (shrink) {
      g.sample_window = Window{d, side, Boundary::padded, 0.0};
      for (Point& z : g.query.positions)
        for (int a = 0; a < d; ++a) z[a] = z[a] - lo[a] + r_tol;
      g.mode = "poisson_restricted";
      g.extent = side;
    } else {
      g.sample_window = cfg.window;
      g.sample_window.pad = std::max(g.sample_window.pad, r_tol);
      g.mode = "poisson_padded";
      g.extent = g.sample_window.sample_high() - g.sample_window.sample_low();
    }
    g.plain_displacement = true;  // padded mode evaluates plainly anyway
    return g;
  }

  const double s = std::pow(M_PI, -0.5) * std::pow(lambda, -(1.0 + cfg.dpp_epsilon) / d);
  const double margin = std::max(25.0 * s, 1e-3 * r_tol);
  const double circumference = span + 2.0 * (r_tol + margin);
  if (cfg.restrict_sampling && circumference < 0.9 * cfg.window.length) {
    g.sample_window = Window{d, circumference, Boundary::torus, 0.0};
    for (Point& z : g.query.positions)
      for (int a = 0; a < d; ++a) z[a] = z[a] - lo[a] + r_tol + margin;
    // Points near the seam sit farther than the effective radius from
    // every query position, so plain displacements reproduce the
    // unrestricted field.
    g.plain_displacement = true;
    g.mode = "dpp_restricted_torus";
    g.extent = circumference;
    SF_REQUIRE(g.extent >= 2.0 * r_tol + 20.0 * s,
               "dpp covering torus too small for the kernel clearance");
  } else {
    g.sample_window = cfg.window;
    g.plain_displacement = false;
    g.mode = "dpp_torus";
    g.extent = cfg.window.length;
  }
  return g;
}

struct ReplicateBuffers {
  std::vector<double> raw;      // n * m
  std::vector<double> scaled;   // n * m
  std::vector<double> reduced;  // n
  std::vector<double> laplace;  // n
};

void run_replicates(const ExperimentConfig& cfg, double lambda,
                    std::size_t lambda_index, const Geometry& geom,
                    const pointproc::DppModel* model, ReplicateBuffers& out) {
  const std::size_t n = static_cast<std::size_t>(cfg.replicates);
  const std::size_t m = cfg.query.size();
  out.raw.assign(n * m, 0.0);
  out.scaled.assign(n * m, 0.0);
  out.reduced.assign(n, 0.0);
  out.laplace.assign(n, 0.0);

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int n_threads = cfg.threads > 0 ? cfg.threads : std::max(1, hw);
  n_threads = std::min<int>(n_threads, static_cast<int>(n));

  Window eval_window = geom.sample_window;
  if (geom.plain_displacement) {
    eval_window.boundary = Boundary::padded;
    eval_window.pad = std::max(
        0.0, geom.sample_window.boundary == Boundary::torus
                 ? 0.0
                 : geom.sample_window.pad);
  }

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    try {
      std::vector<double> amps;
      while (true) {
        const std::size_t r = cursor.fetch_add(1);
        if (r >= n || failed.load(std::memory_order_relaxed)) break;
        Rng rng(cfg.seed, {lambda_index, r});
        pointproc::PointPattern pat =
            cfg.process == ProcessKind::poisson
                ? pointproc::sample_poisson(lambda, geom.sample_window, rng)
                : pointproc::sample_dpp(*model, rng);
        pat.window = eval_window;
        amps.resize(pat.size());
        for (double& a : amps) a = cfg.law.sample(rng);
        const std::vector<double> field = shotnoise::field_eval(
            pat, amps, cfg.response, geom.query.positions);
        const std::vector<double> scaled = shotnoise::centralize_scale(
            field, lambda, cfg.law, cfg.response, cfg.window.dim);
        double reduced = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          out.raw[r * m + j] = field[j];
          out.scaled[r * m + j] = scaled[j];
          reduced +=
              cfg.query.weights[j] * (cfg.centralize ? scaled[j] : field[j]);
        }
        out.reduced[r] = reduced;
        out.laplace[r] = std::exp(-reduced);
      }
    } catch (...) {
      failed.store(true, std::memory_order_relaxed);
      std::scoped_lock lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

FddCheckResult fdd_joint_check(const std::vector<double>& samples_matrix,
                               const shotnoise::FddQuery& query,
                               const AmplitudeLaw& law,
                               const ResponseFn& response, int dim,
                               const std::vector<double>& cf_grid) {
  const std::size_t m = query.size();
  SF_REQUIRE(m > 0 && samples_matrix.size() % m == 0,
             "fdd_joint_check: sample matrix shape mismatch");
  const std::size_t n = samples_matrix.size() / m;
  SF_REQUIRE(n > 0, "fdd_joint_check: empty sample");

  std::vector<double> reduced(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      acc += query.weights[j] * samples_matrix[r * m + j];
    reduced[r] = acc;
  }

  FddCheckResult out;
  out.ecf = stats::ecf(reduced, cf_grid);
  if (law.second_moment()) {
    out.gaussian = true;
    const auto lim =
        limits::gaussian_limit(query, response, *law.second_moment(), dim);
    out.variance_limit = lim.reduced_variance();
    for (double t : cf_grid)
      out.cf_theory.emplace_back(std::exp(-0.5 * out.variance_limit * t * t),
                                 0.0);
    if (out.variance_limit > 0.0) {
      const auto ks = stats::ks_gaussian(reduced, out.variance_limit);
      out.ks_stat = ks.statistic;
      out.ks_p = ks.p_value;
    }
  } else {
    out.gaussian = false;
    const double alpha = law.tail_index();
    out.sigma = limits::stable_sigma(query, response, alpha, dim);
    for (double t : cf_grid)
      out.cf_theory.push_back(limits::stable_cf(alpha, out.sigma, t));
    out.sigma_hat = stats::fit_stable_sigma(out.ecf, cf_grid, alpha);
  }
  out.cf_distance = stats::cf_distance(out.ecf, out.cf_theory);
  return out;
}

ConvergenceReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport report;
  report.config = config;

  const int dim = config.window.dim;
  const bool gaussian_case = !config.law.heavy_tailed();
  const double alpha = gaussian_case ? 0.0 : config.law.tail_index();

  // Limit-law quantities shared by all rows (they do not depend on the
  // intensity).
  limits::GaussianLimit glim;
  double sigma_limit = 0.0, limit_laplace = 0.0, variance_limit = 0.0;
  if (gaussian_case) {
    glim = limits::gaussian_limit(config.query, config.response,
                                  *config.law.second_moment(), dim);
    variance_limit = glim.reduced_variance();
    limit_laplace = limits::gaussian_fdd_laplace(glim);
  } else {
    sigma_limit =
        limits::stable_sigma(config.query, config.response, alpha, dim);
    limit_laplace =
        limits::stable_fdd_laplace(config.query, config.response, alpha, dim);
  }

  for (std::size_t li = 0; li < config.lambda_grid.size(); ++li) {
    const double lambda = config.lambda_grid[li];
    const auto t0 = std::chrono::steady_clock::now();

    const Geometry geom = make_geometry(config, lambda);
    std::unique_ptr<pointproc::DppModel> model;
    if (config.process == ProcessKind::dpp)
      model = std::make_unique<pointproc::DppModel>(lambda, config.dpp_epsilon,
                                                    geom.sample_window);

    ReportRow row;
    row.lambda = lambda;
    row.replicates = config.replicates;
    row.seed = config.seed;
    row.sampling_mode = geom.mode;
    row.sampling_extent = geom.extent;
    if (model) row.kernel_scale_ratio = geom.extent / model->bandwidth();

    ReplicateBuffers buf;
    run_replicates(config, lambda, li, geom, model.get(), buf);
    row.raw_fields = std::move(buf.raw);
    row.scaled_fields = std::move(buf.scaled);
    row.reduced = std::move(buf.reduced);

    // Empirical side.
    const stats::Moments mom = stats::sample_moments(row.reduced);
    row.empirical.n = mom.n;
    row.empirical.mean = mom.mean;
    row.empirical.variance = mom.variance;
    row.empirical.skewness = mom.skewness;
    {
      double s = 0.0, s2 = 0.0;
      for (double v : buf.laplace) {
        s += v;
        s2 += v * v;
      }
      const double n = static_cast<double>(buf.laplace.size());
      row.empirical.laplace_mc = s / n;
      const double var = std::max(0.0, s2 / n - (s / n) * (s / n));
      row.empirical.laplace_se = std::sqrt(var / n);
    }
    // Joint-law comparison always runs on the normalized fields; the
    // Laplace statistic above follows the configured reduction.
    const FddCheckResult check =
        fdd_joint_check(row.scaled_fields, config.query, config.law,
                        config.response, dim, config.stats.cf_grid);
    row.empirical.ecf = check.ecf;
    row.empirical.ks_stat = check.ks_stat;
    row.empirical.ks_p = check.ks_p;
    row.empirical.cf_distance = check.cf_distance;
    row.empirical.sigma_hat = check.sigma_hat;
    row.theory.variance_limit = variance_limit;
    row.theory.sigma = sigma_limit;
    row.theory.limit_laplace = limit_laplace;
    row.theory.cf_grid = check.cf_theory;
    if (gaussian_case) row.theory.covariance = glim.covariance;

    if (config.compute_prelimit)
      row.theory.prelimit_laplace = limits::poisson_prelimit_laplace(
          lambda, config.law, config.query, config.response, dim);

    if (config.compute_fredholm) {
      fredholm::GridSpec spec{config.fredholm_panel_order};
      fredholm::GridSpec spec2{2 * config.fredholm_panel_order};
      const auto op = fredholm::build_operator(*model, config.law, geom.query,
                                               config.response, spec, 1.0);
      const auto op2 = fredholm::build_operator(*model, config.law, geom.query,
                                                config.response, spec2, 1.0);
      const double f1 = fredholm::fredholm_laplace(op);
      const double f2 = fredholm::fredholm_laplace(op2);
      row.theory.fredholm_laplace = f1;
      row.theory.fredholm_laplace_refined = f2;
      row.theory.fredholm_self_convergence =
          std::abs(f1 - f2) / std::max(std::abs(f2), 1e-300);
      const auto series = fredholm::trace_series(op2, 6);
      row.theory.trace_partial_sums = series.partial_sums;
      row.theory.trace_remainder_bound = series.remainder_bound;
      row.theory.n2_contribution =
          std::abs(op2.log_det_complement() + op2.trace());
      // Trace mass outside the covered support, bounded through the
      // amplitude mean.
      row.theory.fredholm_truncation_bound =
          lambda * config.law.mean() * config.query.weight_sum() *
          config.response.tail_mass(dim);
    }

    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "[shotfield] " << config.name << " lambda=" << lambda
              << " mode=" << geom.mode << " wall_ms="
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                     .count()
              << '\n';
    report.rows.push_back(std::move(row));
  }

  // Assertions.
  const ReportRow& first = report.rows.front();
  const ReportRow& last = report.rows.back();
  auto add = [&](const std::string& name, bool pass, double observed,
                 double bound) {
    report.assertions.push_back({name, pass, observed, bound});
    if (!pass) report.all_passed = false;
  };
  for (const AssertionSpec& a : config.assertions) {
    if (a.type == "variance_final_rel_gap") {
      const double gap =
          std::abs(last.empirical.variance - last.theory.variance_limit) /
          last.theory.variance_limit;
      add(a.type, gap < a.value, gap, a.value);
    } else if (a.type == "variance_gap_endpoints") {
      const double g_first =
          std::abs(first.empirical.variance - first.theory.variance_limit);
      const double g_last =
          std::abs(last.empirical.variance - last.theory.variance_limit);
      add(a.type, g_last < g_first, g_last, g_first);
    } else if (a.type == "ks_p_final") {
      add(a.type, last.empirical.ks_p > a.value, last.empirical.ks_p, a.value);
    } else if (a.type == "cf_distance_final") {
      const double bound = std::max(
          a.value, 5.0 / std::sqrt(static_cast<double>(last.empirical.n)));
      add(a.type, last.empirical.cf_distance < bound,
          last.empirical.cf_distance, bound);
    } else if (a.type == "cf_distance_endpoints") {
      add(a.type, last.empirical.cf_distance < first.empirical.cf_distance,
          last.empirical.cf_distance, first.empirical.cf_distance);
    } else if (a.type == "sigma_fit_final_rel") {
      const double rel =
          std::abs(last.empirical.sigma_hat / last.theory.sigma - 1.0);
      add(a.type, rel < a.value, rel, a.value);
    } else if (a.type == "laplace_mc_vs_prelimit_each") {
      for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& r = report.rows[i];
        const double gap =
            std::abs(r.empirical.laplace_mc - r.theory.prelimit_laplace.value());
        const double bound = a.value * r.empirical.laplace_se;
        add(a.type + "[lambda=" + std::to_string(r.lambda) + "]", gap <= bound,
            gap, bound);
      }
    } else if (a.type == "laplace_mc_vs_fredholm_each") {
      for (const ReportRow& r : report.rows) {
        const double gap =
            std::abs(r.empirical.laplace_mc - r.theory.fredholm_laplace.value());
        const double bound = a.value * r.empirical.laplace_se;
        add(a.type + "[lambda=" + std::to_string(r.lambda) + "]", gap <= bound,
            gap, bound);
      }
    } else if (a.type == "fredholm_self_convergence") {
      for (const ReportRow& r : report.rows) {
        const double v = r.theory.fredholm_self_convergence.value();
        add(a.type + "[lambda=" + std::to_string(r.lambda) + "]", v < a.value,
            v, a.value);
      }
    } else {
      throw invalid_input("config: unknown assertion type '" + a.type + "'");
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json complex_grid_json(
    const std::vector<std::complex<double>>& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& c : v) out.push_back({c.real(), c.imag()});
  return out;
}

}  // namespace

std::string ConvergenceReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(config.to_json());
  j["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json row;
    row["lambda"] = r.lambda;
    row["replicates"] = r.replicates;
    row["seed"] = r.seed;
    row["sampling"] = {{"mode", r.sampling_mode},
                       {"extent", r.sampling_extent},
                       {"kernel_scale_ratio", r.kernel_scale_ratio}};
    nlohmann::ordered_json emp;
    emp["n"] = r.empirical.n;
    emp["mean"] = r.empirical.mean;
    emp["variance"] = r.empirical.variance;
    emp["skewness"] = r.empirical.skewness;
    emp["ks_stat"] = r.empirical.ks_stat;
    emp["ks_p"] = r.empirical.ks_p;
    emp["ecf"] = complex_grid_json(r.empirical.ecf);
    emp["cf_distance"] = r.empirical.cf_distance;
    emp["sigma_hat"] = r.empirical.sigma_hat;
    emp["laplace_mc"] = r.empirical.laplace_mc;
    emp["laplace_se"] = r.empirical.laplace_se;
    row["empirical"] = emp;
    nlohmann::ordered_json th;
    th["variance"] = r.theory.variance_limit;
    th["covariance"] = r.theory.covariance;
    th["sigma"] = r.theory.sigma;
    th["laplace"] = r.theory.limit_laplace;
    th["cf_grid"] = complex_grid_json(r.theory.cf_grid);
    if (r.theory.prelimit_laplace)
      th["prelimit_laplace"] = *r.theory.prelimit_laplace;
    if (r.theory.fredholm_laplace) {
      nlohmann::ordered_json fred;
      fred["laplace"] = *r.theory.fredholm_laplace;
      fred["laplace_refined"] = *r.theory.fredholm_laplace_refined;
      fred["self_convergence"] = *r.theory.fredholm_self_convergence;
      fred["trace_partial_sums"] = r.theory.trace_partial_sums;
      if (r.theory.trace_remainder_bound)
        fred["remainder_bound"] = *r.theory.trace_remainder_bound;
      else
        fred["remainder_bound"] = nullptr;
      fred["n2_contribution"] = *r.theory.n2_contribution;
      if (r.theory.fredholm_truncation_bound)
        fred["support_truncation_bound"] = *r.theory.fredholm_truncation_bound;
      th["fredholm"] = fred;
    }
    row["theory"] = th;
    j["rows"].push_back(row);
  }
  j["assertions"] = nlohmann::ordered_json::array();
  for (const AssertionResult& a : assertions)
    j["assertions"].push_back({{"name", a.name},
                               {"pass", a.pass},
                               {"observed", a.observed},
                               {"bound", a.bound}});
  j["passed"] = all_passed;
  return j.dump(2) + "\n";
}

void write_outputs(const ConvergenceReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/plotdata");

  {
    std::ofstream os(out_dir + "/report.json", std::ios::binary);
    SF_REQUIRE(os.good(), "cannot write report.json");
    os << report.to_json();
  }

  const std::size_t m = report.config.query.size();
  if (report.config.emit_samples) {
    std::ofstream os(out_dir + "/samples.csv", std::ios::binary);
    os.precision(17);
    os << "lambda,replicate_id,z_index,I,I_tilde\n";
    for (const ReportRow& r : report.rows)
      for (std::size_t rep = 0; rep < static_cast<std::size_t>(r.replicates);
           ++rep)
        for (std::size_t z = 0; z < m; ++z)
          os << r.lambda << ',' << rep << ',' << z << ','
             << r.raw_fields[rep * m + z] << ',' << r.scaled_fields[rep * m + z]
             << '\n';
  }

  {
    std::ofstream os(out_dir + "/theory.csv", std::ios::binary);
    os.precision(17);
    os << "lambda,variance_limit,sigma,limit_laplace,prelimit_laplace,"
          "fredholm_laplace\n";
    for (const ReportRow& r : report.rows) {
      os << r.lambda << ',' << r.theory.variance_limit << ',' << r.theory.sigma
         << ',' << r.theory.limit_laplace << ',';
      if (r.theory.prelimit_laplace) os << *r.theory.prelimit_laplace;
      os << ',';
      if (r.theory.fredholm_laplace) os << *r.theory.fredholm_laplace;
      os << '\n';
    }
  }

  {
    std::ofstream os(out_dir + "/plotdata/variance_vs_lambda.csv",
                     std::ios::binary);
    os.precision(17);
    os << "lambda,empirical_variance,variance_limit\n";
    for (const ReportRow& r : report.rows)
      os << r.lambda << ',' << r.empirical.variance << ','
         << r.theory.variance_limit << '\n';
  }

  for (std::size_t li = 0; li < report.rows.size(); ++li) {
    const ReportRow& r = report.rows[li];
    {
      std::ofstream os(out_dir + "/plotdata/ecf_vs_cf_" + std::to_string(li) +
                           ".csv",
                       std::ios::binary);
      os.precision(17);
      os << "t,ecf_re,ecf_im,cf_re,cf_im\n";
      for (std::size_t k = 0; k < report.config.stats.cf_grid.size(); ++k)
        os << report.config.stats.cf_grid[k] << ',' << r.empirical.ecf[k].real()
           << ',' << r.empirical.ecf[k].imag() << ','
           << r.theory.cf_grid[k].real() << ',' << r.theory.cf_grid[k].imag()
           << '\n';
    }
    if (!report.config.law.heavy_tailed() && report.config.centralize) {
      std::ofstream os(out_dir + "/plotdata/ecdf_vs_limit_" +
                           std::to_string(li) + ".csv",
                       std::ios::binary);
      os.precision(17);
      os << "y,ecdf,limit_cdf\n";
      std::vector<double> ys = r.reduced;
      std::sort(ys.begin(), ys.end());
      const std::size_t stride = std::max<std::size_t>(1, ys.size() / 2000);
      const double sd = std::sqrt(r.theory.variance_limit);
      for (std::size_t i = 0; i < ys.size(); i += stride)
        os << ys[i] << ','
           << (static_cast<double>(i) + 1.0) / static_cast<double>(ys.size())
           << ',' << stats::normal_cdf(ys[i], 0.0, sd) << '\n';
    }
  }
}

}  // namespace shotfield::harness
