// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "shotfield/fredholm.hpp"
#include "shotfield/harness.hpp"
#include "shotfield/limits.hpp"
#include "shotfield/pointproc.hpp"

namespace {

thread_local std::string g_last_error;

template <typename F>
sf_status guarded(F&& body) {
  try {
    body();
    return SF_OK;
  } catch (const shotfield::invalid_input& e) {
    g_last_error = e.what();
    return SF_ERR_CONFIG;
  } catch (const shotfield::numerical_failure& e) {
    g_last_error = e.what();
    return SF_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SF_ERR_INTERNAL;
  }
}

char* dup_cstring(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p != nullptr) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

shotfield::shotnoise::FddQuery query_from_json(const nlohmann::json& j,
                                               int dim) {
  shotfield::shotnoise::FddQuery q;
  for (const auto& p : j.at("positions")) {
    shotfield::Point z;
    for (std::size_t a = 0; a < p.size() && a < 2; ++a)
      z[static_cast<int>(a)] = p[a].get<double>();
    q.positions.push_back(z);
  }
  q.weights = j.at("weights").get<std::vector<double>>();
  SF_REQUIRE(q.positions.size() == q.weights.size() && !q.positions.empty(),
             "query: positions/weights mismatch");
  (void)dim;
  return q;
}

}  // namespace

extern "C" {

struct sf_experiment {
  shotfield::harness::ExperimentConfig config;
};

struct sf_report {
  shotfield::harness::ConvergenceReport report;
  std::string json;
};

const char* sf_version(void) { return "shotfield 1.0.0"; }

const char* sf_last_error(void) { return g_last_error.c_str(); }

sf_status sf_experiment_create(const char* config_json, sf_experiment** out) {
  if (config_json == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *out = nullptr;
  return guarded([&] {
    auto cfg = shotfield::harness::ExperimentConfig::from_json(config_json);
    cfg.validate();
    *out = new sf_experiment{std::move(cfg)};
  });
}

void sf_experiment_destroy(sf_experiment* experiment) { delete experiment; }

sf_status sf_experiment_set_seed(sf_experiment* experiment, uint64_t seed) {
  if (experiment == nullptr) {
    g_last_error = "null experiment";
    return SF_ERR_INVALID_ARG;
  }
  experiment->config.seed = seed;
  return SF_OK;
}

sf_status sf_experiment_set_threads(sf_experiment* experiment, int threads) {
  if (experiment == nullptr || threads < 0) {
    g_last_error = "bad thread count";
    return SF_ERR_INVALID_ARG;
  }
  experiment->config.threads = threads;
  return SF_OK;
}

sf_status sf_experiment_set_replicates(sf_experiment* experiment,
                                       int replicates) {
  if (experiment == nullptr) {
    g_last_error = "null experiment";
    return SF_ERR_INVALID_ARG;
  }
  experiment->config.replicates = replicates;
  return SF_OK;
}

sf_status sf_experiment_run(sf_experiment* experiment, const char* output_dir,
                            sf_report** out) {
  if (experiment == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *out = nullptr;
  return guarded([&] {
    auto rep = shotfield::harness::run_experiment(experiment->config);
    if (output_dir != nullptr)
      shotfield::harness::write_outputs(rep, output_dir);
    auto* r = new sf_report{std::move(rep), {}};
    r->json = r->report.to_json();
    *out = r;
  });
}

sf_status sf_report_json(const sf_report* report, const char** json_utf8) {
  if (report == nullptr || json_utf8 == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *json_utf8 = report->json.c_str();
  return SF_OK;
}

sf_status sf_report_passed(const sf_report* report, int* passed) {
  if (report == nullptr || passed == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *passed = report->report.all_passed ? 1 : 0;
  return SF_OK;
}

void sf_report_destroy(sf_report* report) { delete report; }

sf_status sf_theory_eval(const char* request_json, char** response_json) {
  if (request_json == nullptr || response_json == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *response_json = nullptr;
  return guarded([&] {
    namespace sn = shotfield::shotnoise;
    namespace lim = shotfield::limits;
    const auto req = nlohmann::json::parse(request_json);
    const int dim = req.value("dim", 1);
    const auto law =
        shotfield::amplitudes::AmplitudeLaw::from_json(req.at("amplitude").dump());
    const auto resp = sn::ResponseFn::from_json(req.at("response").dump());
    const auto query = query_from_json(req.at("query"), dim);
    std::vector<double> cf_grid =
        req.value("cf_grid", std::vector<double>{-2, -1, -0.5, -0.25, 0.25, 0.5, 1, 2});

    nlohmann::ordered_json out;
    if (law.second_moment()) {
      const auto glim = lim::gaussian_limit(query, resp, *law.second_moment(), dim);
      out["variance"] = glim.reduced_variance();
      out["covariance"] = glim.covariance;
      out["limit_laplace"] = lim::gaussian_fdd_laplace(glim);
      nlohmann::ordered_json cf = nlohmann::ordered_json::array();
      for (double t : cf_grid)
        cf.push_back({std::exp(-0.5 * glim.reduced_variance() * t * t), 0.0});
      out["cf_grid"] = cf;
    } else {
      const double alpha = law.tail_index();
      const double sigma = lim::stable_sigma(query, resp, alpha, dim);
      out["sigma"] = sigma;
      out["xi_alpha_integral"] = lim::xi_alpha_integral(query, resp, alpha, dim);
      out["limit_laplace"] = lim::stable_fdd_laplace(query, resp, alpha, dim);
      nlohmann::ordered_json cf = nlohmann::ordered_json::array();
      for (double t : cf_grid) {
        const auto c = lim::stable_cf(alpha, sigma, t);
        cf.push_back({c.real(), c.imag()});
      }
      out["cf_grid"] = cf;
    }
    if (req.contains("lambda")) {
      const double lambda = req.at("lambda").get<double>();
      out["scaling_g"] = law.scaling_g(lambda);
      out["prelimit_laplace"] =
          lim::poisson_prelimit_laplace(lambda, law, query, resp, dim);
    }
    *response_json = dup_cstring(out.dump(2));
  });
}

sf_status sf_fredholm_eval(const char* request_json, char** response_json) {
  if (request_json == nullptr || response_json == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *response_json = nullptr;
  return guarded([&] {
    namespace sn = shotfield::shotnoise;
    namespace fr = shotfield::fredholm;
    const auto req = nlohmann::json::parse(request_json);
    const auto law =
        shotfield::amplitudes::AmplitudeLaw::from_json(req.at("amplitude").dump());
    const auto resp = sn::ResponseFn::from_json(req.at("response").dump());
    const auto query = query_from_json(req.at("query"), 1);
    const double eps = req.at("epsilon").get<double>();
    fr::GridSpec spec{req.value("panel_order", 4)};
    const std::string mode = req.value("mode", std::string("operator"));

    nlohmann::ordered_json out;
    if (mode == "hov") {
      const auto lambdas = req.at("lambda_grid").get<std::vector<double>>();
      const bool scale_by_g = req.value("scale_by_g", true);
      const std::string method = req.value("hov_method", std::string("fourier"));
      const auto rows = fr::higher_order_vanishing(
          eps, law, query, resp, lambdas, scale_by_g,
          method == "nystrom" ? fr::HovMethod::nystrom : fr::HovMethod::fourier,
          spec);
      nlohmann::ordered_json rj = nlohmann::ordered_json::array();
      for (const auto& r : rows)
        rj.push_back({{"lambda", r.lambda},
                      {"trace", r.trace},
                      {"n2_contribution", r.n2_contribution}});
      out["rows"] = rj;
    } else {
      const double lambda = req.at("lambda").get<double>();
      const double scale_g =
          req.value("scale_by_g", false) ? law.scaling_g(lambda) : 1.0;
      // Covering circle around the kick support with kernel clearance.
      const double s = std::pow(M_PI, -0.5) * std::pow(lambda, -(1.0 + eps));
      const double r_tol = resp.effective_radius();
      double zlo = 1e300, zhi = -1e300;
      for (const auto& z : query.positions) {
        zlo = std::min(zlo, z[0]);
        zhi = std::max(zhi, z[0]);
      }
      const double margin = std::max(25.0 * s, 1e-3 * r_tol);
      shotfield::Window win{1, (zhi - zlo) + 2.0 * (r_tol + margin),
                            shotfield::Boundary::torus, 0.0};
      sn::FddQuery q = query;
      for (auto& z : q.positions) z[0] = z[0] - zlo + r_tol + margin;
      const shotfield::pointproc::DppModel model(lambda, eps, win);

      const auto op = fr::build_operator(model, law, q, resp, spec, scale_g);
      fr::GridSpec spec2{2 * spec.panel_order};
      const auto op2 = fr::build_operator(model, law, q, resp, spec2, scale_g);
      const double f1 = fr::fredholm_laplace(op);
      const double f2 = fr::fredholm_laplace(op2);
      out["laplace"] = f1;
      out["laplace_refined"] = f2;
      out["self_convergence"] = std::abs(f1 - f2) / std::max(f2, 1e-300);
      out["trace"] = op2.trace();
      out["trace_sq"] = op2.trace_sq();
      out["max_eigenvalue"] = op2.max_eigenvalue();
      const auto series = fr::trace_series(op2, req.value("series_terms", 6));
      out["trace_partial_sums"] = series.partial_sums;
      if (series.remainder_bound)
        out["remainder_bound"] = *series.remainder_bound;
      else
        out["remainder_bound"] = nullptr;
      out["n2_contribution"] = std::abs(op2.log_det_complement() + op2.trace());
      out["support_truncation_bound"] = lambda * law.mean() / scale_g *
                                        q.weight_sum() * resp.tail_mass(1);
    }
    *response_json = dup_cstring(out.dump(2));
  });
}

sf_status sf_pattern_sample(const char* request_json, char** csv_out) {
  if (request_json == nullptr || csv_out == nullptr) {
    g_last_error = "null argument";
    return SF_ERR_INVALID_ARG;
  }
  *csv_out = nullptr;
  return guarded([&] {
    namespace pp = shotfield::pointproc;
    const auto req = nlohmann::json::parse(request_json);
    const double lambda = req.at("lambda").get<double>();
    shotfield::Window win;
    win.dim = req.at("window").at("dim").get<int>();
    win.length = req.at("window").at("length").get<double>();
    const std::string b = req.at("window").at("boundary").get<std::string>();
    win.boundary = b == "torus" ? shotfield::Boundary::torus
                                : shotfield::Boundary::padded;
    win.pad = req.value("pad", 0.0);
    shotfield::Rng rng(req.value("seed", std::uint64_t{1}));
    const std::string kind = req.at("process").at("kind").get<std::string>();
    std::ostringstream os;
    if (kind == "poisson") {
      pp::sample_poisson(lambda, win, rng).write_csv(os);
    } else if (kind == "dpp") {
      const double eps = req.at("process").at("epsilon").get<double>();
      const pp::DppModel model(lambda, eps, win);
      if (req.value("spectrum", false))
        model.write_spectrum_csv(os);
      else
        pp::sample_dpp(model, rng).write_csv(os);
    } else {
      throw shotfield::invalid_input("unknown process kind '" + kind + "'");
    }
    *csv_out = dup_cstring(os.str());
  });
}

void sf_string_free(char* s) { std::free(s); }

}  // extern "C"
