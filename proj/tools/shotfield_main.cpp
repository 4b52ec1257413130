// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver.  All numerics live behind the C API in
// libshotfield; this translation unit only parses arguments, moves JSON
// around and renders summaries.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shotfield.h"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is.good()) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void fail(sf_status st, const std::string& context) {
  std::cerr << "error (" << context << "): " << sf_last_error() << " [code "
            << st << "]\n";
  std::exit(2);
}

void print_report_summary(const nlohmann::json& rep) {
  std::cout << "experiment: " << rep["config"]["name"].get<std::string>()
            << "\n";
  std::cout << "lambda        variance      ks_p        cf_dist     laplace_mc\n";
  for (const auto& row : rep["rows"]) {
    std::printf("%-13g %-13g %-11g %-11g %-13g\n",
                row["lambda"].get<double>(),
                row["empirical"]["variance"].get<double>(),
                row["empirical"]["ks_p"].get<double>(),
                row["empirical"]["cf_distance"].get<double>(),
                row["empirical"]["laplace_mc"].get<double>());
  }
  if (!rep["assertions"].empty()) {
    std::cout << "assertions:\n";
    for (const auto& a : rep["assertions"])
      std::printf("  [%s] %s  observed=%g bound=%g\n",
                  a["pass"].get<bool>() ? "pass" : "FAIL",
                  a["name"].get<std::string>().c_str(),
                  a["observed"].get<double>(), a["bound"].get<double>());
  }
  std::cout << (rep["passed"].get<bool>() ? "PASSED" : "FAILED") << "\n";
}

struct RunArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
  int replicates = -1;
  bool do_assert = false;
};

int run_experiment_cmd(const RunArgs& args, bool single_lambda) {
  std::string text = slurp(args.config_path);
  if (single_lambda) {
    // simulate: truncate the sweep to its first intensity.
    auto j = nlohmann::json::parse(text);
    auto grid = j.at("lambda_grid");
    if (grid.size() > 1) j["lambda_grid"] = {grid.front()};
    j["emit_samples"] = true;
    text = j.dump();
  }
  sf_experiment* exp = nullptr;
  if (sf_status st = sf_experiment_create(text.c_str(), &exp); st != SF_OK)
    fail(st, "config");
  if (args.seed_set) sf_experiment_set_seed(exp, args.seed);
  if (args.threads >= 0) sf_experiment_set_threads(exp, args.threads);
  if (args.replicates > 0) sf_experiment_set_replicates(exp, args.replicates);

  sf_report* rep = nullptr;
  if (sf_status st = sf_experiment_run(
          exp, args.out_dir.empty() ? nullptr : args.out_dir.c_str(), &rep);
      st != SF_OK)
    fail(st, "run");

  const char* json = nullptr;
  sf_report_json(rep, &json);
  print_report_summary(nlohmann::json::parse(json));
  int passed = 1;
  sf_report_passed(rep, &passed);
  sf_report_destroy(rep);
  sf_experiment_destroy(exp);
  return args.do_assert && passed == 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shot-noise scaling-limit toolkit"};
  app.require_subcommand(1);

  RunArgs sweep_args, sim_args;
  std::string request_path, out_path, report_path;
  bool report_assert = false;

  auto* sweep = app.add_subcommand(
      "sweep", "run a full intensity sweep from a config file");
  sweep->add_option("--config", sweep_args.config_path, "config json")
      ->required();
  sweep->add_option("--out", sweep_args.out_dir, "output directory");
  sweep->add_option("--seed", sweep_args.seed, "master seed override")
      ->each([&](const std::string&) { sweep_args.seed_set = true; });
  sweep->add_option("--threads", sweep_args.threads, "worker thread count");
  sweep->add_option("--replicates", sweep_args.replicates,
                    "replicates per intensity");
  sweep->add_flag("--assert", sweep_args.do_assert,
                  "exit nonzero when an assertion fails");

  auto* simulate = app.add_subcommand(
      "simulate", "run replicates at the first grid intensity and emit samples");
  simulate->add_option("--config", sim_args.config_path, "config json")
      ->required();
  simulate->add_option("--out", sim_args.out_dir, "output directory")
      ->required();
  simulate->add_option("--seed", sim_args.seed, "master seed override")
      ->each([&](const std::string&) { sim_args.seed_set = true; });
  simulate->add_option("--threads", sim_args.threads, "worker thread count");
  simulate->add_option("--replicates", sim_args.replicates,
                       "replicates per intensity");

  auto* theory = app.add_subcommand(
      "theory", "evaluate limit-law quantities for a request json");
  theory->add_option("--request", request_path, "request json")->required();
  theory->add_option("--out", out_path, "write the response here");

  auto* fred = app.add_subcommand(
      "fredholm", "evaluate determinant-side diagnostics for a request json");
  fred->add_option("--request", request_path, "request json")->required();
  fred->add_option("--out", out_path, "write the response here");

  auto* report = app.add_subcommand(
      "report", "summarize an existing report.json");
  report->add_option("--report", report_path, "report json path")->required();
  report->add_flag("--assert", report_assert,
                   "exit nonzero when the report failed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_experiment_cmd(sweep_args, false);
    if (simulate->parsed()) return run_experiment_cmd(sim_args, true);
    if (theory->parsed() || fred->parsed()) {
      const std::string req = slurp(request_path);
      char* resp = nullptr;
      const sf_status st = theory->parsed()
                               ? sf_theory_eval(req.c_str(), &resp)
                               : sf_fredholm_eval(req.c_str(), &resp);
      if (st != SF_OK) fail(st, "eval");
      if (!out_path.empty()) {
        std::ofstream os(out_path, std::ios::binary);
        os << resp << "\n";
      } else {
        std::cout << resp << "\n";
      }
      sf_string_free(resp);
      return 0;
    }
    if (report->parsed()) {
      const auto rep = nlohmann::json::parse(slurp(report_path));
      print_report_summary(rep);
      return report_assert && !rep["passed"].get<bool>() ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
