// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shotfield/amplitudes.hpp"
#include "shotfield/common.hpp"
#include "shotfield/response.hpp"
#include "shotfield/shotnoise.hpp"

namespace shotfield::harness {

enum class ProcessKind { poisson, dpp };

struct StatSettings {
  std::vector<double> cf_grid{-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
};

/// Assertion evaluated on a finished sweep.  "endpoint" comparisons
/// follow the convergence-table convention: the gap at the largest
/// intensity must fall below the gap at the smallest one; thresholds
/// apply at the largest intensity.
struct AssertionSpec {
  std::string type;
  double value = 0.0;  // threshold / se multiplier, by type
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProcessKind process = ProcessKind::poisson;
  double dpp_epsilon = 0.5;
  amplitudes::AmplitudeLaw law = amplitudes::AmplitudeLaw::exponential(1.0);
  shotnoise::ResponseFn response = shotnoise::ResponseFn::gauss_bump(1.0, 1.0);
  Window window;
  shotnoise::FddQuery query;
  std::vector<double> lambda_grid{10.0};
  int replicates = 100;
  std::uint64_t seed = 1;
  int threads = 0;       // 0: hardware concurrency
  bool centralize = true;
  bool emit_samples = true;
  bool compute_prelimit = false;
  bool compute_fredholm = false;
  int fredholm_panel_order = 4;
  bool restrict_sampling = true;
  StatSettings stats;
  std::vector<AssertionSpec> assertions;

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

struct RowEmpirical {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double ks_stat = 0.0;
  double ks_p = 0.0;
  std::vector<std::complex<double>> ecf;
  double cf_distance = 0.0;
  double sigma_hat = 0.0;
  double laplace_mc = 0.0;   // mean of exp(-reduced combination)
  double laplace_se = 0.0;
};

struct RowTheory {
  std::vector<double> covariance;  // m x m, gaussian case
  double variance_limit = 0.0;     // variance of the reduced combination
  double sigma = 0.0;              // stable case scale
  double limit_laplace = 0.0;      // limit-law transform of the combination
  std::vector<std::complex<double>> cf_grid;
  std::optional<double> prelimit_laplace;
  std::optional<double> fredholm_laplace;
  std::optional<double> fredholm_laplace_refined;
  std::optional<double> fredholm_self_convergence;
  std::optional<double> fredholm_truncation_bound;
  std::vector<double> trace_partial_sums;
  std::optional<double> trace_remainder_bound;
  std::optional<double> n2_contribution;
};

struct ReportRow {
  double lambda = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::string sampling_mode;
  double sampling_extent = 0.0;      // box side / circle circumference
  double kernel_scale_ratio = 0.0;   // extent / kernel bandwidth (dpp)
  RowEmpirical empirical;
  RowTheory theory;
  // Per-replicate reduced samples and per-position fields; kept for
  // output emission, not serialized into the report json.
  std::vector<double> reduced;
  std::vector<double> raw_fields;     // replicate-major, m per replicate
  std::vector<double> scaled_fields;  // same layout
};

struct AssertionResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<AssertionResult> assertions;
  bool all_passed = true;

  std::string to_json() const;  // deterministic byte-stable rendering
};

/// Joint-law check of an N x m sample matrix (replicate-major): the
/// query weights reduce the rows to the scalar combination whose limit
/// law is known, then the Gaussian case runs the KS test against the
/// limit variance and the heavy-tail case compares transform grids and
/// recovers the scale.  One-hot weights reproduce the marginal check.
struct FddCheckResult {
  bool gaussian = true;
  double variance_limit = 0.0;
  double sigma = 0.0;
  double ks_stat = 0.0;
  double ks_p = 0.0;
  std::vector<std::complex<double>> ecf;
  std::vector<std::complex<double>> cf_theory;
  double cf_distance = 0.0;
  double sigma_hat = 0.0;
};

FddCheckResult fdd_joint_check(const std::vector<double>& samples_matrix,
                               const shotnoise::FddQuery& query,
                               const amplitudes::AmplitudeLaw& law,
                               const shotnoise::ResponseFn& response, int dim,
                               const std::vector<double>& cf_grid);

ConvergenceReport run_experiment(const ExperimentConfig& config);

/// Writes report.json, samples.csv, theory.csv and plotdata/*.csv.
/// Timing information goes to stderr only, keeping report bytes a pure
/// function of the configuration.
void write_outputs(const ConvergenceReport& report, const std::string& out_dir);

}  // namespace shotfield::harness
