// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace shotfield::stats {

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

/// Asymptotic Kolmogorov tail Q(t) = 2 sum_{j>=1} (-1)^(j-1) e^(-2 j^2 t^2).
double kolmogorov_tail(double t);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test of the samples against
/// Normal(0, variance), asymptotic p-value.
KsResult ks_gaussian(std::vector<double> samples, double variance);

/// Empirical characteristic function (1/N) sum e^(i t x_k) on a grid.
std::vector<std::complex<double>> ecf(const std::vector<double>& samples,
                                      const std::vector<double>& t_grid);

/// Sup distance max_j |ecf_j - cf_j|.
double cf_distance(const std::vector<std::complex<double>>& empirical,
                   const std::vector<std::complex<double>>& theory);

/// Scale recovered from the modulus of the empirical characteristic
/// function: least squares of -log|ecf(t)| on |t|^alpha through the
/// origin, returning the fitted sigma.
double fit_stable_sigma(const std::vector<std::complex<double>>& empirical,
                        const std::vector<double>& t_grid, double alpha);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Goodness of fit of integer counts against Poisson(mean); bins with
/// expected mass below 5 are merged into the tails.
ChiSquareResult chi_square_poisson(const std::vector<std::uint64_t>& counts,
                                   double mean);

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments sample_moments(const std::vector<double>& xs);

}  // namespace shotfield::stats
