// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "shotfield/common.hpp"

namespace shotfield::stats {

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

double kolmogorov_tail(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_gaussian(std::vector<double> samples, double variance) {
  SF_REQUIRE(!samples.empty(), "ks_gaussian: empty sample");
  SF_REQUIRE(variance > 0.0, "ks_gaussian: variance must be positive");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double sd = std::sqrt(variance);
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i], 0.0, sd);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(hi - f, f - lo));
  }
  return KsResult{d, kolmogorov_tail(std::sqrt(n) * d)};
}

std::vector<std::complex<double>> ecf(const std::vector<double>& samples,
                                      const std::vector<double>& t_grid) {
  std::vector<std::complex<double>> out(t_grid.size(), {0.0, 0.0});
  if (samples.empty()) return out;
  for (double x : samples)
    for (std::size_t j = 0; j < t_grid.size(); ++j)
      out[j] += std::complex<double>(std::cos(t_grid[j] * x),
                                     std::sin(t_grid[j] * x));
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& v : out) v *= inv;
  return out;
}

double cf_distance(const std::vector<std::complex<double>>& empirical,
                   const std::vector<std::complex<double>>& theory) {
  SF_REQUIRE(empirical.size() == theory.size(), "cf_distance: size mismatch");
  double d = 0.0;
  for (std::size_t j = 0; j < empirical.size(); ++j)
    d = std::max(d, std::abs(empirical[j] - theory[j]));
  return d;
}

double fit_stable_sigma(const std::vector<std::complex<double>>& empirical,
                        const std::vector<double>& t_grid, double alpha) {
  SF_REQUIRE(empirical.size() == t_grid.size(), "fit_stable_sigma: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (t_grid[j] == 0.0) continue;
    const double mod = std::abs(empirical[j]);
    // Points where the modulus has decayed into the estimator noise
    // floor carry no scale information and would bias the fit.
    if (mod < 0.05) continue;
    const double ta = std::pow(std::abs(t_grid[j]), alpha);
    num += -std::log(mod) * ta;
    den += ta * ta;
  }
  SF_REQUIRE(den > 0.0, "fit_stable_sigma: no usable grid points");
  return std::pow(num / den, 1.0 / alpha);
}

namespace {

// Regularized lower incomplete gamma by series (x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by Lentz continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  SF_REQUIRE(a > 0.0 && x >= 0.0, "gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

ChiSquareResult chi_square_poisson(const std::vector<std::uint64_t>& counts,
                                   double mean) {
  SF_REQUIRE(!counts.empty(), "chi_square_poisson: empty counts");
  SF_REQUIRE(mean > 0.0, "chi_square_poisson: mean must be positive");
  const double n = static_cast<double>(counts.size());

  // Poisson pmf over a generous range, then greedy merge so every bin
  // expects at least 5.
  const std::uint64_t max_count =
      *std::max_element(counts.begin(), counts.end());
  const std::size_t k_hi = static_cast<std::size_t>(
      std::max<double>(static_cast<double>(max_count) + 1.0,
                       mean + 10.0 * std::sqrt(mean) + 10.0));
  std::vector<double> pmf(k_hi + 1, 0.0);
  double logp = -mean;  // log pmf at k = 0
  for (std::size_t k = 0; k <= k_hi; ++k) {
    pmf[k] = std::exp(logp);
    logp += std::log(mean) - std::log(static_cast<double>(k + 1));
  }

  struct Bin {
    std::size_t lo, hi;  // inclusive count range; hi == SIZE_MAX means tail
    double expected;
    double observed = 0.0;
  };
  std::vector<Bin> bins;
  double acc = 0.0;
  std::size_t lo = 0;
  for (std::size_t k = 0; k <= k_hi; ++k) {
    acc += pmf[k] * n;
    if (acc >= 5.0) {
      bins.push_back({lo, k, acc, 0.0});
      lo = k + 1;
      acc = 0.0;
    }
  }
  // Remaining mass joins the open upper tail.
  double tail_mass = n;
  for (const Bin& b : bins) tail_mass -= b.expected;
  if (bins.empty() || tail_mass >= 5.0) {
    bins.push_back({lo, SIZE_MAX, tail_mass, 0.0});
  } else {
    bins.back().hi = SIZE_MAX;
    bins.back().expected += tail_mass;
  }
  SF_REQUIRE(bins.size() >= 2, "chi_square_poisson: degenerate binning");

  for (std::uint64_t c : counts) {
    for (Bin& b : bins) {
      if (c >= b.lo && (b.hi == SIZE_MAX || c <= b.hi)) {
        b.observed += 1.0;
        break;
      }
    }
  }
  double stat = 0.0;
  for (const Bin& b : bins)
    stat += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  const int dof = static_cast<int>(bins.size()) - 1;
  return ChiSquareResult{stat, dof, gamma_q(0.5 * dof, 0.5 * stat)};
}

Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.mean = mean;
  m.variance = xs.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  m.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  return m;
}

}  // namespace shotfield::stats
