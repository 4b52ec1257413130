// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "shotfield/pointproc.hpp"
#include "shotfield/quadrature.hpp"
#include "shotfield/stats.hpp"
#include "test_util.hpp"

using namespace shotfield;
using namespace shotfield::pointproc;

TEST_CASE("poisson sampling basics") {
  Window win{2, 1.0, Boundary::padded, 0.0};
  Rng rng(1);
  CHECK(sample_poisson(0.0, win, rng).size() == 0);

  const int reps = 10'000;
  std::vector<double> counts(reps);
  std::vector<std::uint64_t> icounts(reps);
  for (int r = 0; r < reps; ++r) {
    Rng rr(100 + static_cast<std::uint64_t>(r));
    const auto pat = sample_poisson(50.0, win, rr);
    counts[r] = static_cast<double>(pat.size());
    icounts[r] = pat.size();
    if (r == 0)
      for (const Point& p : pat.points) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 1.0);
        CHECK(p[1] >= 0.0);
        CHECK(p[1] <= 1.0);
      }
  }
  const auto mom = stats::sample_moments(counts);
  const double se = std::sqrt(50.0 / reps);
  CHECK(std::abs(mom.mean - 50.0) <= 5.0 * se);
  // Count variance tracks the mean.
  CHECK(mom.variance == doctest::Approx(50.0).epsilon(0.1));
  // Distributional check.
  CHECK(stats::chi_square_poisson(icounts, 50.0).p_value > 0.01);
}

TEST_CASE("poisson padded box") {
  Window win{1, 2.0, Boundary::padded, 0.5};
  Rng rng(7);
  const auto pat = sample_poisson(200.0, win, rng);
  double lo = 1e300, hi = -1e300;
  for (const Point& p : pat.points) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  CHECK(lo >= -0.5);
  CHECK(hi <= 2.5);
  CHECK(lo < 0.0);  // padding actually used at this point count
  CHECK(hi > 2.0);
  // Count targets the padded volume.
  CHECK(static_cast<double>(pat.size()) ==
        doctest::Approx(200.0 * 3.0).epsilon(0.15));
}

TEST_CASE("dpp model spectrum") {
  Window win1{1, 1.0, Boundary::torus, 0.0};
  const DppModel m(100.0, 0.5, win1);
  CHECK(m.spectral_sup() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(m.eigenvalue(0) == doctest::Approx(0.1).epsilon(1e-12));
  // Truncated mass matches the expected count.
  CHECK(m.eigenvalue_sum() == doctest::Approx(100.0).epsilon(1e-6));
  // Edge eigenvalue below the boundary rule.
  CHECK(m.eigenvalue(m.truncation()) < 1e-12);
  CHECK(m.eigenvalue(m.truncation() + 5) == 0.0);

  Window win2{2, 1.0, Boundary::torus, 0.0};
  const DppModel flat(100.0, 0.0, win2);
  CHECK(flat.spectral_sup() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.eigenvalue_sum() == doctest::Approx(100.0).epsilon(1e-6));

  // Intensities below one with eps > 0 would push the spectrum past 1.
  CHECK_THROWS(DppModel(0.5, 0.5, win1));
  // Padded windows are not a valid domain for the spectral sampler.
  Window padded{1, 1.0, Boundary::padded, 0.0};
  CHECK_THROWS(DppModel(10.0, 0.5, padded));
}

TEST_CASE("kernel evaluation") {
  Window win{1, 10.0, Boundary::torus, 0.0};
  const DppModel m(30.0, 0.5, win);
  const Point x = make_point(2.0);
  CHECK(kernel_eval(m, x, x) == doctest::Approx(30.0));
  const Point y = make_point(2.0 + m.bandwidth());
  CHECK(kernel_eval(m, x, y) == doctest::Approx(30.0 * std::exp(-1.0)));
  CHECK(kernel_eval(m, y, x) == doctest::Approx(kernel_eval(m, x, y)));
  // Torus wrap: points near opposite edges are close.
  const double r = kernel_eval(m, make_point(0.0001), make_point(10.0 - 0.0001));
  CHECK(r > 30.0 * std::exp(-1.0));
}

TEST_CASE("kernel l2 integral closed form and quadrature oracle") {
  Window win2{2, 1.0, Boundary::torus, 0.0};
  CHECK(kernel_l2_integral(DppModel(100.0, 0.0, win2)) ==
        doctest::Approx(50.0).epsilon(1e-12));
  CHECK(kernel_l2_integral(DppModel(100.0, 1.0, win2)) ==
        doctest::Approx(0.5).epsilon(1e-12));

  Window win1{1, 1.0, Boundary::torus, 0.0};
  for (double eps : {0.0, 0.3, 1.0}) {
    for (double lambda : {10.0, 100.0}) {
      const DppModel m(lambda, eps, win1);
      // One-dimensional quadrature of lambda^2 exp(-2 x^2 / s^2).
      const double s = m.bandwidth();
      const double direct = integrate(
          [&](double x) {
            return lambda * lambda * std::exp(-2.0 * x * x / (s * s));
          },
          -8.0 * s, 8.0 * s, 1e-12 * lambda, 1e-10);
      CHECK(test_util::close_rel(direct, kernel_l2_integral(m), 1e-8));
      CHECK(kernel_l2_integral(m) <= lambda + 1e-12);
    }
  }
}

TEST_CASE("pair correlation closed form") {
  Window win{1, 1.0, Boundary::torus, 0.0};
  const DppModel m(50.0, 0.5, win);
  CHECK(pair_correlation(m, 0.0) == 0.0);
  CHECK(pair_correlation(m, 100.0 * m.bandwidth()) == doctest::Approx(1.0));
  CHECK(pair_correlation(m, m.bandwidth()) ==
        doctest::Approx(0.8646647167633873).epsilon(1e-12));
}

TEST_CASE("dpp counts match the spectral selection law") {
  // Mean = sum beta, variance = sum beta (1 - beta).
  Window win{1, 0.5, Boundary::torus, 0.0};
  const DppModel m(5.0, 0.5, win);
  const int reps = 3000;
  std::vector<double> counts(reps);
  bool saw_empty = false;
  for (int r = 0; r < reps; ++r) {
    Rng rng(5000 + static_cast<std::uint64_t>(r));
    const auto pat = sample_dpp(m, rng);
    counts[r] = static_cast<double>(pat.size());
    saw_empty = saw_empty || pat.size() == 0;
    if (r < 20)
      for (const Point& p : pat.points) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 0.5);
      }
  }
  const auto mom = stats::sample_moments(counts);
  const double mean_th = m.eigenvalue_sum();
  const double var_th = m.count_variance();
  CHECK(std::abs(mom.mean - mean_th) <= 3.0 * std::sqrt(var_th / reps));
  // Variance of the sample variance for a near-binomial sum: loose 4-se band.
  CHECK(std::abs(mom.variance - var_th) <=
        4.0 * var_th * std::sqrt(2.0 / reps) + 0.05 * var_th);
  CHECK(saw_empty);  // empty frequency selections must be handled
}

TEST_CASE("dpp empirical intensity") {
  Window win{1, 1.0, Boundary::torus, 0.0};
  const DppModel m(40.0, 0.5, win);
  const int reps = 1000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    Rng rng(9000 + static_cast<std::uint64_t>(r));
    total += static_cast<double>(sample_dpp(m, rng).size());
  }
  const double mean = total / reps;
  const double se = std::sqrt(m.count_variance() / reps);
  CHECK(std::abs(mean - 40.0) <= 3.0 * se + 1e-6);
}

TEST_CASE("dpp pair correlation estimator tracks the kernel") {
  Window win{1, 1.0, Boundary::torus, 0.0};
  const double lambda = 50.0;
  const DppModel m(lambda, 0.5, win);
  const double s = m.bandwidth();
  const int reps = 2000;
  const double bin_w = 0.5 * s;
  const std::vector<double> centers{0.5 * s, s, 1.5 * s, 2.5 * s};
  std::vector<double> observed(centers.size(), 0.0);
  for (int r = 0; r < reps; ++r) {
    Rng rng(12'000 + static_cast<std::uint64_t>(r));
    const auto pat = sample_dpp(m, rng);
    for (std::size_t i = 0; i < pat.size(); ++i)
      for (std::size_t j = i + 1; j < pat.size(); ++j) {
        const double d = win.distance(pat.points[i], pat.points[j]);
        for (std::size_t b = 0; b < centers.size(); ++b)
          if (std::abs(d - centers[b]) <= 0.5 * bin_w) observed[b] += 1.0;
      }
  }
  for (std::size_t b = 0; b < centers.size(); ++b) {
    const double expected_pairs =
        0.5 * lambda * lambda * win.length * 2.0 * bin_w *
        pair_correlation(m, centers[b]) * reps;
    const double got = observed[b];
    // Counts are Poisson-ish at these sizes; a 5-sigma band on the
    // expected count is a lenient but real check of the repulsion dip.
    CHECK(std::abs(got - expected_pairs) <=
          5.0 * std::sqrt(std::max(expected_pairs, 4.0)) + 0.02 * expected_pairs);
  }
}

TEST_CASE("dpp two dimensional smoke") {
  Window win{2, 1.0, Boundary::torus, 0.0};
  const DppModel m(30.0, 0.5, win);
  double total = 0.0;
  const int reps = 300;
  for (int r = 0; r < reps; ++r) {
    Rng rng(31'000 + static_cast<std::uint64_t>(r));
    const auto pat = sample_dpp(m, rng);
    total += static_cast<double>(pat.size());
    if (r == 0)
      for (const Point& p : pat.points) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 1.0);
        CHECK(p[1] >= 0.0);
        CHECK(p[1] <= 1.0);
      }
  }
  const double se = std::sqrt(m.count_variance() / reps);
  CHECK(std::abs(total / reps - 30.0) <= 4.0 * se + 1e-6);
}

TEST_CASE("pattern and spectrum csv") {
  Window win{1, 1.0, Boundary::torus, 0.0};
  const DppModel m(5.0, 0.5, win);
  std::ostringstream ss;
  m.write_spectrum_csv(ss);
  const std::string spec = ss.str();
  CHECK(spec.rfind("k,beta\n", 0) == 0);

  PointPattern pat;
  pat.window = Window{2, 1.0, Boundary::padded, 0.0};
  pat.points = {make_point(0.25, 0.5)};
  std::ostringstream ps;
  pat.write_csv(ps);
  CHECK(ps.str() == "x,y\n0.25,0.5\n");
}
