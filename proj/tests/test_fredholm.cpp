// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shotfield/fredholm.hpp"
#include "shotfield/limits.hpp"
#include "shotfield/quadrature.hpp"
#include "shotfield/stats.hpp"
#include "test_util.hpp"

using namespace shotfield;
using amplitudes::AmplitudeLaw;
using pointproc::DppModel;
using shotnoise::FddQuery;
using shotnoise::ResponseFn;

namespace {

struct Setup {
  DppModel model;
  FddQuery query;
  ResponseFn response;
  AmplitudeLaw law;
};

Setup make_setup(double lambda, double eps, double weight,
                 AmplitudeLaw law = AmplitudeLaw::deterministic(1.0),
                 ResponseFn resp = ResponseFn::gauss_bump(1.0, 0.1)) {
  const double r_tol = resp.effective_radius();
  const double s = std::pow(M_PI, -0.5) * std::pow(lambda, -(1.0 + eps));
  const double margin = std::max(25.0 * s, 1e-3 * r_tol);
  Window win{1, 2.0 * (r_tol + margin), Boundary::torus, 0.0};
  FddQuery q;
  q.positions = {make_point(r_tol + margin)};
  q.weights = {weight};
  return Setup{DppModel(lambda, eps, win), q, resp, law};
}

}  // namespace

TEST_CASE("grid covers the support and weights sum to its length") {
  const auto su = make_setup(20.0, 0.5, 1.0);
  const auto grid = fredholm::build_grid(su.model, su.query, su.response,
                                         fredholm::GridSpec{4});
  double wsum = 0.0;
  for (double w : grid.weights) wsum += w;
  const double r_cov = su.response.effective_radius();
  CHECK(wsum == doctest::Approx(2.0 * r_cov).epsilon(0.05));
  const double panel_target =
      std::min(su.model.bandwidth(), su.response.param2()) / 4.0;
  // Node spacing respects the panel rule.
  for (std::size_t i = 1; i < grid.nodes.size(); ++i) {
    CHECK(grid.nodes[i] > grid.nodes[i - 1]);
    CHECK(grid.nodes[i] - grid.nodes[i - 1] <= panel_target * 1.01);
  }
}

TEST_CASE("zero weights produce the identity transform") {
  const auto su = make_setup(20.0, 0.5, 0.0);
  const auto op = fredholm::build_operator(su.model, su.law, su.query,
                                           su.response, fredholm::GridSpec{4});
  CHECK(op.trace() == doctest::Approx(0.0));
  CHECK(fredholm::fredholm_laplace(op) == doctest::Approx(1.0));
  const auto series = fredholm::trace_series(op, 3);
  for (double v : series.partial_sums) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("trace equals the damped intensity integral") {
  const auto su = make_setup(25.0, 0.5, 1.0);
  const auto op = fredholm::build_operator(su.model, su.law, su.query,
                                           su.response, fredholm::GridSpec{4});
  const double lambda = su.model.intensity();
  const double direct =
      lambda *
      integrate(
          [&](double x) {
            const double xi =
                shotnoise::xi_eval(su.query, su.response, make_point(x), 1);
            return 1.0 - su.law.laplace(xi);
          },
          su.query.positions[0][0] - su.response.effective_radius(),
          su.query.positions[0][0] + su.response.effective_radius(), 1e-12);
  CHECK(test_util::close_rel(op.trace(), direct, 1e-8));

  // Mean bound from the amplitude mean.
  CHECK(op.trace() <= lambda * su.law.mean() * su.query.weight_sum() *
                              su.response.integral(1) +
                          1e-9);
}

TEST_CASE("squared trace obeys the correlation-mass bound") {
  for (double eps : {0.0, 0.5}) {
    const auto su = make_setup(30.0, eps, 0.8,
                               AmplitudeLaw::exponential(1.0));
    const double g = 2.0;  // arbitrary positive normalization
    const auto op = fredholm::build_operator(
        su.model, su.law, su.query, su.response, fredholm::GridSpec{4}, g);
    const double bound = su.response.sup_bound() * su.response.integral(1) *
                         su.query.weight_sum() * su.query.weight_sum() *
                         (su.law.mean() / g) * (su.law.mean() / g) *
                         pointproc::kernel_l2_integral(su.model);
    CHECK(op.trace_sq() <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("determinant from eigenvalues matches the factorized form") {
  const auto su = make_setup(15.0, 0.5, 1.0);
  const auto op = fredholm::build_operator(su.model, su.law, su.query,
                                           su.response, fredholm::GridSpec{4});
  const auto& mu = op.eigenvalues();
  CHECK(!mu.empty());
  CHECK(mu.front() < 1.0);
  CHECK(mu.front() <= su.model.spectral_sup() + 1e-9);
  double log_prod = 0.0;
  for (double m : mu) log_prod += std::log1p(-std::max(-0.999999, m));
  CHECK(test_util::close_rel(std::exp(log_prod),
                             fredholm::fredholm_laplace(op), 1e-10));
}

TEST_CASE("trace series partial sums and remainder bound") {
  const auto su = make_setup(15.0, 0.5, 1.0);
  const auto op = fredholm::build_operator(su.model, su.law, su.query,
                                           su.response, fredholm::GridSpec{4});
  const auto series = fredholm::trace_series(op, 8);
  CHECK(series.partial_sums.front() == doctest::Approx(op.trace()));
  const double total = -op.log_det_complement();
  double prev = 0.0;
  for (double s : series.partial_sums) {
    CHECK(s >= prev - 1e-14);
    CHECK(s <= total + 1e-12);
    prev = s;
  }
  REQUIRE(series.remainder_bound.has_value());
  const double actual_tail = total - series.partial_sums.back();
  CHECK(*series.remainder_bound >= actual_tail - 1e-12);
}

TEST_CASE("second order dominates the series tail") {
  const auto su = make_setup(25.0, 0.5, 1.0);
  const auto op = fredholm::build_operator(su.model, su.law, su.query,
                                           su.response, fredholm::GridSpec{4});
  const double n2 = std::abs(op.log_det_complement() + op.trace());
  CHECK(n2 >= 0.5 * op.trace_sq() - 1e-12);
  const double q = std::sqrt(op.trace_sq());
  REQUIRE(q < 1.0);
  CHECK(n2 <= -std::log1p(-q) - q + 1e-10);
}

TEST_CASE("grid refinement self convergence") {
  const auto su = make_setup(30.0, 0.5, 1.0);
  const auto op4 = fredholm::build_operator(su.model, su.law, su.query,
                                            su.response, fredholm::GridSpec{4});
  const auto op8 = fredholm::build_operator(su.model, su.law, su.query,
                                            su.response, fredholm::GridSpec{8});
  const double f4 = fredholm::fredholm_laplace(op4);
  const double f8 = fredholm::fredholm_laplace(op8);
  CHECK(std::abs(f4 - f8) / f8 < 1e-6);
}

TEST_CASE("monte carlo laplace mean matches the determinant") {
  // Exact sampler against the quadrature determinant on a small case.
  const auto su = make_setup(12.0, 0.5, 1.0);
  const auto op = fredholm::build_operator(su.model, su.law, su.query,
                                           su.response, fredholm::GridSpec{6});
  const double det_value = fredholm::fredholm_laplace(op);

  const int reps = 20'000;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    Rng rng(77'000 + static_cast<std::uint64_t>(r));
    const auto pat = pointproc::sample_dpp(su.model, rng);
    double field = 0.0;
    for (const Point& p : pat.points) {
      Point d;
      d[0] = su.query.positions[0][0] - p[0];
      field += su.response(d, 1);
    }
    const double v = std::exp(-su.query.weights[0] * field);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - det_value) <= 4.0 * se);
}

TEST_CASE("frequency-basis and quadrature evaluations agree") {
  const auto law = AmplitudeLaw::exponential(1.0);
  const auto resp = ResponseFn::gauss_bump(1.0, 0.05);
  FddQuery q;
  q.positions = {make_point(0.0)};
  q.weights = {1.0};
  for (double eps : {0.0, 0.5}) {
    const auto rows_n = fredholm::higher_order_vanishing(
        eps, law, q, resp, {10.0, 50.0}, true, fredholm::HovMethod::nystrom,
        fredholm::GridSpec{6});
    const auto rows_f = fredholm::higher_order_vanishing(
        eps, law, q, resp, {10.0, 50.0}, true, fredholm::HovMethod::fourier);
    for (std::size_t i = 0; i < rows_n.size(); ++i) {
      CHECK(test_util::close_rel(rows_n[i].trace, rows_f[i].trace, 1e-6));
      CHECK(test_util::close_rel(rows_n[i].n2_contribution,
                                 rows_f[i].n2_contribution, 1e-4));
    }
  }
}

TEST_CASE("higher order table vanishes for a weightless query") {
  const auto law = AmplitudeLaw::deterministic(1.0);
  const auto resp = ResponseFn::gauss_bump(1.0, 0.1);
  FddQuery q;
  q.positions = {make_point(0.0)};
  q.weights = {0.0};
  for (auto method : {fredholm::HovMethod::nystrom, fredholm::HovMethod::fourier}) {
    const auto rows = fredholm::higher_order_vanishing(0.5, law, q, resp,
                                                       {20.0}, true, method);
    CHECK(rows[0].trace == doctest::Approx(0.0));
    CHECK(rows[0].n2_contribution == doctest::Approx(0.0));
  }
}

TEST_CASE("higher order contribution decays only under weakening repulsion") {
  const auto law = AmplitudeLaw::exponential(1.0);
  const auto resp = ResponseFn::gauss_bump(1.0, 0.05);
  FddQuery q;
  q.positions = {make_point(0.0)};
  q.weights = {1.0};
  const std::vector<double> lambdas{10.0, 100.0};

  const auto dec = fredholm::higher_order_vanishing(
      0.5, law, q, resp, lambdas, true, fredholm::HovMethod::fourier);
  CHECK(dec[1].n2_contribution < dec[0].n2_contribution);

  const auto flat = fredholm::higher_order_vanishing(
      0.0, law, q, resp, lambdas, true, fredholm::HovMethod::fourier);
  CHECK(flat[1].n2_contribution > 0.5 * flat[0].n2_contribution);
}

TEST_CASE("heavy-tail normalization also kills the higher orders") {
  // With the tail-inverse normalization the decay holds even at the
  // repulsion boundary eps = 0.
  const auto law = AmplitudeLaw::pareto(1.5, 1.0);
  const auto resp = ResponseFn::gauss_bump(1.0, 0.05);
  FddQuery q;
  q.positions = {make_point(0.0)};
  q.weights = {1.0};
  const auto rows = fredholm::higher_order_vanishing(
      0.0, law, q, resp, {10.0, 100.0, 1000.0}, true,
      fredholm::HovMethod::fourier);
  CHECK(rows[1].n2_contribution < rows[0].n2_contribution);
  CHECK(rows[2].n2_contribution < rows[1].n2_contribution);
}
