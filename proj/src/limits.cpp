// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/limits.hpp"

#include <algorithm>
#include <cmath>

#include "shotfield/quadrature.hpp"

namespace shotfield::limits {

double psi(double u) {
  SF_REQUIRE(u >= 0.0, "psi: argument must be nonnegative");
  if (u < 1e-4) {
    // u^2/2 - u^3/6 + u^4/24 - u^5/120; the first neglected term is
    // below 1e-24 relative at the branch point.
    return u * u * (0.5 + u * (-1.0 / 6.0 + u * (1.0 / 24.0 - u / 120.0)));
  }
  return std::exp(-u) - 1.0 + u;
}

namespace {

struct Interval {
  double lo, hi;
};

// Union of [c_j - r, c_j + r] as disjoint sorted intervals.
std::vector<Interval> merged_supports(const std::vector<Point>& centers,
                                      double r, int axis) {
  std::vector<Interval> iv;
  iv.reserve(centers.size());
  for (const Point& z : centers) iv.push_back({z[axis] - r, z[axis] + r});
  std::sort(iv.begin(), iv.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& i : iv) {
    if (!out.empty() && i.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, i.hi);
    else
      out.push_back(i);
  }
  return out;
}

double integrate_over_supports(const std::function<double(const Point&)>& f,
                               const std::vector<Point>& centers, double r,
                               int dim, double abs_tol) {
  if (dim == 1) {
    const auto ivs = merged_supports(centers, r, 0);
    double acc = 0.0;
    const double tol = abs_tol / static_cast<double>(ivs.size());
    for (const Interval& iv : ivs)
      acc += integrate([&](double x) { return f(make_point(x)); }, iv.lo,
                       iv.hi, tol);
    return acc;
  }
  // d = 2: bounding box of the support balls; the integrand vanishes
  // outside them so the slack only costs evaluations.
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const Point& z : centers) {
    xlo = std::min(xlo, z[0] - r);
    xhi = std::max(xhi, z[0] + r);
    ylo = std::min(ylo, z[1] - r);
    yhi = std::max(yhi, z[1] + r);
  }
  return integrate2d([&](double x, double y) { return f(make_point(x, y)); },
                     xlo, xhi, ylo, yhi, abs_tol);
}

}  // namespace

double response_overlap(const shotnoise::ResponseFn& response, const Point& z1,
                        const Point& z2, int dim) {
  const double r = response.effective_radius();
  Point gap;
  for (int a = 0; a < dim; ++a) gap[a] = z1[a] - z2[a];
  if (norm(gap, dim) > 2.0 * r) return 0.0;
  auto f = [&](const Point& x) {
    Point d1, d2;
    for (int a = 0; a < dim; ++a) {
      d1[a] = z1[a] - x[a];
      d2[a] = z2[a] - x[a];
    }
    return response(d1, dim) * response(d2, dim);
  };
  return integrate_over_supports(f, {z1, z2}, r, dim, 1e-8);
}

double gaussian_cov(const shotnoise::ResponseFn& response, const Point& z1,
                    const Point& z2, double m2, int dim) {
  SF_REQUIRE(std::isfinite(m2), "gaussian_cov: second moment must be finite");
  return m2 * response_overlap(response, z1, z2, dim);
}

double GaussianLimit::reduced_variance() const {
  const std::size_t m = query.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k)
      acc += query.weights[j] * query.weights[k] * covariance[j * m + k];
  return acc;
}

GaussianLimit gaussian_limit(const shotnoise::FddQuery& query,
                             const shotnoise::ResponseFn& response, double m2,
                             int dim) {
  GaussianLimit lim;
  lim.query = query;
  lim.m2 = m2;
  const std::size_t m = query.size();
  lim.covariance.assign(m * m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = j; k < m; ++k) {
      const double c =
          gaussian_cov(response, query.positions[j], query.positions[k], m2, dim);
      lim.covariance[j * m + k] = c;
      lim.covariance[k * m + j] = c;
    }
  return lim;
}

double gaussian_fdd_laplace(const GaussianLimit& limit) {
  return std::exp(0.5 * limit.reduced_variance());
}

double xi_alpha_integral(const shotnoise::FddQuery& query,
                         const shotnoise::ResponseFn& response, double alpha,
                         int dim) {
  SF_REQUIRE(alpha > 1.0 && alpha < 2.0, "alpha must lie in (1,2)");
  if (query.weight_sum() == 0.0) return 0.0;
  auto f = [&](const Point& x) {
    const double xi = shotnoise::xi_eval(query, response, x, dim);
    return xi > 0.0 ? std::pow(xi, alpha) : 0.0;
  };
  return integrate_over_supports(f, query.positions,
                                 response.effective_radius(), dim, 1e-8);
}

double stable_coefficient(double alpha) {
  SF_REQUIRE(alpha > 1.0 && alpha < 2.0, "alpha must lie in (1,2)");
  return std::tgamma(2.0 - alpha) / (alpha - 1.0);
}

double stable_fdd_laplace(const shotnoise::FddQuery& query,
                          const shotnoise::ResponseFn& response, double alpha,
                          int dim) {
  return std::exp(stable_coefficient(alpha) *
                  xi_alpha_integral(query, response, alpha, dim));
}

double stable_sigma(const shotnoise::FddQuery& query,
                    const shotnoise::ResponseFn& response, double alpha,
                    int dim) {
  // cos(pi a/2) < 0 on (1,2), so the argument below is nonnegative.
  const double arg = -stable_coefficient(alpha) *
                     xi_alpha_integral(query, response, alpha, dim) *
                     std::cos(0.5 * M_PI * alpha);
  return std::pow(arg, 1.0 / alpha);
}

std::complex<double> stable_cf(double alpha, double sigma, double t) {
  SF_REQUIRE(alpha > 1.0 && alpha < 2.0, "alpha must lie in (1,2)");
  if (t == 0.0) return {1.0, 0.0};
  const double mag = std::pow(sigma, alpha) * std::pow(std::abs(t), alpha);
  const double skew = std::tan(0.5 * M_PI * alpha) * (t > 0 ? 1.0 : -1.0);
  return std::exp(std::complex<double>(-mag, mag * skew));
}

std::complex<double> stable_cf(const shotnoise::FddQuery& query,
                               const shotnoise::ResponseFn& response,
                               double alpha, int dim, double t) {
  return stable_cf(alpha, stable_sigma(query, response, alpha, dim), t);
}

namespace {

// Inner amplitude average of psi(u t): point mass, exponential density,
// or the power tail mapped to [0,1] with the substitution that removes
// the endpoint blowup.
double psi_amplitude_average(const amplitudes::AmplitudeLaw& law, double u) {
  using amplitudes::LawKind;
  if (u == 0.0) return 0.0;
  switch (law.kind()) {
    case LawKind::deterministic:
      return psi(u * law.param1());
    case LawKind::exponential: {
      const double mu = law.param1();
      const double horizon = 60.0 / mu;
      return integrate(
          [&](double t) { return psi(u * t) * mu * std::exp(-mu * t); }, 0.0,
          horizon, 1e-12, 1e-9);
    }
    case LawKind::pareto: {
      const double alpha = law.tail_index();
      const double xm = law.pareto_scale();
      const double q = 1.0 / (alpha - 1.0);
      const double jac = alpha / (alpha - 1.0);
      // Substituting v = y^(alpha/(alpha-1)) in the tail-measure integral
      // keeps the integrand bounded: it tends to jac * u * xm at y = 0.
      auto f = [&](double y) {
        const double yq = std::pow(y, q);
        const double w = u * xm / std::max(yq, 1e-300);
        if (w > 1e6) return jac * (u * xm - yq);
        return jac * yq * psi(w);
      };
      return integrate(f, 0.0, 1.0, 1e-12, 1e-9);
    }
  }
  return 0.0;
}

}  // namespace

double poisson_prelimit_laplace(double lambda,
                                const amplitudes::AmplitudeLaw& law,
                                const shotnoise::FddQuery& query,
                                const shotnoise::ResponseFn& response,
                                int dim) {
  SF_REQUIRE(lambda > 0.0, "prelimit: lambda must be positive");
  if (query.weight_sum() == 0.0) return 1.0;
  const double g = law.scaling_g(lambda);
  auto f = [&](const Point& x) {
    const double u = shotnoise::xi_eval(query, response, x, dim) / g;
    return psi_amplitude_average(law, u);
  };
  // Two passes: a crude estimate of the exponent sets the absolute
  // tolerance for the refining pass (relative target 1e-6).
  const double rough = integrate_over_supports(
      f, query.positions, response.effective_radius(), dim, 1e-4);
  const double tol = 1e-6 * std::max(1.0, lambda * std::abs(rough)) / lambda;
  const double exponent =
      lambda * integrate_over_supports(f, query.positions,
                                       response.effective_radius(), dim, tol);
  return std::exp(exponent);
}

double sample_stable(double alpha, double sigma, Rng& rng) {
  SF_REQUIRE(alpha > 1.0 && alpha < 2.0, "sample_stable: alpha in (1,2)");
  SF_REQUIRE(sigma > 0.0, "sample_stable: sigma must be positive");
  // Chambers-Mallows-Stuck for beta = 1, centered parametrization.
  const double ta = std::tan(0.5 * M_PI * alpha);
  const double b = std::atan(ta) / alpha;
  const double scale = std::pow(1.0 + ta * ta, 0.5 / alpha);
  const double v = M_PI * (rng.uniform01() - 0.5);
  const double w = rng.exponential();
  const double x = scale * std::sin(alpha * (v + b)) /
                   std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w,
                            (1.0 - alpha) / alpha);
  return sigma * x;
}

}  // namespace shotfield::limits
