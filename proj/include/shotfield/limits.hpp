// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "shotfield/amplitudes.hpp"
#include "shotfield/response.hpp"
#include "shotfield/rng.hpp"
#include "shotfield/shotnoise.hpp"

namespace shotfield::limits {

/// psi(u) = exp(-u) - 1 + u, with a series branch below 1e-4 where the
/// direct form loses all precision to cancellation.
double psi(double u);

/// Int l(z1-x) l(z2-x) dx by adaptive quadrature over the overlap of
/// the two effective supports (absolute tolerance 1e-8).
double response_overlap(const shotnoise::ResponseFn& response, const Point& z1,
                        const Point& z2, int dim);

/// Covariance of the Gaussian limit field: m2 * overlap integral.
double gaussian_cov(const shotnoise::ResponseFn& response, const Point& z1,
                    const Point& z2, double m2, int dim);

/// Limit Gaussian law of the query: covariance matrix m2 * L(z)
/// (row-major m x m).
struct GaussianLimit {
  shotnoise::FddQuery query;
  double m2 = 0.0;
  std::vector<double> covariance;

  std::size_t dim_m() const { return query.size(); }
  /// Variance of sum_j s_j N(z_j).
  double reduced_variance() const;
};

GaussianLimit gaussian_limit(const shotnoise::FddQuery& query,
                             const shotnoise::ResponseFn& response, double m2,
                             int dim);

/// E[exp(-sum s_j N(z_j))] = exp(reduced_variance / 2); exceeds one for
/// a centered Gaussian.
double gaussian_fdd_laplace(const GaussianLimit& limit);

/// Int xi(x)^alpha dx over the union of the kick supports.
double xi_alpha_integral(const shotnoise::FddQuery& query,
                         const shotnoise::ResponseFn& response, double alpha,
                         int dim);

/// Gamma(2-alpha)/(alpha-1): coefficient of the heavy-tail log-Laplace
/// transform; equals Int (1-e^-v) v^-alpha dv.
double stable_coefficient(double alpha);

double stable_fdd_laplace(const shotnoise::FddQuery& query,
                          const shotnoise::ResponseFn& response, double alpha,
                          int dim);

/// Scale of the totally skewed, centered alpha-stable limit of the
/// weighted field combination.
double stable_sigma(const shotnoise::FddQuery& query,
                    const shotnoise::ResponseFn& response, double alpha,
                    int dim);

/// Characteristic function of S_alpha(sigma, 1, 0):
/// exp(-sigma^a |t|^a (1 - i sign(t) tan(pi a / 2))).
std::complex<double> stable_cf(double alpha, double sigma, double t);

std::complex<double> stable_cf(const shotnoise::FddQuery& query,
                               const shotnoise::ResponseFn& response,
                               double alpha, int dim, double t);

/// Exact finite-intensity transform E[exp(-sum s_j I~(z_j))] for the
/// Poisson-driven field: exp(lambda * Int Int psi(xi(x) t / g) dF(t) dx),
/// evaluated by nested adaptive quadrature (target relative accuracy
/// 1e-6 on the exponent).  This is the finite-lambda oracle the Monte
/// Carlo runs are checked against.
double poisson_prelimit_laplace(double lambda,
                                const amplitudes::AmplitudeLaw& law,
                                const shotnoise::FddQuery& query,
                                const shotnoise::ResponseFn& response, int dim);

/// One draw from S_alpha(sigma, 1, 0), alpha in (1,2), by the
/// Chambers-Mallows-Stuck construction.
double sample_stable(double alpha, double sigma, Rng& rng);

}  // namespace shotfield::limits
