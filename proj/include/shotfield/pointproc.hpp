// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "shotfield/common.hpp"
#include "shotfield/rng.hpp"

namespace shotfield::pointproc {

/// Finite point configuration together with the window and the
/// intensity that generated it.
struct PointPattern {
  std::vector<Point> points;
  double intensity = 0.0;
  Window window;

  std::size_t size() const { return points.size(); }
  void write_csv(std::ostream& os) const;
};

/// Homogeneous Poisson sample: the count is Poisson(lambda * volume of
/// the sampling box) and positions are i.i.d. uniform.  In padded mode
/// the sampling box is the window enlarged by window.pad on every side.
PointPattern sample_poisson(double lambda, const Window& window, Rng& rng);

/// Stationary determinantal model with the Gaussian kernel
///   K(x,y) = lambda * exp(-|x-y|^2 / s^2),   s = pi^(-1/2) lambda^(-(1+eps)/d),
/// periodized on the torus [0,L]^d.  The Fourier eigenvalues are
///   beta_k = lambda (sqrt(pi) s)^d exp(-pi^2 s^2 |k/L|^2),  k in Z^d,
/// truncated at |k|_inf <= M.  The bandwidth rule puts the spectral sup
/// at lambda^(-eps), so eps > 0 gives a repulsion that weakens with
/// intensity while eps = 0 keeps it at the admissibility boundary.
class DppModel {
 public:
  DppModel(double lambda, double eps, Window window);

  double intensity() const { return lambda_; }
  double repulsion_exponent() const { return eps_; }
  double bandwidth() const { return s_; }
  const Window& window() const { return window_; }

  int truncation() const { return trunc_; }
  double spectral_sup() const { return pref_; }

  /// Eigenvalue for the frequency vector (k1[,k2]).
  double eigenvalue(int k1, int k2 = 0) const;

  /// Sum of the truncated eigenvalues (expected point count) and the
  /// Bernoulli count variance sum beta(1-beta).
  double eigenvalue_sum() const { return sum_beta_; }
  double count_variance() const { return sum_beta_ - sum_beta_sq_; }

  double axis_factor(int k) const { return axis_[static_cast<std::size_t>(std::abs(k))]; }

  void write_spectrum_csv(std::ostream& os) const;

 private:
  double lambda_;
  double eps_;
  double s_;
  Window window_;
  double pref_;   // lambda (sqrt(pi) s)^d = spectral sup
  int trunc_;     // per-axis cutoff M
  std::vector<double> axis_;  // exp(-pi^2 s^2 k^2 / L^2), k = 0..M
  double sum_beta_ = 0.0;
  double sum_beta_sq_ = 0.0;
};

DppModel dpp_build(double lambda, double eps, const Window& window);

/// Exact draw by the spectral sequential method: Bernoulli(beta_k)
/// thinning of the Fourier modes followed by one-point-at-a-time
/// sampling of the resulting projection process, using uniform
/// proposals (the leading conditional density is exactly flat) and
/// Gram-Schmidt updates of the selected eigenfunction frame.
PointPattern sample_dpp(const DppModel& model, Rng& rng);

double kernel_eval(const DppModel& model, const Point& x, const Point& y);

/// Closed form of Int |K(0,x)|^2 dx = 2^(-d/2) lambda^(1-eps); the
/// ratio to lambda decays iff eps > 0.
double kernel_l2_integral(const DppModel& model);

/// rho_2(0,r)/lambda^2 = 1 - exp(-2 r^2/s^2).
double pair_correlation(const DppModel& model, double r);

}  // namespace shotfield::pointproc
