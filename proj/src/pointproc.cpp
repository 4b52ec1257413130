// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace shotfield::pointproc {

namespace {
constexpr double kDroppedMassRel = 1e-9;   // eigenvalue mass outside the cutoff
constexpr double kBoundaryBeta = 1e-12;    // eigenvalue size at the cutoff
constexpr std::uint64_t kTrialCap = 10'000'000;  // rejection-loop safety valve
}  // namespace

void PointPattern::write_csv(std::ostream& os) const {
  os << (window.dim == 1 ? "x\n" : "x,y\n");
  os.precision(17);
  for (const Point& p : points) {
    os << p[0];
    if (window.dim == 2) os << ',' << p[1];
    os << '\n';
  }
}

PointPattern sample_poisson(double lambda, const Window& window, Rng& rng) {
  window.validate();
  SF_REQUIRE(lambda >= 0.0, "sample_poisson: lambda must be nonnegative");
  PointPattern pat;
  pat.intensity = lambda;
  pat.window = window;
  if (lambda == 0.0) return pat;
  const double lo = window.sample_low();
  const double hi = window.sample_high();
  const std::uint64_t n = rng.poisson(lambda * window.sample_volume());
  pat.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Point p;
    for (int a = 0; a < window.dim; ++a) p[a] = rng.uniform(lo, hi);
    pat.points.push_back(p);
  }
  return pat;
}

DppModel::DppModel(double lambda, double eps, Window window)
    : lambda_(lambda), eps_(eps), window_(window) {
  window_.validate();
  SF_REQUIRE(lambda_ > 0.0, "dpp: lambda must be positive");
  SF_REQUIRE(eps_ >= 0.0, "dpp: repulsion exponent must be nonnegative");
  SF_REQUIRE(window_.boundary == Boundary::torus, "dpp: torus window required");

  const int d = window_.dim;
  const double L = window_.length;
  s_ = std::pow(M_PI, -0.5) * std::pow(lambda_, -(1.0 + eps_) / d);
  pref_ = lambda_ * std::pow(std::sqrt(M_PI) * s_, d);
  if (pref_ > 1.0 + 1e-12)
    throw invalid_input("dpp: spectrum would exceed 1 (lambda^(-eps) > 1); "
                        "intensities below 1 need eps = 0");
  pref_ = std::min(pref_, 1.0);

  // Per-axis factors exp(-pi^2 s^2 k^2 / L^2).  The cutoff M takes the
  // larger of the boundary rule (beta at the edge below kBoundaryBeta)
  // and the mass rule (dropped eigenvalue mass below
  // kDroppedMassRel * lambda L^d).
  const double decay = M_PI * M_PI * s_ * s_ / (L * L);
  axis_.clear();
  axis_.push_back(1.0);
  double axis_sum = 1.0;  // running sum over k in [-M, M]
  int m_boundary = 0;
  while (true) {
    const int k = static_cast<int>(axis_.size());
    const double t = std::exp(-decay * k * k);
    if (pref_ * t < kBoundaryBeta && m_boundary == 0) m_boundary = k;
    // Tail bound for the remaining axis mass: geometric with the local ratio.
    const double ratio = std::exp(-decay * (2.0 * k + 1.0));
    const double tail = 2.0 * t / std::max(1.0 - ratio, 1e-16);
    const bool mass_ok =
        pref_ * (std::pow(axis_sum + tail, d) - std::pow(axis_sum, d)) <
        kDroppedMassRel * lambda_ * window_.volume();
    axis_.push_back(t);
    axis_sum += 2.0 * t;
    if (m_boundary > 0 && mass_ok) break;
    SF_REQUIRE(k < 20'000'000, "dpp: spectrum truncation did not converge");
  }
  trunc_ = static_cast<int>(axis_.size()) - 1;

  double s1 = 0.0, s2 = 0.0;  // per-axis sums of t and t^2 over [-M, M]
  for (int k = -trunc_; k <= trunc_; ++k) {
    const double t = axis_[static_cast<std::size_t>(std::abs(k))];
    s1 += t;
    s2 += t * t;
  }
  sum_beta_ = pref_ * std::pow(s1, d);
  sum_beta_sq_ = pref_ * pref_ * std::pow(s2, d);
}

DppModel dpp_build(double lambda, double eps, const Window& window) {
  return DppModel(lambda, eps, window);
}

double DppModel::eigenvalue(int k1, int k2) const {
  if (std::abs(k1) > trunc_ || std::abs(k2) > trunc_) return 0.0;
  double b = pref_ * axis_[static_cast<std::size_t>(std::abs(k1))];
  if (window_.dim == 2) b *= axis_[static_cast<std::size_t>(std::abs(k2))];
  return b;
}

void DppModel::write_spectrum_csv(std::ostream& os) const {
  os.precision(17);
  if (window_.dim == 1) {
    os << "k,beta\n";
    for (int k = -trunc_; k <= trunc_; ++k) os << k << ',' << eigenvalue(k) << '\n';
  } else {
    os << "k1,k2,beta\n";
    for (int k1 = -trunc_; k1 <= trunc_; ++k1)
      for (int k2 = -trunc_; k2 <= trunc_; ++k2)
        os << k1 << ',' << k2 << ',' << eigenvalue(k1, k2) << '\n';
  }
}

namespace {

std::complex<double> unit_power(std::complex<double> base, unsigned e) {
  std::complex<double> r = 1.0;
  while (e != 0) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Phases e^(i theta k) over an ascending integer list, one short power
// chain per gap, renormalized periodically to pin the modulus at 1.
void phase_walk(double theta, const std::vector<int>& ks, double amplitude,
                std::complex<double>* out) {
  const std::complex<double> step = std::polar(1.0, theta);
  std::complex<double> cur =
      ks.empty() ? std::complex<double>(1.0) : std::polar(1.0, theta * ks.front());
  int prev = ks.empty() ? 0 : ks.front();
  int since_renorm = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    cur *= unit_power(step, static_cast<unsigned>(ks[i] - prev));
    prev = ks[i];
    if (++since_renorm == 64) {
      cur /= std::abs(cur);
      since_renorm = 0;
    }
    out[i] = amplitude * cur;
  }
}

}  // namespace

PointPattern sample_dpp(const DppModel& model, Rng& rng) {
  const Window& win = model.window();
  const int d = win.dim;
  const double L = win.length;
  const int M = model.truncation();

  PointPattern pat;
  pat.intensity = model.intensity();
  pat.window = win;

  // Phase 1: independent Bernoulli thinning of the Fourier modes.
  std::vector<int> sel_k1, sel_k2;
  if (d == 1) {
    for (int k = -M; k <= M; ++k)
      if (rng.uniform01() < model.eigenvalue(k)) sel_k1.push_back(k);
  } else {
    for (int k1 = -M; k1 <= M; ++k1)
      for (int k2 = -M; k2 <= M; ++k2)
        if (rng.uniform01() < model.eigenvalue(k1, k2)) {
          sel_k1.push_back(k1);
          sel_k2.push_back(k2);
        }
  }
  const std::size_t n = sel_k1.size();
  if (n == 0) return pat;

  // Phase 2: sequential draw of the rank-n projection process.  The
  // diagonal of the projection kernel is n/L^d, so a uniform proposal
  // with acceptance (n/L^d - sum_t |<e_t, v(x)>|^2) * L^d / n is exact.
  // Proposals are drawn in small batches sized to the expected trial
  // count of the step, so each frame row streams once per batch and the
  // dot products pipeline across the batch.
  const double vol = win.volume();
  const double diag = static_cast<double>(n) / vol;
  const double inv_sqrt_vol = 1.0 / std::sqrt(vol);

  std::vector<std::complex<double>> frame;  // accepted orthonormal rows, i x n
  frame.reserve(n * n);
  std::vector<std::complex<double>> vbatch(4 * n), tmp(n);
  std::vector<std::complex<double>> dots(4 * n);  // [t*4 + k]
  std::vector<Point> prop(4);
  double u_acc[4];
  double proj[4];
  pat.points.reserve(n);

  auto eval_modes = [&](const Point& x, std::complex<double>* out) {
    if (d == 1) {
      phase_walk(2.0 * M_PI * x[0] / L, sel_k1, inv_sqrt_vol, out);
    } else {
      const double th1 = 2.0 * M_PI * x[0] / L;
      const double th2 = 2.0 * M_PI * x[1] / L;
      for (std::size_t j = 0; j < n; ++j)
        out[j] = std::polar(inv_sqrt_vol, th1 * sel_k1[j] + th2 * sel_k2[j]);
    }
  };

  std::uint64_t trials = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int accepted = -1;
    while (accepted < 0) {
      // Batch size: the power of two nearest below the expected number
      // of trials at this step, capped at 4.
      const double expected = static_cast<double>(n) / static_cast<double>(n - i);
      const std::size_t b = expected >= 4.0 ? 4 : (expected >= 2.0 ? 2 : 1);
      trials += b;
      if (trials > kTrialCap)
        throw numerical_failure("sample_dpp: rejection loop exceeded cap");
      for (std::size_t k = 0; k < b; ++k) {
        for (int a = 0; a < d; ++a) prop[k][a] = rng.uniform(0.0, L);
        u_acc[k] = rng.uniform01();
        proj[k] = 0.0;
        eval_modes(prop[k], vbatch.data() + k * n);
      }

      if (b == 1) {
        const std::complex<double>* v0 = vbatch.data();
        for (std::size_t t = 0; t < i; ++t) {
          const std::complex<double>* row = frame.data() + t * n;
          std::complex<double> a0{}, a1{};
          std::size_t j = 0;
          for (; j + 1 < n; j += 2) {
            a0 += std::conj(row[j]) * v0[j];
            a1 += std::conj(row[j + 1]) * v0[j + 1];
          }
          if (j < n) a0 += std::conj(row[j]) * v0[j];
          const std::complex<double> dot = a0 + a1;
          dots[t * 4] = dot;
          proj[0] += std::norm(dot);
        }
      } else if (b == 2) {
        const std::complex<double>* v0 = vbatch.data();
        const std::complex<double>* v1 = vbatch.data() + n;
        for (std::size_t t = 0; t < i; ++t) {
          const std::complex<double>* row = frame.data() + t * n;
          std::complex<double> a0{}, a1{};
          for (std::size_t j = 0; j < n; ++j) {
            const std::complex<double> c = std::conj(row[j]);
            a0 += c * v0[j];
            a1 += c * v1[j];
          }
          dots[t * 4] = a0;
          dots[t * 4 + 1] = a1;
          proj[0] += std::norm(a0);
          proj[1] += std::norm(a1);
        }
      } else {
        const std::complex<double>* v0 = vbatch.data();
        const std::complex<double>* v1 = vbatch.data() + n;
        const std::complex<double>* v2 = vbatch.data() + 2 * n;
        const std::complex<double>* v3 = vbatch.data() + 3 * n;
        for (std::size_t t = 0; t < i; ++t) {
          const std::complex<double>* row = frame.data() + t * n;
          std::complex<double> a0{}, a1{}, a2{}, a3{};
          for (std::size_t j = 0; j < n; ++j) {
            const std::complex<double> c = std::conj(row[j]);
            a0 += c * v0[j];
            a1 += c * v1[j];
            a2 += c * v2[j];
            a3 += c * v3[j];
          }
          dots[t * 4] = a0;
          dots[t * 4 + 1] = a1;
          dots[t * 4 + 2] = a2;
          dots[t * 4 + 3] = a3;
          proj[0] += std::norm(a0);
          proj[1] += std::norm(a1);
          proj[2] += std::norm(a2);
          proj[3] += std::norm(a3);
        }
      }

      for (std::size_t k = 0; k < b; ++k) {
        const double num = diag - proj[k];
        if (num <= 1e-14 * diag) continue;  // numerically inside the span
        if (u_acc[k] * diag < num) {
          accepted = static_cast<int>(k);
          break;
        }
      }
    }

    // Extend the orthonormal frame from the accepted proposal (one
    // re-orthogonalization pass keeps the frame clean over hundreds of
    // points).
    const std::size_t k = static_cast<std::size_t>(accepted);
    const std::complex<double>* v = vbatch.data() + k * n;
    tmp.assign(v, v + n);
    for (std::size_t t = 0; t < i; ++t) {
      const std::complex<double>* row = frame.data() + t * n;
      const std::complex<double> c = dots[t * 4 + k];
      for (std::size_t j = 0; j < n; ++j) tmp[j] -= c * row[j];
    }
    for (std::size_t t = 0; t < i; ++t) {
      const std::complex<double>* row = frame.data() + t * n;
      std::complex<double> c = 0.0;
      for (std::size_t j = 0; j < n; ++j) c += std::conj(row[j]) * tmp[j];
      for (std::size_t j = 0; j < n; ++j) tmp[j] -= c * row[j];
    }
    double nrm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) nrm2 += std::norm(tmp[j]);
    const double inv_nrm = 1.0 / std::sqrt(nrm2);
    for (std::size_t j = 0; j < n; ++j) frame.push_back(tmp[j] * inv_nrm);
    pat.points.push_back(prop[k]);
  }
  return pat;
}

double kernel_eval(const DppModel& model, const Point& x, const Point& y) {
  const double r = model.window().distance(x, y);
  const double u = r / model.bandwidth();
  return model.intensity() * std::exp(-u * u);
}

double kernel_l2_integral(const DppModel& model) {
  const int d = model.window().dim;
  return std::pow(2.0, -0.5 * d) *
         std::pow(model.intensity(), 1.0 - model.repulsion_exponent());
}

double pair_correlation(const DppModel& model, double r) {
  SF_REQUIRE(r >= 0.0, "pair_correlation: r must be nonnegative");
  const double u = r / model.bandwidth();
  return 1.0 - std::exp(-2.0 * u * u);
}

}  // namespace shotfield::pointproc
