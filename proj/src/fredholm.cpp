// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "linalg.hpp"
#include "shotfield/limits.hpp"
#include "shotfield/quadrature.hpp"

namespace shotfield::fredholm {

using pointproc::DppModel;
using shotnoise::FddQuery;
using shotnoise::ResponseFn;

namespace {

double response_scale(const ResponseFn& r) {
  switch (r.kind()) {
    case shotnoise::ResponseKind::gauss_bump:
      return r.param2();
    case shotnoise::ResponseKind::ball_indicator:
      return r.param1();
    case shotnoise::ResponseKind::exp_decay:
      return 1.0 / r.param2();
  }
  return 1.0;
}

struct Interval {
  double lo, hi;
};

std::vector<Interval> support_union(const FddQuery& q, double r) {
  std::vector<Interval> iv;
  for (const Point& z : q.positions) iv.push_back({z[0] - r, z[0] + r});
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

}  // namespace

NystromGrid build_grid(const DppModel& model, const FddQuery& query,
                       const ResponseFn& response, const GridSpec& spec) {
  SF_REQUIRE(model.window().dim == 1,
             "build_grid: quadrature operator is one-dimensional");
  SF_REQUIRE(spec.panel_order >= 2 && spec.panel_order <= 64,
             "build_grid: panel order out of range");
  const double s = model.bandwidth();
  const double panel_w = std::min(s, response_scale(response)) / 4.0;
  const double r_cov = response.effective_radius() + 0.5 * panel_w;

  NystromGrid grid;
  for (const Interval& iv : support_union(query, r_cov)) {
    // Panel edges at uniform subdivisions; the indicator response also
    // pins edges at its jump radius so panels never straddle it.
    std::vector<double> edges;
    const int n_panels =
        std::max(1, static_cast<int>(std::ceil((iv.hi - iv.lo) / panel_w)));
    for (int i = 0; i <= n_panels; ++i)
      edges.push_back(iv.lo + (iv.hi - iv.lo) * i / n_panels);
    if (response.compact_support()) {
      std::vector<double> jumps;
      for (const Point& z : query.positions) {
        jumps.push_back(z[0] - response.param1());
        jumps.push_back(z[0] + response.param1());
      }
      for (double j : jumps)
        if (j > iv.lo + 1e-12 && j < iv.hi - 1e-12) edges.push_back(j);
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    const PanelRule rule = panel_rule(edges, spec.panel_order);
    grid.nodes.insert(grid.nodes.end(), rule.nodes.begin(), rule.nodes.end());
    grid.weights.insert(grid.weights.end(), rule.weights.begin(),
                        rule.weights.end());
  }
  return grid;
}

DiscretizedOperator::DiscretizedOperator(std::vector<double> nodes,
                                         std::vector<double> weights,
                                         std::vector<double> damp,
                                         const DppModel& model)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  const int n = static_cast<int>(nodes_.size());
  SF_REQUIRE(n > 0, "operator: empty grid");
  const double s = model.bandwidth();
  const double reach = 8.5 * s;  // kernel below 1e-31 past this separation
  // The band layout indexes by coordinate order, so the grid must not
  // come within kernel reach of itself around the torus seam.
  SF_REQUIRE(model.window().boundary != Boundary::torus ||
                 nodes_.back() - nodes_.front() <=
                     model.window().length - 2.0 * reach,
             "operator: grid wraps into kernel reach around the torus");

  // Half-bandwidth: widest index gap with |x_i - x_j| within reach.
  int kd = 0;
  for (int i = 0, j = 0; i < n; ++i) {
    while (j < i && nodes_[static_cast<std::size_t>(i)] -
                            nodes_[static_cast<std::size_t>(j)] >
                        reach)
      ++j;
    kd = std::max(kd, i - j);
  }
  band_ = kd;

  const int ldab = kd + 1;
  banded_.assign(static_cast<std::size_t>(ldab) * n, 0.0);
  const Window& win = model.window();
  for (int j = 0; j < n; ++j) {
    for (int i = j; i <= std::min(n - 1, j + kd); ++i) {
      const double dist = win.distance(make_point(nodes_[static_cast<std::size_t>(i)]),
                                       make_point(nodes_[static_cast<std::size_t>(j)]));
      const double u = dist / s;
      const double kxy = model.intensity() * std::exp(-u * u);
      const double val = std::sqrt(weights_[static_cast<std::size_t>(i)] *
                                   weights_[static_cast<std::size_t>(j)]) *
                         damp[static_cast<std::size_t>(i)] *
                         damp[static_cast<std::size_t>(j)] * kxy;
      banded_[static_cast<std::size_t>(j) * ldab + (i - j)] = val;
    }
  }
  for (int j = 0; j < n; ++j) {
    const double diag = banded_[static_cast<std::size_t>(j) * ldab];
    trace_ += diag;
    trace_sq_ += diag * diag;
    for (int i = j + 1; i <= std::min(n - 1, j + kd); ++i)
      trace_sq_ += 2.0 * banded_[static_cast<std::size_t>(j) * ldab + (i - j)] *
                   banded_[static_cast<std::size_t>(j) * ldab + (i - j)];
  }
}

const std::vector<double>& DiscretizedOperator::eigenvalues() const {
  if (eigen_.empty() && !nodes_.empty()) {
    eigen_ = linalg::banded_eigenvalues(banded_, static_cast<int>(nodes_.size()),
                                        band_);
    std::sort(eigen_.begin(), eigen_.end(), std::greater<>());
  }
  return eigen_;
}

double DiscretizedOperator::max_eigenvalue() const {
  const auto& ev = eigenvalues();
  return ev.empty() ? 0.0 : ev.front();
}

double DiscretizedOperator::log_det_complement() const {
  const int n = static_cast<int>(nodes_.size());
  const int ldab = band_ + 1;
  // I - M in the same band layout.
  std::vector<double> ab(banded_.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= band_; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * ldab +
                              static_cast<std::size_t>(i);
      ab[idx] = (i == 0 ? 1.0 : 0.0) - banded_[idx];
    }
  double logdet = 0.0;
  if (!linalg::banded_cholesky_logdet(ab, n, band_, logdet))
    throw numerical_failure(
        "fredholm: determinant not convergent (eigenvalue at or above 1)");
  return logdet;
}

DiscretizedOperator build_operator(const DppModel& model,
                                   const amplitudes::AmplitudeLaw& law,
                                   const FddQuery& query,
                                   const ResponseFn& response,
                                   const GridSpec& spec, double scale_g) {
  SF_REQUIRE(scale_g > 0.0, "build_operator: scale must be positive");
  NystromGrid grid = build_grid(model, query, response, spec);
  std::vector<double> damp(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const double xi = shotnoise::xi_eval(query, response,
                                         make_point(grid.nodes[i]), 1);
    damp[i] = std::sqrt(std::max(0.0, 1.0 - law.laplace(xi / scale_g)));
  }
  return DiscretizedOperator(std::move(grid.nodes), std::move(grid.weights),
                             std::move(damp), model);
}

double fredholm_laplace(const DiscretizedOperator& op) {
  if (op.size() == 0) return 1.0;
  return std::exp(op.log_det_complement());
}

TraceSeries trace_series(const DiscretizedOperator& op, int n_terms) {
  SF_REQUIRE(n_terms >= 1, "trace_series: need at least one term");
  TraceSeries out;
  out.trace_sq = op.trace_sq();
  const auto& ev = op.eigenvalues();
  std::vector<double> pw(ev.begin(), ev.end());
  double acc = 0.0;
  for (int n = 1; n <= n_terms; ++n) {
    double tr = 0.0;
    for (std::size_t i = 0; i < pw.size(); ++i) {
      if (n > 1) pw[i] *= ev[i];
      tr += pw[i];
    }
    acc += tr / n;
    out.partial_sums.push_back(acc);
  }
  const double q = std::sqrt(out.trace_sq);
  if (q < 1.0) {
    double bound = -std::log1p(-q);
    double qn = 1.0;
    for (int n = 1; n <= n_terms; ++n) {
      qn *= q;
      bound -= qn / n;
    }
    out.remainder_bound = std::max(0.0, bound);
  }
  return out;
}

namespace {

// Frequency-basis evaluation of |log det(I - M) + Tr M| on a small
// circle wrapping the kick support.  The damping profile enters through
// its Fourier coefficients, so the matrix is Hermitian and banded with
// the band set by the profile's smoothness; the kernel bandwidth only
// sizes the frequency range.  Restricted to smooth responses.
double hov_fourier_value(const DppModel& model,
                         const amplitudes::AmplitudeLaw& law,
                         const FddQuery& query, const ResponseFn& response,
                         double scale_g, double& trace_out) {
  SF_REQUIRE(response.kind() == shotnoise::ResponseKind::gauss_bump,
             "fourier operator basis requires a smooth response");
  const double circumference = model.window().length;
  const double lo = 0.0, hi = circumference;

  auto h = [&](double x) {
    const double xi = shotnoise::xi_eval(query, response, make_point(x), 1);
    return 1.0 - law.laplace(xi / scale_g);
  };
  (void)hi;

  // All profile coefficients come from one composite Gauss-Legendre
  // rule over the kick support, with panels small enough to resolve
  // both the profile scale and the highest oscillation kept.  The
  // profile is evaluated once per node; coefficients are plain
  // weighted phase sums.
  double zlo = 1e300, zhi = -1e300;
  for (const Point& z : query.positions) {
    zlo = std::min(zlo, z[0]);
    zhi = std::max(zhi, z[0]);
  }
  const double r_tol = response.effective_radius();
  const double supp_lo = std::max(lo, zlo - r_tol);
  const double supp_hi = zhi + r_tol;
  const double w_scale = response.param2();

  std::vector<std::complex<double>> hhat;
  int band = 0;
  for (int m_cap = 128; m_cap <= 65536; m_cap *= 2) {
    const double panel =
        std::min(w_scale / 6.0, circumference / (3.5 * m_cap));
    const int n_panels = std::max(
        4, static_cast<int>(std::ceil((supp_hi - supp_lo) / panel)));
    std::vector<double> edges(static_cast<std::size_t>(n_panels) + 1);
    for (int i = 0; i <= n_panels; ++i)
      edges[static_cast<std::size_t>(i)] =
          supp_lo + (supp_hi - supp_lo) * i / n_panels;
    const PanelRule rule = panel_rule(edges, 10);
    std::vector<double> hw(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      hw[i] = rule.weights[i] * h(rule.nodes[i]);

    hhat.clear();
    double h0 = 0.0;
    for (double v : hw) h0 += v;
    if (h0 == 0.0) {
      trace_out = 0.0;
      return 0.0;  // no damping anywhere: the operator is zero
    }
    hhat.emplace_back(h0, 0.0);
    int quiet = 0;
    for (int m = 1; m <= m_cap && quiet < 3; ++m) {
      const double wfreq = 2.0 * M_PI * m / circumference;
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += hw[i] * std::polar(1.0, -wfreq * rule.nodes[i]);
      hhat.push_back(acc);
      if (std::abs(hhat.back()) < 1e-11 * std::abs(h0))
        ++quiet;
      else
        quiet = 0;
    }
    if (quiet >= 3) {
      band = static_cast<int>(hhat.size()) - 1;
      break;
    }
  }
  SF_REQUIRE(band > 0, "fourier operator: profile coefficients not decaying");

  const int M = model.truncation();
  const int n = 2 * M + 1;
  std::vector<double> root_beta(static_cast<std::size_t>(n));
  for (int k = -M; k <= M; ++k)
    root_beta[static_cast<std::size_t>(k + M)] =
        std::sqrt(model.eigenvalue(k));

  const int kd = std::min(band, n - 1);
  const int ldab = kd + 1;
  std::vector<std::complex<double>> ab(static_cast<std::size_t>(ldab) * n);
  double trace = 0.0, trace_sq = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i <= std::min(n - 1, j + kd); ++i) {
      // B(k_i, k_j) = sqrt(beta_i) hhat(k_i - k_j)/C sqrt(beta_j)
      const std::complex<double> val =
          root_beta[static_cast<std::size_t>(i)] *
          hhat[static_cast<std::size_t>(i - j)] / circumference *
          root_beta[static_cast<std::size_t>(j)];
      const std::size_t idx =
          static_cast<std::size_t>(j) * ldab + static_cast<std::size_t>(i - j);
      ab[idx] = (i == j ? std::complex<double>(1.0, 0.0) : 0.0) - val;
      if (i == j) {
        trace += val.real();
        trace_sq += std::norm(val);
      } else {
        trace_sq += 2.0 * std::norm(val);
      }
    }
  }
  double logdet = 0.0;
  if (!linalg::banded_cholesky_logdet(ab, n, kd, logdet))
    throw numerical_failure("fourier operator: determinant not convergent");
  trace_out = trace;
  (void)trace_sq;
  return std::abs(logdet + trace);
}

}  // namespace

std::vector<HovRow> higher_order_vanishing(
    double eps, const amplitudes::AmplitudeLaw& law, const FddQuery& query,
    const ResponseFn& response, const std::vector<double>& lambdas,
    bool scale_by_g, HovMethod method, const GridSpec& spec) {
  SF_REQUIRE(!lambdas.empty(), "higher_order_vanishing: empty intensity grid");
  std::vector<HovRow> rows;
  rows.reserve(lambdas.size());

  // Circle wrapping the kick support with clearance for the kernel at
  // the smallest bandwidth in the sweep.
  double zlo = 1e300, zhi = -1e300;
  for (const Point& z : query.positions) {
    zlo = std::min(zlo, z[0]);
    zhi = std::max(zhi, z[0]);
  }
  const double r_tol = response.effective_radius();

  for (double lambda : lambdas) {
    const double s_probe =
        std::pow(M_PI, -0.5) * std::pow(lambda, -(1.0 + eps));
    const double margin = std::max(20.0 * s_probe, 0.02 * r_tol);
    Window win;
    win.dim = 1;
    win.boundary = Boundary::torus;
    win.length = (zhi - zlo) + 2.0 * (r_tol + margin);

    // Recenter the query on the circle.
    FddQuery q = query;
    for (Point& z : q.positions) z[0] = z[0] - zlo + r_tol + margin;

    const DppModel model(lambda, eps, win);
    const double g = scale_by_g ? law.scaling_g(lambda) : 1.0;

    HovRow row{lambda, 0.0, 0.0};
    if (method == HovMethod::nystrom) {
      const DiscretizedOperator op =
          build_operator(model, law, q, response, spec, g);
      row.trace = op.trace();
      row.n2_contribution = std::abs(op.log_det_complement() + op.trace());
    } else {
      row.n2_contribution =
          hov_fourier_value(model, law, q, response, g, row.trace);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shotfield::fredholm
