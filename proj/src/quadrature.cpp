// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/quadrature.hpp"

#include <cmath>
#include <cstdlib>
#include <queue>

#include "shotfield/common.hpp"

namespace shotfield {

namespace {

// 15-point Kronrod abscissae on [0,1] side (symmetric) with the
// embedded 7-point Gauss rule on the odd entries.
constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {0.129484966168870, 0.279705391489277,
                               0.381830050505119, 0.417959183673469};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kKronrodX[i]);
    fv[14 - i] = f(c + h * kKronrodX[i]);
  }
  fv[7] = f(c);
  double kron = kKronrodW[7] * fv[7];
  double gauss = kGaussW[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kKronrodW[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kGaussW[i / 2] * (fv[i] + fv[14 - i]);
  }
  return GkResult{kron * h, std::abs(kron - gauss) * h};
}

struct Segment {
  double error;
  double value;
  double a, b;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const GkResult first = gk15(f, a, b);
  double tol = abs_tol + rel_tol * std::abs(first.value);
  if (tol <= 0.0) tol = 1e-12;
  if (first.error <= tol) return first.value;

  // Globally adaptive: keep bisecting the segment with the largest
  // error estimate until the summed estimate fits the budget.
  std::priority_queue<Segment> heap;
  heap.push(Segment{first.error, first.value, a, b});
  double total_value = first.value;
  double total_error = first.error;
  const int max_segments = 256 * std::max(1, max_depth);
  int segments = 1;
  while (total_error > tol) {
    if (segments >= max_segments)
      throw numerical_failure("adaptive quadrature: subdivision limit reached");
    const Segment worst = heap.top();
    heap.pop();
    if (worst.b - worst.a < 1e-300) {
      // Unresolvable feature narrower than double spacing; keep the
      // current estimate for it and carry on with the rest.
      total_error -= worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const GkResult left = gk15(f, worst.a, mid);
    const GkResult right = gk15(f, mid, worst.b);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(Segment{left.error, left.value, worst.a, mid});
    heap.push(Segment{right.error, right.value, mid, worst.b});
    ++segments;
    // Refresh the running tolerance in relative mode.
    tol = abs_tol + rel_tol * std::abs(total_value);
    if (tol <= 0.0) tol = 1e-12;
  }
  return total_value;
}

double integrate2d(const std::function<double(double, double)>& f, double ax,
                   double bx, double ay, double by, double abs_tol) {
  // Inner tolerance is taken per unit of outer length so the accumulated
  // inner errors stay within the overall budget.
  const double inner_tol = 0.25 * abs_tol / std::max(bx - ax, 1e-30);
  auto outer = [&](double x) {
    return integrate([&](double y) { return f(x, y); }, ay, by, inner_tol);
  };
  return integrate(outer, ax, bx, 0.5 * abs_tol);
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  SF_REQUIRE(n >= 1, "gauss_legendre: order must be >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

PanelRule panel_rule(const std::vector<double>& edges, int order) {
  SF_REQUIRE(edges.size() >= 2, "panel_rule: need at least one panel");
  std::vector<double> xs, ws;
  gauss_legendre(order, xs, ws);
  PanelRule rule;
  rule.nodes.reserve((edges.size() - 1) * static_cast<std::size_t>(order));
  rule.weights.reserve(rule.nodes.capacity());
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(c + h * xs[static_cast<std::size_t>(i)]);
      rule.weights.push_back(h * ws[static_cast<std::size_t>(i)]);
    }
  }
  return rule;
}

}  // namespace shotfield
