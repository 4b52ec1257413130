// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

namespace shotfield {

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a,b]:
/// globally adaptive, always bisecting the segment with the largest
/// error estimate until the summed estimate fits the tolerance
/// (absolute plus relative to the running value).  Throws
/// numerical_failure when the segment budget (256 * max_depth) runs
/// out first.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol = 0.0, int max_depth = 60);

/// Tensor-product adaptive integration over a rectangle.
double integrate2d(const std::function<double(double, double)>& f, double ax,
                   double bx, double ay, double by, double abs_tol);

/// Gauss-Legendre nodes and weights on [-1,1] (Newton iteration on the
/// Legendre polynomial; n up to a few hundred).
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Composite Gauss-Legendre rule: `order` nodes on each panel
/// [edges[i], edges[i+1]].
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

PanelRule panel_rule(const std::vector<double>& edges, int order);

}  // namespace shotfield
