// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "shotfield/amplitudes.hpp"
#include "shotfield/common.hpp"
#include "shotfield/pointproc.hpp"
#include "shotfield/response.hpp"

namespace shotfield::shotnoise {

/// Evaluation positions z_1..z_m with nonnegative weights s_1..s_m.
/// The weighted kick sum xi(x) = sum_j s_j l(z_j - x) drives every
/// transform in the limit computations.
struct FddQuery {
  std::vector<Point> positions;
  std::vector<double> weights;

  std::size_t size() const { return positions.size(); }
  double weight_sum() const;
  void validate(const Window& window, const ResponseFn& response) const;
};

double xi_eval(const FddQuery& query, const ResponseFn& response,
               const Point& x, int dim);

/// Field values I(z_j) = sum_n P_n l(z_j - X_n).  Displacements wrap on
/// the torus and are taken plainly in padded mode.  Points farther than
/// the effective radius from every z are skipped via grid bucketing;
/// the brute-force flag forces the O(n m) path (used as an oracle).
std::vector<double> field_eval(const pointproc::PointPattern& pattern,
                               const std::vector<double>& amplitude_values,
                               const ResponseFn& response,
                               const std::vector<Point>& positions,
                               bool brute_force = false);

/// (I(z) - lambda * mean * c_l) / g(lambda), componentwise.
std::vector<double> centralize_scale(const std::vector<double>& values,
                                     double lambda,
                                     const amplitudes::AmplitudeLaw& law,
                                     const ResponseFn& response, int dim);

}  // namespace shotfield::shotnoise
