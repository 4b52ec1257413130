// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/shotnoise.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace shotfield::shotnoise {

double FddQuery::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void FddQuery::validate(const Window& window, const ResponseFn& response) const {
  SF_REQUIRE(!positions.empty(), "query: at least one position required");
  SF_REQUIRE(positions.size() == weights.size(),
             "query: positions and weights must have equal length");
  for (double w : weights)
    SF_REQUIRE(w >= 0.0, "query: weights must be nonnegative");
  for (const Point& z : positions)
    for (int a = 0; a < window.dim; ++a)
      SF_REQUIRE(z[a] >= 0.0 && z[a] <= window.length,
                 "query: positions must lie in the window");
  if (window.boundary == Boundary::padded) {
    // Padding must cover the kick support so the restriction to the
    // window is exact up to the response tail cut.
    SF_REQUIRE(window.pad >= response.effective_radius() * (1.0 - 1e-12),
               "query: padding smaller than the response effective radius");
  }
}

double xi_eval(const FddQuery& query, const ResponseFn& response,
               const Point& x, int dim) {
  double acc = 0.0;
  for (std::size_t j = 0; j < query.positions.size(); ++j) {
    Point d;
    for (int a = 0; a < dim; ++a) d[a] = query.positions[j][a] - x[a];
    acc += query.weights[j] * response(d, dim);
  }
  return acc;
}

namespace {

std::int64_t cell_key(const Point& p, int dim, double origin, double cell,
                      std::int64_t stride) {
  const auto ix = static_cast<std::int64_t>(std::floor((p[0] - origin) / cell));
  if (dim == 1) return ix;
  const auto iy = static_cast<std::int64_t>(std::floor((p[1] - origin) / cell));
  return ix * stride + iy;
}

}  // namespace

std::vector<double> field_eval(const pointproc::PointPattern& pattern,
                               const std::vector<double>& amplitude_values,
                               const ResponseFn& response,
                               const std::vector<Point>& positions,
                               bool brute_force) {
  SF_REQUIRE(amplitude_values.size() == pattern.points.size(),
             "field_eval: amplitude count must match point count");
  const Window& win = pattern.window;
  const int dim = win.dim;
  const double r_tol = response.effective_radius();

  std::vector<double> out(positions.size(), 0.0);
  if (pattern.points.empty()) return out;

  if (brute_force || pattern.points.size() < 64) {
    for (std::size_t j = 0; j < positions.size(); ++j) {
      double acc = 0.0;
      for (std::size_t n = 0; n < pattern.points.size(); ++n) {
        const Point d = win.displacement(positions[j], pattern.points[n]);
        const double r = norm(d, dim);
        if (r <= r_tol) acc += amplitude_values[n] * response.eval_radial(r);
      }
      out[j] = acc;
    }
    return out;
  }

  // Grid bucketing with cell size = effective radius: only the 3^d
  // neighbor cells of a query can contribute.
  const double cell = r_tol;
  const double origin = win.sample_low() - 2.0 * cell;
  const std::int64_t stride = 1'000'000'007;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> buckets;
  buckets.reserve(pattern.points.size());
  for (std::size_t n = 0; n < pattern.points.size(); ++n)
    buckets[cell_key(pattern.points[n], dim, origin, cell, stride)]
        .push_back(static_cast<std::uint32_t>(n));

  const double L = win.length;
  const bool wrap = win.boundary == Boundary::torus;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    double acc = 0.0;
    // Torus queries examine every wrapped image of the query position,
    // including corner combinations in two dimensions.
    std::vector<Point> images;
    {
      double offs[2][3];
      int noffs[2] = {1, 1};
      offs[0][0] = offs[1][0] = 0.0;
      if (wrap)
        for (int a = 0; a < dim; ++a) {
          if (positions[j][a] < r_tol) offs[a][noffs[a]++] = L;
          if (positions[j][a] > L - r_tol) offs[a][noffs[a]++] = -L;
        }
      for (int i0 = 0; i0 < noffs[0]; ++i0)
        for (int i1 = 0; i1 < (dim == 2 ? noffs[1] : 1); ++i1) {
          Point q = positions[j];
          q[0] += offs[0][i0];
          if (dim == 2) q[1] += offs[1][i1];
          images.push_back(q);
        }
    }
    std::vector<std::uint32_t> seen;
    for (const Point& q : images) {
      const auto qx = static_cast<std::int64_t>(std::floor((q[0] - origin) / cell));
      const auto qy = dim == 2 ? static_cast<std::int64_t>(
                                     std::floor((q[1] - origin) / cell))
                               : 0;
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = (dim == 2 ? -1 : 0); dy <= (dim == 2 ? 1 : 0);
             ++dy) {
          const std::int64_t key =
              dim == 1 ? qx + dx : (qx + dx) * stride + (qy + dy);
          const auto it = buckets.find(key);
          if (it == buckets.end()) continue;
          for (std::uint32_t n : it->second) {
            if (wrap && images.size() > 1) {
              // A point could be reachable from two images of the same
              // query; count it once via the wrapped displacement.
              if (std::find(seen.begin(), seen.end(), n) != seen.end())
                continue;
              seen.push_back(n);
              const Point d = win.displacement(positions[j], pattern.points[n]);
              const double r = norm(d, dim);
              if (r <= r_tol)
                acc += amplitude_values[n] * response.eval_radial(r);
            } else {
              Point d;
              for (int a = 0; a < dim; ++a) d[a] = q[a] - pattern.points[n][a];
              const double r = norm(d, dim);
              if (r <= r_tol)
                acc += amplitude_values[n] * response.eval_radial(r);
            }
          }
        }
      }
    }
    out[j] = acc;
  }
  return out;
}

std::vector<double> centralize_scale(const std::vector<double>& values,
                                     double lambda,
                                     const amplitudes::AmplitudeLaw& law,
                                     const ResponseFn& response, int dim) {
  SF_REQUIRE(lambda > 0.0, "centralize_scale: lambda must be positive");
  const double mean_field = lambda * law.mean() * response.integral(dim);
  const double g = law.scaling_g(lambda);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] - mean_field) / g;
  return out;
}

}  // namespace shotfield::shotnoise
