// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shotfield {

/// Thrown on invalid configuration or argument values.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative numerical procedure fails to converge.
class numerical_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SF_REQUIRE(cond, msg)                        \
  do {                                               \
    if (!(cond)) throw ::shotfield::invalid_input(msg); \
  } while (0)

/// Point in 1 or 2 dimensions; unused components are zero.
struct Point {
  std::array<double, 2> c{0.0, 0.0};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

inline Point make_point(double x) { return Point{{x, 0.0}}; }
inline Point make_point(double x, double y) { return Point{{x, y}}; }

enum class Boundary { torus, padded };

/// Rectangular observation box [0,L]^d.  In padded mode the sampling
/// region is enlarged to [-pad, L+pad]^d while fields are still read
/// off on [0,L]^d; in torus mode distances wrap modulo L.
struct Window {
  int dim = 1;
  double length = 1.0;
  Boundary boundary = Boundary::padded;
  double pad = 0.0;

  void validate() const {
    SF_REQUIRE(dim == 1 || dim == 2, "window: dim must be 1 or 2");
    SF_REQUIRE(length > 0.0, "window: side length must be positive");
    SF_REQUIRE(pad >= 0.0, "window: pad must be nonnegative");
    SF_REQUIRE(boundary != Boundary::torus || pad == 0.0,
               "window: torus mode does not take padding");
  }

  double volume() const { return dim == 1 ? length : length * length; }
  double sample_low() const { return boundary == Boundary::padded ? -pad : 0.0; }
  double sample_high() const {
    return boundary == Boundary::padded ? length + pad : length;
  }
  double sample_volume() const {
    const double side = sample_high() - sample_low();
    return dim == 1 ? side : side * side;
  }

  /// Displacement a-b respecting the boundary mode (wrapped into
  /// [-L/2, L/2) on the torus).
  Point displacement(const Point& a, const Point& b) const {
    Point d;
    for (int i = 0; i < dim; ++i) {
      double u = a[i] - b[i];
      if (boundary == Boundary::torus) {
        u -= length * std::round(u / length);
      }
      d[i] = u;
    }
    return d;
  }

  double distance(const Point& a, const Point& b) const {
    const Point d = displacement(a, b);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += d[i] * d[i];
    return std::sqrt(s);
  }
};

inline double norm(const Point& p, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

}  // namespace shotfield
