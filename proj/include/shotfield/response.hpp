// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "shotfield/common.hpp"

namespace shotfield::shotnoise {

enum class ResponseKind { gauss_bump, ball_indicator, exp_decay };

/// Bounded, nonnegative, integrable kick shape.
///
/// Cached constants: sup_bound = sup l(x); integral(d) = Int l over R^d;
/// effective_radius is the radius beyond which l(x) <= 1e-12 * sup_bound
/// (exactly the ball radius for the indicator, so truncating there is
/// lossless in that case).
class ResponseFn {
 public:
  static ResponseFn gauss_bump(double height, double width);
  static ResponseFn ball_indicator(double radius);
  static ResponseFn exp_decay(double height, double rate);

  ResponseKind kind() const { return kind_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  double operator()(const Point& x, int dim) const { return eval_radial(norm(x, dim)); }
  double eval_radial(double r) const;

  double sup_bound() const { return sup_; }
  double integral(int dim) const;
  double effective_radius() const { return r_tol_; }

  /// Mass beyond the effective radius, Int_{|x| > R} l(x) dx (zero for
  /// the indicator).
  double tail_mass(int dim) const;

  /// True when the support is exactly a ball (no truncated tail).
  bool compact_support() const { return kind_ == ResponseKind::ball_indicator; }

  std::string to_json() const;
  static ResponseFn from_json(const std::string& json_text);

 private:
  ResponseFn(ResponseKind kind, double p1, double p2);

  ResponseKind kind_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  double sup_ = 0.0;
  double r_tol_ = 0.0;
};

}  // namespace shotfield::shotnoise
