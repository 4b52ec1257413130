// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "shotfield/rng.hpp"

namespace shotfield::amplitudes {

enum class LawKind { deterministic, exponential, pareto };

/// Nonnegative i.i.d. mark distribution attached to each point.
///
/// Three families are supported:
///   - deterministic(c):    point mass at c > 0
///   - exponential(rate):   mean 1/rate
///   - pareto(alpha, xm):   density a xm^a t^(-a-1) on [xm,inf),
///                          tail (xm/t)^a, with alpha restricted to
///                          (1,2) so the mean is finite and the second
///                          moment is not.
/// The pareto family is the exact power-tail instance: its tail index
/// makes tail(c*t)/tail(t) = c^(-alpha) hold identically, and the
/// normalization g below is an exact (not just asymptotic) inverse of
/// 1/tail.
class AmplitudeLaw {
 public:
  static AmplitudeLaw deterministic(double value);
  static AmplitudeLaw exponential(double rate);
  static AmplitudeLaw pareto(double alpha, double xm);

  LawKind kind() const { return kind_; }
  double mean() const { return mean_; }

  /// Second moment; empty for the pareto family (infinite).
  std::optional<double> second_moment() const { return m2_; }
  bool heavy_tailed() const { return !m2_.has_value(); }

  /// Tail index for pareto; throws otherwise.
  double tail_index() const;
  double pareto_scale() const;

  double sample(Rng& rng) const;

  /// Upper tail P(X > t), exact for every family.
  double tail(double t) const;

  /// E[exp(-s X)] for s >= 0.  Closed form for deterministic and
  /// exponential; adaptive quadrature (substituting u = s*t, absolute
  /// tolerance 1e-10) for pareto.
  double laplace(double s) const;

  /// Intensity normalization: sqrt(lambda) when the second moment is
  /// finite, xm * lambda^(1/alpha) for pareto so that
  /// 1/tail(g(lambda)) = lambda exactly once g >= xm.
  double scaling_g(double lambda) const;

  std::string to_json() const;
  static AmplitudeLaw from_json(const std::string& json_text);

  double param1() const { return p1_; }
  double param2() const { return p2_; }

 private:
  AmplitudeLaw(LawKind kind, double p1, double p2);

  LawKind kind_;
  double p1_ = 0.0;  // value / rate / alpha
  double p2_ = 0.0;  // unused / unused / xm
  double mean_ = 0.0;
  std::optional<double> m2_;
};

}  // namespace shotfield::amplitudes
