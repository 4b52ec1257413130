// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "shotfield/amplitudes.hpp"
#include "shotfield/pointproc.hpp"
#include "shotfield/response.hpp"
#include "shotfield/shotnoise.hpp"

namespace shotfield::fredholm {

/// Discretization control for the quadrature operator.  Panels are no
/// wider than min(kernel bandwidth, response scale)/4; `panel_order`
/// Gauss-Legendre nodes sit on each panel, so doubling the order is the
/// self-convergence knob.
struct GridSpec {
  int panel_order = 4;
};

/// Tensor-free 1-d quadrature grid over the union of kick supports.
struct NystromGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

NystromGrid build_grid(const pointproc::DppModel& model,
                       const shotnoise::FddQuery& query,
                       const shotnoise::ResponseFn& response,
                       const GridSpec& spec);

/// Symmetric weighted discretization of the damped kernel
///   sqrt(1 - L_P(xi(x)/g)) K(x,y) sqrt(1 - L_P(xi(y)/g)),
/// stored in banded form (the Gaussian kernel reach truncates below
/// double precision within a few bandwidths).
class DiscretizedOperator {
 public:
  DiscretizedOperator(std::vector<double> nodes, std::vector<double> weights,
                      std::vector<double> damp, const pointproc::DppModel& model);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  double trace() const { return trace_; }
  double trace_sq() const { return trace_sq_; }

  /// Eigenvalues in descending order (computed on demand).
  const std::vector<double>& eigenvalues() const;
  double max_eigenvalue() const;

  /// log det(I - M); throws numerical_failure when an eigenvalue
  /// reaches 1 (Cholesky breakdown).
  double log_det_complement() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> banded_;  // lower band storage, ldab = kd+1
  int band_ = 0;
  double trace_ = 0.0;
  double trace_sq_ = 0.0;
  mutable std::vector<double> eigen_;  // cached, descending
};

DiscretizedOperator build_operator(const pointproc::DppModel& model,
                                   const amplitudes::AmplitudeLaw& law,
                                   const shotnoise::FddQuery& query,
                                   const shotnoise::ResponseFn& response,
                                   const GridSpec& spec, double scale_g = 1.0);

/// Fredholm determinant det(I - M) = prod (1 - mu_i): the joint Laplace
/// transform of the determinantal shot-noise field at the query.
double fredholm_laplace(const DiscretizedOperator& op);

/// Partial sums of sum_n Tr(M^n)/n through the eigenvalues, plus the
/// tail bound -ln(1 - sqrt(Tr M^2)) minus the counted terms.  The bound
/// only exists when Tr(M^2) < 1; it is left empty otherwise.
struct TraceSeries {
  std::vector<double> partial_sums;
  double trace_sq = 0.0;
  std::optional<double> remainder_bound;
};

TraceSeries trace_series(const DiscretizedOperator& op, int n_terms);

/// Magnitude of the n >= 2 part of the log-determinant series,
/// |log det(I - M) + Tr(M)|, per intensity.  Decays when the scaled
/// kernel correlation mass vanishes; stays bounded away from zero in
/// the eps = 0 control.
struct HovRow {
  double lambda;
  double trace;
  double n2_contribution;
};

enum class HovMethod {
  nystrom,  // quadrature grid in position space
  fourier   // frequency-basis twin; needed once the kernel bandwidth
            // outruns any affordable position grid
};

std::vector<HovRow> higher_order_vanishing(
    double eps, const amplitudes::AmplitudeLaw& law,
    const shotnoise::FddQuery& query, const shotnoise::ResponseFn& response,
    const std::vector<double>& lambdas, bool scale_by_g, HovMethod method,
    const GridSpec& spec = {});

}  // namespace shotfield::fredholm
