// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/amplitudes.hpp"

#include <cmath>

#include <json.hpp>

#include "shotfield/common.hpp"
#include "shotfield/quadrature.hpp"

namespace shotfield::amplitudes {

AmplitudeLaw::AmplitudeLaw(LawKind kind, double p1, double p2)
    : kind_(kind), p1_(p1), p2_(p2) {
  switch (kind_) {
    case LawKind::deterministic:
      SF_REQUIRE(p1_ > 0.0, "deterministic amplitude: value must be > 0");
      mean_ = p1_;
      m2_ = p1_ * p1_;
      break;
    case LawKind::exponential:
      SF_REQUIRE(p1_ > 0.0, "exponential amplitude: rate must be > 0");
      mean_ = 1.0 / p1_;
      m2_ = 2.0 / (p1_ * p1_);
      break;
    case LawKind::pareto:
      SF_REQUIRE(p1_ > 1.0 && p1_ < 2.0,
                 "pareto amplitude: alpha must lie in (1,2)");
      SF_REQUIRE(p2_ > 0.0, "pareto amplitude: xm must be > 0");
      mean_ = p1_ * p2_ / (p1_ - 1.0);
      m2_ = std::nullopt;  // second moment diverges; kept as a marker
      break;
  }
}

AmplitudeLaw AmplitudeLaw::deterministic(double value) {
  return AmplitudeLaw(LawKind::deterministic, value, 0.0);
}

AmplitudeLaw AmplitudeLaw::exponential(double rate) {
  return AmplitudeLaw(LawKind::exponential, rate, 0.0);
}

AmplitudeLaw AmplitudeLaw::pareto(double alpha, double xm) {
  return AmplitudeLaw(LawKind::pareto, alpha, xm);
}

double AmplitudeLaw::tail_index() const {
  SF_REQUIRE(kind_ == LawKind::pareto, "tail_index: pareto only");
  return p1_;
}

double AmplitudeLaw::pareto_scale() const {
  SF_REQUIRE(kind_ == LawKind::pareto, "pareto_scale: pareto only");
  return p2_;
}

double AmplitudeLaw::sample(Rng& rng) const {
  switch (kind_) {
    case LawKind::deterministic:
      return p1_;
    case LawKind::exponential:
      return rng.exponential(p1_);
    case LawKind::pareto:
      // Inverse CDF: xm * U^(-1/alpha).
      return p2_ * std::pow(rng.uniform01(), -1.0 / p1_);
  }
  return 0.0;
}

double AmplitudeLaw::tail(double t) const {
  if (t <= 0.0) return 1.0;
  switch (kind_) {
    case LawKind::deterministic:
      return t < p1_ ? 1.0 : 0.0;
    case LawKind::exponential:
      return std::exp(-p1_ * t);
    case LawKind::pareto:
      return t < p2_ ? 1.0 : std::pow(p2_ / t, p1_);
  }
  return 0.0;
}

double AmplitudeLaw::laplace(double s) const {
  SF_REQUIRE(s >= 0.0, "laplace: argument must be nonnegative");
  if (s == 0.0) return 1.0;
  switch (kind_) {
    case LawKind::deterministic:
      return std::exp(-p1_ * s);
    case LawKind::exponential:
      return p1_ / (p1_ + s);
    case LawKind::pareto: {
      // With u = s t and the tail measure v = (xm/t)^alpha the
      // transform is Int_0^1 e^(-u(v)) dv, u(v) = s xm v^(-1/alpha).
      // The complement Int (1 - e^(-u(v))) dv is integrated instead:
      // its mass sits where the integrand varies, so the adaptive
      // error estimate cannot mistake the boundary layer for zero.
      const double alpha = p1_;
      const double coef = p2_ * s;
      auto f = [&](double v) {
        if (v <= 0.0) return 1.0;
        const double expo = coef * std::pow(v, -1.0 / alpha);
        return expo > 745.0 ? 1.0 : -std::expm1(-expo);
      };
      const double complement = integrate(f, 0.0, 1.0, 1e-10, 0.0, 80);
      return std::min(1.0, std::max(0.0, 1.0 - complement));
    }
  }
  return 1.0;
}

double AmplitudeLaw::scaling_g(double lambda) const {
  SF_REQUIRE(lambda > 0.0, "scaling_g: lambda must be positive");
  if (kind_ == LawKind::pareto) return p2_ * std::pow(lambda, 1.0 / p1_);
  return std::sqrt(lambda);
}

std::string AmplitudeLaw::to_json() const {
  nlohmann::ordered_json j;
  switch (kind_) {
    case LawKind::deterministic:
      j = {{"kind", "deterministic"}, {"value", p1_}};
      break;
    case LawKind::exponential:
      j = {{"kind", "exponential"}, {"rate", p1_}};
      break;
    case LawKind::pareto:
      j = {{"kind", "pareto"}, {"alpha", p1_}, {"xm", p2_}};
      break;
  }
  return j.dump();
}

AmplitudeLaw AmplitudeLaw::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "deterministic")
    return AmplitudeLaw::deterministic(j.at("value").get<double>());
  if (kind == "exponential")
    return AmplitudeLaw::exponential(j.at("rate").get<double>());
  if (kind == "pareto")
    return AmplitudeLaw::pareto(j.at("alpha").get<double>(),
                                j.at("xm").get<double>());
  throw invalid_input("amplitude law: unknown kind '" + kind + "'");
}

}  // namespace shotfield::amplitudes
