// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#include "shotfield/response.hpp"

#include <cmath>

#include <json.hpp>

namespace shotfield::shotnoise {

namespace {
// l(x) <= 1e-12 * sup beyond the effective radius.
constexpr double kTailCut = 1e-12;
const double kLogTailCut = std::log(1e12);
}  // namespace

ResponseFn::ResponseFn(ResponseKind kind, double p1, double p2)
    : kind_(kind), p1_(p1), p2_(p2) {
  switch (kind_) {
    case ResponseKind::gauss_bump:
      SF_REQUIRE(p1_ > 0.0 && p2_ > 0.0,
                 "gauss_bump: height and width must be positive");
      sup_ = p1_;
      r_tol_ = p2_ * std::sqrt(kLogTailCut);
      break;
    case ResponseKind::ball_indicator:
      SF_REQUIRE(p1_ > 0.0, "ball_indicator: radius must be positive");
      sup_ = 1.0;
      r_tol_ = p1_;
      break;
    case ResponseKind::exp_decay:
      SF_REQUIRE(p1_ > 0.0 && p2_ > 0.0,
                 "exp_decay: height and rate must be positive");
      sup_ = p1_;
      r_tol_ = kLogTailCut / p2_;
      break;
  }
  (void)kTailCut;
}

ResponseFn ResponseFn::gauss_bump(double height, double width) {
  return ResponseFn(ResponseKind::gauss_bump, height, width);
}

ResponseFn ResponseFn::ball_indicator(double radius) {
  return ResponseFn(ResponseKind::ball_indicator, radius, 0.0);
}

ResponseFn ResponseFn::exp_decay(double height, double rate) {
  return ResponseFn(ResponseKind::exp_decay, height, rate);
}

double ResponseFn::eval_radial(double r) const {
  switch (kind_) {
    case ResponseKind::gauss_bump: {
      const double u = r / p2_;
      return p1_ * std::exp(-u * u);
    }
    case ResponseKind::ball_indicator:
      return r <= p1_ ? 1.0 : 0.0;
    case ResponseKind::exp_decay:
      return p1_ * std::exp(-p2_ * r);
  }
  return 0.0;
}

double ResponseFn::integral(int dim) const {
  const double sqrt_pi = std::sqrt(M_PI);
  switch (kind_) {
    case ResponseKind::gauss_bump:
      return dim == 1 ? p1_ * sqrt_pi * p2_ : p1_ * M_PI * p2_ * p2_;
    case ResponseKind::ball_indicator:
      return dim == 1 ? 2.0 * p1_ : M_PI * p1_ * p1_;
    case ResponseKind::exp_decay:
      return dim == 1 ? 2.0 * p1_ / p2_ : 2.0 * M_PI * p1_ / (p2_ * p2_);
  }
  return 0.0;
}

double ResponseFn::tail_mass(int dim) const {
  const double r = r_tol_;
  switch (kind_) {
    case ResponseKind::gauss_bump: {
      const double u = r / p2_;
      if (dim == 1) return p1_ * std::sqrt(M_PI) * p2_ * std::erfc(u);
      return p1_ * M_PI * p2_ * p2_ * std::exp(-u * u);
    }
    case ResponseKind::ball_indicator:
      return 0.0;
    case ResponseKind::exp_decay: {
      const double e = std::exp(-p2_ * r);
      if (dim == 1) return 2.0 * p1_ / p2_ * e;
      return 2.0 * M_PI * p1_ / (p2_ * p2_) * (1.0 + p2_ * r) * e;
    }
  }
  return 0.0;
}

std::string ResponseFn::to_json() const {
  nlohmann::ordered_json j;
  switch (kind_) {
    case ResponseKind::gauss_bump:
      j = {{"kind", "gauss_bump"}, {"height", p1_}, {"width", p2_}};
      break;
    case ResponseKind::ball_indicator:
      j = {{"kind", "ball_indicator"}, {"radius", p1_}};
      break;
    case ResponseKind::exp_decay:
      j = {{"kind", "exp_decay"}, {"height", p1_}, {"rate", p2_}};
      break;
  }
  return j.dump();
}

ResponseFn ResponseFn::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gauss_bump")
    return ResponseFn::gauss_bump(j.at("height").get<double>(),
                                  j.at("width").get<double>());
  if (kind == "ball_indicator")
    return ResponseFn::ball_indicator(j.at("radius").get<double>());
  if (kind == "exp_decay")
    return ResponseFn::exp_decay(j.at("height").get<double>(),
                                 j.at("rate").get<double>());
  throw invalid_input("response fn: unknown kind '" + kind + "'");
}

}  // namespace shotfield::shotnoise
