// Copyright 2026 The spectral-attr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "sattr/error.hpp"

namespace sattr {

enum class Schedule { linear, cosine, sigmoid, step };

inline std::string_view to_string(Schedule s) {
  switch (s) {
    case Schedule::linear: return "linear";
    case Schedule::cosine: return "cosine";
    case Schedule::sigmoid: return "sigmoid";
    case Schedule::step: return "step";
  }
  return "?";
}

inline Schedule parse_schedule(std::string_view s) {
  if (s == "linear") return Schedule::linear;
  if (s == "cosine") return Schedule::cosine;
  if (s == "sigmoid") return Schedule::sigmoid;
  if (s == "step") return Schedule::step;
  throw InvalidInput("unknown schedule '" + std::string(s) + "'");
}

/// Interval [start, end] of path progress over which one component ramps
/// from 0 to full weight. end - start equals the overlap.
struct ActivationWindow {
  double start = 0.0;
  double end = 1.0;
};

inline void validate_overlap(double omega) {
  if (!(omega > 0.0 && omega <= 1.0))
    throw InvalidInput("overlap must lie in (0, 1], got " + std::to_string(omega));
}

/// Window of a component with importance `value` relative to the leading
/// importance `value_max`: start = (1 - omega)(1 - value/value_max).
inline ActivationWindow activation_window(double value, double value_max, double omega) {
  validate_overlap(omega);
  if (!(value_max > 0.0)) throw DegenerateInput("activation_window: zero leading importance");
  if (value < 0.0 || value > value_max * (1.0 + 1e-12))
    throw InvalidInput("activation_window: importance outside [0, max]");
  const double ratio = std::min(value / value_max, 1.0);
  const double start = (1.0 - omega) * (1.0 - ratio);
  return {start, start + omega};
}

namespace detail {
inline constexpr double kSigmoidSteepness = 10.0;
inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace detail

/// Activation level in [0, 1] of a component at path progress `alpha`.
/// Every schedule is 0 for alpha <= start and 1 for alpha >= end.
inline double gate(double alpha, const ActivationWindow& w, Schedule schedule) {
  if (schedule == Schedule::step) return alpha < 0.5 * (w.start + w.end) ? 0.0 : 1.0;
  const double t = std::clamp((alpha - w.start) / (w.end - w.start), 0.0, 1.0);
  switch (schedule) {
    case Schedule::linear:
      return t;
    case Schedule::cosine:
      return 0.5 * (1.0 - std::cos(std::numbers::pi * t));
    case Schedule::sigmoid: {
      const double k = detail::kSigmoidSteepness;
      const double lo = detail::logistic(-0.5 * k);
      const double hi = detail::logistic(0.5 * k);
      return (detail::logistic((t - 0.5) * k) - lo) / (hi - lo);
    }
    case Schedule::step:
      break;
  }
  return t;
}

}  // namespace sattr
