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
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "sattr/error.hpp"
#include "sattr/model.hpp"
#include "sattr/tensor.hpp"
#include "sattr/text.hpp"

namespace sattr {

enum class CurveDirection { insertion, deletion };

struct PerturbationCurve {
  std::vector<double> fractions;
  std::vector<double> scores;
  CurveDirection direction = CurveDirection::deletion;
};

inline constexpr std::size_t kDefaultFractionSteps = 100;

/// Pixel indices ordered by descending heatmap value, row-major index
/// breaking ties.
inline std::vector<std::size_t> rank_pixels(const RealMatrix& heatmap) {
  std::vector<std::size_t> order(heatmap.size());
  std::iota(order.begin(), order.end(), 0);
  const auto v = heatmap.data();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return order;
}

namespace detail {

// Moves pixels, in heatmap rank order, from `target` into a copy of `start`.
// `steps` equal fraction steps, so the curve has steps + 1 points.
inline PerturbationCurve perturb(const ScalarField& model, const ImageTensor& start,
                                 const ImageTensor& target, const RealMatrix& heatmap,
                                 std::size_t steps, CurveDirection dir) {
  require_same_shape(start, target, "perturbation curve");
  if (heatmap.rows() != start.height() || heatmap.cols() != start.width())
    throw InvalidInput("heatmap must be H x W of the input");
  if (steps < 2) throw InvalidInput("perturbation curves need at least 2 fraction steps");
  if (!heatmap.all_finite()) throw InvalidInput("heatmap contains non-finite values");

  const auto order = rank_pixels(heatmap);
  const std::size_t plane = start.shape().plane();
  ImageTensor current = start;
  PerturbationCurve curve;
  curve.direction = dir;
  std::size_t moved = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const std::size_t want = k * plane / steps;
    for (; moved < want; ++moved) {
      const std::size_t px = order[moved];
      for (std::size_t c = 0; c < start.channels(); ++c) current[c * plane + px] = target[c * plane + px];
    }
    curve.fractions.push_back(static_cast<double>(k) / static_cast<double>(steps));
    curve.scores.push_back(model.forward(current));
  }
  return curve;
}

}  // namespace detail

/// Replaces top-ranked pixels of x by the baseline.
inline PerturbationCurve deletion_curve(const ScalarField& model, const ImageTensor& x,
                                        const ImageTensor& baseline, const RealMatrix& heatmap,
                                        std::size_t steps = kDefaultFractionSteps) {
  return detail::perturb(model, x, baseline, heatmap, steps, CurveDirection::deletion);
}

/// Copies top-ranked pixels of x into the baseline.
inline PerturbationCurve insertion_curve(const ScalarField& model, const ImageTensor& x,
                                         const ImageTensor& baseline, const RealMatrix& heatmap,
                                         std::size_t steps = kDefaultFractionSteps) {
  return detail::perturb(model, baseline, x, heatmap, steps, CurveDirection::insertion);
}

/// Trapezoidal area under scores over fractions.
inline double auc(const PerturbationCurve& c) {
  if (c.fractions.size() != c.scores.size() || c.fractions.size() < 2)
    throw InvalidInput("auc: malformed curve");
  double a = 0.0;
  for (std::size_t i = 1; i < c.fractions.size(); ++i)
    a += 0.5 * (c.scores[i] + c.scores[i - 1]) * (c.fractions[i] - c.fractions[i - 1]);
  return a;
}

inline double diff_id(const ScalarField& model, const ImageTensor& x, const ImageTensor& baseline,
                      const RealMatrix& heatmap, std::size_t steps = kDefaultFractionSteps) {
  return auc(insertion_curve(model, x, baseline, heatmap, steps)) -
         auc(deletion_curve(model, x, baseline, heatmap, steps));
}

inline std::string curve_csv(const PerturbationCurve& c) {
  std::string out = "fraction,score\n";
  for (std::size_t i = 0; i < c.fractions.size(); ++i)
    out += text::format_double(c.fractions[i]) + "," + text::format_double(c.scores[i]) + "\n";
  return out;
}

inline PerturbationCurve parse_curve_csv(std::string_view content, CurveDirection dir) {
  PerturbationCurve c;
  c.direction = dir;
  const std::string_view header = "fraction,score\n";
  if (content.substr(0, header.size()) != header) throw ParseError("missing curve CSV header", 0);
  std::string body(content.substr(header.size()));
  std::replace(body.begin(), body.end(), ',', ' ');
  text::Scanner sc(body);
  while (!sc.at_end()) {
    c.fractions.push_back(sc.number("fraction"));
    c.scores.push_back(sc.number("score"));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Localization.

/// Region of interest as an H x W boolean mask.
class LocalizationTarget {
 public:
  static LocalizationTarget from_mask(std::size_t h, std::size_t w, std::vector<std::uint8_t> mask) {
    if (mask.size() != h * w) throw InvalidInput("mask size does not match H x W");
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; }))
      throw InvalidInput("mask is empty");
    for (auto& v : mask) v = v != 0;
    return LocalizationTarget(h, w, std::move(mask));
  }

  /// Inclusive pixel box: columns x0..x1, rows y0..y1.
  static LocalizationTarget from_bbox(std::size_t h, std::size_t w, std::size_t x0, std::size_t y0,
                                      std::size_t x1, std::size_t y1) {
    if (x0 > x1 || y0 > y1 || x1 >= w || y1 >= h)
      throw InvalidInput("bounding box outside image bounds");
    std::vector<std::uint8_t> mask(h * w, 0);
    for (std::size_t i = y0; i <= y1; ++i)
      for (std::size_t j = x0; j <= x1; ++j) mask[i * w + j] = 1;
    return LocalizationTarget(h, w, std::move(mask));
  }

  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  bool contains(std::size_t index) const noexcept { return mask_[index] != 0; }
  std::size_t area() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
  }

 private:
  LocalizationTarget(std::size_t h, std::size_t w, std::vector<std::uint8_t> mask)
      : h_(h), w_(w), mask_(std::move(mask)) {}

  std::size_t h_;
  std::size_t w_;
  std::vector<std::uint8_t> mask_;
};

enum class Pointing { hit, miss };

inline void require_target_shape(const RealMatrix& heatmap, const LocalizationTarget& t) {
  if (heatmap.rows() != t.height() || heatmap.cols() != t.width())
    throw InvalidInput("heatmap and localization target differ in shape");
}

/// Hit iff the heatmap argmax (smallest row-major index on ties) is inside.
inline Pointing pointing_game(const RealMatrix& heatmap, const LocalizationTarget& target) {
  require_target_shape(heatmap, target);
  const auto v = heatmap.data();
  const auto best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  return target.contains(best) ? Pointing::hit : Pointing::miss;
}

/// IoU between the target and the smallest top-ranked pixel set holding at
/// least `mass_fraction` of the heatmap's total value.
inline double topmass_iou(const RealMatrix& heatmap, const LocalizationTarget& target,
                          double mass_fraction = 0.15) {
  require_target_shape(heatmap, target);
  if (!(mass_fraction > 0.0 && mass_fraction < 1.0))
    throw InvalidInput("mass fraction must lie in (0, 1)");
  double total = 0.0;
  for (double v : heatmap.data()) {
    if (v < 0.0 || !std::isfinite(v)) throw InvalidInput("heatmap values must be finite and >= 0");
    total += v;
  }
  if (total == 0.0) return 0.0;

  const auto order = rank_pixels(heatmap);
  const double need = mass_fraction * total;
  // Absorbs rounding in the running sum (e.g. 15 x 1.0 vs 0.15 * 100).
  const double slack = 1e-12 * total;
  double cum = 0.0;
  std::size_t inter = 0;
  std::size_t selected = 0;
  for (std::size_t px : order) {
    if (cum >= need - slack) break;
    cum += heatmap.data()[px];
    ++selected;
    if (target.contains(px)) ++inter;
  }
  const std::size_t uni = selected + target.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace sattr
