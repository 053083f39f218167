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

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sattr/error.hpp"
#include "sattr/gating.hpp"
#include "sattr/svd.hpp"
#include "sattr/tensor.hpp"
#include "sattr/transforms.hpp"

namespace sattr {

enum class PathFamily { linear, spectral, blur, dct, laplacian };

inline std::string_view to_string(PathFamily f) {
  switch (f) {
    case PathFamily::linear: return "linear";
    case PathFamily::spectral: return "spectral";
    case PathFamily::blur: return "blur";
    case PathFamily::dct: return "dct";
    case PathFamily::laplacian: return "laplacian";
  }
  return "?";
}

inline PathFamily parse_path_family(std::string_view s) {
  if (s == "linear") return PathFamily::linear;
  if (s == "spectral") return PathFamily::spectral;
  if (s == "blur") return PathFamily::blur;
  if (s == "dct") return PathFamily::dct;
  if (s == "laplacian") return PathFamily::laplacian;
  throw InvalidInput("unknown path family '" + std::string(s) + "'");
}

struct PathSpec {
  PathFamily family = PathFamily::spectral;
  std::size_t steps = 200;
  double overlap = 0.4;
  Schedule schedule = Schedule::linear;
  SvdMode svd_mode = SvdMode::per_channel;
  double blur_sigma_max = 35.0;

  void validate() const {
    if (steps < 1) throw InvalidInput("path steps must be >= 1");
    validate_overlap(overlap);
    if (family == PathFamily::blur && !(blur_sigma_max > 0.0 && std::isfinite(blur_sigma_max)))
      throw InvalidInput("blur_sigma_max must be > 0");
  }

  friend bool operator==(const PathSpec&, const PathSpec&) = default;
};

/// Discretized path: points[m] at alphas[m] = m / M.
///
/// `points.front()` is the path origin. For every family except blur that is
/// the caller's baseline, bit for bit; the blur path starts from the maximally
/// blurred input instead.
struct Path {
  std::vector<double> alphas;
  std::vector<ImageTensor> points;

  const ImageTensor& origin() const { return points.front(); }
  std::size_t steps() const { return points.size() - 1; }
};

// ---------------------------------------------------------------------------
// Single-point constructors.

inline ImageTensor linear_point(const ImageTensor& baseline, const ImageTensor& input, double alpha) {
  require_same_shape(baseline, input, "linear_point");
  ImageTensor out(input.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = baseline[i] + alpha * (input[i] - baseline[i]);
  return out;
}

namespace detail {

// Per-component gates of one importance vector. All-zero when the leading
// importance is zero.
inline std::vector<double> gates_for(const std::vector<double>& importance, double importance_max,
                                     double alpha, double omega, Schedule schedule) {
  std::vector<double> g(importance.size(), 0.0);
  if (!(importance_max > 0.0)) return g;
  for (std::size_t i = 0; i < importance.size(); ++i)
    g[i] = gate(alpha, activation_window(importance[i], importance_max, omega), schedule);
  return g;
}

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace detail

/// Point of the spectral path: baseline + sum_i gate_i(alpha) sigma_i u_i v_i^T,
/// gated against each triple's own leading singular value.
inline ImageTensor spectral_point(const ImageTensor& baseline, const SpectralFactors& factors,
                                  double alpha, double omega, Schedule schedule) {
  if (baseline.shape() != factors.shape) throw InvalidInput("spectral_point: shape mismatch");
  std::vector<std::vector<double>> weights;
  weights.reserve(factors.triples.size());
  for (const auto& t : factors.triples)
    weights.push_back(detail::gates_for(t.sigma, t.sigma.empty() ? 0.0 : t.sigma.front(), alpha,
                                        omega, schedule));
  return baseline + reconstruct_tensor(factors, weights);
}

/// Input blurred with standard deviation (1 - alpha) * sigma_max.
inline ImageTensor blur_point(const ImageTensor& input, double alpha, double sigma_max) {
  if (alpha >= 1.0) return input;
  return gaussian_blur(input, (1.0 - alpha) * sigma_max);
}

/// DCT coefficients of each channel of the difference, gated individually by
/// |coefficient| relative to the channel's largest |coefficient|.
inline ImageTensor dct_point(const ImageTensor& baseline, const ImageTensor& input, double alpha,
                             double omega, Schedule schedule) {
  require_same_shape(baseline, input, "dct_point");
  const ImageTensor delta = input - baseline;
  ImageTensor out = baseline;
  for (std::size_t c = 0; c < delta.channels(); ++c) {
    RealMatrix coeffs = dct2(delta.channel(c));
    std::vector<double> mag(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) mag[i] = std::abs(coeffs.data()[i]);
    const auto g = detail::gates_for(mag, detail::max_of(mag), alpha, omega, schedule);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs.data()[i] *= g[i];
    const RealMatrix part = idct2(coeffs);
    const std::size_t off = c * delta.shape().plane();
    for (std::size_t i = 0; i < part.size(); ++i) out[off + i] += part.data()[i];
  }
  return out;
}

/// Laplacian-pyramid levels of each channel of the difference, gated per
/// level by RMS energy relative to the channel's most energetic level.
inline ImageTensor laplacian_point(const ImageTensor& baseline, const ImageTensor& input,
                                   double alpha, double omega, Schedule schedule) {
  require_same_shape(baseline, input, "laplacian_point");
  const ImageTensor delta = input - baseline;
  const std::size_t levels = laplacian_levels(delta.height(), delta.width());
  ImageTensor out = baseline;
  for (std::size_t c = 0; c < delta.channels(); ++c) {
    const auto pyr = laplacian_pyramid(delta.channel(c), levels);
    std::vector<double> energy(pyr.size());
    for (std::size_t l = 0; l < pyr.size(); ++l) energy[l] = rms(pyr[l]);
    const auto g = detail::gates_for(energy, detail::max_of(energy), alpha, omega, schedule);
    const RealMatrix part = recompose_pyramid(pyr, g);
    const std::size_t off = c * delta.shape().plane();
    for (std::size_t i = 0; i < part.size(); ++i) out[off + i] += part.data()[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Lazily evaluates path points. Decompositions are computed once at
/// construction; point() is const and safe to call from several threads.
class PathGenerator {
 public:
  PathGenerator(const ImageTensor& baseline, const ImageTensor& input, const PathSpec& spec)
      : spec_(spec), input_(input) {
    spec_.validate();
    require_same_shape(baseline, input, "generate_path");
    require_finite(baseline, "baseline");
    require_finite(input, "input");

    if (spec_.family == PathFamily::blur) {
      origin_ = blur_point(input, 0.0, spec_.blur_sigma_max);
    } else {
      origin_ = baseline;
    }
    delta_ = input_ - origin_;

    switch (spec_.family) {
      case PathFamily::spectral:
        if (max_abs(delta_) == 0.0) {
          family_ = PathFamily::linear;
        } else {
          factors_ = decompose_difference(input_, origin_, spec_.svd_mode);
          for (const auto& t : factors_.triples) {
            std::vector<ActivationWindow> w;
            if (!t.sigma.empty() && t.sigma.front() > 0.0)
              for (double s : t.sigma) w.push_back(activation_window(s, t.sigma.front(), spec_.overlap));
            windows_.push_back(std::move(w));
          }
        }
        break;
      case PathFamily::dct:
        for (std::size_t c = 0; c < delta_.channels(); ++c) {
          RealMatrix coeffs = dct2(delta_.channel(c));
          std::vector<double> mag(coeffs.size());
          for (std::size_t i = 0; i < coeffs.size(); ++i) mag[i] = std::abs(coeffs.data()[i]);
          windows_.push_back(windows_for(mag));
          dct_coeffs_.push_back(std::move(coeffs));
        }
        break;
      case PathFamily::laplacian: {
        const std::size_t levels = laplacian_levels(delta_.height(), delta_.width());
        for (std::size_t c = 0; c < delta_.channels(); ++c) {
          auto pyr = laplacian_pyramid(delta_.channel(c), levels);
          std::vector<double> energy(pyr.size());
          for (std::size_t l = 0; l < pyr.size(); ++l) energy[l] = rms(pyr[l]);
          windows_.push_back(windows_for(energy));
          pyramids_.push_back(std::move(pyr));
        }
        break;
      }
      case PathFamily::linear:
      case PathFamily::blur:
        break;
    }
  }

  const PathSpec& spec() const noexcept { return spec_; }
  std::size_t steps() const noexcept { return spec_.steps; }
  const ImageTensor& origin() const noexcept { return origin_; }
  const ImageTensor& input() const noexcept { return input_; }
  // Families whose decomposition is trivial fall back to linear.
  PathFamily effective_family() const noexcept { return family_; }

  double alpha(std::size_t m) const noexcept {
    return m >= spec_.steps ? 1.0 : static_cast<double>(m) / static_cast<double>(spec_.steps);
  }

  ImageTensor point(std::size_t m) const {
    if (m == 0) return origin_;
    const double a = alpha(m);
    switch (family_) {
      case PathFamily::linear:
        return linear_point(origin_, input_, a);
      case PathFamily::blur:
        return blur_point(input_, a, spec_.blur_sigma_max);
      case PathFamily::spectral: {
        std::vector<std::vector<double>> weights;
        for (std::size_t t = 0; t < factors_.triples.size(); ++t)
          weights.push_back(gates(windows_[t], factors_.triples[t].rank(), a));
        return origin_ + reconstruct_tensor(factors_, weights);
      }
      case PathFamily::dct: {
        ImageTensor out = origin_;
        for (std::size_t c = 0; c < dct_coeffs_.size(); ++c) {
          RealMatrix coeffs = dct_coeffs_[c];
          const auto g = gates(windows_[c], coeffs.size(), a);
          for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs.data()[i] *= g[i];
          add_plane(out, c, idct2(coeffs));
        }
        return out;
      }
      case PathFamily::laplacian: {
        ImageTensor out = origin_;
        for (std::size_t c = 0; c < pyramids_.size(); ++c)
          add_plane(out, c, recompose_pyramid(pyramids_[c], gates(windows_[c], pyramids_[c].size(), a)));
        return out;
      }
    }
    return origin_;
  }

 private:
  std::vector<ActivationWindow> windows_for(const std::vector<double>& importance) const {
    std::vector<ActivationWindow> w;
    const double top = detail::max_of(importance);
    if (top > 0.0)
      for (double v : importance) w.push_back(activation_window(v, top, spec_.overlap));
    return w;
  }

  std::vector<double> gates(const std::vector<ActivationWindow>& w, std::size_t n, double a) const {
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = gate(a, w[i], spec_.schedule);
    return g;
  }

  static void add_plane(ImageTensor& out, std::size_t c, const RealMatrix& part) {
    const std::size_t off = c * out.shape().plane();
    for (std::size_t i = 0; i < part.size(); ++i) out[off + i] += part.data()[i];
  }

  PathSpec spec_;
  PathFamily family_ = spec_.family;
  ImageTensor input_;
  ImageTensor origin_;
  ImageTensor delta_;
  SpectralFactors factors_;
  std::vector<std::vector<ActivationWindow>> windows_;
  std::vector<RealMatrix> dct_coeffs_;
  std::vector<std::vector<RealMatrix>> pyramids_;
};

/// Materializes all M + 1 points of the path.
inline Path generate_path(const ImageTensor& baseline, const ImageTensor& input, const PathSpec& spec) {
  const PathGenerator gen(baseline, input, spec);
  Path p;
  p.alphas.reserve(spec.steps + 1);
  p.points.reserve(spec.steps + 1);
  for (std::size_t m = 0; m <= spec.steps; ++m) {
    p.alphas.push_back(gen.alpha(m));
    p.points.push_back(gen.point(m));
  }
  return p;
}

}  // namespace sattr
