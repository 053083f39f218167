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
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "sattr/error.hpp"
#include "sattr/path.hpp"
#include "sattr/tensor.hpp"

namespace sattr {

using ComplexGrid = std::vector<std::complex<double>>;  // row-major H x W

namespace detail {

inline std::vector<std::complex<double>> twiddles(std::size_t n) {
  std::vector<std::complex<double>> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    t[k] = {std::cos(angle), std::sin(angle)};
  }
  return t;
}

// Signed frequency of DFT index k in cycles per sample, in [-0.5, 0.5].
inline double signed_frequency(std::size_t k, std::size_t n) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return (2 * k <= n ? kk : kk - nn) / nn;
}

}  // namespace detail

/// Unnormalized 2D DFT by the direct separable sum (rows, then columns).
inline ComplexGrid dft2(const RealMatrix& m) {
  if (!m.all_finite()) throw InvalidInput("dft2: non-finite input");
  const std::size_t h = m.rows();
  const std::size_t w = m.cols();
  const auto tw = detail::twiddles(w);
  const auto th = detail::twiddles(h);

  ComplexGrid rows(h * w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t k = 0; k < w; ++k) {
      std::complex<double> s = 0.0;
      for (std::size_t j = 0; j < w; ++j) s += m(i, j) * tw[(k * j) % w];
      rows[i * w + k] = s;
    }
  ComplexGrid out(h * w);
  for (std::size_t k = 0; k < w; ++k)
    for (std::size_t u = 0; u < h; ++u) {
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < h; ++i) s += rows[i * w + k] * th[(u * i) % h];
      out[u * w + k] = s;
    }
  return out;
}

/// |DFT| with the zero frequency moved to (H/2, W/2).
struct SpectrumMap {
  RealMatrix magnitude;
  bool log_scaled = false;
};

inline SpectrumMap dft2_magnitude(const RealMatrix& m, bool log_scale = false) {
  const auto f = dft2(m);
  const std::size_t h = m.rows();
  const std::size_t w = m.cols();
  SpectrumMap s{RealMatrix(h, w), log_scale};
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v) {
      const double mag = std::abs(f[u * w + v]);
      s.magnitude((u + h / 2) % h, (v + w / 2) % w) = log_scale ? std::log1p(mag) : mag;
    }
  return s;
}

/// Share of non-DC spectral energy at radial frequency above `cutoff`
/// (as a fraction of the Nyquist radius). Zero for matrices without non-DC
/// energy.
inline double high_freq_fraction(const RealMatrix& m, double cutoff = 0.5) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InvalidInput("cutoff must lie in (0, 1)");
  const auto f = dft2(m);
  const std::size_t h = m.rows();
  const std::size_t w = m.cols();
  double high = 0.0;
  double total = 0.0;
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v) {
      if (u == 0 && v == 0) continue;
      const double e = std::norm(f[u * w + v]);
      const double fy = detail::signed_frequency(u, h);
      const double fx = detail::signed_frequency(v, w);
      const double radius = std::sqrt(fy * fy + fx * fx) / 0.5;
      total += e;
      if (radius > cutoff) high += e;
    }
  // Relative floor: energy that is pure rounding noise of a constant matrix.
  if (total <= 1e-24 * std::norm(f[0])) return 0.0;
  return high / total;
}

/// Spectral energy summed in nearest-integer radius bins about the centre of
/// the shifted grid. radius[k] is the bin radius normalized by the largest
/// representable radius.
struct RadialProfile {
  std::vector<double> radius;
  std::vector<double> energy;
};

inline RadialProfile radial_profile(const RealMatrix& m) {
  const auto spec = dft2_magnitude(m, false);
  const std::size_t h = m.rows();
  const std::size_t w = m.cols();
  const double cy = static_cast<double>(h / 2);
  const double cx = static_cast<double>(w / 2);
  const double rmax = std::hypot(std::max(cy, static_cast<double>(h - 1) - cy),
                                 std::max(cx, static_cast<double>(w - 1) - cx));
  const auto bins = static_cast<std::size_t>(std::lround(rmax)) + 1;
  RadialProfile p;
  p.energy.assign(bins, 0.0);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      const double r = std::hypot(static_cast<double>(i) - cy, static_cast<double>(j) - cx);
      const auto b = std::min(bins - 1, static_cast<std::size_t>(std::lround(r)));
      p.energy[b] += spec.magnitude(i, j) * spec.magnitude(i, j);
    }
  p.radius.resize(bins);
  for (std::size_t b = 0; b < bins; ++b)
    p.radius[b] = rmax > 0.0 ? static_cast<double>(b) / rmax : 0.0;
  return p;
}

struct FrequencyTrace {
  std::vector<double> alphas;
  std::vector<double> hf_fraction;
  double cutoff = 0.5;
};

/// Channel-averaged high-frequency fraction of (point - baseline) along the
/// path. Points whose difference is below 1e-12 everywhere report 0.
inline double difference_hf_fraction(const ImageTensor& point, const ImageTensor& baseline,
                                     double cutoff) {
  const ImageTensor d = point - baseline;
  if (max_abs(d) < 1e-12) return 0.0;
  double s = 0.0;
  for (std::size_t c = 0; c < d.channels(); ++c) s += high_freq_fraction(d.channel(c), cutoff);
  return s / static_cast<double>(d.channels());
}

inline FrequencyTrace path_frequency_trace(const Path& path, const ImageTensor& baseline,
                                           double cutoff = 0.5) {
  FrequencyTrace t;
  t.cutoff = cutoff;
  t.alphas = path.alphas;
  t.hf_fraction.reserve(path.points.size());
  for (const auto& p : path.points) t.hf_fraction.push_back(difference_hf_fraction(p, baseline, cutoff));
  return t;
}

}  // namespace sattr
