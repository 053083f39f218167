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
#include <numbers>
#include <vector>

#include "sattr/tensor.hpp"

namespace sattr {

// ---------------------------------------------------------------------------
// Orthonormal type-II DCT (and its inverse, type-III), separable 2D form.

namespace detail {

// basis(k, n) = s_k cos(pi (2n + 1) k / 2N), orthonormal rows.
inline RealMatrix dct_basis(std::size_t n) {
  RealMatrix b(n, n);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    for (std::size_t i = 0; i < n; ++i) {
      b(k, i) = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                 static_cast<double>(k) / (2.0 * nn));
    }
  }
  return b;
}

}  // namespace detail

inline RealMatrix dct2(const RealMatrix& m) {
  const RealMatrix bh = detail::dct_basis(m.rows());
  const RealMatrix bw = detail::dct_basis(m.cols());
  return matmul(matmul(bh, m), bw.transposed());
}

inline RealMatrix idct2(const RealMatrix& coeffs) {
  const RealMatrix bh = detail::dct_basis(coeffs.rows());
  const RealMatrix bw = detail::dct_basis(coeffs.cols());
  return matmul(matmul(bh.transposed(), coeffs), bw);
}

// ---------------------------------------------------------------------------
// Separable filtering with half-sample symmetric boundary extension
// (d c b a | a b c d | d c b a). This extension keeps total mass for
// normalized kernels.

namespace detail {

inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  if (k >= static_cast<std::ptrdiff_t>(n)) k = period - 1 - k;
  return static_cast<std::size_t>(k);
}

// `kernel` has odd length 2r+1, centred.
inline RealMatrix convolve_rows(const RealMatrix& m, const std::vector<double>& kernel) {
  const auto r = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k)
        s += kernel[static_cast<std::size_t>(k + r)] *
             m(i, reflect_index(static_cast<std::ptrdiff_t>(j) + k, m.cols()));
      out(i, j) = s;
    }
  return out;
}

inline RealMatrix convolve_cols(const RealMatrix& m, const std::vector<double>& kernel) {
  const auto r = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k)
        s += kernel[static_cast<std::size_t>(k + r)] *
             m(reflect_index(static_cast<std::ptrdiff_t>(i) + k, m.rows()), j);
      out(i, j) = s;
    }
  return out;
}

}  // namespace detail

/// Sampled Gaussian truncated at 3 sigma and renormalized to unit sum.
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(radius);
    k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    total += k[i];
  }
  for (auto& v : k) v /= total;
  return k;
}

inline RealMatrix gaussian_blur(const RealMatrix& m, double sigma) {
  if (!(sigma > 0.0)) return m;
  const auto k = gaussian_kernel(sigma);
  return detail::convolve_cols(detail::convolve_rows(m, k), k);
}

inline ImageTensor gaussian_blur(const ImageTensor& t, double sigma) {
  if (!(sigma > 0.0)) return t;
  ImageTensor out(t.shape());
  for (std::size_t c = 0; c < t.channels(); ++c) out.set_channel(c, gaussian_blur(t.channel(c), sigma));
  return out;
}

// ---------------------------------------------------------------------------
// Laplacian pyramid (Burt-Adelson, 5-tap binomial kernel).

namespace detail {

inline const std::vector<double>& binomial5() {
  static const std::vector<double> k{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  return k;
}

inline RealMatrix pyr_down(const RealMatrix& m) {
  const RealMatrix b = convolve_cols(convolve_rows(m, binomial5()), binomial5());
  RealMatrix out((m.rows() + 1) / 2, (m.cols() + 1) / 2);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = b(2 * i, 2 * j);
  return out;
}

inline RealMatrix pyr_up(const RealMatrix& m, std::size_t rows, std::size_t cols) {
  RealMatrix z(rows, cols);
  for (std::size_t i = 0; i < m.rows() && 2 * i < rows; ++i)
    for (std::size_t j = 0; j < m.cols() && 2 * j < cols; ++j) z(2 * i, 2 * j) = 4.0 * m(i, j);
  return convolve_cols(convolve_rows(z, binomial5()), binomial5());
}

}  // namespace detail

/// Number of band-pass levels used for an H x W plane: floor(log2(min(H, W))),
/// at least 1.
inline std::size_t laplacian_levels(std::size_t h, std::size_t w) {
  std::size_t n = std::min(h, w);
  std::size_t levels = 0;
  while (n > 1) {
    n /= 2;
    ++levels;
  }
  return std::max<std::size_t>(levels, 1);
}

/// Band-pass levels (finest first) followed by the low-pass residual.
/// `levels` band-pass entries, so the result has levels + 1 matrices.
inline std::vector<RealMatrix> laplacian_pyramid(const RealMatrix& m, std::size_t levels) {
  std::vector<RealMatrix> pyr;
  pyr.reserve(levels + 1);
  RealMatrix current = m;
  for (std::size_t l = 0; l < levels; ++l) {
    RealMatrix down = detail::pyr_down(current);
    pyr.push_back(current - detail::pyr_up(down, current.rows(), current.cols()));
    current = std::move(down);
  }
  pyr.push_back(std::move(current));
  return pyr;
}

/// Inverse of laplacian_pyramid with per-level weights (1 everywhere gives
/// exact recomposition up to rounding).
inline RealMatrix recompose_pyramid(const std::vector<RealMatrix>& pyr,
                                    const std::vector<double>& weights) {
  if (pyr.empty() || weights.size() != pyr.size())
    throw InvalidInput("recompose_pyramid: one weight per level required");
  RealMatrix acc = pyr.back();
  for (auto& v : acc.data()) v *= weights.back();
  for (std::size_t l = pyr.size() - 1; l-- > 0;) {
    const RealMatrix& band = pyr[l];
    RealMatrix up = detail::pyr_up(acc, band.rows(), band.cols());
    for (std::size_t i = 0; i < up.size(); ++i) up.data()[i] += weights[l] * band.data()[i];
    acc = std::move(up);
  }
  return acc;
}

inline double rms(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  return frobenius_norm(m) / std::sqrt(static_cast<double>(m.size()));
}

}  // namespace sattr
