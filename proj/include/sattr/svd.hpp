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
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sattr/error.hpp"
#include "sattr/tensor.hpp"

namespace sattr {

/// Thin SVD `m = u * diag(sigma) * v^T` with `rank = min(rows, cols)`.
///
/// Columns of `u` (rows x R) and `v` (cols x R) are orthonormal; `sigma` is
/// non-increasing and non-negative. Each pair (u_i, v_i) is signed so that the
/// first entry of u_i with magnitude above 1e-12 is positive.
struct SvdTriple {
  RealMatrix u;
  std::vector<double> sigma;
  RealMatrix v;

  std::size_t rank() const noexcept { return sigma.size(); }
  std::size_t rows() const noexcept { return u.rows(); }
  std::size_t cols() const noexcept { return v.rows(); }

  friend bool operator==(const SvdTriple&, const SvdTriple&) = default;
};

enum class SvdMode { per_channel, joint };

inline std::string_view to_string(SvdMode m) {
  return m == SvdMode::per_channel ? "per-channel" : "joint";
}

inline SvdMode parse_svd_mode(std::string_view s) {
  if (s == "per-channel") return SvdMode::per_channel;
  if (s == "joint") return SvdMode::joint;
  throw InvalidInput("unknown svd mode '" + std::string(s) + "'");
}

namespace detail {

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kSignThreshold = 1e-12;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void rotate(std::vector<double>& p, std::vector<double>& q, double c, double s) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = p[k];
    const double b = q[k];
    p[k] = c * a - s * b;
    q[k] = s * a + c * b;
  }
}

// Fills in basis vectors for columns flagged `missing` so that the full set
// is orthonormal. Candidates are the standard basis vectors in index order.
inline void complete_basis(std::vector<std::vector<double>>& cols, const std::vector<bool>& missing) {
  if (cols.empty()) return;
  const std::size_t dim = cols.front().size();
  std::size_t next_candidate = 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (!missing[j]) continue;
    while (next_candidate < dim) {
      std::vector<double> e(dim, 0.0);
      e[next_candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
          if ((missing[i] && i >= j) || i == j) continue;
          const double d = dot(e, cols[i]);
          for (std::size_t k = 0; k < dim; ++k) e[k] -= d * cols[i][k];
        }
      }
      const double n = std::sqrt(dot(e, e));
      if (n > 0.5) {
        for (auto& x : e) x /= n;
        cols[j] = std::move(e);
        break;
      }
    }
  }
}

// One-sided Jacobi on a matrix with rows >= cols. Returns (U, sigma, V) with
// U rows x n, V n x n, unsorted.
struct JacobiResult {
  std::vector<std::vector<double>> u_cols;
  std::vector<double> sigma;
  std::vector<std::vector<double>> v_cols;
};

inline JacobiResult one_sided_jacobi(const RealMatrix& a) {
  const std::size_t rows = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::vector<double>> cols(n, std::vector<double>(rows));
  std::vector<std::vector<double>> vcols(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < rows; ++i) cols[j][i] = a(i, j);
    vcols[j][j] = 1.0;
  }

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(cols[p], cols[p]);
        const double beta = dot(cols[q], cols[q]);
        const double gamma = dot(cols[p], cols[q]);
        if (gamma == 0.0 ||
            std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha) * std::sqrt(beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(cols[p], cols[q], c, s);
        rotate(vcols[p], vcols[q], c, s);
      }
    }
    if (!rotated) break;
  }

  JacobiResult out;
  out.sigma.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.sigma[j] = std::sqrt(dot(cols[j], cols[j]));
  out.u_cols = std::move(cols);
  out.v_cols = std::move(vcols);
  return out;
}

}  // namespace detail

/// Singular value decomposition by one-sided Jacobi rotations.
///
/// Deterministic: rotation order, sorting and sign fixing do not depend on
/// anything but the input values. Singular values below rows*eps*sigma_1 are
/// treated as exact zeros and their left vectors are completed to an
/// orthonormal basis.
inline SvdTriple svd(const RealMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("svd: empty matrix");
  if (!m.all_finite()) throw InvalidInput("svd: non-finite input");

  const bool tall = m.rows() >= m.cols();
  const RealMatrix work = tall ? m : m.transposed();
  auto jac = detail::one_sided_jacobi(work);
  const std::size_t r = jac.sigma.size();

  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return jac.sigma[a] > jac.sigma[b]; });

  const double smax = jac.sigma[order[0]];
  const double zero_cut = static_cast<double>(work.rows()) *
                          std::numeric_limits<double>::epsilon() * smax;

  std::vector<double> sigma(r);
  std::vector<std::vector<double>> left(r);
  std::vector<std::vector<double>> right(r);
  std::vector<bool> missing(r, false);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t j = order[k];
    right[k] = std::move(jac.v_cols[j]);
    if (jac.sigma[j] <= zero_cut || jac.sigma[j] == 0.0) {
      sigma[k] = 0.0;
      missing[k] = true;
      left[k].assign(work.rows(), 0.0);
    } else {
      sigma[k] = jac.sigma[j];
      left[k] = std::move(jac.u_cols[j]);
      for (auto& x : left[k]) x /= sigma[k];
    }
  }
  detail::complete_basis(left, missing);

  for (std::size_t k = 0; k < r; ++k) {
    // Sign is fixed on the vector that ends up as u in the caller's frame.
    auto& lead = tall ? left[k] : right[k];
    auto it = std::find_if(lead.begin(), lead.end(),
                           [](double x) { return std::abs(x) > detail::kSignThreshold; });
    if (it != lead.end() && *it < 0.0) {
      for (auto& x : left[k]) x = -x;
      for (auto& x : right[k]) x = -x;
    }
  }

  auto pack = [r](const std::vector<std::vector<double>>& cols) {
    const std::size_t dim = cols.front().size();
    RealMatrix out(dim, r);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < dim; ++i) out(i, k) = cols[k][i];
    return out;
  };

  SvdTriple f;
  f.sigma = std::move(sigma);
  if (tall) {
    f.u = pack(left);
    f.v = pack(right);
  } else {
    f.u = pack(right);
    f.v = pack(left);
  }
  return f;
}

/// Weighted reconstruction `sum_i weights[i] * sigma_i * u_i v_i^T`.
inline RealMatrix reconstruct(const SvdTriple& f, std::span<const double> weights) {
  if (weights.size() != f.rank()) {
    throw InvalidInput("reconstruct: expected " + std::to_string(f.rank()) + " weights, got " +
                       std::to_string(weights.size()));
  }
  for (double w : weights)
    if (!std::isfinite(w)) throw InvalidInput("reconstruct: non-finite weight");

  const std::size_t rows = f.rows();
  const std::size_t cols = f.cols();
  RealMatrix out(rows, cols);
  for (std::size_t i = 0; i < f.rank(); ++i) {
    const double coef = weights[i] * f.sigma[i];
    if (coef == 0.0) continue;
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = coef * f.u(r, i);
      for (std::size_t c = 0; c < cols; ++c) out(r, c) += a * f.v(c, i);
    }
  }
  return out;
}

/// Best rank-k approximation in Frobenius norm: the leading k components.
inline RealMatrix truncate(const SvdTriple& f, std::size_t k) {
  if (k > f.rank()) {
    throw InvalidInput("truncate: k=" + std::to_string(k) + " exceeds rank " +
                       std::to_string(f.rank()));
  }
  std::vector<double> w(f.rank(), 0.0);
  std::fill_n(w.begin(), k, 1.0);
  return reconstruct(f, w);
}

/// SVD factors of `input - baseline`, either one triple per channel or one
/// triple of the channel-stacked (C*H) x W matrix.
struct SpectralFactors {
  SvdMode mode = SvdMode::per_channel;
  Shape shape;
  std::vector<SvdTriple> triples;
};

inline SpectralFactors decompose_difference(const ImageTensor& x, const ImageTensor& baseline,
                                            SvdMode mode) {
  require_same_shape(x, baseline, "decompose_difference");
  const ImageTensor delta = x - baseline;
  SpectralFactors f;
  f.mode = mode;
  f.shape = x.shape();
  if (mode == SvdMode::per_channel) {
    f.triples.reserve(x.channels());
    for (std::size_t c = 0; c < x.channels(); ++c) f.triples.push_back(svd(delta.channel(c)));
  } else {
    // (c, h, w) row-major storage is already the stacked (C*H) x W matrix.
    f.triples.push_back(svd(RealMatrix(x.channels() * x.height(), x.width(), delta.values())));
  }
  return f;
}

/// Rebuilds a tensor from the factors with per-triple weight vectors.
inline ImageTensor reconstruct_tensor(const SpectralFactors& f,
                                      std::span<const std::vector<double>> weights) {
  if (weights.size() != f.triples.size())
    throw InvalidInput("reconstruct_tensor: one weight vector per triple required");
  ImageTensor out(f.shape);
  if (f.mode == SvdMode::per_channel) {
    for (std::size_t c = 0; c < f.triples.size(); ++c)
      out.set_channel(c, reconstruct(f.triples[c], weights[c]));
  } else {
    const RealMatrix m = reconstruct(f.triples.front(), weights.front());
    std::copy(m.data().begin(), m.data().end(), out.data().begin());
  }
  return out;
}

}  // namespace sattr
