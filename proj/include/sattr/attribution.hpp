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
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sattr/error.hpp"
#include "sattr/model.hpp"
#include "sattr/path.hpp"
#include "sattr/spatial.hpp"
#include "sattr/tensor.hpp"

namespace sattr {

inline std::string method_tag(PathFamily f) {
  switch (f) {
    case PathFamily::linear: return "ig";
    case PathFamily::spectral: return "sig";
    case PathFamily::blur: return "blur";
    case PathFamily::dct: return "dct";
    case PathFamily::laplacian: return "laplacian";
  }
  return "?";
}

struct AttributionResult {
  ImageTensor map;
  double score_input = 0.0;
  double score_baseline = 0.0;
  // |sum(map) - (score_input - score_baseline)|
  double completeness_residual = 0.0;
  std::string method;
  std::optional<PathSpec> spec;
  // Set for the blur path: score_baseline was taken at the blurred input.
  bool baseline_is_blurred_input = false;
};

/// Worker count for gradient evaluation. `requested` == 0 means automatic;
/// a positive SPECTRAL_ATTR_THREADS caps the result either way.
inline unsigned resolve_threads(unsigned requested = 0) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPECTRAL_ATTR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Left-endpoint Riemann estimate of the path integral:
///   A = sum_{m<M} grad f(p_m) * (p_{m+1} - p_m).
///
/// Gradients are evaluated in batches on up to `threads` workers, but the
/// accumulation always runs in step order, so the map is bitwise identical
/// for any thread count.
inline AttributionResult attribute(const ScalarField& model, const ImageTensor& x,
                                   const ImageTensor& baseline, const PathSpec& spec,
                                   unsigned threads = 0) {
  const PathGenerator gen(baseline, x, spec);
  const std::size_t steps = gen.steps();
  const unsigned workers = resolve_threads(threads);
  const std::size_t batch = std::max<std::size_t>(workers, 1);

  ImageTensor map(x.shape());
  ImageTensor prev = gen.origin();
  for (std::size_t start = 0; start < steps; start += batch) {
    const std::size_t n = std::min(batch, steps - start);
    std::vector<ImageTensor> next(n);
    std::vector<ImageTensor> grads(n);
    detail::parallel_for(n, workers, [&](std::size_t i) { next[i] = gen.point(start + i + 1); });
    detail::parallel_for(n, workers, [&](std::size_t i) {
      grads[i] = model.gradient(i == 0 ? prev : next[i - 1]);
    });
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = start + i;
      const ImageTensor& g = grads[i];
      if (!g.all_finite()) throw NumericalFailure(m, "non-finite gradient");
      const ImageTensor& p0 = i == 0 ? prev : next[i - 1];
      const ImageTensor& p1 = next[i];
      for (std::size_t k = 0; k < map.size(); ++k) map[k] += g[k] * (p1[k] - p0[k]);
    }
    prev = std::move(next.back());
  }
  if (!map.all_finite()) throw NumericalFailure(steps, "non-finite attribution");

  AttributionResult r;
  r.map = std::move(map);
  r.score_input = model.forward(x);
  r.score_baseline = model.forward(gen.origin());
  r.completeness_residual = std::abs(sum(r.map) - (r.score_input - r.score_baseline));
  r.method = method_tag(spec.family);
  r.spec = spec;
  r.baseline_is_blurred_input = spec.family == PathFamily::blur;
  return r;
}

/// Gradient x Input. The residual is reported against f(0) but G x I is not
/// complete in general.
inline AttributionResult gradient_x_input(const ScalarField& model, const ImageTensor& x) {
  require_finite(x, "input");
  const ImageTensor g = model.gradient(x);
  if (!g.all_finite()) throw NumericalFailure(0, "non-finite gradient");
  AttributionResult r;
  r.map = hadamard(g, x);
  r.score_input = model.forward(x);
  r.score_baseline = model.forward(ImageTensor(x.shape()));
  r.completeness_residual = std::abs(sum(r.map) - (r.score_input - r.score_baseline));
  r.method = "gxi";
  return r;
}

// ---------------------------------------------------------------------------

/// Non-negative H x W reduction of a map, scaled to [0, 1].
struct Heatmap {
  RealMatrix values;
  double clip_value = 0.0;
  double clip_percentile = 99.0;
};

/// Linear-interpolated percentile of an ascending sequence.
inline double percentile_sorted(const std::vector<double>& sorted, double pct) {
  if (sorted.empty()) return 0.0;
  const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline RealMatrix channel_abs_sum(const ImageTensor& map) {
  RealMatrix out(map.height(), map.width());
  for (std::size_t c = 0; c < map.channels(); ++c)
    for (std::size_t i = 0; i < map.height(); ++i)
      for (std::size_t j = 0; j < map.width(); ++j) out(i, j) += std::abs(map(c, i, j));
  return out;
}

inline Heatmap to_heatmap(const ImageTensor& map, double clip_percentile = 99.0) {
  if (!(clip_percentile > 50.0 && clip_percentile <= 100.0))
    throw InvalidInput("clip percentile must lie in (50, 100]");
  Heatmap h;
  h.clip_percentile = clip_percentile;
  h.values = channel_abs_sum(map);
  std::vector<double> nonzero;
  for (double v : h.values.data())
    if (v > 0.0) nonzero.push_back(v);
  if (nonzero.empty()) return h;
  std::sort(nonzero.begin(), nonzero.end());
  h.clip_value = percentile_sorted(nonzero, clip_percentile);
  for (auto& v : h.values.data()) v = std::min(v / h.clip_value, 1.0);
  return h;
}

inline Heatmap to_heatmap(const AttributionResult& r, double clip_percentile = 99.0) {
  return to_heatmap(r.map, clip_percentile);
}

// ---------------------------------------------------------------------------

/// max |A(Tx', Tx) - T A(x', x)| for a model invariant under T.
inline double symmetry_check(const ScalarField& model, const ImageTensor& x,
                             const ImageTensor& baseline, const PathSpec& spec, Transform t,
                             unsigned threads = 0) {
  const ImageTensor tx = apply(t, x);
  const ImageTensor tb = apply(t, baseline);
  if (std::abs(model.forward(tx) - model.forward(x)) > 1e-8)
    throw PreconditionError("symmetry_check: model is not invariant under " +
                            std::string(to_string(t)));
  const auto plain = attribute(model, x, baseline, spec, threads);
  const auto moved = attribute(model, tx, tb, spec, threads);
  return max_abs_diff(moved.map, apply(t, plain.map));
}

}  // namespace sattr
