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
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sattr/attribution.hpp"
#include "sattr/io.hpp"
#include "sattr/metrics.hpp"
#include "sattr/model.hpp"
#include "sattr/path.hpp"
#include "sattr/random.hpp"
#include "sattr/spectrum.hpp"
#include "sattr/svd.hpp"

namespace sattr::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Fixtures.

/// Q (rows x k) with orthonormal columns, by twice-applied Gram-Schmidt.
inline RealMatrix random_orthonormal(std::size_t rows, std::size_t k, Rng& rng) {
  RealMatrix q = random_matrix(rows, k, rng);
  for (std::size_t j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        double d = 0.0;
        for (std::size_t r = 0; r < rows; ++r) d += q(r, i) * q(r, j);
        for (std::size_t r = 0; r < rows; ++r) q(r, j) -= d * q(r, i);
      }
    double n = 0.0;
    for (std::size_t r = 0; r < rows; ++r) n += q(r, j) * q(r, j);
    n = std::sqrt(n);
    for (std::size_t r = 0; r < rows; ++r) q(r, j) /= n;
  }
  return q;
}

/// Two smooth separable cosine layers plus white noise, one channel.
inline ImageTensor smooth_rank2_plus_noise(Rng& rng, std::size_t n = 16, double noise = 0.15) {
  constexpr double pi = 3.14159265358979323846;
  ImageTensor d(1, n, n);
  for (int layer = 0; layer < 2; ++layer) {
    const double amp = rng.uniform(0.6, 1.0);
    const double fy = rng.uniform(0.0, 1.0);
    const double fx = rng.uniform(0.0, 1.0);
    const double py = rng.uniform(0.0, 2.0 * pi);
    const double px = rng.uniform(0.0, 2.0 * pi);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d(0, i, j) += amp * std::cos(pi * fy * static_cast<double>(i) / static_cast<double>(n) + py) *
                      std::cos(pi * fx * static_cast<double>(j) / static_cast<double>(n) + px);
  }
  for (auto& v : d.data()) v += noise * rng.normal();
  return d;
}

struct SparseLinearTask {
  ImageTensor weights;
  ImageTensor input;
  FieldPtr model;
  RealMatrix truth;  // |w| as an H x W heatmap
};

/// 8 x 8 single-channel linear model with `informative` positive weights.
inline SparseLinearTask sparse_linear_task(Rng& rng, std::size_t informative = 10) {
  SparseLinearTask t{ImageTensor(1, 8, 8), ImageTensor(1, 8, 8), nullptr, RealMatrix(8, 8)};
  std::size_t placed = 0;
  while (placed < informative) {
    const std::size_t k = rng.below(64);
    if (t.weights[k] != 0.0) continue;
    t.weights[k] = rng.uniform(0.5, 1.5);
    ++placed;
  }
  t.input = random_tensor(t.weights.shape(), rng, 0.2, 1.0);
  t.model = linear_model(t.weights, 0.0);
  for (std::size_t k = 0; k < 64; ++k) t.truth.data()[k] = std::abs(t.weights[k]);
  return t;
}

/// Weights used by the model-based checks: the supplied ones, or fresh
/// reference weights drawn from `rng`.
inline ModelWeights weights_for(const std::optional<ModelWeights>& given, Rng& rng) {
  return given ? *given : reference_weights(rng());
}

// ---------------------------------------------------------------------------
// Checks. Each takes a seed and is deterministic in it.

inline CheckResult full_overlap_recovery(std::uint64_t seed,
                                         const std::optional<ModelWeights>& given = {}) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto w = weights_for(given, rng);
    const auto model = tiny_mlp(w);
    const auto x = random_tensor(w.input, rng);
    const ImageTensor b(w.input);
    PathSpec sig;
    sig.overlap = 1.0;
    PathSpec ig;
    ig.family = PathFamily::linear;
    worst = std::max(worst, max_abs_diff(attribute(*model, x, b, sig).map,
                                         attribute(*model, x, b, ig).map));
  }
  return {"omega=1 recovers IG", worst <= 1e-10, "max |SIG - IG| = " + fmt("%.3e", worst)};
}

inline CheckResult completeness(std::uint64_t seed, const std::optional<ModelWeights>& given = {}) {
  Rng rng(seed);
  double linear_worst = 0.0;
  for (auto fam : {PathFamily::linear, PathFamily::spectral, PathFamily::blur, PathFamily::dct,
                   PathFamily::laplacian})
    for (std::size_t m : {1u, 5u, 50u, 200u}) {
      const Shape s{3, 8, 8};
      const auto model = linear_model(random_tensor(s, rng, -1.0, 1.0), rng.uniform());
      PathSpec spec;
      spec.family = fam;
      spec.steps = m;
      spec.blur_sigma_max = 3.0;
      const auto r = attribute(*model, random_tensor(s, rng), random_tensor(s, rng), spec);
      linear_worst = std::max(linear_worst, r.completeness_residual);
    }
  double coarse = 0.0;
  double fine = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto w = weights_for(given, rng);
    const auto model = tiny_mlp(w);
    const auto x = random_tensor(w.input, rng);
    const ImageTensor b(w.input);
    PathSpec spec;
    spec.steps = 100;
    coarse += attribute(*model, x, b, spec).completeness_residual;
    spec.steps = 1600;
    fine += attribute(*model, x, b, spec).completeness_residual;
  }
  const bool ok = linear_worst <= 1e-12 && fine <= 0.5 * coarse;
  return {"completeness", ok,
          "linear max residual " + fmt("%.3e", linear_worst) + ", MLP mean residual M=100 " +
              fmt("%.3e", coarse / 20.0) + " -> M=1600 " + fmt("%.3e", fine / 20.0)};
}

inline CheckResult eckart_young(std::uint64_t seed) {
  Rng rng(seed);
  std::size_t losses = 0;
  for (int t = 0; t < 50; ++t) {
    const RealMatrix a = random_matrix(5, 7, rng);
    const auto f = svd(a);
    for (std::size_t k = 1; k <= 3; ++k) {
      const double ours = frobenius_norm(a - truncate(f, k));
      for (int c = 0; c < 1000; ++c) {
        const RealMatrix b = matmul(random_matrix(5, k, rng), random_matrix(k, 7, rng));
        double ab = 0.0;
        double bb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          ab += a.data()[i] * b.data()[i];
          bb += b.data()[i] * b.data()[i];
        }
        const double s = bb > 0.0 ? ab / bb : 0.0;
        double err = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          const double d = a.data()[i] - s * b.data()[i];
          err += d * d;
        }
        losses += std::sqrt(err) < ours;
      }
    }
  }
  return {"Eckart-Young optimality", losses == 0,
          std::to_string(losses) + " of 150000 random rank-k candidates beat truncated SVD"};
}

inline CheckResult symmetry(std::uint64_t seed, const std::optional<ModelWeights>& given = {}) {
  Rng rng(seed);
  double worst = 0.0;
  double min_gap = 1.0;  // smallest relative gap between adjacent singular values
  std::string skipped;
  for (auto t : {Transform::hflip, Transform::vflip, Transform::rot90}) {
    for (int i = 0; i < 10; ++i) {
      const auto w = weights_for(given, rng);
      if (t == Transform::rot90 && w.input.height != w.input.width) {
        skipped = " (rot90 skipped: non-square model input)";
        break;
      }
      const auto model = symmetrize(tiny_mlp(w), t);
      const auto x = random_tensor(w.input, rng);
      for (const auto& f : decompose_difference(x, ImageTensor(w.input), SvdMode::per_channel).triples)
        for (std::size_t k = 1; k < f.rank(); ++k)
          min_gap = std::min(min_gap, (f.sigma[k - 1] - f.sigma[k]) / f.sigma[0]);
      PathSpec spec;
      spec.steps = 50;
      worst = std::max(worst, symmetry_check(*model, x, ImageTensor(w.input), spec, t));
    }
  }
  return {"symmetry equivariance", worst <= 1e-8 && min_gap > 1e-8,
          "max |A(Tx) - T A(x)| = " + fmt("%.3e", worst) + ", min sigma gap " +
              fmt("%.1e", min_gap) + skipped};
}

inline CheckResult gradients(std::uint64_t seed, const std::optional<ModelWeights>& given = {}) {
  Rng rng(seed);
  const auto w = weights_for(given, rng);
  const Shape s = w.input;
  std::vector<std::pair<std::string, FieldPtr>> models = {
      {"linear", linear_model(random_tensor(s, rng, -1.0, 1.0), 0.2)},
      {"squared-norm", squared_norm_model()},
      {"tinymlp/prob", tiny_mlp(w, {TargetKind::probability, 0})},
      {"tinymlp/logit", tiny_mlp(w, {TargetKind::logit, w.classes - 1})},
      {"tinymlp/hflip", symmetrize(tiny_mlp(w), Transform::hflip)},
  };
  double worst = 0.0;
  std::string worst_name = "none";
  for (const auto& [name, model] : models)
    for (int p = 0; p < 20; ++p) {
      const auto x = random_tensor(s, rng);
      const double e = gradient_relative_error(model->gradient(x), fd_gradient(*model, x));
      if (e > worst) {
        worst = e;
        worst_name = name;
      }
    }
  return {"analytic vs finite-difference gradients", worst <= 1e-5,
          "max relative error " + fmt("%.3e", worst) + " (" + worst_name + ")"};
}

inline CheckResult faithfulness_separation(std::uint64_t seed) {
  Rng rng(seed);
  int wins = 0;
  for (int t = 0; t < 100; ++t) {
    const auto task = sparse_linear_task(rng);
    RealMatrix random_h(8, 8);
    for (auto& v : random_h.data()) v = rng.uniform();
    const ImageTensor b(1, 8, 8);
    wins += diff_id(*task.model, task.input, b, task.truth) >
            diff_id(*task.model, task.input, b, random_h);
  }
  return {"DiffID oracle separation", wins >= 95, std::to_string(wins) + "/100 true > random"};
}

inline CheckResult metric_endpoints(std::uint64_t seed, const std::optional<ModelWeights>& given = {}) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto w = weights_for(given, rng);
    const auto model = tiny_mlp(w);
    const auto x = random_tensor(w.input, rng);
    const auto b = random_tensor(w.input, rng);
    RealMatrix h(w.input.height, w.input.width);
    for (auto& v : h.data()) v = rng.uniform();
    const auto del = deletion_curve(*model, x, b, h, 10);
    const auto ins = insertion_curve(*model, x, b, h, 10);
    const double fx = model->forward(x);
    const double fb = model->forward(b);
    for (double d : {del.scores.front() - fx, del.scores.back() - fb, ins.scores.front() - fb,
                     ins.scores.back() - fx})
      worst = std::max(worst, std::abs(d));
  }
  return {"insertion/deletion endpoints", worst <= 1e-12, "max endpoint error " + fmt("%.3e", worst)};
}

inline CheckResult frequency_trace(std::uint64_t seed) {
  Rng rng(seed);
  int below = 0;
  double linear_spread = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ImageTensor d = smooth_rank2_plus_noise(rng);
    const ImageTensor b(d.shape());
    PathSpec spec;
    spec.steps = 4;
    const auto trace = path_frequency_trace(generate_path(b, d, spec), b);
    below += trace.hf_fraction[1] < trace.hf_fraction[4];

    spec.family = PathFamily::linear;
    const auto lin = path_frequency_trace(generate_path(b, d, spec), b);
    for (std::size_t m = 2; m < lin.hf_fraction.size(); ++m)
      linear_spread = std::max(linear_spread, std::abs(lin.hf_fraction[m] - lin.hf_fraction[1]));
  }
  return {"coarse-to-fine frequency trace", below >= 90 && linear_spread <= 1e-10,
          std::to_string(below) + "/100 hf(0.25) < hf(1), linear spread " +
              fmt("%.3e", linear_spread)};
}

inline CheckResult sensitivity(std::uint64_t seed, const std::optional<ModelWeights>& given = {}) {
  Rng rng(seed);
  auto w = weights_for(given, rng);
  const std::size_t n = w.input_dim();
  std::vector<std::size_t> dead;
  for (std::size_t k = 0; k < 5; ++k) dead.push_back(rng.below(n));
  for (std::size_t col : dead)
    for (std::size_t j = 0; j < w.hidden; ++j) w.w1[j * n + col] = 0.0;
  const auto model = tiny_mlp(w);
  const auto x = random_tensor(w.input, rng);
  double worst = 0.0;
  for (auto fam : {PathFamily::linear, PathFamily::spectral, PathFamily::blur, PathFamily::dct,
                   PathFamily::laplacian}) {
    PathSpec spec;
    spec.family = fam;
    spec.steps = 50;
    const auto r = attribute(*model, x, ImageTensor(w.input), spec);
    for (std::size_t col : dead) worst = std::max(worst, std::abs(r.map[col]));
  }
  worst = std::max(worst, [&] {
    const auto g = gradient_x_input(*model, x);
    double m = 0.0;
    for (std::size_t col : dead) m = std::max(m, std::abs(g.map[col]));
    return m;
  }());
  return {"sensitivity to dead inputs", worst <= 1e-12,
          "max |attribution| on dead inputs " + fmt("%.3e", worst)};
}

inline CheckResult io_roundtrip(std::uint64_t seed) {
  Rng rng(seed);
  std::size_t failures = 0;
  for (int t = 0; t < 20; ++t) {
    const auto x = random_tensor({3, 1 + rng.below(6), 1 + rng.below(6)}, rng, -2.0, 2.0);
    if (!(parse_image(serialize_image(x, ImageFormat::tensor)) == x)) ++failures;

    const auto img = random_tensor({3, x.height(), x.width()}, rng);
    const auto ppm = serialize_image(img, ImageFormat::ppm);
    const auto back = parse_image(ppm);
    if (max_abs_diff(back, img) > 1.0 / 510.0 + 1e-15) ++failures;
    if (serialize_image(back, ImageFormat::ppm) != ppm) ++failures;

    ResultDocument doc;
    doc.set("residual", rng.normal() * 1e-9);
    doc.set("score", rng.uniform());
    doc.set("seed", static_cast<std::int64_t>(rng() >> 2));
    doc.set("method", std::string("sig"));
    doc.set("flag", t % 2 == 0);
    const auto text = serialize_result(doc);
    if (!(parse_result(text) == doc) || serialize_result(parse_result(text)) != text) ++failures;
  }
  return {"image/tensor/result round-trips", failures == 0,
          std::to_string(failures) + " round-trip failures in 20 trials"};
}

inline CheckResult degenerate_subspace(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t h = 6;
    const std::size_t w = 5;
    SvdTriple f;
    f.u = random_orthonormal(h, 4, rng);
    f.v = random_orthonormal(w, 4, rng);
    f.sigma = {3.0, 1.5, 1.5, 0.5};
    SvdTriple g = f;
    const double theta = rng.uniform(0.0, 6.283185307179586);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (auto* m : {&g.u, &g.v})
      for (std::size_t r = 0; r < m->rows(); ++r) {
        const double a = (*m)(r, 1);
        const double b = (*m)(r, 2);
        (*m)(r, 1) = c * a - s * b;
        (*m)(r, 2) = s * a + c * b;
      }
    const ImageTensor base(1, h, w);
    const SpectralFactors fa{SvdMode::per_channel, base.shape(), {f}};
    const SpectralFactors fb{SvdMode::per_channel, base.shape(), {g}};
    const ImageTensor x = base + reconstruct_tensor(fa, std::vector<std::vector<double>>{{1, 1, 1, 1}});
    PathSpec spec;
    spec.steps = 10;
    const PathGenerator gen(base, x, spec);
    for (std::size_t m = 0; m <= spec.steps; ++m) {
      const double a = gen.alpha(m);
      const auto pa = spectral_point(base, fa, a, spec.overlap, spec.schedule);
      worst = std::max(worst, max_abs_diff(pa, spectral_point(base, fb, a, spec.overlap, spec.schedule)));
      worst = std::max(worst, max_abs_diff(pa, gen.point(m)));
    }
  }
  return {"degenerate-subspace invariance", worst <= 1e-6,
          "max path difference under rotation " + fmt("%.3e", worst)};
}

/// The full invariant suite in a fixed order.
inline std::vector<CheckResult> run_all(std::uint64_t seed,
                                        const std::optional<ModelWeights>& weights = {}) {
  Rng root(seed);
  std::vector<std::uint64_t> seeds(11);
  for (auto& s : seeds) s = root();
  return {
      full_overlap_recovery(seeds[0], weights),
      completeness(seeds[1], weights),
      eckart_young(seeds[2]),
      symmetry(seeds[3], weights),
      gradients(seeds[4], weights),
      faithfulness_separation(seeds[5]),
      metric_endpoints(seeds[6], weights),
      frequency_trace(seeds[7]),
      sensitivity(seeds[8], weights),
      io_roundtrip(seeds[9]),
      degenerate_subspace(seeds[10]),
  };
}

inline std::string report(const std::vector<CheckResult>& results) {
  std::string out;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.passed;
    out += std::string(r.passed ? "[PASS] " : "[FAIL] ") + r.name +
           std::string(width - r.name.size() + 2, ' ') + r.detail + "\n";
  }
  out += std::to_string(passed) + "/" + std::to_string(results.size()) + " checks passed\n";
  return out;
}

}  // namespace sattr::selftest
