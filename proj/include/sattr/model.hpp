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
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sattr/error.hpp"
#include "sattr/random.hpp"
#include "sattr/spatial.hpp"
#include "sattr/tensor.hpp"
#include "sattr/text.hpp"

namespace sattr {

/// Differentiable scalar-valued model over images.
///
/// Implementations are immutable after construction; forward() and
/// gradient() may be called concurrently.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double forward(const ImageTensor& x) const = 0;
  /// d forward / dx, same shape as x.
  virtual ImageTensor gradient(const ImageTensor& x) const = 0;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

// ---------------------------------------------------------------------------

class LinearModel final : public ScalarField {
 public:
  LinearModel(ImageTensor weights, double bias) : w_(std::move(weights)), b_(bias) {}

  double forward(const ImageTensor& x) const override {
    require_same_shape(w_, x, "linear model");
    double s = b_;
    for (std::size_t i = 0; i < x.size(); ++i) s += w_[i] * x[i];
    return s;
  }

  ImageTensor gradient(const ImageTensor& x) const override {
    require_same_shape(w_, x, "linear model");
    return w_;
  }

  const ImageTensor& weights() const noexcept { return w_; }

 private:
  ImageTensor w_;
  double b_;
};

inline FieldPtr linear_model(ImageTensor weights, double bias) {
  return std::make_shared<LinearModel>(std::move(weights), bias);
}

// f(x) = sum x^2.
class SquaredNormModel final : public ScalarField {
 public:
  double forward(const ImageTensor& x) const override {
    double s = 0.0;
    for (double v : x.data()) s += v * v;
    return s;
  }
  ImageTensor gradient(const ImageTensor& x) const override { return 2.0 * x; }
};

inline FieldPtr squared_norm_model() { return std::make_shared<SquaredNormModel>(); }

// ---------------------------------------------------------------------------
// Tiny MLP: flatten -> dense(d, hidden) -> tanh -> dense(hidden, classes).

enum class TargetKind { probability, logit };

inline std::string_view to_string(TargetKind k) {
  return k == TargetKind::probability ? "prob" : "logit";
}

inline TargetKind parse_target_kind(std::string_view s) {
  if (s == "prob" || s == "probability") return TargetKind::probability;
  if (s == "logit") return TargetKind::logit;
  throw InvalidInput("unknown target '" + std::string(s) + "'");
}

struct TargetMode {
  TargetKind kind = TargetKind::probability;
  std::size_t class_index = 0;
};

/// Weights in file order: w1 (hidden x d, row-major), b1, w2 (classes x
/// hidden, row-major), b2.
struct ModelWeights {
  std::string arch = "tinymlp";
  Shape input;
  std::size_t hidden = 0;
  std::size_t classes = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  std::size_t input_dim() const noexcept { return input.size(); }

  void validate() const {
    if (arch != "tinymlp") throw InvalidInput("unsupported architecture '" + arch + "'");
    if (input.size() == 0 || hidden == 0 || classes == 0)
      throw InvalidInput("model dimensions must be >= 1");
    if (w1.size() != hidden * input_dim() || b1.size() != hidden || w2.size() != classes * hidden ||
        b2.size() != classes)
      throw InvalidInput("model weight arrays inconsistent with declared dimensions");
    for (const auto* v : {&w1, &b1, &w2, &b2})
      for (double x : *v)
        if (!std::isfinite(x)) throw InvalidInput("model weights contain non-finite values");
  }

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// Seeded uniform(-0.5, 0.5) weights.
inline ModelWeights random_weights(Shape input, std::size_t hidden, std::size_t classes,
                                   std::uint64_t seed) {
  Rng rng(seed);
  ModelWeights m;
  m.input = input;
  m.hidden = hidden;
  m.classes = classes;
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (auto& x : v) x = rng.uniform(-0.5, 0.5);
  };
  fill(m.w1, hidden * input.size());
  fill(m.b1, hidden);
  fill(m.w2, classes * hidden);
  fill(m.b2, classes);
  return m;
}

/// Reference configuration: 3x8x8 input, 32 hidden units, 4 classes.
inline ModelWeights reference_weights(std::uint64_t seed) {
  return random_weights(Shape{3, 8, 8}, 32, 4, seed);
}

inline std::string serialize_weights(const ModelWeights& m) {
  m.validate();
  std::string out = "arch tinymlp " + std::to_string(m.input.channels) + " " +
                    std::to_string(m.input.height) + " " + std::to_string(m.input.width) + " " +
                    std::to_string(m.hidden) + " " + std::to_string(m.classes) + "\n";
  auto rows = [&out](const std::vector<double>& v, std::size_t row_len) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out += text::format_double(v[i]);
      out += (i + 1) % row_len == 0 ? '\n' : ' ';
    }
  };
  rows(m.w1, m.input_dim());
  rows(m.b1, m.hidden);
  rows(m.w2, m.hidden);
  rows(m.b2, m.classes);
  return out;
}

inline ModelWeights parse_weights(std::string_view content) {
  text::Scanner sc(content);
  sc.expect("arch");
  ModelWeights m;
  const auto tag = sc.token();
  if (tag != "tinymlp")
    throw ParseError("unsupported architecture '" + std::string(tag) + "'", sc.last_offset());
  m.input.channels = sc.count("in_c");
  m.input.height = sc.count("in_h");
  m.input.width = sc.count("in_w");
  m.hidden = sc.count("hidden");
  m.classes = sc.count("classes");
  if (m.input.size() == 0 || m.hidden == 0 || m.classes == 0)
    throw ParseError("model dimensions must be >= 1", sc.last_offset());
  auto read = [&sc](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (auto& x : v) x = sc.number("weight");
  };
  read(m.w1, m.hidden * m.input_dim());
  read(m.b1, m.hidden);
  read(m.w2, m.classes * m.hidden);
  read(m.b2, m.classes);
  if (!sc.at_end()) throw ParseError("trailing data after weights", sc.offset());
  return m;
}

inline ModelWeights read_weights(const std::filesystem::path& path) {
  return parse_weights(text::read_file(path));
}

inline void write_weights(const ModelWeights& m, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_weights(m));
}

class TinyMlp final : public ScalarField {
 public:
  TinyMlp(ModelWeights weights, TargetMode target) : m_(std::move(weights)), target_(target) {
    m_.validate();
    if (target_.class_index >= m_.classes)
      throw InvalidInput("class index " + std::to_string(target_.class_index) +
                         " out of range for " + std::to_string(m_.classes) + " classes");
  }

  const ModelWeights& weights() const noexcept { return m_; }
  const TargetMode& target() const noexcept { return target_; }

  std::vector<double> logits(const ImageTensor& x) const {
    const auto hidden = hidden_activations(x);
    std::vector<double> z(m_.classes);
    for (std::size_t k = 0; k < m_.classes; ++k) {
      double s = m_.b2[k];
      for (std::size_t j = 0; j < m_.hidden; ++j) s += m_.w2[k * m_.hidden + j] * hidden[j];
      z[k] = s;
    }
    return z;
  }

  std::vector<double> probabilities(const ImageTensor& x) const { return softmax(logits(x)); }

  double forward(const ImageTensor& x) const override {
    const auto z = logits(x);
    if (target_.kind == TargetKind::logit) return z[target_.class_index];
    return softmax(z)[target_.class_index];
  }

  ImageTensor gradient(const ImageTensor& x) const override {
    const auto a = hidden_activations(x);
    const std::size_t k = target_.class_index;

    // d target / d logits
    std::vector<double> dz(m_.classes, 0.0);
    if (target_.kind == TargetKind::logit) {
      dz[k] = 1.0;
    } else {
      std::vector<double> z(m_.classes);
      for (std::size_t c = 0; c < m_.classes; ++c) {
        double s = m_.b2[c];
        for (std::size_t j = 0; j < m_.hidden; ++j) s += m_.w2[c * m_.hidden + j] * a[j];
        z[c] = s;
      }
      const auto p = softmax(z);
      for (std::size_t c = 0; c < m_.classes; ++c) dz[c] = p[k] * ((c == k ? 1.0 : 0.0) - p[c]);
    }

    // back through dense2 and tanh
    std::vector<double> dpre(m_.hidden, 0.0);
    for (std::size_t j = 0; j < m_.hidden; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < m_.classes; ++c) s += dz[c] * m_.w2[c * m_.hidden + j];
      dpre[j] = s * (1.0 - a[j] * a[j]);
    }

    // back through dense1
    const std::size_t d = m_.input_dim();
    ImageTensor g(x.shape());
    for (std::size_t j = 0; j < m_.hidden; ++j) {
      const double gj = dpre[j];
      const double* row = m_.w1.data() + j * d;
      for (std::size_t i = 0; i < d; ++i) g[i] += gj * row[i];
    }
    return g;
  }

  static std::vector<double> softmax(const std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      p[i] = std::exp(z[i] - zmax);
      total += p[i];
    }
    for (auto& v : p) v /= total;
    return p;
  }

 private:
  std::vector<double> hidden_activations(const ImageTensor& x) const {
    if (x.shape() != m_.input)
      throw InvalidInput("model expects input " + m_.input.str() + ", got " + x.shape().str());
    const std::size_t d = m_.input_dim();
    std::vector<double> a(m_.hidden);
    for (std::size_t j = 0; j < m_.hidden; ++j) {
      double s = m_.b1[j];
      const double* row = m_.w1.data() + j * d;
      for (std::size_t i = 0; i < d; ++i) s += row[i] * x[i];
      a[j] = std::tanh(s);
    }
    return a;
  }

  ModelWeights m_;
  TargetMode target_;
};

inline std::shared_ptr<const TinyMlp> tiny_mlp(ModelWeights weights, TargetMode target = {}) {
  return std::make_shared<TinyMlp>(std::move(weights), target);
}

// ---------------------------------------------------------------------------

/// Orbit average of `inner` over the cyclic group generated by T, so that
/// f(Tx) = f(x). Gradient: (1/|G|) sum_k T^-k grad inner(T^k x).
class SymmetrizedField final : public ScalarField {
 public:
  SymmetrizedField(FieldPtr inner, Transform t) : inner_(std::move(inner)), t_(t) {}

  double forward(const ImageTensor& x) const override {
    check(x);
    double s = 0.0;
    ImageTensor y = x;
    for (std::size_t k = 0; k < group_order(t_); ++k) {
      s += inner_->forward(y);
      y = apply(t_, y);
    }
    return s / static_cast<double>(group_order(t_));
  }

  ImageTensor gradient(const ImageTensor& x) const override {
    check(x);
    ImageTensor acc(x.shape());
    ImageTensor y = x;
    for (std::size_t k = 0; k < group_order(t_); ++k) {
      ImageTensor g = inner_->gradient(y);
      for (std::size_t r = 0; r < k; ++r) g = apply_inverse(t_, g);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
      y = apply(t_, y);
    }
    const double n = static_cast<double>(group_order(t_));
    for (auto& v : acc.data()) v /= n;
    return acc;
  }

  Transform transform() const noexcept { return t_; }

 private:
  void check(const ImageTensor& x) const {
    if (t_ == Transform::rot90 && x.height() != x.width())
      throw InvalidInput("symmetrize(rot90) requires square spatial dimensions");
  }

  FieldPtr inner_;
  Transform t_;
};

inline FieldPtr symmetrize(FieldPtr inner, Transform t) {
  return std::make_shared<SymmetrizedField>(std::move(inner), t);
}

// ---------------------------------------------------------------------------

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
inline ImageTensor fd_gradient(const ScalarField& f, const ImageTensor& x, double h = 1e-4) {
  if (!(h > 0.0)) throw InvalidInput("fd_gradient: step must be > 0");
  ImageTensor g(x.shape());
  ImageTensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f.forward(probe);
    probe[i] = orig - h;
    const double down = f.forward(probe);
    probe[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Largest per-coordinate relative error
///   |fd_i - a_i| / max(|a_i|, |fd_i|, scale_floor * max_j max(|a_j|, |fd_j|)).
/// The scale floor keeps coordinates that are tiny next to the rest of the
/// gradient from turning finite-difference truncation error into a large
/// ratio. Two all-zero gradients give 0.
inline double gradient_relative_error(const ImageTensor& analytic, const ImageTensor& fd,
                                      double scale_floor = 1e-3) {
  require_same_shape(analytic, fd, "gradient_relative_error");
  const double scale = std::max(max_abs(analytic), max_abs(fd));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(fd[i]), scale_floor * scale});
    worst = std::max(worst, std::abs(fd[i] - analytic[i]) / denom);
  }
  return worst;
}

}  // namespace sattr
