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

#include <string>
#include <string_view>

#include "sattr/error.hpp"
#include "sattr/tensor.hpp"
#include "sattr/transforms.hpp"

namespace sattr {

enum class BaselineKind { zero, mean, blur };

inline BaselineKind parse_baseline_kind(std::string_view s) {
  if (s == "zero") return BaselineKind::zero;
  if (s == "mean") return BaselineKind::mean;
  if (s == "blur") return BaselineKind::blur;
  throw InvalidInput("unknown baseline '" + std::string(s) + "'");
}

/// zero: black image. mean: each channel filled with its own mean.
/// blur: Gaussian-blurred copy of the input.
inline ImageTensor make_baseline(BaselineKind kind, const ImageTensor& input, double blur_sigma = 35.0) {
  switch (kind) {
    case BaselineKind::zero:
      return ImageTensor(input.shape());
    case BaselineKind::mean: {
      ImageTensor out(input.shape());
      const std::size_t n = input.shape().plane();
      for (std::size_t c = 0; c < input.channels(); ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += input[c * n + i];
        const double mean = s / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) out[c * n + i] = mean;
      }
      return out;
    }
    case BaselineKind::blur:
      return gaussian_blur(input, blur_sigma);
  }
  return ImageTensor(input.shape());
}

}  // namespace sattr
