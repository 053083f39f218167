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

namespace sattr {

// Pixel permutations used for symmetry checks. Each acts on every channel.
enum class Transform { identity, hflip, vflip, rot90 };

inline std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::identity: return "identity";
    case Transform::hflip: return "hflip";
    case Transform::vflip: return "vflip";
    case Transform::rot90: return "rot90";
  }
  return "?";
}

inline Transform parse_transform(std::string_view s) {
  if (s == "identity") return Transform::identity;
  if (s == "hflip") return Transform::hflip;
  if (s == "vflip") return Transform::vflip;
  if (s == "rot90") return Transform::rot90;
  throw InvalidInput("unknown transform '" + std::string(s) + "'");
}

/// Applies T. rot90 is a counter-clockwise quarter turn and requires H == W.
inline ImageTensor apply(Transform t, const ImageTensor& x) {
  const std::size_t h = x.height();
  const std::size_t w = x.width();
  switch (t) {
    case Transform::identity:
      return x;
    case Transform::hflip: {
      ImageTensor out(x.shape());
      for (std::size_t c = 0; c < x.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) out(c, i, j) = x(c, i, w - 1 - j);
      return out;
    }
    case Transform::vflip: {
      ImageTensor out(x.shape());
      for (std::size_t c = 0; c < x.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) out(c, i, j) = x(c, h - 1 - i, j);
      return out;
    }
    case Transform::rot90: {
      if (h != w) throw InvalidInput("rot90 requires square spatial dimensions");
      ImageTensor out(x.shape());
      for (std::size_t c = 0; c < x.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) out(c, i, j) = x(c, j, w - 1 - i);
      return out;
    }
  }
  return x;
}

/// Applies T^-1 (flips are involutions; rot90 inverse is three quarter turns).
inline ImageTensor apply_inverse(Transform t, const ImageTensor& x) {
  if (t != Transform::rot90) return apply(t, x);
  return apply(t, apply(t, apply(t, x)));
}

/// Number of elements in the cyclic group generated by T.
inline std::size_t group_order(Transform t) {
  switch (t) {
    case Transform::identity: return 1;
    case Transform::hflip:
    case Transform::vflip: return 2;
    case Transform::rot90: return 4;
  }
  return 1;
}

}  // namespace sattr
