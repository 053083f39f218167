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
#include <map>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

#include <json.hpp>

#include "sattr/error.hpp"
#include "sattr/tensor.hpp"
#include "sattr/text.hpp"

namespace sattr {

// ---------------------------------------------------------------------------
// Images: ASCII PGM (P2), ASCII PPM (P3) and the lossless tensor-text format
//   tensor <C> <H> <W>
//   <C*H*W whitespace-separated decimals, row-major (c, h, w)>

enum class ImageFormat { pgm, ppm, tensor };

inline ImageFormat format_for_path(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".pgm") return ImageFormat::pgm;
  if (ext == ".ppm") return ImageFormat::ppm;
  return ImageFormat::tensor;
}

/// [0, 1] -> 0..255, clamped, round half up.
inline unsigned quantize8(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned>(std::floor(c * 255.0 + 0.5));
}

inline ImageTensor parse_image(std::string_view content) {
  text::Scanner sc(content, /*hash_comments=*/true);
  const auto magic = sc.token();
  if (magic == "tensor") {
    text::Scanner body(content);
    body.token();
    Shape s;
    s.channels = body.count("channel count");
    s.height = body.count("height");
    s.width = body.count("width");
    if (s.size() == 0) throw ParseError("tensor dimensions must be >= 1", body.last_offset());
    std::vector<double> data(s.size());
    for (auto& v : data) v = body.number("tensor value");
    if (!body.at_end()) throw ParseError("trailing data after tensor payload", body.offset());
    return ImageTensor(s, std::move(data));
  }
  std::size_t channels = 0;
  if (magic == "P2") {
    channels = 1;
  } else if (magic == "P3") {
    channels = 3;
  } else {
    throw ParseError("unrecognized image magic '" + std::string(magic) + "'", sc.last_offset());
  }
  const std::size_t w = sc.count("width");
  const std::size_t h = sc.count("height");
  const std::size_t maxval = sc.count("maxval");
  if (w == 0 || h == 0) throw ParseError("image dimensions must be >= 1", sc.last_offset());
  if (maxval == 0 || maxval > 255) throw ParseError("maxval must lie in 1..255", sc.last_offset());

  ImageTensor t(channels, h, w);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t v = sc.count("pixel value");
        if (v > maxval) throw ParseError("pixel value exceeds maxval", sc.last_offset());
        t(c, i, j) = static_cast<double>(v) / scale;
      }
  if (!sc.at_end()) throw ParseError("trailing data after pixel payload", sc.offset());
  return t;
}

inline std::string serialize_image(const ImageTensor& t, ImageFormat format) {
  std::string out;
  const std::size_t h = t.height();
  const std::size_t w = t.width();
  switch (format) {
    case ImageFormat::tensor:
      out = "tensor " + std::to_string(t.channels()) + " " + std::to_string(h) + " " +
            std::to_string(w) + "\n";
      for (std::size_t c = 0; c < t.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) {
            out += text::format_double(t(c, i, j));
            out += j + 1 == w ? '\n' : ' ';
          }
      return out;
    case ImageFormat::pgm:
    case ImageFormat::ppm: {
      const bool gray = format == ImageFormat::pgm;
      if (t.channels() != (gray ? 1u : 3u))
        throw InvalidInput(std::string(gray ? "PGM" : "PPM") + " output needs " +
                           (gray ? "1 channel" : "3 channels") + ", tensor has " +
                           std::to_string(t.channels()));
      out = std::string(gray ? "P2" : "P3") + "\n" + std::to_string(w) + " " + std::to_string(h) +
            "\n255\n";
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j)
          for (std::size_t c = 0; c < t.channels(); ++c) {
            if (j != 0 || c != 0) out += ' ';
            out += std::to_string(quantize8(t(c, i, j)));
          }
        out += '\n';
      }
      return out;
    }
  }
  return out;
}

inline ImageTensor read_image(const std::filesystem::path& path) {
  return parse_image(text::read_file(path));
}

inline void write_image(const ImageTensor& t, const std::filesystem::path& path, ImageFormat format) {
  text::write_file_atomic(path, serialize_image(t, format));
}

inline ImageTensor matrix_image(const RealMatrix& m) {
  return ImageTensor(Shape{1, m.rows(), m.cols()}, m.values());
}

// ---------------------------------------------------------------------------
// Result documents: flat JSON objects, keys sorted, doubles with 17
// significant digits (always carrying a '.' or exponent so they re-read as
// doubles).

using ResultValue = std::variant<bool, std::int64_t, double, std::string>;

class ResultDocument {
 public:
  void set(const std::string& key, bool v) { entries_[key] = v; }
  void set(const std::string& key, double v) { entries_[key] = v; }
  void set(const std::string& key, std::string v) { entries_[key] = std::move(v); }
  void set(const std::string& key, const char* s) { entries_[key] = std::string(s); }
  template <class I>
    requires(std::is_integral_v<I> && !std::is_same_v<I, bool>)
  void set(const std::string& key, I v) {
    entries_[key] = static_cast<std::int64_t>(v);
  }

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

  template <class T>
  const T& get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw InvalidInput("result document has no key '" + key + "'");
    if (const T* v = std::get_if<T>(&it->second)) return *v;
    throw InvalidInput("result document key '" + key + "' has a different type");
  }

  const std::map<std::string, ResultValue>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ResultDocument&, const ResultDocument&) = default;

 private:
  std::map<std::string, ResultValue> entries_;
};

namespace detail {

inline std::string json_number(double v) {
  if (!std::isfinite(v)) throw InvalidInput("result documents cannot hold non-finite numbers");
  std::string s = text::format_double(v);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline std::string serialize_result(const ResultDocument& doc) {
  if (doc.empty()) return "{}";
  std::string out = "{\n";
  bool first = true;
  for (const auto& [key, value] : doc.entries()) {
    if (!first) out += ",\n";
    first = false;
    out += "  " + nlohmann::json(key).dump() + ": ";
    std::visit(
        [&out](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, bool>) {
            out += v ? "true" : "false";
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            out += std::to_string(v);
          } else if constexpr (std::is_same_v<T, double>) {
            out += detail::json_number(v);
          } else {
            out += nlohmann::json(v).dump();
          }
        },
        value);
  }
  out += "\n}";
  return out;
}

inline ResultDocument parse_result(std::string_view content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content.begin(), content.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points at the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = detail::line_column(content, byte);
    throw ParseError("result syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     byte, line, col);
  }
  if (!j.is_object()) throw ParseError("result document must be a JSON object", 0, 1, 1);
  ResultDocument doc;
  for (const auto& [key, v] : j.items()) {
    if (v.is_boolean()) {
      doc.set(key, v.get<bool>());
    } else if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX))
        throw ParseError("integer out of range for key '" + key + "'", 0);
      doc.set(key, static_cast<std::int64_t>(u));
    } else if (v.is_number_integer()) {
      doc.set(key, v.get<std::int64_t>());
    } else if (v.is_number_float()) {
      doc.set(key, v.get<double>());
    } else if (v.is_string()) {
      doc.set(key, v.get<std::string>());
    } else {
      throw ParseError("unsupported value type for key '" + key + "' (flat documents only)", 0);
    }
  }
  return doc;
}

inline void write_result(const ResultDocument& doc, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_result(doc) + "\n");
}

inline ResultDocument read_result(const std::filesystem::path& path) {
  return parse_result(text::read_file(path));
}

}  // namespace sattr
