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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "sattr/error.hpp"

// Shared helpers for the plain-text file formats.
namespace sattr::text {

/// 17 significant digits: enough for an exact binary64 round trip.
inline std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

class Scanner {
 public:
  explicit Scanner(std::string_view content, bool hash_comments = false)
      : s_(content), comments_(hash_comments) {}

  std::size_t offset() const noexcept { return pos_; }

  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }

  /// Next whitespace-delimited token; empty at end of input.
  std::string_view token() {
    skip_space();
    const std::size_t begin = pos_;
    while (pos_ < s_.size() && !is_space(s_[pos_])) ++pos_;
    last_ = begin;
    return s_.substr(begin, pos_ - begin);
  }

  /// Offset of the most recent token.
  std::size_t last_offset() const noexcept { return last_; }

  double number(const char* what) {
    const auto tok = token();
    if (tok.empty()) throw ParseError(std::string("unexpected end of input, expected ") + what, last_);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
      throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", last_);
    return v;
  }

  std::size_t count(const char* what) {
    const auto tok = token();
    if (tok.empty()) throw ParseError(std::string("unexpected end of input, expected ") + what, last_);
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", last_);
    return v;
  }

  void expect(std::string_view word) {
    const auto tok = token();
    if (tok != word)
      throw ParseError("expected '" + std::string(word) + "', got '" + std::string(tok) + "'", last_);
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
  }

  void skip_space() {
    while (pos_ < s_.size()) {
      if (is_space(s_[pos_])) {
        ++pos_;
      } else if (comments_ && s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  bool comments_;
  std::size_t pos_ = 0;
  std::size_t last_ = 0;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

/// Writes through a temporary sibling file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("error writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

}  // namespace sattr::text
