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

#include "sattr/attribution.hpp"
#include "sattr/io.hpp"

namespace sattr {

/// Scalar fields of an attribution result as a flat document. The map
/// itself is stored separately as a tensor file.
inline ResultDocument to_document(const AttributionResult& r) {
  ResultDocument d;
  d.set("method", r.method);
  d.set("score_input", r.score_input);
  d.set("score_baseline", r.score_baseline);
  d.set("completeness_residual", r.completeness_residual);
  d.set("baseline_is_blurred_input", r.baseline_is_blurred_input);
  if (r.spec) {
    const PathSpec& s = *r.spec;
    d.set("path.family", std::string(to_string(s.family)));
    d.set("path.steps", s.steps);
    d.set("path.overlap", s.overlap);
    d.set("path.schedule", std::string(to_string(s.schedule)));
    d.set("path.svd_mode", std::string(to_string(s.svd_mode)));
    d.set("path.blur_sigma_max", s.blur_sigma_max);
  }
  return d;
}

/// Inverse of to_document; `map` is attached by the caller.
inline AttributionResult attribution_from_document(const ResultDocument& d, ImageTensor map = {}) {
  AttributionResult r;
  r.map = std::move(map);
  r.method = d.get<std::string>("method");
  r.score_input = d.get<double>("score_input");
  r.score_baseline = d.get<double>("score_baseline");
  r.completeness_residual = d.get<double>("completeness_residual");
  r.baseline_is_blurred_input = d.get<bool>("baseline_is_blurred_input");
  if (d.contains("path.family")) {
    PathSpec s;
    s.family = parse_path_family(d.get<std::string>("path.family"));
    const auto steps = d.get<std::int64_t>("path.steps");
    if (steps < 1) throw InvalidInput("path.steps must be >= 1");
    s.steps = static_cast<std::size_t>(steps);
    s.overlap = d.get<double>("path.overlap");
    s.schedule = parse_schedule(d.get<std::string>("path.schedule"));
    s.svd_mode = parse_svd_mode(d.get<std::string>("path.svd_mode"));
    s.blur_sigma_max = d.get<double>("path.blur_sigma_max");
    r.spec = s;
  }
  return r;
}

}  // namespace sattr
