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

#include "sattr/gating.hpp"

#include <vector>

#include <gtest/gtest.h>

#include "sattr/random.hpp"

namespace sattr {
namespace {

constexpr Schedule kAll[] = {Schedule::linear, Schedule::cosine, Schedule::sigmoid, Schedule::step};

TEST(ActivationWindow, LeadingComponentStartsImmediately) {
  for (double omega : {0.1, 0.4, 0.75, 1.0}) {
    const auto w = activation_window(3.0, 3.0, omega);
    EXPECT_EQ(w.start, 0.0);
    EXPECT_DOUBLE_EQ(w.end, omega);
  }
}

TEST(ActivationWindow, FullOverlapIsUnitWindow) {
  for (double s : {0.0, 0.3, 1.7, 2.0}) {
    const auto w = activation_window(s, 2.0, 1.0);
    EXPECT_EQ(w.start, 0.0);
    EXPECT_EQ(w.end, 1.0);
  }
}

TEST(ActivationWindow, RatioExamples) {
  const double ratios[] = {1.0, 0.5, 0.25};
  const double starts[] = {0.0, 0.30, 0.45};
  const double ends[] = {0.40, 0.70, 0.85};
  for (int i = 0; i < 3; ++i) {
    const auto w = activation_window(ratios[i] * 8.0, 8.0, 0.4);
    EXPECT_NEAR(w.start, starts[i], 1e-15);
    EXPECT_NEAR(w.end, ends[i], 1e-15);
  }
}

TEST(ActivationWindow, Errors) {
  EXPECT_THROW(activation_window(0.0, 0.0, 0.4), DegenerateInput);
  EXPECT_THROW(activation_window(1.0, 2.0, 0.0), InvalidInput);
  EXPECT_THROW(activation_window(1.0, 2.0, 1.5), InvalidInput);
  EXPECT_THROW(activation_window(3.0, 2.0, 0.5), InvalidInput);
}

TEST(ActivationWindow, LargerImportanceStartsStrictlyEarlier) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const double omega = rng.uniform(0.01, 0.99);
    const double a = rng.uniform(0.0, 1.0);
    const double b = rng.uniform(0.0, 1.0);
    if (a == b) continue;
    const auto wa = activation_window(a, 1.0, omega);
    const auto wb = activation_window(b, 1.0, omega);
    EXPECT_EQ(a > b, wa.start < wb.start);
    EXPECT_NEAR(wa.end - wa.start, omega, 1e-15);
  }
}

TEST(Gate, OutsideWindow) {
  const ActivationWindow w{0.3, 0.7};
  for (auto s : kAll) {
    EXPECT_EQ(gate(0.2, w, s), 0.0) << to_string(s);
    EXPECT_EQ(gate(0.9, w, s), 1.0) << to_string(s);
    EXPECT_EQ(gate(0.3, w, s), 0.0) << to_string(s);
    EXPECT_EQ(gate(0.7, w, s), 1.0) << to_string(s);
  }
}

TEST(Gate, Midpoint) {
  const ActivationWindow w{0.3, 0.7};
  EXPECT_NEAR(gate(0.5, w, Schedule::linear), 0.5, 1e-15);
  EXPECT_NEAR(gate(0.5, w, Schedule::cosine), 0.5, 1e-15);
  EXPECT_NEAR(gate(0.5, w, Schedule::sigmoid), 0.5, 1e-15);
  EXPECT_EQ(gate(0.5, w, Schedule::step), 1.0);
  EXPECT_EQ(gate(0.4999, w, Schedule::step), 0.0);
}

TEST(Gate, MonotoneInAlpha) {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const double s = rng.uniform(0.0, 0.9);
    const ActivationWindow w{s, s + rng.uniform(0.01, 1.0 - s)};
    for (auto sched : kAll) {
      double prev = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double g = gate(i / 400.0, w, sched);
        EXPECT_GE(g, prev);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
        prev = g;
      }
    }
  }
}

TEST(Schedule, NameRoundTrip) {
  for (auto s : kAll) EXPECT_EQ(parse_schedule(to_string(s)), s);
  EXPECT_THROW(parse_schedule("tanh"), InvalidInput);
}

}  // namespace
}  // namespace sattr
