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

#include "sattr/spectrum.hpp"

#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "sattr/random.hpp"
#include "sattr/selftest.hpp"

namespace sattr {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Oracle: textbook O(H^2 W^2) double sum.
std::complex<double> naive_dft(const RealMatrix& m, std::size_t u, std::size_t v) {
  std::complex<double> s = 0.0;
  const double h = static_cast<double>(m.rows());
  const double w = static_cast<double>(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double ang = -2.0 * kPi * (static_cast<double>(u * i) / h + static_cast<double>(v * j) / w);
      s += m(i, j) * std::complex<double>(std::cos(ang), std::sin(ang));
    }
  return s;
}

TEST(Dft, MatchesNaiveSum) {
  Rng rng(1);
  const auto m = random_matrix(5, 6, rng);
  const auto f = dft2(m);
  for (std::size_t u = 0; u < 5; ++u)
    for (std::size_t v = 0; v < 6; ++v) EXPECT_LE(std::abs(f[u * 6 + v] - naive_dft(m, u, v)), 1e-10);
}

TEST(Dft2Magnitude, ConstantIsCentredDc) {
  const RealMatrix m(6, 5, -0.75);
  const auto s = dft2_magnitude(m);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == 3 && j == 2)
        EXPECT_NEAR(s.magnitude(i, j), 0.75 * 30.0, 1e-12);
      else
        EXPECT_NEAR(s.magnitude(i, j), 0.0, 1e-12);
    }
  EXPECT_NEAR(dft2_magnitude(m, true).magnitude(3, 2), std::log1p(22.5), 1e-12);
}

TEST(Dft2Magnitude, CosinePeaks) {
  const std::size_t n = 8;
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = std::cos(2.0 * kPi * (2.0 * static_cast<double>(i) + 1.0 * static_cast<double>(j)) / 8.0);
  const auto s = dft2_magnitude(m);
  // Peaks at +-(2, 1) about the centre (4, 4).
  EXPECT_NEAR(s.magnitude(6, 5), 32.0, 1e-10);
  EXPECT_NEAR(s.magnitude(2, 3), 32.0, 1e-10);
  double rest = 0.0;
  for (std::size_t i = 0; i < s.magnitude.size(); ++i) rest += s.magnitude.data()[i];
  EXPECT_NEAR(rest, 64.0, 1e-9);
}

TEST(Dft2Magnitude, ParsevalAndPointSymmetry) {
  Rng rng(2);
  for (auto [h, w] : {std::pair{8u, 8u}, std::pair{7u, 9u}, std::pair{6u, 5u}}) {
    const auto m = random_matrix(h, w, rng);
    const auto s = dft2_magnitude(m);
    double spec = 0.0;
    double space = 0.0;
    for (double v : s.magnitude.data()) spec += v * v;
    for (double v : m.data()) space += v * v;
    EXPECT_NEAR(spec, static_cast<double>(h * w) * space, 1e-8 * spec);
    // Real input: |F(k)| = |F(-k)|, i.e. the shifted map is symmetric
    // about the DC cell for the cells whose mirror lies on the grid.
    const std::size_t cy = h / 2;
    const std::size_t cx = w / 2;
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const std::size_t mi = (2 * cy + h - i) % h;
        const std::size_t mj = (2 * cx + w - j) % w;
        EXPECT_NEAR(s.magnitude(i, j), s.magnitude(mi, mj), 1e-8);
      }
  }
}

TEST(HighFreqFraction, Examples) {
  EXPECT_EQ(high_freq_fraction(RealMatrix(8, 8, 3.0)), 0.0);
  EXPECT_EQ(high_freq_fraction(RealMatrix(8, 8)), 0.0);

  RealMatrix checker(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) checker(i, j) = (i + j) % 2 == 0 ? 1.0 : -1.0;
  EXPECT_NEAR(high_freq_fraction(checker, 0.5), 1.0, 1e-12);

  EXPECT_THROW(high_freq_fraction(checker, 0.0), InvalidInput);
  EXPECT_THROW(high_freq_fraction(checker, 1.0), InvalidInput);
}

TEST(HighFreqFraction, NoiseRaisesFraction) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    RealMatrix smooth(16, 16);
    const double a = rng.uniform(0.5, 1.5);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j)
        smooth(i, j) = a * (static_cast<double>(i) / 15.0) * (static_cast<double>(j) / 15.0);
    RealMatrix noisy = smooth;
    for (auto& v : noisy.data()) v += 0.1 * rng.normal();
    EXPECT_LT(high_freq_fraction(smooth), high_freq_fraction(noisy));
  }
}

TEST(RadialProfile, EnergyIsConserved) {
  Rng rng(4);
  const auto m = random_matrix(9, 7, rng);
  const auto p = radial_profile(m);
  double total = 0.0;
  for (double e : p.energy) total += e;
  double space = 0.0;
  for (double v : m.data()) space += v * v;
  EXPECT_NEAR(total, 63.0 * space, 1e-8 * total);
  EXPECT_EQ(p.radius.front(), 0.0);
  EXPECT_DOUBLE_EQ(p.radius.back(), 1.0);
}

TEST(FrequencyTrace, LinearPathIsConstant) {
  Rng rng(5);
  const auto x = random_tensor({3, 8, 8}, rng);
  const auto b = random_tensor({3, 8, 8}, rng);
  PathSpec spec;
  spec.family = PathFamily::linear;
  spec.steps = 20;
  const auto t = path_frequency_trace(generate_path(b, x, spec), b);
  ASSERT_EQ(t.hf_fraction.size(), 21u);
  EXPECT_EQ(t.hf_fraction[0], 0.0);
  for (std::size_t m = 2; m <= 20; ++m) EXPECT_NEAR(t.hf_fraction[m], t.hf_fraction[1], 1e-10);
}

TEST(FrequencyTrace, EndpointMatchesDifferenceForEveryFamily) {
  Rng rng(6);
  const auto x = random_tensor({3, 8, 8}, rng);
  const auto b = random_tensor({3, 8, 8}, rng);
  for (auto fam : {PathFamily::linear, PathFamily::spectral, PathFamily::blur, PathFamily::dct,
                   PathFamily::laplacian}) {
    PathSpec spec;
    spec.family = fam;
    spec.steps = 8;
    spec.blur_sigma_max = 3.0;
    const auto path = generate_path(b, x, spec);
    const auto t = path_frequency_trace(path, path.origin());
    EXPECT_NEAR(t.hf_fraction.back(), difference_hf_fraction(x, path.origin(), 0.5), 1e-10)
        << to_string(fam);
  }
}

TEST(FrequencyTrace, SpectralPathIsCoarseToFine) {
  Rng rng(7);
  int below = 0;
  for (int t = 0; t < 100; ++t) {
    const ImageTensor d = selftest::smooth_rank2_plus_noise(rng);
    const ImageTensor b(d.shape());
    PathSpec spec;
    spec.steps = 4;
    const auto tr = path_frequency_trace(generate_path(b, d, spec), b);
    below += tr.hf_fraction[1] < tr.hf_fraction[4];
  }
  EXPECT_GE(below, 90);
}

}  // namespace
}  // namespace sattr
