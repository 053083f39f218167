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

// Regenerates the bundled sample in data/:
//   sample.ppm  3 x 16 x 16 smooth scene with a bright square and mild noise
//   model.txt   tinymlp weights (hidden 32, 4 classes) sized for sample.ppm
//
// Usage: make-sample [output-dir]   (default: data)

#include <cmath>
#include <filesystem>
#include <iostream>

#include "sattr/io.hpp"
#include "sattr/model.hpp"
#include "sattr/random.hpp"

int main(int argc, char** argv) {
  using namespace sattr;
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  constexpr std::size_t n = 16;
  constexpr double pi = 3.14159265358979323846;

  Rng rng(20240611);
  ImageTensor img(3, n, n);
  const double tint[3] = {0.9, 0.6, 0.3};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double y = static_cast<double>(i) / (n - 1);
        const double x = static_cast<double>(j) / (n - 1);
        double v = 0.35 + 0.25 * tint[c] * std::cos(pi * x) * std::cos(0.5 * pi * y);
        if (i >= 5 && i <= 10 && j >= 6 && j <= 11) v += 0.3 * tint[c];
        v += 0.04 * rng.normal();
        img(c, i, j) = std::clamp(v, 0.0, 1.0);
      }

  try {
    std::filesystem::create_directories(dir);
    write_image(img, dir / "sample.ppm", ImageFormat::ppm);
    write_weights(random_weights(img.shape(), 32, 4, 7), dir / "model.txt");
  } catch (const Error& e) {
    std::cerr << "make-sample: " << e.what() << "\n";
    return 2;
  }
  std::cout << "wrote " << (dir / "sample.ppm").string() << " and " << (dir / "model.txt").string()
            << "\n";
  return 0;
}
