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

#include "sattr/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "sattr/random.hpp"

namespace sattr {
namespace {

double relative_error(const RealMatrix& a, const RealMatrix& b) {
  const double n = frobenius_norm(b);
  return n == 0.0 ? frobenius_norm(a - b) : frobenius_norm(a - b) / n;
}

double max_orthonormality_defect(const RealMatrix& q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.cols(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) {
      double d = 0.0;
      for (std::size_t r = 0; r < q.rows(); ++r) d += q(r, i) * q(r, j);
      worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

void expect_valid_triple(const RealMatrix& m, const SvdTriple& f) {
  ASSERT_EQ(f.rank(), std::min(m.rows(), m.cols()));
  ASSERT_EQ(f.u.rows(), m.rows());
  ASSERT_EQ(f.v.rows(), m.cols());
  for (std::size_t i = 0; i < f.rank(); ++i) {
    EXPECT_GE(f.sigma[i], 0.0);
    if (i > 0) {
      EXPECT_LE(f.sigma[i], f.sigma[i - 1]);
    }
  }
  EXPECT_LE(max_orthonormality_defect(f.u), 1e-8);
  EXPECT_LE(max_orthonormality_defect(f.v), 1e-8);
  const std::vector<double> ones(f.rank(), 1.0);
  EXPECT_LE(relative_error(reconstruct(f, ones), m), 1e-8);
  for (std::size_t i = 0; i < f.rank(); ++i) {
    for (std::size_t r = 0; r < f.u.rows(); ++r) {
      if (std::abs(f.u(r, i)) > 1e-12) {
        EXPECT_GT(f.u(r, i), 0.0) << "sign convention, component " << i;
        break;
      }
    }
  }
}

// Oracle: best Frobenius error among `trials` random rank-k matrices, each
// the product of Gaussian (rows x k) and (k x cols) factors scaled by the
// least-squares coefficient <A, B> / <B, B>.
double best_random_rank_k_error(const RealMatrix& a, std::size_t k, std::size_t trials, Rng& rng) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const RealMatrix b = matmul(random_matrix(a.rows(), k, rng), random_matrix(k, a.cols(), rng));
    double ab = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += a.data()[i] * b.data()[i];
      bb += b.data()[i] * b.data()[i];
    }
    const double c = bb > 0.0 ? ab / bb : 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a.data()[i] - c * b.data()[i];
      err += d * d;
    }
    best = std::min(best, std::sqrt(err));
  }
  return best;
}

TEST(Svd, IdentityHasUnitSingularValues) {
  const auto f = svd(RealMatrix::identity(2));
  EXPECT_DOUBLE_EQ(f.sigma[0], 1.0);
  EXPECT_DOUBLE_EQ(f.sigma[1], 1.0);
  expect_valid_triple(RealMatrix::identity(2), f);
}

TEST(Svd, ZeroMatrix) {
  const RealMatrix z(3, 4);
  const auto f = svd(z);
  ASSERT_EQ(f.rank(), 3u);
  for (double s : f.sigma) EXPECT_EQ(s, 0.0);
  expect_valid_triple(z, f);
}

TEST(Svd, ScaledOuterProductIsRankOne) {
  Rng rng(11);
  for (auto [rows, cols] : {std::pair{5u, 7u}, std::pair{7u, 5u}, std::pair{6u, 6u}}) {
    std::vector<double> a(rows), b(cols);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    RealMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = 3.0 * (a[i] / na) * (b[j] / nb);
    const auto f = svd(m);
    EXPECT_NEAR(f.sigma[0], 3.0, 1e-10);
    for (std::size_t i = 1; i < f.rank(); ++i) EXPECT_NEAR(f.sigma[i], 0.0, 1e-10);
    expect_valid_triple(m, f);
    const auto r = truncate(f, 1);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(r.data()[i], m.data()[i], 1e-12);
  }
}

TEST(Svd, RandomShapesSatisfyInvariants) {
  Rng rng(3);
  for (std::size_t rows = 1; rows <= 9; rows += 2)
    for (std::size_t cols = 1; cols <= 9; cols += 3) {
      const auto m = random_matrix(rows, cols, rng);
      expect_valid_triple(m, svd(m));
    }
}

TEST(Svd, RankDeficientMatrixCompletesBasis) {
  Rng rng(5);
  const RealMatrix m = matmul(random_matrix(8, 2, rng), random_matrix(2, 6, rng));
  const auto f = svd(m);
  EXPECT_GT(f.sigma[1], 1e-6);
  for (std::size_t i = 2; i < f.rank(); ++i) EXPECT_NEAR(f.sigma[i], 0.0, 1e-12);
  expect_valid_triple(m, f);
  expect_valid_triple(m.transposed(), svd(m.transposed()));
}

TEST(Svd, RejectsNonFiniteInput) {
  RealMatrix m(2, 2, 1.0);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(m), InvalidInput);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(svd(m), InvalidInput);
}

TEST(Svd, Deterministic) {
  Rng rng(9);
  const auto m = random_matrix(7, 5, rng);
  EXPECT_EQ(svd(m), svd(m));
}

TEST(Svd, SigmaInvariantUnderPermutationAndTranspose) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_matrix(6, 5, rng);
    const auto base = svd(m).sigma;

    RealMatrix rowp(6, 5), colp(6, 5);
    const std::size_t rp[] = {3, 0, 5, 1, 4, 2};
    const std::size_t cp[] = {4, 2, 0, 3, 1};
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        rowp(i, j) = m(rp[i], j);
        colp(i, j) = m(i, cp[j]);
      }
    for (const auto& variant : {svd(rowp).sigma, svd(colp).sigma, svd(m.transposed()).sigma}) {
      ASSERT_EQ(variant.size(), base.size());
      for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(variant[i], base[i], 1e-8);
    }
  }
}

TEST(Reconstruct, WeightsSelectComponents) {
  Rng rng(4);
  const auto m = random_matrix(5, 7, rng);
  const auto f = svd(m);
  EXPECT_LE(relative_error(reconstruct(f, std::vector<double>(5, 1.0)), m), 1e-8);
  EXPECT_EQ(frobenius_norm(reconstruct(f, std::vector<double>(5, 0.0))), 0.0);

  std::vector<double> onehot(5, 0.0);
  onehot[0] = 1.0;
  const double err = frobenius_norm(m - reconstruct(f, onehot));
  double tail = 0.0;
  for (std::size_t i = 1; i < 5; ++i) tail += f.sigma[i] * f.sigma[i];
  EXPECT_NEAR(err * err, tail, 1e-9 * tail);
}

TEST(Reconstruct, RejectsBadWeights) {
  const auto f = svd(RealMatrix::identity(3));
  EXPECT_THROW(reconstruct(f, std::vector<double>(2, 1.0)), InvalidInput);
  EXPECT_THROW(reconstruct(f, std::vector<double>{1.0, NAN, 1.0}), InvalidInput);
}

TEST(Truncate, Endpoints) {
  Rng rng(8);
  const auto m = random_matrix(5, 7, rng);
  const auto f = svd(m);
  EXPECT_LE(relative_error(truncate(f, 5), m), 1e-8);
  EXPECT_EQ(frobenius_norm(truncate(f, 0)), 0.0);
  EXPECT_THROW(truncate(f, 6), InvalidInput);
}

TEST(Truncate, BeatsRandomRankKCandidates) {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_matrix(5, 7, rng);
    const auto f = svd(m);
    for (std::size_t k : {1u, 2u, 3u}) {
      const double ours = frobenius_norm(m - truncate(f, k));
      EXPECT_LE(ours, best_random_rank_k_error(m, k, 1000, rng)) << "k=" << k;
    }
  }
}

TEST(DecomposeDifference, EqualInputsGiveZeroSpectrum) {
  Rng rng(1);
  const auto x = random_tensor({3, 4, 5}, rng);
  for (auto mode : {SvdMode::per_channel, SvdMode::joint}) {
    const auto f = decompose_difference(x, x, mode);
    for (const auto& t : f.triples)
      for (double s : t.sigma) EXPECT_EQ(s, 0.0);
  }
}

TEST(DecomposeDifference, SingleChannelModesCoincide) {
  Rng rng(2);
  const auto x = random_tensor({1, 6, 4}, rng);
  const auto b = random_tensor({1, 6, 4}, rng);
  const auto pc = decompose_difference(x, b, SvdMode::per_channel);
  const auto jt = decompose_difference(x, b, SvdMode::joint);
  ASSERT_EQ(pc.triples.size(), 1u);
  ASSERT_EQ(jt.triples.size(), 1u);
  EXPECT_EQ(pc.triples[0].sigma, jt.triples[0].sigma);
}

TEST(DecomposeDifference, JointModeStacksChannels) {
  Rng rng(3);
  const auto x = random_tensor({3, 8, 8}, rng);
  const auto b = random_tensor({3, 8, 8}, rng);
  const auto f = decompose_difference(x, b, SvdMode::joint);
  ASSERT_EQ(f.triples.size(), 1u);
  EXPECT_EQ(f.triples[0].rank(), 8u);
  EXPECT_EQ(f.triples[0].u.rows(), 24u);
  const std::vector<std::vector<double>> ones{std::vector<double>(8, 1.0)};
  EXPECT_LE(max_abs_diff(reconstruct_tensor(f, ones), x - b), 1e-12);

  const auto pc = decompose_difference(x, b, SvdMode::per_channel);
  ASSERT_EQ(pc.triples.size(), 3u);
  std::vector<std::vector<double>> pc_ones(3, std::vector<double>(8, 1.0));
  EXPECT_LE(max_abs_diff(reconstruct_tensor(pc, pc_ones), x - b), 1e-12);
}

TEST(DecomposeDifference, ShapeMismatch) {
  EXPECT_THROW(decompose_difference(ImageTensor(1, 2, 2), ImageTensor(1, 2, 3), SvdMode::joint),
               InvalidInput);
}

}  // namespace
}  // namespace sattr
