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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sattr/baseline.hpp"
#include "sattr/io.hpp"
#include "sattr/metrics.hpp"
#include "sattr/model.hpp"
#include "sattr/text.hpp"

namespace sattr {
namespace {

namespace fs = std::filesystem;

const fs::path kData = SATTR_DATA_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sattr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI; stdout goes to `stdout_file` (if set), stderr to dir_/stderr.
  int run(const std::string& args, const fs::path& stdout_file = {}) const {
    std::string cmd = std::string("\"") + SATTR_CLI + "\" " + args;
    cmd += " > \"" + (stdout_file.empty() ? (dir_ / "stdout").string() : stdout_file.string()) + "\"";
    cmd += " 2> \"" + (dir_ / "stderr").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string sample_args() const {
    return "--input \"" + (kData / "sample.ppm").string() + "\" --model \"" +
           (kData / "model.txt").string() + "\"";
  }

  std::string out(const std::string& name) const { return "--out \"" + (dir_ / name).string() + "\""; }

  std::string stderr_text() const { return text::read_file(dir_ / "stderr"); }

  fs::path dir_;
};

std::vector<double> csv_column(const std::string& content, std::size_t col) {
  std::vector<double> v;
  std::istringstream in(content);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) std::getline(row, cell, ',');
    v.push_back(std::stod(cell));
  }
  return v;
}

TEST_F(Cli, AttributeWritesOutputs) {
  ASSERT_EQ(run("attribute " + sample_args() + " --method sig --steps 200 --overlap 0.4 " + out("a")), 0)
      << stderr_text();
  for (const char* f : {"attribution.tensor", "heatmap.pgm", "result.json"})
    EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;
  const auto doc = read_result(dir_ / "a" / "result.json");
  EXPECT_TRUE(doc.contains("completeness_residual"));
  EXPECT_EQ(doc.get<std::int64_t>("path.steps"), 200);
  EXPECT_EQ(doc.get<std::int64_t>("seed"), 0);
  const auto map = read_image(dir_ / "a" / "attribution.tensor");
  EXPECT_NEAR(doc.get<double>("completeness_residual"),
              std::abs(sum(map) - (doc.get<double>("score_input") - doc.get<double>("score_baseline"))),
              1e-12);
}

TEST_F(Cli, FullOverlapMatchesIg) {
  ASSERT_EQ(run("attribute " + sample_args() + " --method sig --overlap 1.0 " + out("sig")), 0);
  ASSERT_EQ(run("attribute " + sample_args() + " --method ig " + out("ig")), 0);
  const auto a = read_image(dir_ / "sig" / "attribution.tensor");
  const auto b = read_image(dir_ / "ig" / "attribution.tensor");
  EXPECT_LE(max_abs_diff(a, b), 1e-10);
  const auto ha = read_image(dir_ / "sig" / "heatmap.pgm");
  const auto hb = read_image(dir_ / "ig" / "heatmap.pgm");
  EXPECT_LE(max_abs_diff(ha, hb), 1e-10);
}

TEST_F(Cli, MissingInputIsIoErrorWithoutOutputs) {
  EXPECT_EQ(run("attribute --input \"" + (dir_ / "nope.ppm").string() + "\" " + out("x")), 2);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
  const auto err = stderr_text();
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
}

TEST_F(Cli, InvalidArgumentsExitOne) {
  EXPECT_EQ(run("attribute " + sample_args() + " --overlap 0 " + out("x")), 1);
  EXPECT_EQ(run("attribute " + sample_args() + " --method nope " + out("x")), 1);
  EXPECT_EQ(run("attribute " + sample_args() + " --class 9 " + out("x")), 1);
  EXPECT_EQ(run("evaluate " + sample_args() + " --bbox 0,0,16,3 " + out("x")), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(Cli, EvaluateDiffIdMatchesCsvs) {
  ASSERT_EQ(run("evaluate " + sample_args() + " --fractions 32 --bbox 0,0,15,15 " + out("e")), 0)
      << stderr_text();
  const auto doc = read_result(dir_ / "e" / "result.json");
  const auto ins_text = text::read_file(dir_ / "e" / "insertion.csv");
  const auto del_text = text::read_file(dir_ / "e" / "deletion.csv");
  EXPECT_EQ(ins_text.substr(0, 15), "fraction,score\n");
  // Independent trapezoid over the CSV columns.
  auto trapezoid = [](const std::string& t) {
    const auto f = csv_column(t, 0);
    const auto s = csv_column(t, 1);
    double a = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) a += (f[i] - f[i - 1]) * (s[i] + s[i - 1]) / 2.0;
    return a;
  };
  EXPECT_EQ(csv_column(ins_text, 0).size(), 33u);
  EXPECT_NEAR(doc.get<double>("diff_id"), trapezoid(ins_text) - trapezoid(del_text), 1e-12);
  EXPECT_EQ(doc.get<std::string>("pointing_game"), "hit");
}

TEST_F(Cli, EvaluateConstantModelHasZeroDiffId) {
  auto w = read_weights(kData / "model.txt");
  std::fill(w.w1.begin(), w.w1.end(), 0.0);
  std::fill(w.w2.begin(), w.w2.end(), 0.0);
  write_weights(w, dir_ / "const.txt");
  ASSERT_EQ(run("evaluate --input \"" + (kData / "sample.ppm").string() + "\" --model \"" +
                (dir_ / "const.txt").string() + "\" " + out("e")),
            0)
      << stderr_text();
  EXPECT_EQ(read_result(dir_ / "e" / "result.json").get<double>("diff_id"), 0.0);
}

TEST_F(Cli, EvaluateWithPrecomputedAttributionAndMask) {
  ASSERT_EQ(run("attribute " + sample_args() + " --method ig --steps 50 " + out("a")), 0);
  ImageTensor mask(1, 16, 16);
  for (std::size_t i = 5; i <= 10; ++i)
    for (std::size_t j = 6; j <= 11; ++j) mask(0, i, j) = 1.0;
  write_image(mask, dir_ / "mask.pgm", ImageFormat::pgm);
  ASSERT_EQ(run("evaluate " + sample_args() + " --attribution \"" +
                (dir_ / "a" / "attribution.tensor").string() + "\" --mask \"" +
                (dir_ / "mask.pgm").string() + "\" " + out("e")),
            0)
      << stderr_text();
  const auto doc = read_result(dir_ / "e" / "result.json");
  EXPECT_TRUE(doc.contains("topmass_iou"));
  EXPECT_GE(doc.get<double>("topmass_iou"), 0.0);
  EXPECT_LE(doc.get<double>("topmass_iou"), 1.0);
}

TEST_F(Cli, AnalyzeLinearTraceIsConstant) {
  ASSERT_EQ(run("analyze " + sample_args() + " --method ig --steps 40 " + out("l")), 0) << stderr_text();
  const auto t = text::read_file(dir_ / "l" / "trace.csv");
  EXPECT_EQ(t.substr(0, 18), "alpha,hf_fraction\n");
  const auto hf = csv_column(t, 1);
  ASSERT_EQ(hf.size(), 41u);
  for (std::size_t m = 2; m < hf.size(); ++m) EXPECT_NEAR(hf[m], hf[1], 1e-10);
  EXPECT_TRUE(fs::exists(dir_ / "l" / "step_0039.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "l" / "spectrum_0.50.pgm"));
}

TEST_F(Cli, AnalyzeFirstFrameIsBaseline) {
  for (const char* b : {"zero", "mean", "blur"}) {
    const std::string name = std::string("f_") + b;
    ASSERT_EQ(run("analyze " + sample_args() + " --steps 8 --baseline " + b + " " + out(name)), 0);
    EXPECT_EQ(text::read_file(dir_ / name / "frame_0.00.ppm"), text::read_file(dir_ / name / "baseline.ppm"));
    const auto base = make_baseline(parse_baseline_kind(b), read_image(kData / "sample.ppm"));
    EXPECT_EQ(text::read_file(dir_ / name / "baseline.ppm"), serialize_image(base, ImageFormat::ppm));
  }
}

TEST_F(Cli, AnalyzeSpectralFramesRiseAfterQuarter) {
  ASSERT_EQ(run("analyze " + sample_args() + " --method sig --steps 200 " + out("s")), 0);
  const auto doc = read_result(dir_ / "s" / "result.json");
  const auto hf = csv_column(text::read_file(dir_ / "s" / "trace.csv"), 1);
  const char* tags[] = {"0.25", "0.50", "0.75", "1.00"};
  const std::size_t rows[] = {50, 100, 150, 200};
  double prev = -1.0;
  for (int k = 0; k < 4; ++k) {
    const double v = doc.get<double>(std::string("hf_fraction.") + tags[k]);
    EXPECT_EQ(v, hf[rows[k]]) << tags[k];
    EXPECT_GE(v, prev) << tags[k];
    prev = v;
  }
  EXPECT_LT(hf[50], hf[200]);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  for (const char* sub : {"attribute", "evaluate", "analyze"}) {
    const std::string args = std::string(sub) + " " + sample_args() + " --steps 20 --seed 11 ";
    ASSERT_EQ(run(args + out(std::string(sub) + "1") + " --threads 1"), 0);
    ASSERT_EQ(run(args + out(std::string(sub) + "2") + " --threads 4"), 0);
    for (const auto& e : fs::directory_iterator(dir_ / (std::string(sub) + "1")))
      EXPECT_EQ(text::read_file(e.path()),
                text::read_file(dir_ / (std::string(sub) + "2") / e.path().filename()))
          << e.path();
  }
}

TEST_F(Cli, SelftestIsDeterministic) {
  ASSERT_EQ(run("selftest --seed 7", dir_ / "r1"), 0);
  ASSERT_EQ(run("selftest --seed 7", dir_ / "r2"), 0);
  const auto a = text::read_file(dir_ / "r1");
  EXPECT_EQ(a, text::read_file(dir_ / "r2"));
  EXPECT_NE(a.find("[PASS]"), std::string::npos);
  EXPECT_EQ(a.find("[FAIL]"), std::string::npos);
}

TEST_F(Cli, CorruptedWeightsExitTwo) {
  auto t = text::read_file(kData / "model.txt");
  t.resize(t.size() / 2);
  text::write_file_atomic(dir_ / "bad.txt", t);
  EXPECT_EQ(run("selftest --model \"" + (dir_ / "bad.txt").string() + "\""), 2);
  EXPECT_EQ(run("attribute --input \"" + (kData / "sample.ppm").string() + "\" --model \"" +
                (dir_ / "bad.txt").string() + "\" " + out("x")),
            2);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
  EXPECT_NE(stderr_text().find("byte"), std::string::npos);
}

}  // namespace
}  // namespace sattr
