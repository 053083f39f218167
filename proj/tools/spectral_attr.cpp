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

// spectral-attr: attribution, evaluation and path diagnostics for the
// tiny-MLP model family.
//
//   spectral-attr attribute --input x.ppm --model w.txt --out DIR
//   spectral-attr evaluate  --input x.ppm --model w.txt --bbox 2,2,9,9 --out DIR
//   spectral-attr analyze   --input x.ppm --model w.txt --out DIR
//   spectral-attr selftest  [--seed N] [--model w.txt]
//
// Exit codes: 0 ok, 1 invalid arguments, 2 I/O or parse failure,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sattr/sattr.hpp"

namespace fs = std::filesystem;
using namespace sattr;

namespace {

struct Options {
  std::string input;
  std::string baseline = "zero";
  std::string model;
  std::string method = "sig";
  std::size_t steps = 200;
  double overlap = 0.4;
  std::string schedule = "linear";
  std::string svd_mode = "per-channel";
  std::string target = "prob";
  std::optional<std::size_t> class_index;
  std::string mask;
  std::string bbox;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t fractions = kDefaultFractionSteps;
  double blur_sigma = 35.0;
  double clip = 99.0;
  double mass = 0.15;
  double cutoff = 0.5;
  std::string attribution;
  unsigned threads = 0;
};

// Files produced by a subcommand, written only once everything succeeded.
class Outputs {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  void add_image(const std::string& name, const ImageTensor& t, ImageFormat f) {
    add(name, serialize_image(t, f));
  }

  void commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [name, content] : files_) text::write_file_atomic(dir / name, content);
  }

 private:
  std::map<std::string, std::string> files_;
};

bool is_method(const std::string& m) {
  return m == "sig" || m == "ig" || m == "gxi" || m == "blur" || m == "dct" || m == "laplacian";
}

PathFamily family_for(const std::string& method) {
  if (method == "sig") return PathFamily::spectral;
  if (method == "ig") return PathFamily::linear;
  return parse_path_family(method);
}

PathSpec path_spec(const Options& o) {
  PathSpec s;
  s.family = family_for(o.method);
  s.steps = o.steps;
  s.overlap = o.overlap;
  s.schedule = parse_schedule(o.schedule);
  s.svd_mode = parse_svd_mode(o.svd_mode);
  s.blur_sigma_max = o.blur_sigma;
  s.validate();
  return s;
}

ImageTensor load_baseline(const Options& o, const ImageTensor& x) {
  if (o.baseline == "zero" || o.baseline == "mean" || o.baseline == "blur")
    return make_baseline(parse_baseline_kind(o.baseline), x, o.blur_sigma);
  ImageTensor b = read_image(o.baseline);
  if (b.shape() != x.shape())
    throw InvalidInput("baseline shape " + b.shape().str() + " differs from input " + x.shape().str());
  return b;
}

struct Setup {
  ImageTensor input;
  ImageTensor baseline;
  ModelWeights weights;
  std::shared_ptr<const TinyMlp> model;
  bool model_from_file = false;
};

Setup load(const Options& o) {
  Setup s;
  s.input = read_image(o.input);
  if (!o.model.empty()) {
    s.weights = read_weights(o.model);
    s.model_from_file = true;
  } else {
    s.weights = random_weights(s.input.shape(), 32, 4, o.seed);
  }
  if (s.weights.input != s.input.shape())
    throw InvalidInput("model expects input " + s.weights.input.str() + ", got " + s.input.shape().str());
  s.baseline = load_baseline(o, s.input);

  TargetMode target{parse_target_kind(o.target), 0};
  if (o.class_index) {
    target.class_index = *o.class_index;
  } else {
    const auto z = TinyMlp(s.weights, target).logits(s.input);
    target.class_index =
        static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  s.model = std::make_shared<TinyMlp>(s.weights, target);
  return s;
}

void describe(ResultDocument& doc, const Options& o, const Setup& s) {
  doc.set("seed", o.seed);
  doc.set("input", o.input);
  doc.set("baseline", o.baseline);
  doc.set("model", s.model_from_file ? o.model : std::string("random:") + std::to_string(o.seed));
  doc.set("target", std::string(to_string(s.model->target().kind)));
  doc.set("class", s.model->target().class_index);
}

AttributionResult run_attribution(const Options& o, const Setup& s) {
  if (o.method == "gxi") return gradient_x_input(*s.model, s.input);
  return attribute(*s.model, s.input, s.baseline, path_spec(o), resolve_threads(o.threads));
}

ImageFormat image_format_for(const ImageTensor& t) {
  return t.channels() == 1 ? ImageFormat::pgm : ImageFormat::ppm;
}

// [0, 1] single-channel image of a non-negative matrix scaled by its max.
ImageTensor normalized(const RealMatrix& m) {
  double top = 0.0;
  for (double v : m.data()) top = std::max(top, v);
  RealMatrix out = m;
  if (top > 0.0)
    for (auto& v : out.data()) v /= top;
  return matrix_image(out);
}

int cmd_attribute(const Options& o) {
  const Setup s = load(o);
  const AttributionResult r = run_attribution(o, s);
  const Heatmap h = to_heatmap(r, o.clip);

  ResultDocument doc = to_document(r);
  describe(doc, o, s);
  doc.set("heatmap.clip_percentile", h.clip_percentile);
  doc.set("heatmap.clip_value", h.clip_value);
  doc.set("files.attribution", "attribution.tensor");
  doc.set("files.heatmap", "heatmap.pgm");

  Outputs out;
  out.add_image("attribution.tensor", r.map, ImageFormat::tensor);
  out.add_image("heatmap.pgm", matrix_image(h.values), ImageFormat::pgm);
  out.add("result.json", serialize_result(doc) + "\n");
  out.commit(o.out);
  return 0;
}

LocalizationTarget localization_target(const Options& o, std::size_t h, std::size_t w) {
  if (!o.mask.empty()) {
    const ImageTensor m = read_image(o.mask);
    if (m.height() != h || m.width() != w) throw InvalidInput("mask size differs from input");
    std::vector<std::uint8_t> bits(h * w, 0);
    for (std::size_t c = 0; c < m.channels(); ++c)
      for (std::size_t i = 0; i < h * w; ++i) bits[i] |= m[c * h * w + i] > 0.0;
    return LocalizationTarget::from_mask(h, w, std::move(bits));
  }
  std::vector<std::size_t> v;
  std::stringstream ss(o.bbox);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long n = -1;
    try {
      n = std::stoll(part, &used);
    } catch (const std::exception&) {
    }
    if (n < 0 || used != part.size()) throw InvalidInput("--bbox expects x0,y0,x1,y1 non-negative integers");
    v.push_back(static_cast<std::size_t>(n));
  }
  if (v.size() != 4) throw InvalidInput("--bbox expects x0,y0,x1,y1");
  return LocalizationTarget::from_bbox(h, w, v[0], v[1], v[2], v[3]);
}

int cmd_evaluate(const Options& o) {
  if (!o.mask.empty() && !o.bbox.empty()) throw InvalidInput("give at most one of --mask and --bbox");
  const Setup s = load(o);

  ResultDocument doc;
  describe(doc, o, s);
  RealMatrix heat;
  if (!o.attribution.empty()) {
    const ImageTensor map = read_image(o.attribution);
    if (map.shape() != s.input.shape()) throw InvalidInput("attribution shape differs from input");
    heat = channel_abs_sum(map);
    doc.set("heatmap_source", o.attribution);
  } else {
    const AttributionResult r = run_attribution(o, s);
    heat = channel_abs_sum(r.map);
    doc.set("method", r.method);
    doc.set("completeness_residual", r.completeness_residual);
    doc.set("heatmap_source", "computed");
  }

  // Perturbations replace pixels by the baseline the attribution started from.
  const ImageTensor& b = s.baseline;
  const auto ins = insertion_curve(*s.model, s.input, b, heat, o.fractions);
  const auto del = deletion_curve(*s.model, s.input, b, heat, o.fractions);
  const double auc_ins = auc(ins);
  const double auc_del = auc(del);
  doc.set("fractions", o.fractions);
  doc.set("auc_insertion", auc_ins);
  doc.set("auc_deletion", auc_del);
  doc.set("diff_id", auc_ins - auc_del);
  doc.set("files.insertion", "insertion.csv");
  doc.set("files.deletion", "deletion.csv");

  if (!o.mask.empty() || !o.bbox.empty()) {
    const auto target = localization_target(o, heat.rows(), heat.cols());
    doc.set("pointing_game", pointing_game(heat, target) == Pointing::hit ? "hit" : "miss");
    doc.set("topmass_iou", topmass_iou(heat, target, o.mass));
    doc.set("topmass_fraction", o.mass);
  }

  Outputs out;
  out.add("insertion.csv", curve_csv(ins));
  out.add("deletion.csv", curve_csv(del));
  out.add("result.json", serialize_result(doc) + "\n");
  out.commit(o.out);
  return 0;
}

std::string alpha_tag(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", a);
  return buf;
}

int cmd_analyze(const Options& o) {
  if (o.method == "gxi") throw InvalidInput("analyze needs a path method, not gxi");
  const Setup s = load(o);
  const PathSpec spec = path_spec(o);
  const PathGenerator gen(s.baseline, s.input, spec);
  const ImageTensor& origin = gen.origin();
  const ImageFormat fmt = image_format_for(s.input);
  const std::string ext = fmt == ImageFormat::pgm ? ".pgm" : ".ppm";

  Outputs out;
  ResultDocument doc;
  describe(doc, o, s);
  doc.set("method", method_tag(spec.family));
  doc.set("cutoff", o.cutoff);
  out.add_image("baseline" + ext, origin, fmt);

  std::vector<ImageTensor> points;
  points.reserve(spec.steps + 1);
  for (std::size_t m = 0; m <= spec.steps; ++m) points.push_back(gen.point(m));

  // Per-step |grad f (.) step| maps and the high-frequency trace.
  std::string trace = "alpha,hf_fraction\n";
  char name[64];
  for (std::size_t m = 0; m <= spec.steps; ++m) {
    trace += text::format_double(gen.alpha(m)) + "," +
             text::format_double(difference_hf_fraction(points[m], origin, o.cutoff)) + "\n";
    if (m == spec.steps) break;
    const ImageTensor g = s.model->gradient(points[m]);
    if (!g.all_finite()) throw NumericalFailure(m, "non-finite gradient");
    std::snprintf(name, sizeof name, "step_%04zu.pgm", m);
    out.add_image(name, normalized(channel_abs_sum(hadamard(g, points[m + 1] - points[m]))),
                  ImageFormat::pgm);
  }
  out.add("trace.csv", trace);

  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto m = static_cast<std::size_t>(std::lround(a * static_cast<double>(spec.steps)));
    const std::string tag = alpha_tag(gen.alpha(m));
    out.add_image("frame_" + tag + ext, points[m], fmt);
    const ImageTensor d = points[m] - origin;
    RealMatrix spectrum(d.height(), d.width());
    for (std::size_t c = 0; c < d.channels(); ++c) {
      const auto sm = dft2_magnitude(d.channel(c), true).magnitude;
      for (std::size_t i = 0; i < sm.size(); ++i) spectrum.data()[i] += sm.data()[i];
    }
    out.add_image("spectrum_" + tag + ".pgm", normalized(spectrum), ImageFormat::pgm);
    doc.set("hf_fraction." + tag, difference_hf_fraction(points[m], origin, o.cutoff));
  }
  doc.set("steps", spec.steps);
  out.add("result.json", serialize_result(doc) + "\n");
  out.commit(o.out);
  return 0;
}

int cmd_selftest(const Options& o) {
  std::optional<ModelWeights> w;
  if (!o.model.empty()) w = read_weights(o.model);
  const auto results = selftest::run_all(o.seed, w);
  std::cout << "spectral-attr selftest, seed " << o.seed << "\n" << selftest::report(results);
  for (const auto& r : results)
    if (!r.passed) return 4;
  return 0;
}

void add_common(CLI::App* c, Options& o, bool needs_out) {
  c->add_option("--input", o.input, "Input image (.pgm, .ppm or .tensor)")->required();
  c->add_option("--baseline", o.baseline, "zero | mean | blur | image file");
  c->add_option("--model", o.model, "tinymlp weights file (default: random weights from --seed)");
  c->add_option("--method", o.method, "sig | ig | gxi | blur | dct | laplacian")
      ->check([](const std::string& m) { return is_method(m) ? "" : "unknown method '" + m + "'"; });
  c->add_option("--steps", o.steps, "Integration steps M")->check(CLI::PositiveNumber);
  c->add_option("--overlap", o.overlap, "Window overlap in (0, 1]");
  c->add_option("--schedule", o.schedule, "linear | cosine | sigmoid | step");
  c->add_option("--svd-mode", o.svd_mode, "per-channel | joint");
  c->add_option("--target", o.target, "prob | logit");
  c->add_option("--class", o.class_index, "Target class (default: predicted class)");
  c->add_option("--blur-sigma", o.blur_sigma, "Largest blur sigma for blur path and baseline");
  c->add_option("--seed", o.seed, "Seed, recorded in result.json");
  c->add_option("--threads", o.threads, "Worker threads (0 = auto)");
  auto* out = c->add_option("--out", o.out, "Output directory");
  if (needs_out) out->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-path attribution toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* attr = app.add_subcommand("attribute", "Compute an attribution map");
  add_common(attr, o, true);
  attr->add_option("--clip", o.clip, "Heatmap clip percentile in (50, 100]");

  auto* eval = app.add_subcommand("evaluate", "Insertion/deletion, DiffID and localization metrics");
  add_common(eval, o, true);
  eval->add_option("--fractions", o.fractions, "Number of equal perturbation steps")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  eval->add_option("--mask", o.mask, "Localization mask image (nonzero = inside)");
  eval->add_option("--bbox", o.bbox, "Localization box x0,y0,x1,y1 (inclusive)");
  eval->add_option("--mass", o.mass, "Top-mass fraction for IoU");
  eval->add_option("--attribution", o.attribution, "Precomputed attribution tensor");

  auto* analyze = app.add_subcommand("analyze", "Path frames, per-step maps and spectra");
  add_common(analyze, o, true);
  analyze->add_option("--cutoff", o.cutoff, "High-frequency cutoff (fraction of Nyquist)");

  auto* self = app.add_subcommand("selftest", "Run the invariant suite");
  self->add_option("--seed", o.seed, "Seed");
  self->add_option("--model", o.model, "Use these weights for model-based checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "spectral-attr: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*attr) return cmd_attribute(o);
    if (*eval) return cmd_evaluate(o);
    if (*analyze) return cmd_analyze(o);
    return cmd_selftest(o);
  } catch (const IoError& e) {
    std::cerr << "spectral-attr: I/O error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "spectral-attr: parse error at byte " << e.byte_offset() << ": " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "spectral-attr: numerical failure at step " << e.step() << ": " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "spectral-attr: invalid argument: " << e.what() << "\n";
    return 1;
  }
}
