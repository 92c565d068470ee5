// Copyright 2026 The BMIML Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bmiml: train, predict, evaluate, synth and patchify from the command line.
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmiml/binary_io.h"
#include "bmiml/config.h"
#include "bmiml/dataset.h"
#include "bmiml/errors.h"
#include "bmiml/evaluation.h"
#include "bmiml/logging.h"
#include "bmiml/metrics.h"
#include "bmiml/netpbm.h"
#include "bmiml/parallel.h"
#include "bmiml/pipeline.h"

namespace {

using bmiml::ErrorKind;

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitMissing = 2;
constexpr int kExitShape = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitUsage = 64;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kExitMissing;
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kLabelArity: return kExitShape;
    case ErrorKind::kSingularSystem:
    case ErrorKind::kNumerical: return kExitNumerical;
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument: return kExitUsage;
    case ErrorKind::kParse:
    case ErrorKind::kCorrupt:
    case ErrorKind::kUnsupportedVersion: return kExitData;
  }
  return kExitData;
}

int report_error(std::string_view kind, const std::string& message, int code) {
  const nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << "\n";
  return code;
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

class Stopwatch {
 public:
  explicit Stopwatch(std::string label)
      : label_(std::move(label)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    const double s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    std::fprintf(stderr, "%s wall-clock time: %.3f s\n", label_.c_str(), s);
  }

 private:
  std::string label_;
  std::chrono::steady_clock::time_point start_;
};

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    bmiml::write_file(path, text);
  }
}

// Options shared by the commands that build a pipeline configuration.
struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string module;
  std::vector<double> tau;

  void add_to(CLI::App* cmd, bool with_module) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option("--set", sets, "override one configuration key (key=value)")
        ->allow_extra_args(false);
    cmd->add_option("--seed", seed, "seed for every random draw");
    if (with_module) {
      cmd->add_option("--module", module, "variant to run: awlel, smipr or bmiml")
          ->check(CLI::IsMember({"awlel", "smipr", "bmiml"}));
    }
    cmd->add_option("--tau", tau, "decision threshold(s) in (0, 1)")
        ->delimiter(',');
  }

  bmiml::RunConfig resolve() const {
    bmiml::RunConfig rc;
    if (!config_path.empty()) rc = bmiml::load_run_config(config_path);
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      bmiml::require(eq != std::string::npos, ErrorKind::kConfig,
                     "--set expects key=value, got '" + s + "'");
      bmiml::apply_setting(rc, s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) rc.pipeline.set_seed(*seed);
    if (!module.empty()) rc.pipeline.variant = bmiml::parse_variant(module);
    if (!tau.empty()) rc.pipeline.tau = tau;
    rc.pipeline.validate();
    return rc;
  }
};

std::string pick(const std::string& flag, const std::string& from_config,
                 const char* what) {
  const std::string& v = flag.empty() ? from_config : flag;
  bmiml::require(!v.empty(), ErrorKind::kConfig, std::string("no ") + what +
                                                     " given (flag or config)");
  return v;
}

bmiml::MimlDataset load_data(const std::string& path, const std::string& format) {
  const auto fmt = format.empty() ? bmiml::format_for_path(path)
                                  : bmiml::parse_format(format);
  return bmiml::load_dataset(path, fmt);
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data, data_format, out, loss_trace;
  ConfigOptions cfg;
};

int cmd_train(const TrainArgs& a) {
  Stopwatch timer("train");
  const bmiml::RunConfig rc = a.cfg.resolve();
  const bmiml::MimlDataset ds = load_data(pick(a.data, rc.data, "dataset"), a.data_format);
  const std::string out = pick(a.out, rc.model.empty() ? rc.out : rc.model, "model output path");
  const bmiml::BmimlFit fit = bmiml::fit_bmiml(ds, rc.pipeline);
  bmiml::save_model(fit.model, out);

  std::fprintf(stderr, "module %s: %zu bags, %ld classes\n",
               std::string(bmiml::variant_name(rc.pipeline.variant)).c_str(),
               ds.bags.size(), static_cast<long>(ds.num_classes));
  if (fit.awlel_state) {
    const auto& st = *fit.awlel_state;
    std::fprintf(stderr,
                 "awlel: %d iterations, converged=%s, objective %s -> %s, "
                 "T range [%s, %s]\n",
                 st.iterations, st.converged ? "yes" : "no",
                 st.steps.empty() ? "-" : shortest(st.steps.front().before).c_str(),
                 st.objective_history.empty()
                     ? "-"
                     : shortest(st.objective_history.back()).c_str(),
                 shortest(fit.model.t_min).c_str(), shortest(fit.model.t_max).c_str());
  }
  if (!fit.smipr_loss.empty()) {
    std::fprintf(stderr, "smipr: %zu epochs at eta %s, loss %s -> %s\n",
                 fit.smipr_loss.size() - 1, shortest(fit.smipr_eta).c_str(),
                 shortest(fit.smipr_loss.front()).c_str(),
                 shortest(fit.smipr_loss.back()).c_str());
  }
  if (!a.loss_trace.empty()) {
    std::string csv = "epoch,E\n";
    for (std::size_t e = 0; e < fit.smipr_loss.size(); ++e)
      csv += std::to_string(e) + "," + shortest(fit.smipr_loss[e]) + "\n";
    bmiml::write_file(a.loss_trace, csv);
  }
  std::fprintf(stderr, "model written to %s\n", out.c_str());
  return kExitOk;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string model, data, data_format, out, format = "csv";
  std::vector<double> tau;
  bool force_top1 = false;
};

int cmd_predict(const PredictArgs& a) {
  Stopwatch timer("predict");
  const bmiml::BmimlModel model = bmiml::load_model(a.model);
  const bmiml::MimlDataset ds = load_data(a.data, a.data_format);
  bmiml::PredictOptions opts;
  if (!a.tau.empty()) opts.tau = a.tau;
  if (a.force_top1) opts.force_top1 = true;
  const bmiml::PredictionSet p = bmiml::predict_bags(model, ds.bags, opts);
  const auto k = p.probabilities.cols();

  std::string text;
  if (a.format == "csv") {
    text = "bag_id";
    for (long c = 1; c <= k; ++c) text += ",prob_" + std::to_string(c);
    for (long c = 1; c <= k; ++c) text += ",label_" + std::to_string(c);
    text += "\n";
    for (long i = 0; i < p.probabilities.rows(); ++i) {
      text += p.bag_ids[static_cast<std::size_t>(i)];
      for (long c = 0; c < k; ++c) text += "," + shortest(p.probabilities(i, c));
      for (long c = 0; c < k; ++c) text += p.labels(i, c) > 0.5 ? ",1" : ",0";
      text += "\n";
    }
  } else {
    for (long i = 0; i < p.probabilities.rows(); ++i) {
      nlohmann::json j;
      j["bag_id"] = p.bag_ids[static_cast<std::size_t>(i)];
      j["probabilities"] = nlohmann::json::array();
      j["labels"] = nlohmann::json::array();
      for (long c = 0; c < k; ++c) {
        j["probabilities"].push_back(p.probabilities(i, c));
        j["labels"].push_back(p.labels(i, c) > 0.5 ? 1 : 0);
      }
      text += j.dump() + "\n";
    }
  }
  emit(a.out, text);
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string data, data_format, out, split, format = "json";
  int folds = 10;
  bool ablation = false, sample_std = false, stratified = false;
  ConfigOptions cfg;
};

int cmd_evaluate(const EvaluateArgs& a) {
  Stopwatch timer("evaluate");
  const bmiml::RunConfig rc = a.cfg.resolve();
  const bmiml::MimlDataset ds = load_data(pick(a.data, rc.data, "dataset"), a.data_format);
  const std::uint64_t seed = rc.pipeline.seed;

  std::vector<bmiml::MetricsReport> reports;
  if (!a.split.empty()) {
    const auto fractions = bmiml::parse_split_spec(a.split);
    if (a.ablation) {
      reports = bmiml::run_ablation(ds, rc.pipeline, fractions, seed, a.stratified);
    } else {
      reports.push_back(
          bmiml::evaluate_split(ds, rc.pipeline, fractions, seed, a.stratified));
    }
  } else if (a.ablation) {
    reports = bmiml::run_ablation_cv(ds, rc.pipeline, a.folds, seed, a.sample_std);
  } else {
    reports.push_back(
        bmiml::cross_validate(ds, rc.pipeline, a.folds, seed, a.sample_std));
  }

  std::string text;
  if (a.format == "table") {
    text = bmiml::format_ablation_table(reports);
  } else if (a.ablation) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(bmiml::report_to_json(r));
    text = nlohmann::json{{"ablation", j}}.dump() + "\n";
  } else {
    text = bmiml::report_to_json(reports.front()).dump() + "\n";
  }
  // The table also goes to stderr alongside JSON so a human sees a summary.
  if (a.format != "table") std::cerr << bmiml::format_ablation_table(reports);
  emit(a.out, text);
  return kExitOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  bmiml::SyntheticSpec spec;
  std::string out, format;
};

int cmd_synth(const SynthArgs& a) {
  Stopwatch timer("synth");
  const bmiml::MimlDataset ds = bmiml::generate_synthetic(a.spec);
  const auto fmt = a.format.empty() ? bmiml::format_for_path(a.out)
                                    : bmiml::parse_format(a.format);
  bmiml::save_dataset(ds, a.out, fmt);
  std::fprintf(stderr, "wrote %zu bags (%ld instances of dim %ld, %ld classes) to %s\n",
               ds.bags.size(), static_cast<long>(a.spec.instances_per_bag),
               static_cast<long>(ds.instance_dim), static_cast<long>(ds.num_classes),
               a.out.c_str());
  return kExitOk;
}

// ---- patchify -------------------------------------------------------------

struct PatchifyArgs {
  std::string manifest, out, format, mode = "strip", name = "patchified";
  long span = 64;
};

int cmd_patchify(const PatchifyArgs& a) {
  Stopwatch timer("patchify");
  const std::filesystem::path manifest(a.manifest);
  const std::string text = bmiml::read_file(manifest);
  const bmiml::PatchMode mode = bmiml::parse_patch_mode(a.mode);
  std::vector<bmiml::Bag> bags;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    bmiml::require(fields.size() >= 2, ErrorKind::kParse,
                   a.manifest + ": line " + std::to_string(line_no) +
                       ": expected image,label_1,...,label_K");
    std::filesystem::path img_path(fields[0]);
    if (img_path.is_relative()) img_path = manifest.parent_path() / img_path;
    const bmiml::Image img = bmiml::read_netpbm(img_path);
    bmiml::Bag bag;
    bag.id = img_path.stem().string();
    bag.instances = bmiml::patchify_image(img, mode, a.span);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      bmiml::require(f == "0" || f == "1" || f == "-1", ErrorKind::kParse,
                     a.manifest + ": line " + std::to_string(line_no) +
                         ": labels must be 0, 1 or -1");
      bag.labels.push_back(f == "1" ? 1 : 0);
    }
    bags.push_back(std::move(bag));
  }
  bmiml::require(!bags.empty(), ErrorKind::kParse, a.manifest + ": no images listed");
  const bmiml::MimlDataset ds = bmiml::make_dataset(a.name, std::move(bags));
  const auto fmt = a.format.empty() ? bmiml::format_for_path(a.out)
                                    : bmiml::parse_format(a.format);
  bmiml::save_dataset(ds, a.out, fmt);
  std::fprintf(stderr, "wrote %zu bags, %ld instances per bag of dim %ld to %s\n",
               ds.bags.size(), static_cast<long>(ds.bags.front().num_instances()),
               static_cast<long>(ds.instance_dim), a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-instance multi-label learning with label enhancement "
               "and distance-based regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bmiml 1.0 (model format " +
                                        std::to_string(bmiml::kModelFormatVersion) + ")");
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "worker thread cap (0 = all cores; env BMIML_THREADS)")
      ->envname("BMIML_THREADS");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "fit a model and write the model file");
  t->add_option("--data", train.data, "training dataset");
  t->add_option("--data-format", train.data_format, "csv-bags or binary-bags (default: by extension)");
  t->add_option("--out", train.out, "model file to write");
  t->add_option("--loss-trace", train.loss_trace, "write the regression loss per epoch as CSV (epoch,E)");
  train.cfg.add_to(t, true);

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "score bags with a trained model");
  p->add_option("--model", predict.model, "model file")->required();
  p->add_option("--data", predict.data, "dataset to score")->required();
  p->add_option("--data-format", predict.data_format, "csv-bags or binary-bags (default: by extension)");
  p->add_option("--out", predict.out, "output file (default stdout)");
  p->add_option("--format", predict.format, "csv or json (one object per line)")
      ->check(CLI::IsMember({"csv", "json"}));
  p->add_option("--tau", predict.tau, "threshold(s) overriding the stored ones")->delimiter(',');
  p->add_flag("--force-top1", predict.force_top1, "emit the top class when no class passes its threshold");

  EvaluateArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "cross-validate or run a fixed split");
  e->add_option("--data", evaluate.data, "dataset");
  e->add_option("--data-format", evaluate.data_format, "csv-bags or binary-bags (default: by extension)");
  e->add_option("--out", evaluate.out, "report file (default stdout)");
  auto* folds = e->add_option("--folds", evaluate.folds, "cross-validation folds")
                    ->check(CLI::Range(2, 1 << 30));
  e->add_option("--split", evaluate.split, "train/validation/test split such as 60/10/30")
      ->excludes(folds);
  e->add_flag("--ablation", evaluate.ablation, "run awlel, smipr and bmiml side by side");
  e->add_flag("--sample-std", evaluate.sample_std, "report sample (n-1) standard deviations");
  e->add_flag("--stratified", evaluate.stratified, "stratify the split by label vector");
  e->add_option("--format", evaluate.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  evaluate.cfg.add_to(e, true);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic dataset with planted prototypes");
  s->add_option("--bags", synth.spec.num_bags, "number of bags")->check(CLI::PositiveNumber);
  s->add_option("--instances", synth.spec.instances_per_bag, "instances per bag")->check(CLI::PositiveNumber);
  s->add_option("--dim", synth.spec.dim, "instance dimension")->check(CLI::PositiveNumber);
  s->add_option("--k", synth.spec.num_classes, "number of classes")->check(CLI::PositiveNumber);
  s->add_option("--noise", synth.spec.noise_std, "Gaussian noise standard deviation")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", synth.spec.seed, "generator seed");
  s->add_option("--out", synth.out, "dataset file to write")->required();
  s->add_option("--format", synth.format, "csv-bags or binary-bags (default: by extension)");

  PatchifyArgs patchify;
  auto* pf = app.add_subcommand("patchify", "cut PGM/PPM images into instance patches");
  pf->add_option("--manifest", patchify.manifest, "CSV lines: image_path,label_1,...,label_K")->required();
  pf->add_option("--span", patchify.span, "patch size in pixels")->check(CLI::PositiveNumber);
  pf->add_option("--mode", patchify.mode, "strip (row bands) or grid (square tiles)")
      ->check(CLI::IsMember({"strip", "grid"}));
  pf->add_option("--name", patchify.name, "dataset name");
  pf->add_option("--out", patchify.out, "dataset file to write")->required();
  pf->add_option("--format", patchify.format, "csv-bags or binary-bags (default: by extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    return report_error("usage", ex.what(), kExitUsage);
  }

  bmiml::set_max_threads(threads);
  try {
    if (t->parsed()) return cmd_train(train);
    if (p->parsed()) return cmd_predict(predict);
    if (e->parsed()) return cmd_evaluate(evaluate);
    if (s->parsed()) return cmd_synth(synth);
    if (pf->parsed()) return cmd_patchify(patchify);
  } catch (const bmiml::Error& ex) {
    return report_error(bmiml::error_kind_name(ex.kind()), ex.what(),
                        exit_code_for(ex.kind()));
  } catch (const std::exception& ex) {
    return report_error("internal", ex.what(), kExitData);
  }
  return kExitUsage;
}
