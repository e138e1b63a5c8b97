// Copyright 2026 The fieldctr Authors. All rights reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ctr: train, evaluate, score and inspect field-wise bi-interaction CTR models.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "fieldctr/checkpoint.h"
#include "fieldctr/data.h"
#include "fieldctr/errors.h"
#include "fieldctr/fwbi.h"
#include "fieldctr/metrics.h"
#include "fieldctr/network.h"
#include "fieldctr/synthetic.h"
#include "fieldctr/train.h"

namespace fs = std::filesystem;
using namespace fieldctr;

namespace {

struct TrainArgs {
  std::string data;
  std::string schema;
  std::string eval;
  std::string out;
  std::string label = "label";
  std::string delimiter = ",";
  std::string variant = "flen";
  std::string precision = "float";
  std::string mlp = "64,32";
  std::string dicefactor = "on";
  std::string head_activation = "identity";
  double lr = 0.01;
  double eps = 1e-8;
  double beta = 0.7;
  std::size_t epochs = 3;
  std::size_t batch_size = 512;
  std::size_t embed_dim = 32;
  std::size_t max_vocab = kDefaultMaxCardinality;
  std::size_t log_every_iters = 0;
  std::uint64_t seed = 1;
  bool per_example_mask = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

char parse_delimiter(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw Error("delimiter must be a single character");
  return s[0];
}

std::vector<std::size_t> parse_widths(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty() || s == "none") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  return out;
}

std::string fmt_auc(const std::optional<double>& auc) {
  return auc ? fmt::format("{}", *auc) : std::string("nan");
}

template <typename T>
int run_train(const TrainArgs& a) {
  DataFormat format;
  format.delimiter = parse_delimiter(a.delimiter);
  format.label_column = a.label;
  const auto raw_schema = parse_schema(read_file(a.schema));
  const auto vocab = build_vocabulary_from_file(a.data, raw_schema, format, a.max_vocab);
  const auto schema = vocab.resolve(raw_schema);
  const auto train = load_dataset(a.data, schema, vocab, format);
  const auto eval = load_dataset(a.eval, schema, vocab, format);
  if (train.empty()) throw EmptyData("training data is empty");
  if (eval.empty()) throw EmptyData("evaluation data is empty");

  ModelOptions base;
  base.embed_dim = a.embed_dim;
  base.mlp = parse_widths(a.mlp);
  base.head_activation = parse_activation(a.head_activation);
  if (a.dicefactor != "on" && a.dicefactor != "off") throw Error("--dicefactor takes on|off");
  base.dice = {a.dicefactor == "on", a.beta, a.per_example_mask};
  check_beta(a.beta);
  Model<T> model(make_config(parse_variant(a.variant), schema, base));
  model.initialize(a.seed);

  TrainOptions topts;
  topts.learning_rate = a.lr;
  topts.epsilon = a.eps;
  topts.batch_size = a.batch_size;
  topts.seed = a.seed;
  Trainer<T> trainer(model, topts);

  fs::create_directories(a.out);
  std::ofstream log(fs::path(a.out) / "metrics.csv");
  log << "epoch,train_logloss,eval_auc,eval_logloss,seconds\n";
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  std::uint64_t log_row = 0;
  const auto write_row = [&](double train_loss) {
    const auto report = evaluate(model, eval);
    ++log_row;
    log << log_row << ',' << fmt::format("{}", train_loss) << ',' << fmt_auc(report.auc) << ','
        << fmt::format("{}", report.mean_logloss) << ',' << fmt::format("{:.3f}", elapsed())
        << '\n';
    log.flush();
    fmt::print("row {}: train_logloss={:.6f} eval_auc={} eval_logloss={:.6f}\n", log_row,
               train_loss, fmt_auc(report.auc), report.mean_logloss);
  };

  typename Trainer<T>::StepCallback on_step;
  if (a.log_every_iters > 0) {
    on_step = [&](std::uint64_t step, double running) {
      if (step % a.log_every_iters == 0) write_row(running);
    };
  }
  for (std::size_t e = 0; e < a.epochs; ++e) {
    const auto summary = trainer.train_epoch(train, on_step);
    if (a.log_every_iters == 0) write_row(summary.mean_logloss);
    const auto path = fs::path(a.out) / fmt::format("epoch-{}.ckpt", summary.epoch);
    save_checkpoint(path.string(), model, vocab, format, trainer.state());
    save_checkpoint((fs::path(a.out) / "model.ckpt").string(), model, vocab, format,
                    trainer.state());
  }
  return 0;
}

template <typename T>
Dataset load_for(const Checkpoint<T>& ck, const std::string& path) {
  return load_dataset(path, ck.model.schema(), ck.vocab, ck.format);
}

template <typename T>
int run_eval(const std::string& model_path, const std::string& data) {
  const auto ck = load_checkpoint<T>(model_path);
  const auto report = evaluate(ck.model, load_for(ck, data));
  fmt::print("auc={} logloss={} n={} seconds={:.3f}\n", fmt_auc(report.auc), report.mean_logloss,
             report.n_examples, report.wall_seconds);
  return 0;
}

template <typename T>
int run_predict(const std::string& model_path, const std::string& data, const std::string& out) {
  const auto ck = load_checkpoint<T>(model_path);
  const auto scores = predict_all(ck.model, load_for(ck, data));
  std::ofstream os(out);
  if (!os) throw Error("cannot write '" + out + "'");
  for (const double p : scores) os << fmt::format("{}", p) << '\n';
  return 0;
}

template <typename T>
int run_bench(const std::string& model_path, const std::string& data, double seconds,
              std::size_t batch_size) {
  if (!(seconds > 0)) throw Error("--seconds must be positive");
  const auto ck = load_checkpoint<T>(model_path);
  const auto t = benchmark_throughput(ck.model, load_for(ck, data), seconds, batch_size);
  fmt::print("train_instances_per_second={:.1f}\ninference_instances_per_second={:.1f}\n",
             t.train_per_second, t.inference_per_second);
  return 0;
}

template <typename T>
int run_inspect(const std::string& model_path) {
  const auto ck = load_checkpoint<T>(model_path);
  const auto& schema = ck.model.schema();
  const auto c = param_count(schema, ck.model.options());
  fmt::print("variant: {}\nfeature fields: {}\nhierarchical fields: {}\nembed_dim: {}\n",
             to_string(ck.model.options().variant), schema.field_count(),
             schema.hierarchy_count(), ck.model.dim());
  fmt::print("trained steps: {} epochs: {}\n", ck.state.step, ck.state.epoch);
  fmt::print("params.embedding: {}\nparams.linear: {}\nparams.pair_weights: {}\n", c.embedding,
             c.linear, c.pair_weights);
  fmt::print("params.projection: {}\nparams.mlp: {}\nparams.head: {}\nparams.total: {}\n",
             c.projection, c.mlp, c.head, c.total());
  fmt::print("complexity: {}\n", c.complexity);
  return 0;
}

// Calls fn with a value of the scalar type named by `precision`.
template <typename Fn>
int with_precision(const std::string& precision, Fn&& fn) {
  if (precision == "float") return fn(float{});
  if (precision == "double") return fn(double{});
  throw Error("unknown precision '" + precision + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field-wise bi-interaction CTR models"};
  app.require_subcommand(1);

  TrainArgs t;
  auto* train = app.add_subcommand("train", "Train a model; writes checkpoints and metrics.csv");
  train->add_option("--data", t.data, "Training data (header-bearing delimited text)")->required();
  train->add_option("--schema", t.schema, "Schema document")->required();
  train->add_option("--eval", t.eval, "Evaluation data")->required();
  train->add_option("--out", t.out, "Output directory")->required();
  train->add_option("--label", t.label, "Label column name")->capture_default_str();
  train->add_option("--delimiter", t.delimiter, "Cell delimiter")->capture_default_str();
  train->add_option("--variant", t.variant, "flen|fm|fwfm|linear")->capture_default_str();
  train->add_option("--precision", t.precision, "float|double")->capture_default_str();
  train->add_option("--lr", t.lr, "AdaGrad learning rate")->capture_default_str();
  train->add_option("--eps", t.eps, "AdaGrad epsilon")->capture_default_str();
  train->add_option("--epochs", t.epochs)->capture_default_str();
  train->add_option("--batch-size", t.batch_size)->capture_default_str();
  train->add_option("--embed-dim", t.embed_dim)->capture_default_str();
  train->add_option("--mlp", t.mlp, "Hidden widths, e.g. 64,32 (or none)")->capture_default_str();
  train->add_option("--seed", t.seed)->capture_default_str();
  train->add_option("--dicefactor", t.dicefactor, "on|off")->capture_default_str();
  train->add_option("--dicefactor-beta", t.beta, "Keep probability")->capture_default_str();
  train->add_flag("--per-example-mask", t.per_example_mask, "Draw a mask per example");
  train->add_option("--head-activation", t.head_activation, "identity|relu")
      ->capture_default_str();
  train->add_option("--max-vocab", t.max_vocab, "Cap for auto dictionary cardinality")
      ->capture_default_str();
  train->add_option("--log-every-iters", t.log_every_iters,
                    "Log a metrics row every N optimizer steps instead of per epoch");

  std::string model;
  std::string data;
  std::string out;
  double seconds = 0;
  std::size_t bench_batch = 512;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--model", model)->required();
  eval->add_option("--data", data)->required();

  auto* predict = app.add_subcommand("predict", "Write one probability per input row");
  predict->add_option("--model", model)->required();
  predict->add_option("--data", data)->required();
  predict->add_option("--out", out)->required();

  auto* bench = app.add_subcommand("bench", "Measure train/inference instances per second");
  bench->add_option("--model", model)->required();
  bench->add_option("--data", data)->required();
  bench->add_option("--seconds", seconds)->required();
  bench->add_option("--batch-size", bench_batch)->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Print parameter accounting");
  inspect->add_option("--model", model)->required();

  SyntheticOptions synth_opts;
  std::string schema_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with a planted interaction");
  synth->add_option("--rows", synth_opts.rows)->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth->add_option("--noise", synth_opts.noise)->capture_default_str();
  synth->add_option("--out", out, "CSV output path")->required();
  synth->add_option("--schema-out", schema_out, "Also write the schema document here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      return with_precision(t.precision, [&](auto tag) { return run_train<decltype(tag)>(t); });
    }
    if (*eval) {
      return with_precision(checkpoint_precision(model), [&](auto tag) {
        return run_eval<decltype(tag)>(model, data);
      });
    }
    if (*predict) {
      return with_precision(checkpoint_precision(model), [&](auto tag) {
        return run_predict<decltype(tag)>(model, data, out);
      });
    }
    if (*bench) {
      return with_precision(checkpoint_precision(model), [&](auto tag) {
        return run_bench<decltype(tag)>(model, data, seconds, bench_batch);
      });
    }
    if (*inspect) {
      return with_precision(checkpoint_precision(model),
                            [&](auto tag) { return run_inspect<decltype(tag)>(model); });
    }
    if (*synth) {
      std::ofstream os(out);
      if (!os) throw Error("cannot write '" + out + "'");
      write_synthetic_csv(os, synth_opts);
      if (!schema_out.empty()) {
        std::ofstream ss(schema_out);
        ss << synthetic_schema_text();
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ctr: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
