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

#include "fieldctr/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>

#include "fieldctr/errors.h"

namespace fieldctr {

namespace {

template <typename T>
constexpr std::string_view precision_name() {
  return std::is_same_v<T, float> ? "float" : "double";
}

template <typename U>
void put_le(std::ostream& out, U v) {
  static_assert(std::is_unsigned_v<U>);
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw CheckpointError("checkpoint truncated");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

template <typename T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

template <typename T>
void put_tensor(std::ostream& out, const std::vector<T>& v) {
  put_le<std::uint64_t>(out, v.size());
  for (const T x : v) put_le(out, std::bit_cast<Bits<T>>(x));
}

template <typename T>
void get_tensor(std::istream& in, std::vector<T>& v) {
  const auto n = get_le<std::uint64_t>(in);
  if (n != v.size()) {
    throw CheckpointError("tensor has " + std::to_string(n) + " entries, expected " +
                          std::to_string(v.size()));
  }
  for (auto& x : v) x = std::bit_cast<T>(get_le<Bits<T>>(in));
}

template <typename T>
void put_scalar(std::ostream& out, T x) {
  put_le(out, std::bit_cast<Bits<T>>(x));
}

template <typename T>
T get_scalar(std::istream& in) {
  return std::bit_cast<T>(get_le<Bits<T>>(in));
}

// Visits parameter tensors in checkpoint order.
template <typename T, typename Model_, typename Fn>
void visit_params(Model_& model, Fn&& fn) {
  for (std::size_t n = 0; n < model.embedding().field_count(); ++n) fn(model.embedding().matrix(n));
  for (auto& w : model.fwbi().linear) fn(w);
  fn(model.fwbi().r.data());
  fn(model.fwbi().projection);
  for (auto& layer : model.mlp().layers) {
    fn(layer.weight);
    fn(layer.bias);
  }
  fn(model.head().w);
}

template <typename T, typename State, typename Fn>
void visit_state(State& state, Fn&& fn) {
  for (auto& e : state.embedding) fn(e);
  for (auto& w : state.linear) fn(w);
  fn(state.r);
  fn(state.projection);
  for (auto& layer : state.mlp) {
    fn(layer.weight);
    fn(layer.bias);
  }
  fn(state.head);
}

std::string optional_text(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string("-");
}

std::optional<double> parse_optional(const std::string& s) {
  if (s == "-") return std::nullopt;
  return std::stod(s);
}

std::string mlp_text(const std::vector<std::size_t>& mlp) {
  if (mlp.empty()) return "-";
  return fmt::format("{}", fmt::join(mlp, ","));
}

std::vector<std::size_t> parse_mlp(const std::string& s) {
  std::vector<std::size_t> out;
  if (s == "-") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  return out;
}

// Reads "key value" and checks the key.
std::string expect(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError("checkpoint header truncated");
  const auto space = line.find(' ');
  if (line.substr(0, space) != key) {
    throw CheckpointError("checkpoint header: expected '" + std::string(key) + "', got '" + line +
                          "'");
  }
  return space == std::string::npos ? std::string() : line.substr(space + 1);
}

}  // namespace

template <typename T>
void write_checkpoint(std::ostream& out, const Model<T>& model, const Vocabulary& vocab,
                      const DataFormat& format, const TrainState<T>& state) {
  const auto& o = model.options();
  const std::string schema_text = format_schema(model.schema());
  out << "fieldctr-checkpoint " << kCheckpointVersion << '\n'
      << "precision " << precision_name<T>() << '\n'
      << "label " << format.label_column << '\n'
      << "delimiter " << static_cast<int>(format.delimiter) << '\n'
      << "multi_hot_delimiter " << static_cast<int>(format.multi_hot_delimiter) << '\n'
      << "variant " << to_string(o.variant) << '\n'
      << "embed_dim " << o.embed_dim << '\n'
      << "mlp " << mlp_text(o.mlp) << '\n'
      << "fwbi_activation " << to_string(o.fwbi_activation) << '\n'
      << "head_activation " << to_string(o.head_activation) << '\n'
      << "dice " << (o.dice.enabled ? 1 : 0) << ' ' << fmt::format("{}", o.dice.beta) << ' '
      << (o.dice.per_example ? 1 : 0) << '\n'
      << "fixed_diagonal " << optional_text(o.fixed_diagonal) << '\n'
      << "fixed_off_diagonal " << optional_text(o.fixed_off_diagonal) << '\n'
      << "identity_projection " << (o.identity_projection ? 1 : 0) << '\n'
      << "sum_head " << (o.sum_head ? 1 : 0) << '\n'
      << "train " << state.step << ' ' << state.epoch << ' ' << state.seed << '\n'
      << "schema " << std::count(schema_text.begin(), schema_text.end(), '\n') << '\n'
      << schema_text << "end\n";

  put_le<std::uint64_t>(out, vocab.field_count());
  for (std::size_t n = 0; n < vocab.field_count(); ++n) {
    put_le<std::uint64_t>(out, vocab.limits()[n]);
    put_le<std::uint64_t>(out, vocab.values(n).size());
    for (const auto& v : vocab.values(n)) {
      put_le<std::uint64_t>(out, v.size());
      out.write(v.data(), static_cast<std::streamsize>(v.size()));
    }
  }
  put_scalar(out, model.fwbi().w0);
  visit_params<T>(model, [&](const std::vector<T>& t) { put_tensor(out, t); });
  put_scalar(out, state.w0);
  visit_state<T>(state, [&](const std::vector<T>& t) { put_tensor(out, t); });
  if (!out) throw CheckpointError("failed writing checkpoint");
}

template <typename T>
Checkpoint<T> read_checkpoint(std::istream& in) {
  const auto version = expect(in, "fieldctr-checkpoint");
  if (version != std::to_string(kCheckpointVersion)) {
    throw CheckpointError("unsupported checkpoint version '" + version + "'");
  }
  const auto precision = expect(in, "precision");
  if (precision != precision_name<T>()) {
    throw CheckpointError("checkpoint holds " + precision + " parameters, requested " +
                          std::string(precision_name<T>()));
  }
  Checkpoint<T> ck;
  ModelOptions o;
  try {
    ck.format.label_column = expect(in, "label");
    ck.format.delimiter = static_cast<char>(std::stoi(expect(in, "delimiter")));
    ck.format.multi_hot_delimiter = static_cast<char>(std::stoi(expect(in, "multi_hot_delimiter")));
    o.variant = parse_variant(expect(in, "variant"));
    o.embed_dim = std::stoul(expect(in, "embed_dim"));
    o.mlp = parse_mlp(expect(in, "mlp"));
    o.fwbi_activation = parse_activation(expect(in, "fwbi_activation"));
    o.head_activation = parse_activation(expect(in, "head_activation"));
    {
      std::istringstream ds(expect(in, "dice"));
      int enabled = 0;
      int per_example = 0;
      std::string beta;
      ds >> enabled >> beta >> per_example;
      o.dice = {enabled != 0, std::stod(beta), per_example != 0};
    }
    o.fixed_diagonal = parse_optional(expect(in, "fixed_diagonal"));
    o.fixed_off_diagonal = parse_optional(expect(in, "fixed_off_diagonal"));
    o.identity_projection = expect(in, "identity_projection") == "1";
    o.sum_head = expect(in, "sum_head") == "1";
    std::istringstream ts(expect(in, "train"));
    ts >> ck.state.step >> ck.state.epoch >> ck.state.seed;
    const std::size_t lines = std::stoul(expect(in, "schema"));
    std::string schema_text;
    std::string line;
    for (std::size_t i = 0; i < lines && std::getline(in, line); ++i) schema_text += line + '\n';
    if (!std::getline(in, line) || line != "end") throw CheckpointError("checkpoint header not terminated");
    const auto step = ck.state.step;
    const auto epoch = ck.state.epoch;
    const auto seed = ck.state.seed;
    ck.model = Model<T>(parse_schema(schema_text), o);
    ck.state = TrainState<T>::for_model(ck.model, seed);
    ck.state.step = step;
    ck.state.epoch = epoch;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }

  const auto fields = get_le<std::uint64_t>(in);
  std::vector<std::vector<std::string>> values(fields);
  std::vector<std::size_t> limits(fields);
  for (std::size_t n = 0; n < fields; ++n) {
    limits[n] = get_le<std::uint64_t>(in);
    values[n].resize(get_le<std::uint64_t>(in));
    for (auto& v : values[n]) {
      v.resize(get_le<std::uint64_t>(in));
      if (!in.read(v.data(), static_cast<std::streamsize>(v.size()))) {
        throw CheckpointError("checkpoint truncated in vocabulary");
      }
    }
  }
  ck.vocab = Vocabulary::from_values(std::move(values), std::move(limits));
  ck.model.fwbi().w0 = get_scalar<T>(in);
  visit_params<T>(ck.model, [&](std::vector<T>& t) { get_tensor(in, t); });
  ck.state.w0 = get_scalar<T>(in);
  visit_state<T>(ck.state, [&](std::vector<T>& t) { get_tensor(in, t); });
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes in checkpoint");
  return ck;
}

template <typename T>
void save_checkpoint(const std::string& path, const Model<T>& model, const Vocabulary& vocab,
                     const DataFormat& format, const TrainState<T>& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write '" + path + "'");
  write_checkpoint(out, model, vocab, format, state);
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path + "'");
  return read_checkpoint<T>(in);
}

std::string checkpoint_precision(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path + "'");
  expect(in, "fieldctr-checkpoint");
  return expect(in, "precision");
}

#define FIELDCTR_INSTANTIATE(T)                                                                \
  template void write_checkpoint<T>(std::ostream&, const Model<T>&, const Vocabulary&,         \
                                    const DataFormat&, const TrainState<T>&);                  \
  template Checkpoint<T> read_checkpoint<T>(std::istream&);                                    \
  template void save_checkpoint<T>(const std::string&, const Model<T>&, const Vocabulary&,     \
                                   const DataFormat&, const TrainState<T>&);                   \
  template Checkpoint<T> load_checkpoint<T>(const std::string&);

FIELDCTR_INSTANTIATE(float)
FIELDCTR_INSTANTIATE(double)
#undef FIELDCTR_INSTANTIATE

}  // namespace fieldctr
