// SPDX-License-Identifier: Apache-2.0
//
// hbsched - joint user scheduling and hybrid beamforming for mmWave MIMO-OFDM
// Copyright (C) 2026 The hbsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hbs/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace hbs {

namespace {

constexpr char kDatasetMagic[8] = {'H', 'B', 'S', 'D', 'A', 'T', 'A', '\0'};
constexpr char kModelMagic[8] = {'H', 'B', 'S', 'M', 'L', 'P', '\0', '\0'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kDatasetStream = 4;
constexpr Eigen::Index kEvalChunk = 512;

void normalize_segment(Eigen::VectorXf& v, int offset, int length) {
  auto seg = v.segment(offset, length);
  const float peak = seg.cwiseAbs().maxCoeff();
  if (peak > 0.0f) seg /= peak;
}

template <typename T>
void put(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) throw InputError("truncated file: " + path);
  return value;
}

void check_magic(std::istream& is, const char (&magic)[8], const std::string& path) {
  char buf[8];
  if (!is.read(buf, 8) || std::memcmp(buf, magic, 8) != 0) throw InputError("bad file signature: " + path);
  if (get<std::uint32_t>(is, path) != kFormatVersion) throw InputError("unsupported file version: " + path);
}

class LearnedPolicy final : public SchedulingPolicy {
 public:
  explicit LearnedPolicy(std::shared_ptr<const Mlp> model) : model_(std::move(model)) {
    if (!model_) throw InputError("learned policy: null model");
  }
  std::string name() const override { return "learned"; }
  ScheduleDecision decide(const SlotContext& ctx) override {
    const auto start = std::chrono::steady_clock::now();
    const Eigen::VectorXf x = build_features(ctx.effective.prb_average(), ctx.assignment, ctx.weights);
    const double build = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ScheduleDecision d = schedule_learned(*model_, x, ctx.evaluator, ctx.config.i_max);
    d.timings.search += build;
    return d;
  }

 private:
  std::shared_ptr<const Mlp> model_;
};

struct AdamState {
  std::vector<Mlp::Layer> m, v;
  long step = 0;
};

}  // namespace

Eigen::VectorXf build_features(const CMatrix& u_avg, const BeamAssignment& assignment,
                               std::span<const double> weights) {
  const int n = static_cast<int>(u_avg.rows());
  if (u_avg.cols() != n || assignment.num_users() != n || static_cast<int>(weights.size()) != n) {
    throw InputError("build_features: inconsistent user counts");
  }
  const FeatureLayout layout{n, static_cast<int>(assignment.analog.rows())};
  Eigen::VectorXf x(layout.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      x(layout.amplitude_offset() + a * n + b) = static_cast<float>(std::abs(u_avg(a, b)));
      x(layout.phase_offset() + a * n + b) = static_cast<float>(std::arg(u_avg(a, b)));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int e = 0; e < layout.n_tx; ++e) {
      x(layout.beam_offset() + i * layout.n_tx + e) = static_cast<float>(std::arg(assignment.analog(e, i)));
    }
    x(layout.weight_offset() + i) = static_cast<float>(weights[i]);
  }
  normalize_segment(x, layout.amplitude_offset(), n * n);
  normalize_segment(x, layout.phase_offset(), n * n);
  normalize_segment(x, layout.beam_offset(), layout.n_tx * n);
  normalize_segment(x, layout.weight_offset(), n);
  return x;
}

std::vector<int> network_dims(const FeatureLayout& layout, const std::vector<int>& hidden) {
  std::vector<int> dims{layout.size()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(layout.num_users);
  return dims;
}

void Dataset::append(const Eigen::VectorXf& x, const UserSet& selected) {
  if (features.cols() == 0) features.resize(x.size(), 0);
  if (x.size() != features.rows()) throw InputError("Dataset: feature length mismatch");
  if (static_cast<int>(selected.size()) > i_max) throw InputError("Dataset: label exceeds i_max");
  const Eigen::Index c = features.cols();
  features.conservativeResize(Eigen::NoChange, c + 1);
  labels.conservativeResize(num_users, c + 1);
  features.col(c) = x;
  labels.col(c).setZero();
  for (int i : selected) {
    if (i < 0 || i >= num_users) throw InputError("Dataset: label index out of range");
    labels(i, c) = 1.0f;
  }
}

std::pair<Dataset, Dataset> Dataset::split(double beta) const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("Dataset::split: beta must lie in [0, 1]");
  const auto n_train = static_cast<Eigen::Index>(std::llround(beta * static_cast<double>(size())));
  Dataset a{num_users, i_max, features.leftCols(n_train), labels.leftCols(n_train)};
  Dataset b{num_users, i_max, features.rightCols(size() - n_train), labels.rightCols(size() - n_train)};
  return {std::move(a), std::move(b)};
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  os.write(kDatasetMagic, 8);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(ds.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.feature_size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.num_users));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.i_max));
  for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
    os.write(reinterpret_cast<const char*>(ds.features.col(c).data()),
             static_cast<std::streamsize>(sizeof(float) * ds.features.rows()));
    for (Eigen::Index r = 0; r < ds.labels.rows(); ++r) put<std::uint8_t>(os, ds.labels(r, c) > 0.5f ? 1 : 0);
  }
  if (!os) throw InputError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path);
  check_magic(is, kDatasetMagic, path);
  const auto n = get<std::uint64_t>(is, path);
  const auto n_features = get<std::uint32_t>(is, path);
  Dataset ds;
  ds.num_users = static_cast<int>(get<std::uint32_t>(is, path));
  ds.i_max = static_cast<int>(get<std::uint32_t>(is, path));
  ds.features.resize(n_features, static_cast<Eigen::Index>(n));
  ds.labels.resize(ds.num_users, static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(n); ++c) {
    if (!is.read(reinterpret_cast<char*>(ds.features.col(c).data()),
                 static_cast<std::streamsize>(sizeof(float) * n_features))) {
      throw InputError("truncated file: " + path);
    }
    for (int r = 0; r < ds.num_users; ++r) ds.labels(r, c) = static_cast<float>(get<std::uint8_t>(is, path));
  }
  return ds;
}

Dataset generate_dataset(const SimConfig& base, int episodes, int slots, std::uint64_t seed) {
  if (episodes < 0 || slots < 0) throw InputError("generate_dataset: negative sizes");
  Dataset ds;
  ds.num_users = base.num_users;
  ds.i_max = base.i_max;
  ds.features.resize(FeatureLayout{base.num_users, base.n_tx()}.size(), 0);
  ds.labels.resize(base.num_users, 0);
  if (episodes == 0 || slots == 0) return ds;

  const long total = static_cast<long>(episodes) * slots;
  Eigen::MatrixXf features(ds.features.rows(), total);
  Eigen::MatrixXf labels = Eigen::MatrixXf::Zero(base.num_users, total);
  long col = 0;
  auto policy = make_policy("greedy-inc");

  for (int e = 0; e < episodes; ++e) {
    SimConfig cfg = base;
    cfg.scheduler = "greedy-inc";
    cfg.seed = make_stream(seed, {kDatasetStream, static_cast<std::uint64_t>(e)})();
    cfg.n_long_blocks = (slots + cfg.slots_per_long_block - 1) / cfg.slots_per_long_block;
    Simulator sim(cfg);
    sim.set_observer([&](const SlotView& view) {
      features.col(col) = build_features(view.context.effective.prb_average(), view.context.assignment,
                                         view.context.weights);
      for (int i : view.decision.selected) labels(i, col) = 1.0f;
      ++col;
    });
    int done = 0;
    while (done < slots) {
      sim.begin_long_block();
      for (int s = 0; s < cfg.slots_per_long_block && done < slots; ++s, ++done) sim.run_short_block(*policy);
    }
  }
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  return ds;
}

double dataset_loss(const Mlp& model, const Dataset& ds) {
  if (ds.size() == 0) throw InputError("dataset_loss: empty dataset");
  double total = 0.0;
  for (Eigen::Index c = 0; c < ds.size(); c += kEvalChunk) {
    const Eigen::Index w = std::min<Eigen::Index>(kEvalChunk, ds.size() - c);
    total += static_cast<double>(model.loss(ds.features.middleCols(c, w), ds.labels.middleCols(c, w))) *
             static_cast<double>(w);
  }
  return total / static_cast<double>(ds.size());
}

TrainResult train(const Dataset& train_set, const TrainOptions& options) {
  if (train_set.size() == 0) throw InputError("train: empty dataset");
  Rng rng = make_stream(options.seed, {5});
  std::vector<int> dims{train_set.feature_size()};
  dims.insert(dims.end(), options.hidden.begin(), options.hidden.end());
  dims.push_back(train_set.num_users);
  return train(train_set, Mlp::glorot(dims, rng), options);
}

TrainResult train(const Dataset& train_set, Mlp model, const TrainOptions& options) {
  if (train_set.size() == 0) throw InputError("train: empty dataset");
  if (options.batch_size < 1 || options.epochs < 0 || !(options.learning_rate > 0.0)) {
    throw InputError("train: invalid options");
  }
  if (options.optimizer != "sgd" && options.optimizer != "adam") {
    throw InputError("train: unknown optimizer '" + options.optimizer + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  Rng rng = make_stream(options.seed, {6});

  TrainResult result;
  result.initial_loss = dataset_loss(model, train_set);

  const Eigen::Index n = train_set.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Mlp::Layer> grads;
  AdamState adam;
  if (options.optimizer == "adam") {
    for (const auto& layer : model.layers()) {
      adam.m.push_back({Eigen::MatrixXf::Zero(layer.weight.rows(), layer.weight.cols()),
                        Eigen::VectorXf::Zero(layer.bias.size())});
    }
    adam.v = adam.m;
  }
  const float lr = static_cast<float>(options.learning_rate);
  Eigen::MatrixXf xb(train_set.feature_size(), options.batch_size);
  Eigen::MatrixXf yb(train_set.num_users, options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double acc = 0.0;
    for (Eigen::Index b = 0; b < n; b += options.batch_size) {
      const Eigen::Index w = std::min<Eigen::Index>(options.batch_size, n - b);
      xb.resize(Eigen::NoChange, w);
      yb.resize(Eigen::NoChange, w);
      for (Eigen::Index j = 0; j < w; ++j) {
        xb.col(j) = train_set.features.col(order[b + j]);
        yb.col(j) = train_set.labels.col(order[b + j]);
      }
      acc += static_cast<double>(model.loss(xb, yb, &grads)) * static_cast<double>(w);
      auto& layers = model.layers();
      if (options.optimizer == "sgd") {
        for (std::size_t l = 0; l < layers.size(); ++l) {
          layers[l].weight -= lr * grads[l].weight;
          layers[l].bias -= lr * grads[l].bias;
        }
      } else {
        constexpr float b1 = 0.9f, b2 = 0.999f, eps = 1e-8f;
        ++adam.step;
        const float c1 = 1.0f - std::pow(b1, static_cast<float>(adam.step));
        const float c2 = 1.0f - std::pow(b2, static_cast<float>(adam.step));
        auto step = [&](auto& p, auto& m, auto& v, const auto& g) {
          m = b1 * m + (1.0f - b1) * g;
          v = b2 * v + (1.0f - b2) * g.cwiseAbs2();
          p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
        };
        for (std::size_t l = 0; l < layers.size(); ++l) {
          step(layers[l].weight, adam.m[l].weight, adam.v[l].weight, grads[l].weight);
          step(layers[l].bias, adam.m[l].bias, adam.v[l].bias, grads[l].bias);
        }
      }
    }
    result.epoch_loss.push_back(acc / static_cast<double>(n));
    if (options.on_epoch) options.on_epoch(epoch + 1, result.epoch_loss.back());
  }
  result.model = std::move(model);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ClassifierReport evaluate_classifier(const Mlp& model, const Dataset& ds) {
  if (ds.size() == 0) throw InputError("evaluate_classifier: empty dataset");
  ClassifierReport rep;
  long correct = 0, zeros = 0, positives = 0, predicted = 0;
  for (Eigen::Index c = 0; c < ds.size(); c += kEvalChunk) {
    const Eigen::Index w = std::min<Eigen::Index>(kEvalChunk, ds.size() - c);
    const Eigen::MatrixXf z = model.forward(Eigen::MatrixXf(ds.features.middleCols(c, w)));
    for (Eigen::Index j = 0; j < w; ++j) {
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const bool label = ds.labels(r, c + j) > 0.5f;
        const bool pred = z(r, j) >= 0.5f;
        correct += label == pred;
        zeros += !label;
        positives += label;
        predicted += pred;
      }
    }
  }
  const double total = static_cast<double>(ds.size()) * ds.num_users;
  rep.accuracy = static_cast<double>(correct) / total;
  rep.zero_baseline = static_cast<double>(zeros) / total;
  rep.positive_rate = static_cast<double>(positives) / total;
  rep.predicted_rate = static_cast<double>(predicted) / total;
  rep.loss = dataset_loss(model, ds);
  return rep;
}

UserSet round_outputs(const Eigen::VectorXf& z) {
  UserSet out;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) >= 0.5f) out.push_back(static_cast<int>(i));
  }
  return out;
}

ScheduleDecision schedule_learned(const Mlp& model, const Eigen::VectorXf& features, const CandidateEvaluator& evaluator,
                                  int i_max) {
  if (model.output_size() != evaluator.num_users()) throw InputError("schedule_learned: model/user count mismatch");
  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXf z = model.forward(features);
  const UserSet chosen = selection_filter(round_outputs(z), evaluator.weights(), i_max);
  const double inference = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ScheduleDecision d = decide_fixed(evaluator, chosen);
  d.evaluation_count = 0;
  d.timings.search += inference;
  return d;
}

std::unique_ptr<SchedulingPolicy> make_learned_policy(std::shared_ptr<const Mlp> model) {
  return std::make_unique<LearnedPolicy>(std::move(model));
}

std::unique_ptr<SchedulingPolicy> make_any_policy(const std::string& name, std::shared_ptr<const Mlp> model) {
  if (name == "learned") return make_learned_policy(std::move(model));
  return make_policy(name);
}

void save_model(const std::string& path, const Mlp& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  os.write(kModelMagic, 8);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(model.dims().size()));
  for (int d : model.dims()) put<std::int32_t>(os, d);
  for (const auto& layer : model.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) put<double>(os, layer.weight(r, c));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) put<double>(os, layer.bias(r));
  }
  if (!os) throw InputError("write failed: " + path);
}

Mlp load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path);
  check_magic(is, kModelMagic, path);
  const auto n_dims = get<std::uint32_t>(is, path);
  if (n_dims < 2 || n_dims > 64) throw InputError("bad layer count in " + path);
  std::vector<int> dims(n_dims);
  for (auto& d : dims) d = get<std::int32_t>(is, path);
  Mlp model(dims);
  for (auto& layer : model.layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = static_cast<float>(get<double>(is, path));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = static_cast<float>(get<double>(is, path));
  }
  return model;
}

}  // namespace hbs
