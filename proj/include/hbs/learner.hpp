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

#ifndef HBS_LEARNER_HPP
#define HBS_LEARNER_HPP

#include "hbs/beamforming.hpp"
#include "hbs/config.hpp"
#include "hbs/mlp.hpp"
#include "hbs/protocol.hpp"
#include "hbs/schedulers.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hbs {

/// Input layout: [|U_avg| (I^2) | arg U_avg (I^2) | beam phases (N_TX per user) | weights (I)].
/// Matrices are flattened row-major, beams user-major.
struct FeatureLayout {
  int num_users = 0;
  int n_tx = 0;

  int amplitude_offset() const { return 0; }
  int phase_offset() const { return num_users * num_users; }
  int beam_offset() const { return 2 * num_users * num_users; }
  int weight_offset() const { return beam_offset() + n_tx * num_users; }
  int size() const { return weight_offset() + num_users; }
};

/// Each subvector is divided by its own largest magnitude; an all-zero
/// subvector stays zero.
Eigen::VectorXf build_features(const CMatrix& u_avg, const BeamAssignment& assignment, std::span<const double> weights);

inline const std::vector<int> kDefaultHidden{1200, 500, 200};

/// Dims chain L0 -> hidden... -> I.
std::vector<int> network_dims(const FeatureLayout& layout, const std::vector<int>& hidden = kDefaultHidden);

/// Samples are columns. Labels are 0/1 selection indicators.
struct Dataset {
  int num_users = 0;
  int i_max = 0;
  Eigen::MatrixXf features;  // L0 x N
  Eigen::MatrixXf labels;    // I x N

  long size() const { return static_cast<long>(features.cols()); }
  int feature_size() const { return static_cast<int>(features.rows()); }
  void append(const Eigen::VectorXf& x, const UserSet& selected);

  /// First round(beta * N) samples train, the rest eval. No shuffling, so
  /// whole episodes stay on one side of the split.
  std::pair<Dataset, Dataset> split(double beta) const;
};

/// Binary layout, little-endian: "HBSDATA\0", u32 version, u64 samples,
/// u32 features, u32 users, u32 i_max, then per sample f32 features and u8 labels.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

/// Runs `episodes` greedy-incremental episodes of `slots` slots each and records one
/// sample per slot. Each episode draws its own topology, paths and motion.
Dataset generate_dataset(const SimConfig& base, int episodes, int slots, std::uint64_t seed);

struct TrainOptions {
  std::vector<int> hidden = kDefaultHidden;
  int batch_size = 16;
  int epochs = 300;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";  // "adam" or "sgd"
  std::uint64_t seed = 1;
  std::function<void(int epoch, double loss)> on_epoch;
};

struct TrainResult {
  Mlp model;
  double initial_loss = 0.0;        // full train-set loss before the first step
  std::vector<double> epoch_loss;   // mean mini-batch loss within each epoch
  double seconds = 0.0;
};

/// Mini-batch training on mean binary cross-entropy. Samples are reshuffled
/// every epoch. Throws InputError on an empty dataset.
TrainResult train(const Dataset& train_set, const TrainOptions& options);

/// Continue training an existing model.
TrainResult train(const Dataset& train_set, Mlp model, const TrainOptions& options);

/// Mean loss over a dataset, evaluated in chunks.
double dataset_loss(const Mlp& model, const Dataset& ds);

struct ClassifierReport {
  double accuracy = 0.0;           // per-user, threshold 0.5
  double zero_baseline = 0.0;      // accuracy of predicting nobody
  double positive_rate = 0.0;      // fraction of labels equal to 1
  double predicted_rate = 0.0;     // fraction of outputs >= 0.5
  double loss = 0.0;
};

ClassifierReport evaluate_classifier(const Mlp& model, const Dataset& ds);

/// alpha_i = [z_i >= 0.5], capped to i_max by weight, then evaluated on the
/// beamforming pipeline. Inference time is charged to search.
ScheduleDecision schedule_learned(const Mlp& model, const Eigen::VectorXf& features, const CandidateEvaluator& evaluator,
                                  int i_max);

/// Thresholded selection before the cap.
UserSet round_outputs(const Eigen::VectorXf& z);

std::unique_ptr<SchedulingPolicy> make_learned_policy(std::shared_ptr<const Mlp> model);

/// make_policy() for the classical schedulers, make_learned_policy() for "learned".
std::unique_ptr<SchedulingPolicy> make_any_policy(const std::string& name, std::shared_ptr<const Mlp> model);

/// Binary layout: "HBSMLP\0\0", u32 version, u32 n_dims, i32 dims, then per
/// layer row-major f64 weights followed by f64 biases.
void save_model(const std::string& path, const Mlp& model);
Mlp load_model(const std::string& path);

}  // namespace hbs

#endif  // HBS_LEARNER_HPP
