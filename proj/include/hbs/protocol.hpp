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

#ifndef HBS_PROTOCOL_HPP
#define HBS_PROTOCOL_HPP

#include "hbs/beamforming.hpp"
#include "hbs/channel.hpp"
#include "hbs/config.hpp"
#include "hbs/fairness.hpp"
#include "hbs/schedulers.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hbs {

/// What a scheduling policy sees in Step III of one short block.
struct SlotContext {
  const SimConfig& config;
  const EffectiveChannelMatrix& effective;  // U_k(I;t) for all users
  const BeamAssignment& assignment;
  const BeamformingEvaluator& evaluator;
  std::span<const double> weights;
  Rng& rng;
};

class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual std::string name() const = 0;
  virtual ScheduleDecision decide(const SlotContext& ctx) = 0;
};


/// Policies for "brute", "greedy-inc", "greedy-dec", "sorting" and "random".
/// "learned" needs a model and is created through make_learned_policy().
std::unique_ptr<SchedulingPolicy> make_policy(const std::string& name);

struct SlotRecord {
  long slot = 0;
  int long_block = 0;
  UserSet selected;
  std::vector<double> rates;
  std::vector<int> beam_index;
  double weighted_sum_rate = 0.0;
  double sum_rate = 0.0;
  double pf = 0.0;  // after the Step-IV update
  long evaluation_count = 0;
  long extra_evaluations = 0;
  ComponentTimings timings;
  double total_time = 0.0;  // Step II + Step III wall-clock
};

struct EpisodeResult {
  SimConfig config;
  std::string scheduler;
  std::vector<SlotRecord> slots;
  std::vector<double> final_cumulative;
  double final_pf = 0.0;
  double mean_sum_rate = 0.0;
  double mean_selected = 0.0;  // mean |M(t)|
  double mean_slot_time = 0.0;
  ComponentTimings mean_timings;
};

/// Passed to an observer after each short block, before the tracker update.
struct SlotView {
  const SlotContext& context;
  const ScheduleDecision& decision;
  long slot;
};
using SlotObserver = std::function<void(const SlotView&)>;

/// Two-timescale loop state for one episode.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  /// Step I on a fresh path realization, then Steps II-IV for each of the
  /// N_SB short blocks of the block.
  void run_long_block(SchedulingPolicy& policy, std::vector<SlotRecord>& out);

  /// Steps II-IV for the next slot. Requires an active long block.
  SlotRecord run_short_block(SchedulingPolicy& policy);

  /// Starts a long block without running its short blocks.
  void begin_long_block();

  void set_observer(SlotObserver observer) { observer_ = std::move(observer); }

  const SimConfig& config() const { return cfg_; }
  const RateTracker& tracker() const { return tracker_; }
  const Topology& topology() const { return topology_; }
  const PathSet& paths() const { return paths_; }
  const BeamAssignment& assignment() const { return assignment_; }
  const Codebook& codebook() const { return codebook_; }
  long slot() const { return slot_; }
  int long_block() const { return block_; }

 private:
  SimConfig cfg_;
  Codebook codebook_;
  LinkBudget link_;
  Topology topology_;
  PathSet paths_;
  BeamAssignment assignment_;
  ChannelTensor first_slot_channels_;
  RateTracker tracker_;
  Rng scheduler_rng_;
  SlotObserver observer_;
  long slot_ = 0;
  int block_ = -1;
  int slots_left_in_block_ = 0;
  UserSet all_users_;
};

/// R_i(0) = 1, n_long_blocks long blocks, full traces.
EpisodeResult run_episode(const SimConfig& cfg, SchedulingPolicy& policy);

/// PF of the EMA replayed from logged rates.
double replay_pf(const std::vector<SlotRecord>& slots, int num_users, double eta);

struct ComponentProfile {
  ComponentTimings mean;
  double mean_total = 0.0;
  double median_total = 0.0;
  std::size_t slots = 0;
};

ComponentProfile profile_components(std::span<const SlotRecord> slots);

}  // namespace hbs

#endif  // HBS_PROTOCOL_HPP
