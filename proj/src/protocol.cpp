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

#include "hbs/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace hbs {

namespace {

enum StreamTag : std::uint64_t { kTopologyStream = 1, kPathStream = 2, kSchedulerStream = 3 };

class BruteForcePolicy final : public SchedulingPolicy {
 public:
  std::string name() const override { return "brute"; }
  ScheduleDecision decide(const SlotContext& ctx) override { return schedule_brute_force(ctx.evaluator, ctx.config.i_max); }
};

class GreedyIncrementalPolicy final : public SchedulingPolicy {
 public:
  std::string name() const override { return "greedy-inc"; }
  ScheduleDecision decide(const SlotContext& ctx) override {
    return schedule_greedy_incremental(ctx.evaluator, ctx.config.i_max);
  }
};

class GreedyDecrementalPolicy final : public SchedulingPolicy {
 public:
  std::string name() const override { return "greedy-dec"; }
  ScheduleDecision decide(const SlotContext& ctx) override {
    return schedule_greedy_decremental(ctx.evaluator, ctx.config.i_max);
  }
};

class SortingPolicy final : public SchedulingPolicy {
 public:
  std::string name() const override { return "sorting"; }
  ScheduleDecision decide(const SlotContext& ctx) override { return schedule_sorting(ctx.evaluator, ctx.config.i_max); }
};

class RandomPolicy final : public SchedulingPolicy {
 public:
  std::string name() const override { return "random"; }
  ScheduleDecision decide(const SlotContext& ctx) override {
    return schedule_random(ctx.evaluator, ctx.config.i_max, ctx.rng);
  }
};

}  // namespace

std::unique_ptr<SchedulingPolicy> make_policy(const std::string& name) {
  if (name == "brute") return std::make_unique<BruteForcePolicy>();
  if (name == "greedy-inc") return std::make_unique<GreedyIncrementalPolicy>();
  if (name == "greedy-dec") return std::make_unique<GreedyDecrementalPolicy>();
  if (name == "sorting") return std::make_unique<SortingPolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "learned") throw InputError("make_policy: the learned scheduler needs a trained model");
  throw InputError("make_policy: unknown scheduler '" + name + "'");
}

Simulator::Simulator(SimConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      codebook_(build_codebook(cfg_)),
      link_(LinkBudget::from_config(cfg_)),
      tracker_(cfg_.num_users, cfg_.eta),
      scheduler_rng_(make_stream(cfg_.seed, {kSchedulerStream})) {
  Rng topo_rng = make_stream(cfg_.seed, {kTopologyStream});
  topology_ = generate_topology(cfg_, topo_rng);
  all_users_.resize(static_cast<std::size_t>(cfg_.num_users));
  std::iota(all_users_.begin(), all_users_.end(), 0);
}

void Simulator::begin_long_block() {
  ++block_;
  Rng path_rng = make_stream(cfg_.seed, {kPathStream, static_cast<std::uint64_t>(block_)});
  paths_ = realize_long_block(topology_, cfg_, path_rng);
  // Step I: beam sweep on the first short block of the long block.
  first_slot_channels_ = evolve_short_block(paths_, topology_, slot_, cfg_);
  assignment_ = assign_beams(first_slot_channels_, codebook_);
  slots_left_in_block_ = cfg_.slots_per_long_block;
}

SlotRecord Simulator::run_short_block(SchedulingPolicy& policy) {
  if (slots_left_in_block_ <= 0) throw std::logic_error("Simulator: no active long block");
  const ChannelTensor h = first_slot_channels_.slot_index == slot_ && first_slot_channels_.num_users > 0
                              ? first_slot_channels_
                              : evolve_short_block(paths_, topology_, slot_, cfg_);
  const std::vector<double> weights = tracker_.weights();

  const auto start = std::chrono::steady_clock::now();
  double step2 = 0.0;
  EffectiveChannelMatrix effective;
  {
    ScopedTimer t(&step2);
    effective = effective_channels(h, assignment_, all_users_);
  }
  const BeamformingEvaluator evaluator(effective, assignment_, weights, link_);
  const SlotContext ctx{cfg_, effective, assignment_, evaluator, weights, scheduler_rng_};
  ScheduleDecision decision = policy.decide(ctx);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  decision.timings.effective_channel += step2;

  if (static_cast<int>(decision.selected.size()) > std::min(cfg_.n_rf, cfg_.num_users) ||
      static_cast<int>(decision.selected.size()) > cfg_.i_max) {
    throw std::logic_error("Simulator: scheduler '" + policy.name() + "' exceeded the multiplexing limit");
  }

  if (observer_) observer_(SlotView{ctx, decision, slot_});

  tracker_.update(decision.rates);

  SlotRecord rec;
  rec.slot = slot_;
  rec.long_block = block_;
  rec.selected = decision.selected;
  rec.rates = decision.rates;
  rec.beam_index = assignment_.beam_index;
  rec.weighted_sum_rate = decision.weighted_sum_rate;
  rec.sum_rate = std::accumulate(decision.rates.begin(), decision.rates.end(), 0.0);
  rec.pf = tracker_.pf_metric();
  rec.evaluation_count = decision.evaluation_count;
  rec.extra_evaluations = decision.extra_evaluations;
  rec.timings = decision.timings;
  rec.total_time = total;

  advance_topology(topology_, cfg_.slot_duration_s());
  ++slot_;
  --slots_left_in_block_;
  return rec;
}

void Simulator::run_long_block(SchedulingPolicy& policy, std::vector<SlotRecord>& out) {
  begin_long_block();
  for (int s = 0; s < cfg_.slots_per_long_block; ++s) out.push_back(run_short_block(policy));
}

EpisodeResult run_episode(const SimConfig& cfg, SchedulingPolicy& policy) {
  Simulator sim(cfg);
  EpisodeResult res;
  res.config = sim.config();
  res.scheduler = policy.name();
  res.slots.reserve(static_cast<std::size_t>(cfg.total_slots()));
  for (int b = 0; b < cfg.n_long_blocks; ++b) sim.run_long_block(policy, res.slots);

  res.final_cumulative = sim.tracker().cumulative();
  res.final_pf = sim.tracker().pf_metric();
  const double n = static_cast<double>(res.slots.size());
  for (const auto& s : res.slots) {
    res.mean_sum_rate += s.sum_rate / n;
    res.mean_selected += static_cast<double>(s.selected.size()) / n;
    res.mean_slot_time += s.total_time / n;
    res.mean_timings.effective_channel += s.timings.effective_channel / n;
    res.mean_timings.precoder += s.timings.precoder / n;
    res.mean_timings.search += s.timings.search / n;
  }
  return res;
}

double replay_pf(const std::vector<SlotRecord>& slots, int num_users, double eta) {
  RateTracker tracker(num_users, eta);
  for (const auto& s : slots) tracker.update(s.rates);
  return tracker.pf_metric();
}

ComponentProfile profile_components(std::span<const SlotRecord> slots) {
  ComponentProfile p;
  p.slots = slots.size();
  if (slots.empty()) return p;
  const double n = static_cast<double>(slots.size());
  std::vector<double> totals;
  totals.reserve(slots.size());
  for (const auto& s : slots) {
    p.mean.effective_channel += s.timings.effective_channel / n;
    p.mean.precoder += s.timings.precoder / n;
    p.mean.search += s.timings.search / n;
    p.mean_total += s.total_time / n;
    totals.push_back(s.total_time);
  }
  std::sort(totals.begin(), totals.end());
  const std::size_t mid = totals.size() / 2;
  p.median_total = totals.size() % 2 ? totals[mid] : 0.5 * (totals[mid - 1] + totals[mid]);
  return p;
}

}  // namespace hbs
