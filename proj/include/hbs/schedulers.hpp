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

#ifndef HBS_SCHEDULERS_HPP
#define HBS_SCHEDULERS_HPP

#include "hbs/beamforming.hpp"
#include "hbs/common.hpp"

#include <span>
#include <string>
#include <vector>

namespace hbs {

struct ScheduleDecision {
  UserSet selected;
  std::vector<double> rates;  // per user (size I), zero outside the selection
  double weighted_sum_rate = 0.0;

  // Candidate sets evaluated in search rounds that changed the selection.
  // For greedy schedulers this is the closed-form "user search" count.
  long evaluation_count = 0;
  // Everything else: the initial full-set evaluation of the decremental
  // search, a final round that found no improving move, the final
  // re-evaluation of a fixed set.
  long extra_evaluations = 0;

  ComponentTimings timings;

  long total_evaluations() const { return evaluation_count + extra_evaluations; }
};

/// Maps a candidate user set to its weighted sum-rate. Implementations must
/// be pure: the same set always yields the same value, and sets the
/// precoder cannot serve yield 0.
class CandidateEvaluator {
 public:
  virtual ~CandidateEvaluator() = default;

  virtual int num_users() const = 0;
  virtual SetEvaluation evaluate(const UserSet& set, ComponentTimings* timings = nullptr) const = 0;

  /// Weighted rate of every user on its own, assuming no inter-user
  /// interference: each user gets a 1x1 ZF precoder at full power P_k,
  /// which is the singleton set evaluation.
  virtual std::vector<double> solo_weighted_rates(ComponentTimings* timings = nullptr) const;

  virtual std::span<const double> weights() const = 0;
};

/// The protocol's candidate evaluator: U_k(I;t), G*, weights, P_k and sigma^2
/// bound together. Holds references; must not outlive its inputs.
class BeamformingEvaluator final : public CandidateEvaluator {
 public:
  BeamformingEvaluator(const EffectiveChannelMatrix& all, const BeamAssignment& assignment,
                       std::vector<double> weights, LinkBudget link);

  int num_users() const override { return static_cast<int>(all_.users.size()); }
  SetEvaluation evaluate(const UserSet& set, ComponentTimings* timings = nullptr) const override;

  std::span<const double> weights() const override { return weights_; }
  const EffectiveChannelMatrix& effective() const { return all_; }
  const BeamAssignment& assignment() const { return assignment_; }
  const LinkBudget& link() const { return link_; }

 private:
  const EffectiveChannelMatrix& all_;
  const BeamAssignment& assignment_;
  std::vector<double> weights_;
  LinkBudget link_;
};

inline constexpr long kMaxBruteForceSets = 1'000'000;

/// sum_{m=1}^{i_max} C(I, m), saturating at LONG_MAX.
long count_candidate_sets(int num_users, int i_max);

/// Exhaustive search over every non-empty set of size <= i_max. Ties go to the
/// lexicographically smallest set; returns the empty set when nothing scores
/// above zero. Throws Intractable beyond `max_sets` candidates.
ScheduleDecision schedule_brute_force(const CandidateEvaluator& evaluator, int i_max,
                                      long max_sets = kMaxBruteForceSets);

ScheduleDecision schedule_greedy_incremental(const CandidateEvaluator& evaluator, int i_max);

/// Starts from every user and removes the user whose removal leaves the
/// highest weighted sum-rate, while that improves the objective or the set
/// is still larger than i_max.
ScheduleDecision schedule_greedy_decremental(const CandidateEvaluator& evaluator, int i_max);

/// Top i_max users by solo weighted rate, re-evaluated with interference.
ScheduleDecision schedule_sorting(const CandidateEvaluator& evaluator, int i_max);

/// min(I, i_max) distinct users drawn uniformly.
ScheduleDecision schedule_random(const CandidateEvaluator& evaluator, int i_max, Rng& rng);

/// Pass-through when |candidates| <= i_max; otherwise keeps the i_max highest
/// weights (ties to the lower index). Output is sorted by user index.
UserSet selection_filter(const UserSet& candidates, std::span<const double> weights, int i_max);

/// Evaluates a fixed set and packages it as a decision.
ScheduleDecision decide_fixed(const CandidateEvaluator& evaluator, UserSet selected);

const std::vector<std::string>& scheduler_names();
bool is_known_scheduler(const std::string& name);

}  // namespace hbs

#endif  // HBS_SCHEDULERS_HPP
