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

#include "hbs/schedulers.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <limits>
#include <numeric>

namespace hbs {

namespace {

using Clock = std::chrono::steady_clock;

UserSet with_user(const UserSet& set, int user) {
  UserSet out;
  out.reserve(set.size() + 1);
  auto it = std::lower_bound(set.begin(), set.end(), user);
  out.insert(out.end(), set.begin(), it);
  out.push_back(user);
  out.insert(out.end(), it, set.end());
  return out;
}

UserSet without_position(const UserSet& set, std::size_t pos) {
  UserSet out;
  out.reserve(set.size());
  for (std::size_t a = 0; a < set.size(); ++a) {
    if (a != pos) out.push_back(set[a]);
  }
  return out;
}

// Fills the per-user rate vector and closes the timing split: whatever the
// evaluator did not charge to effective-channel or precoder work is search.
void package(ScheduleDecision& d, int num_users, const UserSet& set, const SetEvaluation& ev,
             const ComponentTimings& acc, Clock::time_point start) {
  d.selected = set;
  d.rates.assign(static_cast<std::size_t>(num_users), 0.0);
  for (std::size_t a = 0; a < set.size() && a < ev.rates.size(); ++a) d.rates[set[a]] = ev.rates[a];
  d.weighted_sum_rate = ev.feasible ? ev.weighted_sum_rate : 0.0;
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  d.timings.effective_channel = acc.effective_channel;
  d.timings.precoder = acc.precoder;
  d.timings.search = std::max(0.0, wall - acc.effective_channel - acc.precoder);
}

double value_of(const SetEvaluation& ev) { return ev.feasible ? ev.weighted_sum_rate : 0.0; }

}  // namespace

std::vector<double> CandidateEvaluator::solo_weighted_rates(ComponentTimings* timings) const {
  std::vector<double> out(static_cast<std::size_t>(num_users()));
  for (int i = 0; i < num_users(); ++i) out[i] = value_of(evaluate(UserSet{i}, timings));
  return out;
}

BeamformingEvaluator::BeamformingEvaluator(const EffectiveChannelMatrix& all, const BeamAssignment& assignment,
                                           std::vector<double> weights, LinkBudget link)
    : all_(all), assignment_(assignment), weights_(std::move(weights)), link_(std::move(link)) {
  for (double w : weights_) {
    if (!(w > 0.0)) throw InputError("BeamformingEvaluator: weights must be positive");
  }
}

SetEvaluation BeamformingEvaluator::evaluate(const UserSet& set, ComponentTimings* timings) const {
  return evaluate_set(all_, assignment_, set, weights_, link_, timings);
}

long count_candidate_sets(int num_users, int i_max) {
  long total = 0;
  long binom = 1;  // C(I, m), built incrementally
  for (int m = 1; m <= std::min(i_max, num_users); ++m) {
    const long num = num_users - m + 1;
    if (binom > LONG_MAX / num) return LONG_MAX;
    binom = binom * num / m;
    if (total > LONG_MAX - binom) return LONG_MAX;
    total += binom;
  }
  return total;
}

ScheduleDecision schedule_brute_force(const CandidateEvaluator& evaluator, int i_max, long max_sets) {
  const auto start = Clock::now();
  const int n = evaluator.num_users();
  const long total = count_candidate_sets(n, i_max);
  if (total > max_sets) {
    throw Intractable("brute force: " + std::to_string(total) + " candidate sets exceed the limit of " +
                      std::to_string(max_sets));
  }

  ComponentTimings acc;
  ScheduleDecision d;
  UserSet best;
  SetEvaluation best_ev;
  double best_val = 0.0;

  for (int m = 1; m <= std::min(i_max, n); ++m) {
    UserSet comb(static_cast<std::size_t>(m));
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      SetEvaluation ev = evaluator.evaluate(comb, &acc);
      ++d.evaluation_count;
      const double v = value_of(ev);
      if (v > 0.0 && (v > best_val || (v == best_val && comb < best))) {
        best_val = v;
        best = comb;
        best_ev = std::move(ev);
      }
      // next combination in lexicographic order
      int pos = m - 1;
      while (pos >= 0 && comb[pos] == n - m + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int q = pos + 1; q < m; ++q) comb[q] = comb[q - 1] + 1;
    }
  }
  package(d, n, best, best_ev, acc, start);
  return d;
}

ScheduleDecision schedule_greedy_incremental(const CandidateEvaluator& evaluator, int i_max) {
  const auto start = Clock::now();
  const int n = evaluator.num_users();
  ComponentTimings acc;
  ScheduleDecision d;
  UserSet selected;
  SetEvaluation current_ev;
  double current = 0.0;

  for (int round = 0; round < std::min(i_max, n); ++round) {
    int best_user = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    SetEvaluation best_ev;
    long round_evals = 0;
    for (int i = 0; i < n; ++i) {
      if (std::binary_search(selected.begin(), selected.end(), i)) continue;
      SetEvaluation ev = evaluator.evaluate(with_user(selected, i), &acc);
      ++round_evals;
      if (value_of(ev) > best_val) {
        best_val = value_of(ev);
        best_user = i;
        best_ev = std::move(ev);
      }
    }
    if (best_user >= 0 && best_val > current) {
      selected = with_user(selected, best_user);
      current = best_val;
      current_ev = std::move(best_ev);
      d.evaluation_count += round_evals;
    } else {
      d.extra_evaluations += round_evals;
      break;
    }
  }
  package(d, n, selected, current_ev, acc, start);
  return d;
}

ScheduleDecision schedule_greedy_decremental(const CandidateEvaluator& evaluator, int i_max) {
  const auto start = Clock::now();
  const int n = evaluator.num_users();
  ComponentTimings acc;
  ScheduleDecision d;
  const auto w = evaluator.weights();
  UserSet selected(static_cast<std::size_t>(n));
  std::iota(selected.begin(), selected.end(), 0);
  SetEvaluation current_ev = evaluator.evaluate(selected, &acc);
  ++d.extra_evaluations;
  double current = value_of(current_ev);

  while (!selected.empty()) {
    std::size_t best_pos = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    SetEvaluation best_ev;
    for (std::size_t a = 0; a < selected.size(); ++a) {
      SetEvaluation ev = evaluator.evaluate(without_position(selected, a), &acc);
      // Equal values (typically all zero while the set is still rank
      // deficient) remove the least needy user: smallest weight, then lowest index.
      const bool tie_wins = value_of(ev) == best_val && w[selected[a]] < w[selected[best_pos]];
      if (value_of(ev) > best_val || tie_wins) {
        best_val = value_of(ev);
        best_pos = a;
        best_ev = std::move(ev);
      }
    }
    const auto round_evals = static_cast<long>(selected.size());
    const bool oversized = static_cast<int>(selected.size()) > i_max;
    if (best_val > current || oversized) {
      selected = without_position(selected, best_pos);
      current = best_val;
      current_ev = std::move(best_ev);
      d.evaluation_count += round_evals;
    } else {
      d.extra_evaluations += round_evals;
      break;
    }
  }
  package(d, n, selected, current_ev, acc, start);
  return d;
}

ScheduleDecision schedule_sorting(const CandidateEvaluator& evaluator, int i_max) {
  const auto start = Clock::now();
  const int n = evaluator.num_users();
  ComponentTimings acc;
  const std::vector<double> solo = evaluator.solo_weighted_rates(&acc);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return solo[a] > solo[b]; });
  UserSet selected(order.begin(), order.begin() + std::min(i_max, n));
  std::sort(selected.begin(), selected.end());

  ScheduleDecision d;
  d.evaluation_count = n;
  const SetEvaluation ev = evaluator.evaluate(selected, &acc);
  ++d.extra_evaluations;
  package(d, n, selected, ev, acc, start);
  return d;
}

ScheduleDecision schedule_random(const CandidateEvaluator& evaluator, int i_max, Rng& rng) {
  const auto start = Clock::now();
  const int n = evaluator.num_users();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  UserSet selected;
  std::sample(all.begin(), all.end(), std::back_inserter(selected), std::min(i_max, n), rng);
  std::sort(selected.begin(), selected.end());

  ComponentTimings acc;
  ScheduleDecision d;
  const SetEvaluation ev = evaluator.evaluate(selected, &acc);
  ++d.extra_evaluations;
  package(d, n, selected, ev, acc, start);
  return d;
}

UserSet selection_filter(const UserSet& candidates, std::span<const double> weights, int i_max) {
  UserSet sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  if (static_cast<int>(sorted.size()) <= i_max) return sorted;
  std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) { return weights[a] > weights[b]; });
  sorted.resize(static_cast<std::size_t>(std::max(i_max, 0)));
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

ScheduleDecision decide_fixed(const CandidateEvaluator& evaluator, UserSet selected) {
  const auto start = Clock::now();
  std::sort(selected.begin(), selected.end());
  ComponentTimings acc;
  ScheduleDecision d;
  const SetEvaluation ev = evaluator.evaluate(selected, &acc);
  ++d.extra_evaluations;
  package(d, evaluator.num_users(), selected, ev, acc, start);
  return d;
}

const std::vector<std::string>& scheduler_names() {
  static const std::vector<std::string> names{"brute", "greedy-inc", "greedy-dec", "sorting", "random", "learned"};
  return names;
}

bool is_known_scheduler(const std::string& name) {
  const auto& names = scheduler_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace hbs
