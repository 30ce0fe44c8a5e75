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

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace hbs;
using hbs::test::FunctionEvaluator;
using hbs::test::RandomInstance;

namespace {

// Strictly increasing in the set, so no greedy run stops early.
double additive(const UserSet& s) {
  double v = 0.0;
  for (int i : s) v += 1.0 + 0.01 * i;
  return v;
}

bool is_valid_selection(const UserSet& s, int num_users, int i_max) {
  if (static_cast<int>(s.size()) > i_max) return false;
  if (!std::is_sorted(s.begin(), s.end())) return false;
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
  return std::all_of(s.begin(), s.end(), [&](int i) { return i >= 0 && i < num_users; });
}

}  // namespace

TEST_CASE("candidate set counting") {
  CHECK(count_candidate_sets(6, 3) == 6 + 15 + 20);
  CHECK(count_candidate_sets(20, 8) == 263949);
  CHECK(count_candidate_sets(4, 10) == 15);
}

TEST_CASE("brute force finds the best set and breaks ties lexicographically") {
  // Pairs {1,3} and {0,2} both score 5; everything else scores less.
  FunctionEvaluator ev(4, [](const UserSet& s) {
    if (s == UserSet{1, 3} || s == UserSet{0, 2}) return 5.0;
    return static_cast<double>(s.size());
  });
  const auto d = schedule_brute_force(ev, 2);
  CHECK(d.selected == UserSet{0, 2});
  CHECK(d.weighted_sum_rate == 5.0);
  CHECK(d.evaluation_count == count_candidate_sets(4, 2));
}

TEST_CASE("brute force returns nobody when nothing scores") {
  FunctionEvaluator ev(5, [](const UserSet&) { return 0.0; });
  const auto d = schedule_brute_force(ev, 3);
  CHECK(d.selected.empty());
  CHECK(d.rates == std::vector<double>(5, 0.0));
}

TEST_CASE("brute force refuses oversize searches") {
  FunctionEvaluator ev(30, additive);
  CHECK_THROWS_AS(schedule_brute_force(ev, 15), Intractable);
  CHECK(ev.calls == 0);
}

TEST_CASE("greedy incremental stops immediately when no user helps") {
  FunctionEvaluator ev(6, [](const UserSet&) { return 0.0; });
  const auto d = schedule_greedy_incremental(ev, 3);
  CHECK(d.selected.empty());
  CHECK(d.evaluation_count == 0);
  CHECK(d.extra_evaluations == 6);
}

TEST_CASE("greedy incremental matches brute force on a separable pair") {
  // Users 1 and 2 are interference-free with each other; everyone else clashes.
  FunctionEvaluator ev(4, [](const UserSet& s) {
    const double base[] = {1.0, 3.0, 2.5, 0.5};
    double v = 0.0;
    for (int i : s) v += base[i];
    const bool clean = std::all_of(s.begin(), s.end(), [](int i) { return i == 1 || i == 2; });
    return clean ? v : v * 0.2;
  });
  const auto g = schedule_greedy_incremental(ev, 2);
  const auto b = schedule_brute_force(ev, 2);
  CHECK(g.selected == b.selected);
  CHECK(g.selected == UserSet{1, 2});
}

TEST_CASE("greedy incremental ties go to the lowest index") {
  FunctionEvaluator ev(5, [](const UserSet& s) { return static_cast<double>(s.size()); });
  CHECK(schedule_greedy_incremental(ev, 2).selected == UserSet{0, 1});
}

TEST_CASE("greedy search counts follow the closed forms") {
  const int n = 20;
  for (int m = 1; m <= 8; ++m) {
    FunctionEvaluator inc_ev(n, additive);
    const auto inc = schedule_greedy_incremental(inc_ev, m);
    CHECK(inc.selected.size() == static_cast<std::size_t>(m));
    CHECK(inc.evaluation_count == m * (2 * n - m + 1) / 2);
    CHECK(inc.total_evaluations() == inc_ev.calls);

    FunctionEvaluator dec_ev(n, additive);
    const auto dec = schedule_greedy_decremental(dec_ev, m);
    CHECK(dec.selected.size() == static_cast<std::size_t>(m));
    CHECK(dec.evaluation_count == (n - m) * (n + m + 1) / 2);
    CHECK(dec.total_evaluations() == dec_ev.calls);
  }
}

TEST_CASE("greedy decremental keeps everyone on orthogonal equal-weight links at high SNR") {
  Rng rng(1);
  RandomInstance inst(5, 8, 2, rng, 1e-6);
  for (auto& u : inst.all.per_prb) u = CMatrix(u.diagonal().cwiseQuotient(u.diagonal().cwiseAbs()).asDiagonal());
  inst.weights.assign(5, 1.0);
  const auto ev = inst.evaluator();
  const auto d = schedule_greedy_decremental(ev, 5);
  CHECK(d.selected == UserSet{0, 1, 2, 3, 4});
}

TEST_CASE("greedy decremental enforces the cardinality cap") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    RandomInstance inst(4, 8, 2, rng);
    const auto ev = inst.evaluator();
    const auto d = schedule_greedy_decremental(ev, 2);
    CHECK(d.selected.size() <= 2);
  }
}

TEST_CASE("greedy decremental removes the least needy user among equal candidates") {
  // Every set is worthless while it holds more than two users.
  const std::vector<double> w{1.0, 0.2, 3.0, 0.1, 2.0};
  FunctionEvaluator ev(5, [](const UserSet& s) { return s.size() <= 2 ? additive(s) : 0.0; }, w);
  const auto d = schedule_greedy_decremental(ev, 2);
  CHECK(d.selected == UserSet{2, 4});

  FunctionEvaluator flat(4, [](const UserSet& s) { return s.size() <= 1 ? 1.0 : 0.0; });
  CHECK(schedule_greedy_decremental(flat, 1).selected == UserSet{3});
}

TEST_CASE("sorting selects everyone when the cap allows") {
  Rng rng(3);
  RandomInstance inst(4, 8, 2, rng);
  const auto ev = inst.evaluator();
  const auto d = schedule_sorting(ev, 6);
  CHECK(d.selected == UserSet{0, 1, 2, 3});
  CHECK(d.evaluation_count == 4);
}

TEST_CASE("sorting breaks identical channels by weight") {
  Rng rng(4);
  RandomInstance inst(2, 8, 2, rng);
  for (auto& u : inst.all.per_prb) u.setConstant(cplx(0.7, 0.2));
  inst.assignment.analog.col(1) = inst.assignment.analog.col(0);
  inst.weights = {0.3, 0.9};
  CHECK(schedule_sorting(inst.evaluator(), 1).selected == UserSet{1});
  inst.weights = {0.9, 0.3};
  CHECK(schedule_sorting(inst.evaluator(), 1).selected == UserSet{0});
}

TEST_CASE("sorting picks the top solo rates of an independent computation") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    RandomInstance inst(6, 8, 3, rng);
    std::vector<std::pair<double, int>> solo;
    for (int i = 0; i < 6; ++i) {
      // 1x1 ZF at full power on a unit-norm beam: SINR = P |u_ii|^2 / sigma^2.
      double r = 0.0;
      for (int k = 0; k < 3; ++k) r += 168.0 * std::log2(1.0 + inst.link.power * std::norm(inst.all.per_prb[k](i, i)) / inst.link.noise[i]);
      solo.emplace_back(-inst.weights[i] * r, i);
    }
    std::sort(solo.begin(), solo.end());
    UserSet expect{solo[0].second, solo[1].second, solo[2].second};
    std::sort(expect.begin(), expect.end());
    const auto ev = inst.evaluator();
    CHECK(schedule_sorting(ev, 3).selected == expect);
  }
}

TEST_CASE("random scheduling draws the cap uniformly") {
  FunctionEvaluator small(5, additive);
  Rng rng(6);
  CHECK(schedule_random(small, 9, rng).selected == UserSet{0, 1, 2, 3, 4});

  FunctionEvaluator ev(20, additive);
  std::vector<int> hits(20, 0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto dec = schedule_random(ev, 8, rng);
    REQUIRE(dec.selected.size() == 8);
    CHECK(is_valid_selection(dec.selected, 20, 8));
    for (int i : dec.selected) ++hits[i];
  }
  for (int h : hits) CHECK(std::abs(static_cast<double>(h) / draws - 0.4) < 0.02);
}

TEST_CASE("selection filter") {
  const std::vector<double> w{5, 4, 3, 2, 1, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01};
  CHECK(selection_filter({3, 1, 7}, w, 3) == UserSet{1, 3, 7});
  CHECK(selection_filter({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, w, 8) == UserSet{0, 1, 2, 3, 4, 5, 6, 7});
  const std::vector<double> tied{1, 1, 1, 1};
  CHECK(selection_filter({0, 1, 2, 3}, tied, 2) == UserSet{0, 1});

  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> wr(20);
    for (auto& x : wr) x = u(rng);
    UserSet cand(20);
    std::iota(cand.begin(), cand.end(), 0);
    std::shuffle(cand.begin(), cand.end(), rng);
    cand.resize(12);
    std::vector<std::pair<double, int>> order;
    for (int i : cand) order.emplace_back(-wr[i], i);
    std::sort(order.begin(), order.end());
    UserSet expect;
    for (int q = 0; q < 8; ++q) expect.push_back(order[q].second);
    std::sort(expect.begin(), expect.end());
    CHECK(selection_filter(cand, wr, 8) == expect);
  }
}

TEST_CASE("every scheduler is feasible and brute force dominates") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    RandomInstance inst(6, 8, 2, rng, 0.05);
    const auto ev = inst.evaluator();
    Rng pick(trial);
    const std::vector<ScheduleDecision> ds{schedule_brute_force(ev, 3), schedule_greedy_incremental(ev, 3),
                                           schedule_greedy_decremental(ev, 3), schedule_sorting(ev, 3),
                                           schedule_random(ev, 3, pick), decide_fixed(ev, {0, 5})};
    for (const auto& d : ds) {
      CHECK(is_valid_selection(d.selected, 6, 3));
      CHECK(d.rates.size() == 6);
      CHECK(d.weighted_sum_rate <= ds[0].weighted_sum_rate + 1e-9);
      CHECK(d.timings.search >= 0.0);
      double wsr = 0.0;
      for (int i = 0; i < 6; ++i) {
        const bool in = std::binary_search(d.selected.begin(), d.selected.end(), i);
        if (!in) CHECK(d.rates[i] == 0.0);
        wsr += inst.weights[i] * d.rates[i];
      }
      CHECK(wsr == doctest::Approx(d.weighted_sum_rate).epsilon(1e-12));
    }
  }
}

TEST_CASE("deterministic schedulers are pure") {
  Rng rng(9);
  RandomInstance inst(8, 8, 3, rng);
  const auto ev = inst.evaluator();
  CHECK(schedule_greedy_incremental(ev, 4).selected == schedule_greedy_incremental(ev, 4).selected);
  CHECK(schedule_greedy_decremental(ev, 4).selected == schedule_greedy_decremental(ev, 4).selected);
  CHECK(schedule_sorting(ev, 4).selected == schedule_sorting(ev, 4).selected);
  Rng a(3), b(3);
  CHECK(schedule_random(ev, 4, a).selected == schedule_random(ev, 4, b).selected);
}

TEST_CASE("scheduler names") {
  CHECK(is_known_scheduler("greedy-dec"));
  CHECK(is_known_scheduler("learned"));
  CHECK_FALSE(is_known_scheduler("round-robin"));
}
