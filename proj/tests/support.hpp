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

#ifndef HBS_TEST_SUPPORT_HPP
#define HBS_TEST_SUPPORT_HPP

#include "hbs/beamforming.hpp"
#include "hbs/schedulers.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <random>

namespace hbs::test {

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> g(0.0, sigma);
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

/// Evaluator over an arbitrary set function, counting calls.
class FunctionEvaluator final : public CandidateEvaluator {
 public:
  FunctionEvaluator(int n, std::function<double(const UserSet&)> f, std::vector<double> weights = {})
      : n_(n), f_(std::move(f)), weights_(std::move(weights)) {
    if (weights_.empty()) weights_.assign(static_cast<std::size_t>(n), 1.0);
  }
  int num_users() const override { return n_; }
  SetEvaluation evaluate(const UserSet& set, ComponentTimings* = nullptr) const override {
    ++calls;
    SetEvaluation ev;
    ev.weighted_sum_rate = f_(set);
    ev.feasible = ev.weighted_sum_rate > 0.0 || set.empty();
    ev.rates.assign(set.size(), set.empty() ? 0.0 : ev.weighted_sum_rate / static_cast<double>(set.size()));
    return ev;
  }
  std::span<const double> weights() const override { return weights_; }
  mutable long calls = 0;

 private:
  int n_;
  std::function<double(const UserSet&)> f_;
  std::vector<double> weights_;
};

/// A self-contained random instance of the beamforming pipeline: I users,
/// N_TX antennas, K PRBs, random analog beams and effective channels.
struct RandomInstance {
  EffectiveChannelMatrix all;
  BeamAssignment assignment;
  LinkBudget link;
  std::vector<double> weights;

  RandomInstance(int num_users, int n_tx, int num_prbs, Rng& rng, double noise = 1e-2) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    assignment.analog = random_complex(n_tx, num_users, rng);
    for (int i = 0; i < num_users; ++i) {
      assignment.analog.col(i).normalize();
      assignment.beam_index.push_back(i);
      assignment.combiners.push_back(CVector::Ones(1));
      weights.push_back(u(rng));
    }
    all.users.resize(static_cast<std::size_t>(num_users));
    std::iota(all.users.begin(), all.users.end(), 0);
    for (int k = 0; k < num_prbs; ++k) all.per_prb.push_back(random_complex(num_users, num_users, rng));
    link.power = 1.0;
    link.noise.assign(static_cast<std::size_t>(num_users), noise);
    link.bandwidth.assign(static_cast<std::size_t>(num_prbs), 168.0);
  }

  BeamformingEvaluator evaluator() const { return BeamformingEvaluator(all, assignment, weights, link); }
};

}  // namespace hbs::test

#endif  // HBS_TEST_SUPPORT_HPP
