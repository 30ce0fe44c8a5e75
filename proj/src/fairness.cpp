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

#include "hbs/fairness.hpp"

#include "hbs/common.hpp"

#include <cmath>
#include <ostream>

namespace hbs {

RateTracker::RateTracker(int num_users, double eta)
    : RateTracker(std::vector<double>(static_cast<std::size_t>(num_users), 1.0),
                  std::vector<double>(static_cast<std::size_t>(num_users), eta)) {}

RateTracker::RateTracker(std::vector<double> initial, std::vector<double> eta)
    : cumulative_(std::move(initial)), eta_(std::move(eta)) {
  if (cumulative_.size() != eta_.size()) throw InputError("RateTracker: size mismatch");
  for (double e : eta_) {
    if (!(e >= 0.0 && e <= 1.0)) throw InputError("RateTracker: eta outside [0, 1]");
  }
  for (double r : cumulative_) {
    if (!(r > 0.0)) throw InputError("RateTracker: initial rates must be positive");
  }
}

void RateTracker::update(std::span<const double> rates) {
  if (rates.size() != cumulative_.size()) throw InputError("RateTracker::update: size mismatch");
  for (double r : rates) {
    if (!(r >= 0.0)) throw InputError("RateTracker::update: negative rate");
  }
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    cumulative_[i] = (1.0 - eta_[i]) * cumulative_[i] + eta_[i] * rates[i];
  }
  ++slot_count_;
}

std::vector<double> RateTracker::weights() const {
  std::vector<double> w(cumulative_.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(cumulative_[i] > 0.0)) throw std::logic_error("RateTracker: non-positive cumulative rate");
    w[i] = 1.0 / cumulative_[i];
  }
  return w;
}

double pf_metric(std::span<const double> cumulative) {
  double pf = 0.0;
  for (double r : cumulative) pf += std::log(r);
  return pf;
}

double RateTracker::pf_metric() const { return hbs::pf_metric(cumulative_); }

void RateTracker::write_csv_rows(std::ostream& os) const {
  for (std::size_t i = 0; i < cumulative_.size(); ++i) os << slot_count_ << ',' << i << ',' << cumulative_[i] << '\n';
}

}  // namespace hbs
