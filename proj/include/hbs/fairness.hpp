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

#ifndef HBS_FAIRNESS_HPP
#define HBS_FAIRNESS_HPP

#include <iosfwd>
#include <span>
#include <vector>

namespace hbs {

/// Exponential moving average of per-user rates, R_i(0) = 1.
class RateTracker {
 public:
  RateTracker(int num_users, double eta);
  RateTracker(std::vector<double> initial, std::vector<double> eta);

  /// R_i <- (1 - eta_i) R_i + eta_i r_i. Unscheduled users pass r_i = 0.
  void update(std::span<const double> rates);

  /// w_i = 1 / R_i.
  std::vector<double> weights() const;

  /// sum_i ln R_i.
  double pf_metric() const;

  const std::vector<double>& cumulative() const { return cumulative_; }
  const std::vector<double>& eta() const { return eta_; }
  long slot_count() const { return slot_count_; }
  int num_users() const { return static_cast<int>(cumulative_.size()); }

  /// Appends "slot,user,R" rows for the current state.
  void write_csv_rows(std::ostream& os) const;

 private:
  std::vector<double> cumulative_;
  std::vector<double> eta_;
  long slot_count_ = 0;
};

double pf_metric(std::span<const double> cumulative);

}  // namespace hbs

#endif  // HBS_FAIRNESS_HPP
