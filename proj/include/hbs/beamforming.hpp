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

#ifndef HBS_BEAMFORMING_HPP
#define HBS_BEAMFORMING_HPP

#include "hbs/channel.hpp"
#include "hbs/common.hpp"

#include <chrono>
#include <optional>
#include <span>
#include <vector>

namespace hbs {

/// Wall-clock split of one scheduling decision, in seconds.
struct ComponentTimings {
  double effective_channel = 0.0;
  double precoder = 0.0;
  double search = 0.0;

  double sum() const { return effective_channel + precoder + search; }
  ComponentTimings& operator+=(const ComponentTimings& o) {
    effective_channel += o.effective_channel;
    precoder += o.precoder;
    search += o.search;
    return *this;
  }
};

/// Adds the lifetime of the guard to `*slot` (no-op on nullptr).
class ScopedTimer {
 public:
  explicit ScopedTimer(double* slot) : slot_(slot), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    if (slot_) *slot_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double* slot_;
  std::chrono::steady_clock::time_point start_;
};

struct BeamAssignment {
  std::vector<int> beam_index;     // best codebook beam per user (0-based)
  std::vector<CVector> combiners;  // unit-norm user-side combiner per user
  CMatrix analog;                  // N_TX x I, column i is the beam of user i

  int num_users() const { return static_cast<int>(beam_index.size()); }
  /// G* for a selected set: columns of `analog` in set order.
  CMatrix analog_for(const UserSet& users) const;
};

/// u[k](a, b) = g_a^H h_{k,a}^H g*_b over the indexed users: rows are the
/// measuring users, columns the beam owners.
struct EffectiveChannelMatrix {
  UserSet users;
  std::vector<CMatrix> per_prb;

  int num_prbs() const { return static_cast<int>(per_prb.size()); }
  /// Sum over PRBs divided by K.
  CMatrix prb_average() const;
};

/// Dominant right singular vector of the PRB-averaged channel (N_TX x N_RX),
/// phase-normalized so the first nonzero entry is real positive. An all-zero
/// channel yields e_1 and sets *degenerate.
CVector derive_combiner(const CMatrix& h_avg, bool* degenerate = nullptr);

/// argmax_l (1/K) sum_k |g^H h_k^H psi_l|^2; ties go to the lowest index.
int select_best_beam(std::span<const CMatrix> channels, const CVector& combiner, const Codebook& codebook);

/// Step-I metric of every beam, in codebook order.
std::vector<double> beam_metrics(std::span<const CMatrix> channels, const CVector& combiner, const Codebook& codebook);

/// Step I for every user of the tensor.
BeamAssignment assign_beams(const ChannelTensor& h, const Codebook& codebook);

/// Step II over the given users.
EffectiveChannelMatrix effective_channels(const ChannelTensor& h, const BeamAssignment& assignment,
                                          const UserSet& users);

inline constexpr double kDefaultMaxCondition = 1e12;

/// Condition number of U U^H (ratio of extreme eigenvalues); +inf when singular.
double gram_condition(const CMatrix& u);

/// F = U^H (U U^H)^{-1}, or nullopt when cond(U U^H) > max_condition.
std::optional<CMatrix> try_zf_precoder(const CMatrix& u, double max_condition = kDefaultMaxCondition);

/// As try_zf_precoder, but throws IllConditioned carrying `users`.
CMatrix zf_precoder(const CMatrix& u, double max_condition = kDefaultMaxCondition, const UserSet& users = {});

/// Scale column m so that ||G f_m||^2 = power / streams. Throws InputError on a
/// column that vanishes after composition with G.
CMatrix normalize_precoder(const CMatrix& f, const CMatrix& analog, double power, int streams);

/// SINR of stream m under precoder F: row m of U is the measuring user's effective channel.
double sinr(const CMatrix& u, const CMatrix& f, int m, double noise);

/// sum_k B_k log2(1 + SINR_k).
double user_rate(std::span<const double> sinrs, std::span<const double> bandwidth);

/// sum over the set of w_i r_i; weights and rates are indexed by global user id.
double weighted_sum_rate(const UserSet& users, std::span<const double> weights, std::span<const double> rates);

struct LinkBudget {
  double power = 0.1;                // P_k per PRB, watts
  std::vector<double> noise;         // sigma^2 per user, watts
  std::vector<double> bandwidth;     // B_k per PRB
  double max_condition = kDefaultMaxCondition;

  static LinkBudget from_config(const SimConfig& cfg);
};

struct SetEvaluation {
  bool feasible = true;          // false when ZF was refused on some PRB
  double weighted_sum_rate = 0.0;
  std::vector<double> rates;     // per member of the set, in set order
};

/// Full short-block pipeline on a candidate set drawn from `all`: extract
/// U_k(M), ZF, normalize to P_k / M, SINR, rate and weighted sum-rate.
/// Only the extraction and precoder phases are charged to `timings`; callers
/// attribute the remainder of their wall-clock to search.
SetEvaluation evaluate_set(const EffectiveChannelMatrix& all, const BeamAssignment& assignment, const UserSet& set,
                           std::span<const double> weights, const LinkBudget& link,
                           ComponentTimings* timings = nullptr);

}  // namespace hbs

#endif  // HBS_BEAMFORMING_HPP
