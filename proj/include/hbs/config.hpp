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

#ifndef HBS_CONFIG_HPP
#define HBS_CONFIG_HPP

#include <cstdint>
#include <string>

namespace hbs {

/// Simulation parameters. Defaults reproduce the reference 28 GHz setup:
/// 20 single-antenna users in a 100 m cell, a 16-element (8x2) UPA with
/// 8 RF chains, 12 PRBs at 480 kHz SCS (numerology 5), 20 dBm per PRB and
/// -30 dBm noise, 100 long blocks of one slot each.
struct SimConfig {
  // users and radio front-end
  int num_users = 20;
  int n_horizontal = 8;
  int n_vertical = 2;
  int n_rx = 1;
  int n_rf = 8;
  int i_max = 8;

  // OFDM grid
  int num_prbs = 12;
  int subcarriers_per_prb = 12;
  int symbols_per_slot = 14;
  double symbol_duration_s = 2.23e-6;
  double scs_hz = 480e3;
  double carrier_hz = 28e9;

  // link budget
  double power_dbm = 20.0;
  double noise_dbm = -30.0;
  double link_gain_db = 60.0;

  // geometry and channel
  double cell_radius_m = 100.0;
  double bs_height_m = 7.0;
  double max_speed_mps = 3.0;
  double max_doppler_hz = 258.0;
  double element_spacing = 0.5;
  double downtilt_deg = 10.0;
  int codebook_azimuth = 32;
  int codebook_elevation = 8;
  double azimuth_min_deg = -180.0;
  double azimuth_max_deg = 180.0;
  double elevation_min_deg = -30.0;
  double elevation_max_deg = 30.0;

  // protocol
  int slots_per_long_block = 1;
  int n_long_blocks = 100;
  double eta = 0.1;
  double max_condition = 1e12;
  std::string scheduler = "greedy-inc";
  std::uint64_t seed = 1;

  int n_tx() const { return n_horizontal * n_vertical; }
  double prb_width_hz() const { return subcarriers_per_prb * scs_hz; }
  double slot_duration_s() const { return symbols_per_slot * symbol_duration_s; }
  double bandwidth_factor() const { return static_cast<double>(subcarriers_per_prb * symbols_per_slot); }
  double power_watts() const;
  double noise_watts() const;
  int total_slots() const { return n_long_blocks * slots_per_long_block; }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

}  // namespace hbs

#endif  // HBS_CONFIG_HPP
