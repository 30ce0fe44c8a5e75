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

#include "hbs/config.hpp"

#include "hbs/common.hpp"

#include <cmath>

namespace hbs {

double SimConfig::power_watts() const { return dbm_to_watts(power_dbm); }
double SimConfig::noise_watts() const { return dbm_to_watts(noise_dbm); }

namespace {

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void SimConfig::validate() const {
  require(num_users >= 1, "num_users", "must be >= 1");
  require(n_horizontal >= 1, "n_horizontal", "must be >= 1");
  require(n_vertical >= 1, "n_vertical", "must be >= 1");
  require(n_rx >= 1, "n_rx", "must be >= 1");
  require(n_rf >= 1, "n_rf", "must be >= 1");
  require(n_rf < n_tx(), "n_rf", "must be smaller than n_horizontal*n_vertical");
  require(i_max >= 1, "i_max", "must be >= 1");
  require(i_max <= num_users, "i_max", "must not exceed num_users");
  require(i_max <= n_rf, "i_max", "must not exceed n_rf");
  require(num_prbs >= 1, "num_prbs", "must be >= 1");
  require(subcarriers_per_prb >= 1, "subcarriers_per_prb", "must be >= 1");
  require(symbols_per_slot >= 1, "symbols_per_slot", "must be >= 1");
  require(symbol_duration_s > 0, "symbol_duration_s", "must be positive");
  require(scs_hz > 0, "scs_hz", "must be positive");
  require(carrier_hz > 0, "carrier_hz", "must be positive");
  require(std::isfinite(power_dbm), "power_dbm", "must be finite");
  require(std::isfinite(noise_dbm), "noise_dbm", "must be finite");
  require(std::isfinite(link_gain_db), "link_gain_db", "must be finite");
  require(cell_radius_m >= 0, "cell_radius_m", "must be non-negative");
  require(bs_height_m >= 0, "bs_height_m", "must be non-negative");
  require(max_speed_mps >= 0, "max_speed_mps", "must be non-negative");
  require(max_doppler_hz >= 0, "max_doppler_hz", "must be non-negative");
  require(element_spacing > 0, "element_spacing", "must be positive");
  require(codebook_azimuth >= 1, "codebook_azimuth", "must be >= 1");
  require(codebook_elevation >= 1, "codebook_elevation", "must be >= 1");
  require(azimuth_min_deg >= -180 && azimuth_max_deg <= 180 && azimuth_min_deg <= azimuth_max_deg,
          "azimuth_min_deg", "azimuth range must lie in [-180, 180]");
  require(elevation_min_deg >= -90 && elevation_max_deg <= 90 && elevation_min_deg <= elevation_max_deg,
          "elevation_min_deg", "elevation range must lie in [-90, 90]");
  require(slots_per_long_block >= 1, "slots_per_long_block", "must be >= 1");
  require(n_long_blocks >= 1, "n_long_blocks", "must be >= 1");
  require(eta >= 0 && eta <= 1, "eta", "must lie in [0, 1]");
  require(max_condition > 1, "max_condition", "must exceed 1");
  require(scheduler == "brute" || scheduler == "greedy-inc" || scheduler == "greedy-dec" ||
              scheduler == "sorting" || scheduler == "random" || scheduler == "learned",
          "scheduler", "unknown scheduler '" + scheduler + "'");
}

}  // namespace hbs
