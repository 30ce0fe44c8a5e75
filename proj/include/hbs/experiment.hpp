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

#ifndef HBS_EXPERIMENT_HPP
#define HBS_EXPERIMENT_HPP

#include "hbs/config.hpp"
#include "hbs/mlp.hpp"
#include "hbs/protocol.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace hbs {

/// Every SimConfig field name, in declaration order. These are also the
/// config-file keys and the CLI flag names.
const std::vector<std::string>& config_keys();

/// Sets one field from its textual value. Throws ConfigError on an unknown
/// key or an unparsable value. Does not validate.
void set_config_field(SimConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_field(const SimConfig& cfg, const std::string& key);

struct ExperimentSpec {
  SimConfig base;
  std::string sweep_variable = "i_max";
  std::vector<double> sweep_values{8};
  std::vector<std::string> schedulers{"greedy-inc", "greedy-dec", "sorting", "random"};
  int repetitions = 1;
  int workers = 1;
  std::string output_dir = "results";
  std::string format = "csv";  // "csv" or "json"
  std::string model_path;      // required when "learned" is scheduled

  /// Throws ConfigError naming the offending key.
  void validate() const;
  bool operator==(const ExperimentSpec&) const = default;
};

/// JSON object with optional "config" (SimConfig fields) and "experiment"
/// (ExperimentSpec fields) members. Omitted fields keep their defaults;
/// unknown keys are rejected. The result is validated.
ExperimentSpec parse_config_text(const std::string& json_text);
ExperimentSpec parse_config_file(const std::string& path);
std::string to_json_text(const ExperimentSpec& spec);

/// Configuration of one sweep cell. When sweeping i_max, n_rf is raised to
/// i_max if needed so the cell stays within the RF-chain bound.
SimConfig cell_config(const ExperimentSpec& spec, double value, int repetition);

struct SweepRecord {
  std::string scheduler;
  std::string variable;
  double value = 0.0;
  int repetition = 0;
  std::uint64_t seed = 0;
  double final_pf = 0.0;
  double mean_pf = 0.0;            // PF averaged over slots
  double mean_sum_rate = 0.0;
  double selected_fraction = 0.0;  // mean |M| / I
  double mean_slot_time = 0.0;     // seconds
  double median_slot_time = 0.0;
  double effective_channel_time = 0.0;
  double precoder_time = 0.0;
  double search_time = 0.0;
  double mean_evaluations = 0.0;
};

const std::vector<std::string>& sweep_columns();

/// One record per (scheduler, sweep value, repetition), ordered by value,
/// then scheduler, then repetition. Cells run on up to spec.workers threads.
std::vector<SweepRecord> run_sweep(const ExperimentSpec& spec, std::shared_ptr<const Mlp> model = nullptr);

SweepRecord summarize_episode(const EpisodeResult& episode, const std::string& variable, double value, int repetition);

struct TradeoffRow {
  std::string scheduler;
  double mean_pf = 0.0;
  double mean_runtime = 0.0;
  double pf_ratio = 1.0;       // relative to the reference scheduler
  double runtime_ratio = 1.0;
};

/// Per-scheduler means. The reference is "learned" when present, else the
/// first scheduler seen.
std::vector<TradeoffRow> emit_tradeoff(const std::vector<SweepRecord>& records);

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_records_json(std::ostream& os, const std::vector<SweepRecord>& records);
void write_tradeoff_csv(std::ostream& os, const std::vector<TradeoffRow>& rows);

/// Sidecar metadata: spec, seed, FNV-1a hash of the canonical spec, git revision.
std::string metadata_json(const ExperimentSpec& spec);
std::uint64_t config_hash(const ExperimentSpec& spec);
const char* git_revision();

/// Writes sweep.<format>, tradeoff.csv and metadata.json under spec.output_dir.
void write_sweep_outputs(const ExperimentSpec& spec, const std::vector<SweepRecord>& records);

}  // namespace hbs

#endif  // HBS_EXPERIMENT_HPP
