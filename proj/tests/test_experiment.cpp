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

#include "hbs/experiment.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hbs;

namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec spec;
  spec.base.n_long_blocks = 3;
  spec.schedulers = {"greedy-inc", "random"};
  spec.sweep_values = {1, 8};
  spec.repetitions = 2;
  return spec;
}

std::string non_timing(const std::vector<SweepRecord>& rs) {
  std::ostringstream os;
  for (const auto& r : rs) {
    os << r.scheduler << r.value << r.repetition << r.seed << r.final_pf << ' ' << r.mean_pf << ' ' << r.mean_sum_rate
       << ' ' << r.selected_fraction << ' ' << r.mean_evaluations << '\n';
  }
  return os.str();
}

}  // namespace

TEST_CASE("empty config yields the reference defaults") {
  const ExperimentSpec spec = parse_config_text("{}");
  CHECK(spec.base.num_users == 20);
  CHECK(spec.base.n_rf == 8);
  CHECK(spec.base.num_prbs == 12);
  CHECK(spec.base.power_dbm == 20.0);
  CHECK(spec.base.noise_dbm == -30.0);
  CHECK(spec.base == SimConfig{});
  CHECK(parse_config_text("") == spec);
}

TEST_CASE("constraint violations name the key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<accepted>");
  };
  CHECK(key_of(R"({"config": {"i_max": 0}})") == "i_max");
  CHECK(key_of(R"({"config": {"i_max": 21}})") == "i_max");
  CHECK(key_of(R"({"config": {"n_rf": 16}})") == "n_rf");
  CHECK(key_of(R"({"config": {"slots_per_long_block": 0}})") == "slots_per_long_block");
  CHECK(key_of(R"({"config": {"unknown_field": 1}})") == "unknown_field");
  CHECK(key_of(R"({"bogus": {}})") == "bogus");
  CHECK(key_of(R"({"experiment": {"repetitions": 0}})") == "repetitions");
  CHECK(key_of(R"({"experiment": {"schedulers": ["fifo"]}})") == "schedulers");
  CHECK(key_of(R"({"config": {"num_users": "many"}})") == "num_users");
  CHECK(key_of(R"({"config": {"num_users": 2.5}})") == "num_users");
  CHECK(key_of("{not json") == "<file>");
}

TEST_CASE("spec survives a serialization round trip") {
  ExperimentSpec spec = tiny_spec();
  spec.base.eta = 0.25;
  spec.base.seed = 77;
  spec.base.scheduler = "sorting";
  spec.format = "json";
  CHECK(parse_config_text(to_json_text(spec)) == spec);
  CHECK(parse_config_text(to_json_text(ExperimentSpec{})) == ExperimentSpec{});
  const std::string path = (std::filesystem::temp_directory_path() / "hbs_spec.json").string();
  std::ofstream(path) << to_json_text(spec);
  CHECK(parse_config_file(path) == spec);
  std::filesystem::remove(path);
}

TEST_CASE("config fields can be set from text") {
  SimConfig cfg;
  set_config_field(cfg, "i_max", "4");
  set_config_field(cfg, "eta", "0.5");
  set_config_field(cfg, "scheduler", "random");
  set_config_field(cfg, "seed", "18446744073709551615");
  CHECK(cfg.i_max == 4);
  CHECK(cfg.eta == 0.5);
  CHECK(cfg.scheduler == "random");
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(get_config_field(cfg, "eta") == "0.5");
  CHECK_THROWS_AS(set_config_field(cfg, "i_max", "4x"), ConfigError);
  CHECK_THROWS_AS(set_config_field(cfg, "nope", "1"), ConfigError);
  CHECK(config_keys().size() == 33);
}

TEST_CASE("sweeping the cap raises the RF chains with it") {
  ExperimentSpec spec;
  spec.sweep_values = {12};
  const SimConfig cfg = cell_config(spec, 12, 0);
  CHECK(cfg.i_max == 12);
  CHECK(cfg.n_rf == 12);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cell_config(spec, 12, 0).seed == cfg.seed);
  CHECK(cell_config(spec, 12, 1).seed != cfg.seed);
  spec.sweep_values = {16};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("sweep yields one record per scheduler, value and repetition") {
  const ExperimentSpec spec = tiny_spec();
  const auto records = run_sweep(spec);
  REQUIRE(records.size() == 8);
  CHECK(records[0].scheduler == "greedy-inc");
  CHECK(records[0].value == 1);
  CHECK(records[0].repetition == 0);
  CHECK(records[1].repetition == 1);
  CHECK(records[2].scheduler == "random");
  CHECK(records[4].value == 8);
  for (const auto& r : records) {
    CHECK(r.selected_fraction <= r.value / 20.0 + 1e-12);
    CHECK(r.effective_channel_time + r.precoder_time + r.search_time <= r.mean_slot_time * (1 + 1e-9));
  }
  // Same seeds, same non-timing columns, even across worker counts.
  ExperimentSpec parallel = spec;
  parallel.workers = 3;
  CHECK(non_timing(run_sweep(parallel)) == non_timing(records));
}

TEST_CASE("sweep failures identify the cell") {
  ExperimentSpec spec = tiny_spec();
  spec.base.num_users = 30;
  spec.schedulers = {"brute"};
  spec.sweep_values = {8};
  try {
    run_sweep(spec);
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("brute") != std::string::npos);
    CHECK(std::string(e.what()).find("i_max=8") != std::string::npos);
  }
  spec.schedulers = {"learned"};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}

TEST_CASE("trade-off ratios") {
  SweepRecord a{.scheduler = "greedy-inc", .final_pf = 10.0, .mean_slot_time = 4.0};
  SweepRecord b{.scheduler = "learned", .final_pf = 5.0, .mean_slot_time = 1.0};
  SweepRecord c{.scheduler = "random", .final_pf = 5.0, .mean_slot_time = 0.5};

  const auto single = emit_tradeoff({a, a});
  REQUIRE(single.size() == 1);
  CHECK(single[0].pf_ratio == 1.0);
  CHECK(single[0].runtime_ratio == 1.0);

  const auto rows = emit_tradeoff({a, b, c});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].pf_ratio == 2.0);
  CHECK(rows[0].runtime_ratio == 4.0);
  CHECK(rows[1].pf_ratio == 1.0);
  CHECK(rows[2].pf_ratio == 1.0);
  CHECK(rows[2].runtime_ratio == 0.5);
}

TEST_CASE("outputs carry a fixed schema and provenance") {
  ExperimentSpec spec = tiny_spec();
  spec.sweep_values = {2};
  spec.repetitions = 1;
  spec.output_dir = (std::filesystem::temp_directory_path() / "hbs_sweep_out").string();
  const auto records = run_sweep(spec);
  write_sweep_outputs(spec, records);

  std::ifstream csv(spec.output_dir + "/sweep.csv");
  std::string header;
  std::getline(csv, header);
  std::string expect;
  for (const auto& c : sweep_columns()) expect += (expect.empty() ? "" : ",") + c;
  CHECK(header == expect);

  const auto meta = nlohmann::json::parse(std::ifstream(spec.output_dir + "/metadata.json"));
  CHECK(meta["seed"] == spec.base.seed);
  CHECK(meta["config_hash"].get<std::string>().size() == 16);
  CHECK(meta.contains("git_revision"));
  CHECK(parse_config_text(meta["spec"].dump()) == spec);
  CHECK(std::filesystem::exists(spec.output_dir + "/tradeoff.csv"));
  std::filesystem::remove_all(spec.output_dir);

  ExperimentSpec other = spec;
  other.base.seed = 9;
  CHECK(config_hash(other) != config_hash(spec));
}
