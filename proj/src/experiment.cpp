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

#include "hbs/learner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#ifndef HBS_GIT_REVISION
#define HBS_GIT_REVISION "unknown"
#endif

namespace hbs {

namespace {

using nlohmann::json;

constexpr std::uint64_t kRepetitionStream = 7;

template <typename Cfg, typename F>
void visit_fields(Cfg& c, F&& f) {
  f("num_users", c.num_users);
  f("n_horizontal", c.n_horizontal);
  f("n_vertical", c.n_vertical);
  f("n_rx", c.n_rx);
  f("n_rf", c.n_rf);
  f("i_max", c.i_max);
  f("num_prbs", c.num_prbs);
  f("subcarriers_per_prb", c.subcarriers_per_prb);
  f("symbols_per_slot", c.symbols_per_slot);
  f("symbol_duration_s", c.symbol_duration_s);
  f("scs_hz", c.scs_hz);
  f("carrier_hz", c.carrier_hz);
  f("power_dbm", c.power_dbm);
  f("noise_dbm", c.noise_dbm);
  f("link_gain_db", c.link_gain_db);
  f("cell_radius_m", c.cell_radius_m);
  f("bs_height_m", c.bs_height_m);
  f("max_speed_mps", c.max_speed_mps);
  f("max_doppler_hz", c.max_doppler_hz);
  f("element_spacing", c.element_spacing);
  f("downtilt_deg", c.downtilt_deg);
  f("codebook_azimuth", c.codebook_azimuth);
  f("codebook_elevation", c.codebook_elevation);
  f("azimuth_min_deg", c.azimuth_min_deg);
  f("azimuth_max_deg", c.azimuth_max_deg);
  f("elevation_min_deg", c.elevation_min_deg);
  f("elevation_max_deg", c.elevation_max_deg);
  f("slots_per_long_block", c.slots_per_long_block);
  f("n_long_blocks", c.n_long_blocks);
  f("eta", c.eta);
  f("max_condition", c.max_condition);
  f("scheduler", c.scheduler);
  f("seed", c.seed);
}

template <typename T>
void parse_number(const std::string& key, const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  T value{};
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, "cannot parse '" + text + "'");
  out = value;
}

void parse_value(const std::string& key, const std::string& text, int& out) { parse_number(key, text, out); }
void parse_value(const std::string& key, const std::string& text, std::uint64_t& out) { parse_number(key, text, out); }
void parse_value(const std::string& key, const std::string& text, std::string& out) {
  (void)key;
  out = text;
}
void parse_value(const std::string& key, const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    out = v;
  } catch (const std::exception&) {
    throw ConfigError(key, "cannot parse '" + text + "'");
  }
}

template <typename T>
void from_json_value(const std::string& key, const json& j, T& out) {
  try {
    out = j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(key, "must be an integer");
  }
}

json config_to_json(const SimConfig& cfg) {
  json j = json::object();
  visit_fields(cfg, [&](const char* name, const auto& v) { j[name] = v; });
  return j;
}

void config_from_json(const json& j, SimConfig& cfg) {
  if (!j.is_object()) throw ConfigError("config", "must be an object");
  for (const auto& [key, _] : j.items()) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, "unknown key");
  }
  visit_fields(cfg, [&](const char* name, auto& v) {
    if (auto it = j.find(name); it != j.end()) from_json_value(name, *it, v);
  });
}

const std::vector<std::string> kExperimentKeys{"sweep_variable", "sweep_values", "schedulers", "repetitions",
                                               "workers", "output_dir", "format", "model_path"};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    SimConfig cfg;
    visit_fields(cfg, [&](const char* name, auto&) { k.emplace_back(name); });
    return k;
  }();
  return keys;
}

void set_config_field(SimConfig& cfg, const std::string& key, const std::string& value) {
  bool found = false;
  visit_fields(cfg, [&](const char* name, auto& v) {
    if (key == name) {
      parse_value(key, value, v);
      found = true;
    }
  });
  if (!found) throw ConfigError(key, "unknown key");
}

std::string get_config_field(const SimConfig& cfg, const std::string& key) {
  std::string out;
  bool found = false;
  visit_fields(cfg, [&](const char* name, const auto& v) {
    if (key != name) return;
    found = true;
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, std::string>) {
      out = v;
    } else if constexpr (std::is_same_v<T, double>) {
      out = fmt(v);
    } else {
      out = std::to_string(v);
    }
  });
  if (!found) throw ConfigError(key, "unknown key");
  return out;
}

void ExperimentSpec::validate() const {
  base.validate();
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), sweep_variable) == keys.end() || sweep_variable == "scheduler") {
    throw ConfigError("sweep_variable", "must name a numeric config field");
  }
  if (sweep_values.empty()) throw ConfigError("sweep_values", "must not be empty");
  if (schedulers.empty()) throw ConfigError("schedulers", "must not be empty");
  for (const auto& s : schedulers) {
    if (!is_known_scheduler(s)) throw ConfigError("schedulers", "unknown scheduler '" + s + "'");
  }
  if (repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (format != "csv" && format != "json") throw ConfigError("format", "must be csv or json");
  for (double v : sweep_values) {
    for (int rep = 0; rep < repetitions; ++rep) cell_config(*this, v, rep).validate();
  }
}

ExperimentSpec parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<file>", "top level must be an object");
  ExperimentSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") {
      config_from_json(value, spec.base);
    } else if (key == "experiment") {
      if (!value.is_object()) throw ConfigError("experiment", "must be an object");
      for (const auto& [k, _] : value.items()) {
        if (std::find(kExperimentKeys.begin(), kExperimentKeys.end(), k) == kExperimentKeys.end()) {
          throw ConfigError(k, "unknown key");
        }
      }
      auto take = [&](const char* k, auto& dst) {
        if (auto it = value.find(k); it != value.end()) from_json_value(k, *it, dst);
      };
      take("sweep_variable", spec.sweep_variable);
      take("sweep_values", spec.sweep_values);
      take("schedulers", spec.schedulers);
      take("repetitions", spec.repetitions);
      take("workers", spec.workers);
      take("output_dir", spec.output_dir);
      take("format", spec.format);
      take("model_path", spec.model_path);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_json_text(const ExperimentSpec& spec) {
  json j;
  j["config"] = config_to_json(spec.base);
  j["experiment"] = {{"sweep_variable", spec.sweep_variable}, {"sweep_values", spec.sweep_values},
                     {"schedulers", spec.schedulers},         {"repetitions", spec.repetitions},
                     {"workers", spec.workers},               {"output_dir", spec.output_dir},
                     {"format", spec.format},                 {"model_path", spec.model_path}};
  return j.dump(2);
}

SimConfig cell_config(const ExperimentSpec& spec, double value, int repetition) {
  SimConfig cfg = spec.base;
  bool integral = false;
  visit_fields(cfg, [&](const char* name, const auto& v) {
    if (spec.sweep_variable == name) integral = std::is_integral_v<std::decay_t<decltype(v)>>;
  });
  if (integral) {
    if (value != std::floor(value)) throw ConfigError(spec.sweep_variable, "integer field swept with " + fmt(value));
    set_config_field(cfg, spec.sweep_variable, std::to_string(static_cast<long long>(value)));
  } else {
    set_config_field(cfg, spec.sweep_variable, fmt(value));
  }
  if (spec.sweep_variable == "i_max") cfg.n_rf = std::max(cfg.n_rf, cfg.i_max);
  cfg.seed = make_stream(spec.base.seed, {kRepetitionStream, static_cast<std::uint64_t>(repetition)})();
  return cfg;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "scheduler",        "variable",      "value",         "repetition",    "seed",
      "final_pf",         "mean_pf",       "mean_sum_rate", "selected_fraction",
      "mean_slot_time",   "median_slot_time", "effective_channel_time", "precoder_time",
      "search_time",      "mean_evaluations"};
  return cols;
}

SweepRecord summarize_episode(const EpisodeResult& episode, const std::string& variable, double value,
                              int repetition) {
  SweepRecord r;
  r.scheduler = episode.scheduler;
  r.variable = variable;
  r.value = value;
  r.repetition = repetition;
  r.seed = episode.config.seed;
  r.final_pf = episode.final_pf;
  r.mean_sum_rate = episode.mean_sum_rate;
  r.selected_fraction = episode.mean_selected / episode.config.num_users;
  r.mean_slot_time = episode.mean_slot_time;
  r.effective_channel_time = episode.mean_timings.effective_channel;
  r.precoder_time = episode.mean_timings.precoder;
  r.search_time = episode.mean_timings.search;
  std::vector<double> times;
  const double n = static_cast<double>(episode.slots.size());
  for (const auto& s : episode.slots) {
    times.push_back(s.total_time);
    r.mean_pf += s.pf / n;
    r.mean_evaluations += static_cast<double>(s.evaluation_count + s.extra_evaluations) / n;
  }
  r.median_slot_time = median(times);
  return r;
}

std::vector<SweepRecord> run_sweep(const ExperimentSpec& spec, std::shared_ptr<const Mlp> model) {
  spec.validate();
  const bool needs_model = std::find(spec.schedulers.begin(), spec.schedulers.end(), "learned") != spec.schedulers.end();
  if (needs_model && !model) {
    if (spec.model_path.empty()) throw ConfigError("model_path", "required for the learned scheduler");
    model = std::make_shared<const Mlp>(load_model(spec.model_path));
  }

  struct Cell {
    double value;
    std::string scheduler;
    int repetition;
  };
  std::vector<Cell> cells;
  for (double v : spec.sweep_values)
    for (const auto& s : spec.schedulers)
      for (int rep = 0; rep < spec.repetitions; ++rep) cells.push_back({v, s, rep});

  std::vector<SweepRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const Cell& cell = cells[c];
      try {
        const SimConfig cfg = cell_config(spec, cell.value, cell.repetition);
        auto policy = make_any_policy(cell.scheduler, model);
        records[c] = summarize_episode(run_episode(cfg, *policy), spec.sweep_variable, cell.value, cell.repetition);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (error.empty()) {
          error = "sweep cell (" + cell.scheduler + ", " + spec.sweep_variable + "=" + fmt(cell.value) +
                  ", repetition " + std::to_string(cell.repetition) + "): " + e.what();
        }
        next = cells.size();
      }
    }
  };
  const int n_threads = std::min<int>(spec.workers, static_cast<int>(cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (!error.empty()) throw std::runtime_error(error);
  return records;
}

std::vector<TradeoffRow> emit_tradeoff(const std::vector<SweepRecord>& records) {
  std::vector<TradeoffRow> rows;
  std::vector<int> counts;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const TradeoffRow& t) { return t.scheduler == r.scheduler; });
    if (it == rows.end()) {
      rows.push_back({r.scheduler});
      counts.push_back(0);
      it = rows.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - rows.begin());
    it->mean_pf += r.final_pf;
    it->mean_runtime += r.mean_slot_time;
    ++counts[idx];
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].mean_pf /= counts[i];
    rows[i].mean_runtime /= counts[i];
  }
  if (rows.empty()) return rows;
  auto ref = std::find_if(rows.begin(), rows.end(), [](const TradeoffRow& t) { return t.scheduler == "learned"; });
  if (ref == rows.end()) ref = rows.begin();
  const TradeoffRow reference = *ref;
  for (auto& row : rows) {
    row.pf_ratio = reference.mean_pf == row.mean_pf ? 1.0 : row.mean_pf / reference.mean_pf;
    row.runtime_ratio = reference.mean_runtime == row.mean_runtime ? 1.0 : row.mean_runtime / reference.mean_runtime;
  }
  return rows;
}

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  const auto& cols = sweep_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& r : records) {
    os << r.scheduler << ',' << r.variable << ',' << fmt(r.value) << ',' << r.repetition << ',' << r.seed << ','
       << fmt(r.final_pf) << ',' << fmt(r.mean_pf) << ',' << fmt(r.mean_sum_rate) << ',' << fmt(r.selected_fraction)
       << ',' << fmt(r.mean_slot_time) << ',' << fmt(r.median_slot_time) << ',' << fmt(r.effective_channel_time)
       << ',' << fmt(r.precoder_time) << ',' << fmt(r.search_time) << ',' << fmt(r.mean_evaluations) << '\n';
  }
}

void write_records_json(std::ostream& os, const std::vector<SweepRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"scheduler", r.scheduler},
                   {"variable", r.variable},
                   {"value", r.value},
                   {"repetition", r.repetition},
                   {"seed", r.seed},
                   {"final_pf", r.final_pf},
                   {"mean_pf", r.mean_pf},
                   {"mean_sum_rate", r.mean_sum_rate},
                   {"selected_fraction", r.selected_fraction},
                   {"mean_slot_time", r.mean_slot_time},
                   {"median_slot_time", r.median_slot_time},
                   {"effective_channel_time", r.effective_channel_time},
                   {"precoder_time", r.precoder_time},
                   {"search_time", r.search_time},
                   {"mean_evaluations", r.mean_evaluations}});
  }
  os << arr.dump(2) << '\n';
}

void write_tradeoff_csv(std::ostream& os, const std::vector<TradeoffRow>& rows) {
  os << "scheduler,mean_pf,mean_runtime,pf_ratio,runtime_ratio\n";
  for (const auto& r : rows) {
    os << r.scheduler << ',' << fmt(r.mean_pf) << ',' << fmt(r.mean_runtime) << ',' << fmt(r.pf_ratio) << ','
       << fmt(r.runtime_ratio) << '\n';
  }
}

std::uint64_t config_hash(const ExperimentSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json_text(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* git_revision() { return HBS_GIT_REVISION; }

std::string metadata_json(const ExperimentSpec& spec) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(spec);
  json j;
  j["seed"] = spec.base.seed;
  j["config_hash"] = hash.str();
  j["git_revision"] = git_revision();
  j["columns"] = sweep_columns();
  j["spec"] = json::parse(to_json_text(spec));
  return j.dump(2);
}

void write_sweep_outputs(const ExperimentSpec& spec, const std::vector<SweepRecord>& records) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);
  const fs::path dir(spec.output_dir);
  {
    std::ofstream os(dir / ("sweep." + spec.format));
    if (!os) throw InputError("cannot write into " + spec.output_dir);
    if (spec.format == "json") {
      write_records_json(os, records);
    } else {
      write_records_csv(os, records);
    }
  }
  {
    std::ofstream os(dir / "tradeoff.csv");
    write_tradeoff_csv(os, emit_tradeoff(records));
  }
  std::ofstream os(dir / "metadata.json");
  os << metadata_json(spec) << '\n';
}

}  // namespace hbs
