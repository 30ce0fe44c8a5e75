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

// Command-line front end: simulate, sweep, gen-dataset, train, eval, profile.

#include "hbs/experiment.hpp"
#include "hbs/learner.hpp"
#include "hbs/protocol.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using nlohmann::json;

struct Overrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    for (const auto& key : hbs::config_keys()) {
      app->add_option_function<std::string>("--" + key, [this, key](const std::string& v) { values[key] = v; },
                                            "override config field " + key);
    }
  }
  void apply(hbs::SimConfig& cfg) const {
    for (const auto& [k, v] : values) hbs::set_config_field(cfg, k, v);
  }
};

hbs::ExperimentSpec load_spec(const std::string& path, const Overrides& overrides) {
  hbs::ExperimentSpec spec = path.empty() ? hbs::ExperimentSpec{} : hbs::parse_config_file(path);
  overrides.apply(spec.base);
  spec.base.validate();
  return spec;
}

std::shared_ptr<const hbs::Mlp> maybe_model(const std::string& scheduler, const std::string& path) {
  if (scheduler != "learned") return nullptr;
  if (path.empty()) throw hbs::ConfigError("model", "the learned scheduler needs --model");
  return std::make_shared<const hbs::Mlp>(hbs::load_model(path));
}

json timings_json(const hbs::ComponentTimings& t) {
  return {{"effective_channel", t.effective_channel}, {"precoder", t.precoder}, {"search", t.search}};
}

std::string join(const hbs::UserSet& s) {
  std::ostringstream os;
  for (std::size_t a = 0; a < s.size(); ++a) os << (a ? " " : "") << s[a];
  return os.str();
}

void write_slots_csv(const std::string& path, const hbs::EpisodeResult& res) {
  std::ofstream os(path);
  if (!os) throw hbs::InputError("cannot write " + path);
  os << std::setprecision(17);
  os << "slot,long_block,selected,sum_rate,weighted_sum_rate,pf,evaluations,extra_evaluations,"
        "effective_channel_time,precoder_time,search_time,total_time\n";
  for (const auto& s : res.slots) {
    os << s.slot << ',' << s.long_block << ',' << join(s.selected) << ',' << s.sum_rate << ',' << s.weighted_sum_rate
       << ',' << s.pf << ',' << s.evaluation_count << ',' << s.extra_evaluations << ',' << s.timings.effective_channel
       << ',' << s.timings.precoder << ',' << s.timings.search << ',' << s.total_time << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Joint user scheduling and hybrid beamforming simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one episode and print a JSON summary");
  std::string sim_config, sim_model, slots_csv, tracker_csv, channel_csv;
  Overrides sim_over;
  sim->add_option("--config", sim_config, "JSON config file");
  sim->add_option("--model", sim_model, "checkpoint for the learned scheduler");
  sim->add_option("--slots-csv", slots_csv, "per-slot trace output");
  sim->add_option("--tracker-csv", tracker_csv, "per-slot cumulative rate output");
  sim->add_option("--channel-csv", channel_csv, "channel tensor of the first slot");
  sim_over.attach(sim);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a scheduler x parameter sweep");
  std::string sweep_config, sweep_model, sweep_out, sweep_format, sweep_var;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_scheds;
  int sweep_reps = 0, sweep_workers = 0;
  Overrides sweep_over;
  sweep->add_option("--config", sweep_config, "JSON config file");
  sweep->add_option("--model", sweep_model, "checkpoint for the learned scheduler");
  sweep->add_option("--variable", sweep_var, "config field to sweep");
  sweep->add_option("--values", sweep_values, "sweep values");
  sweep->add_option("--schedulers", sweep_scheds, "schedulers to compare");
  sweep->add_option("--repetitions", sweep_reps, "episodes per cell");
  sweep->add_option("--workers", sweep_workers, "parallel cells");
  sweep->add_option("--output-dir", sweep_out, "result directory");
  sweep->add_option("--format", sweep_format, "csv or json");
  sweep_over.attach(sweep);

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "record greedy-incremental decisions as training samples");
  std::string gen_config, gen_out;
  int gen_episodes = 120, gen_slots = 100;
  std::uint64_t gen_seed = 1;
  Overrides gen_over;
  gen->add_option("--config", gen_config, "JSON config file");
  gen->add_option("--episodes", gen_episodes, "number of episodes")->check(CLI::NonNegativeNumber);
  gen->add_option("--slots", gen_slots, "slots per episode")->check(CLI::NonNegativeNumber);
  gen->add_option("--dataset-seed", gen_seed, "seed for the episode streams");
  gen->add_option("--out", gen_out, "dataset file")->required();
  gen_over.attach(gen);

  // train
  auto* tr = app.add_subcommand("train", "train the scheduling network");
  std::string tr_data, tr_out, tr_init;
  double tr_beta = 0.8;
  hbs::TrainOptions topt;
  tr->add_option("--data", tr_data, "dataset file")->required();
  tr->add_option("--out", tr_out, "checkpoint file")->required();
  tr->add_option("--init", tr_init, "resume from this checkpoint");
  tr->add_option("--beta", tr_beta, "train fraction");
  tr->add_option("--epochs", topt.epochs, "epochs");
  tr->add_option("--batch-size", topt.batch_size, "mini-batch size");
  tr->add_option("--learning-rate", topt.learning_rate, "step size");
  tr->add_option("--optimizer", topt.optimizer, "sgd or adam");
  tr->add_option("--hidden", topt.hidden, "hidden layer sizes");
  tr->add_option("--train-seed", topt.seed, "initialization and shuffling seed");
  bool tr_quiet = false;
  tr->add_flag("--quiet", tr_quiet, "suppress per-epoch progress");

  // eval
  auto* ev = app.add_subcommand("eval", "classification accuracy on the held-out split");
  std::string ev_data, ev_model;
  double ev_beta = 0.8;
  ev->add_option("--data", ev_data, "dataset file")->required();
  ev->add_option("--model", ev_model, "checkpoint file")->required();
  ev->add_option("--beta", ev_beta, "train fraction; the remainder is evaluated");

  // profile
  auto* prof = app.add_subcommand("profile", "component timing profile per scheduler");
  std::string prof_config, prof_model;
  std::vector<std::string> prof_scheds{"greedy-inc", "greedy-dec", "sorting", "random"};
  int prof_reps = 5;
  Overrides prof_over;
  prof->add_option("--config", prof_config, "JSON config file");
  prof->add_option("--model", prof_model, "checkpoint for the learned scheduler");
  prof->add_option("--schedulers", prof_scheds, "schedulers to profile");
  prof->add_option("--repetitions", prof_reps, "episodes per scheduler")->check(CLI::PositiveNumber);
  prof_over.attach(prof);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  if (sim->parsed()) {
    const auto spec = load_spec(sim_config, sim_over);
    const hbs::SimConfig& cfg = spec.base;
    auto policy = hbs::make_any_policy(cfg.scheduler, maybe_model(cfg.scheduler, sim_model));
    const auto res = hbs::run_episode(cfg, *policy);
    if (!slots_csv.empty()) write_slots_csv(slots_csv, res);
    if (!tracker_csv.empty()) {
      std::ofstream os(tracker_csv);
      os << std::setprecision(17) << "slot,user,R\n";
      hbs::RateTracker tracker(cfg.num_users, cfg.eta);
      tracker.write_csv_rows(os);
      for (const auto& s : res.slots) {
        tracker.update(s.rates);
        tracker.write_csv_rows(os);
      }
    }
    if (!channel_csv.empty()) {
      hbs::Simulator probe(cfg);
      probe.begin_long_block();
      std::ofstream os(channel_csv);
      os << std::setprecision(17);
      hbs::write_channel_csv(os, hbs::evolve_short_block(probe.paths(), probe.topology(), 0, cfg));
    }
    json out{{"scheduler", res.scheduler},
             {"seed", cfg.seed},
             {"slots", res.slots.size()},
             {"final_pf", res.final_pf},
             {"mean_sum_rate", res.mean_sum_rate},
             {"selected_fraction", res.mean_selected / cfg.num_users},
             {"mean_slot_time", res.mean_slot_time},
             {"timings", timings_json(res.mean_timings)}};
    std::cout << out.dump(2) << '\n';
  } else if (sweep->parsed()) {
    auto spec = load_spec(sweep_config, sweep_over);
    if (!sweep_var.empty()) spec.sweep_variable = sweep_var;
    if (!sweep_values.empty()) spec.sweep_values = sweep_values;
    if (!sweep_scheds.empty()) spec.schedulers = sweep_scheds;
    if (sweep_reps) spec.repetitions = sweep_reps;
    if (sweep_workers) spec.workers = sweep_workers;
    if (!sweep_out.empty()) spec.output_dir = sweep_out;
    if (!sweep_format.empty()) spec.format = sweep_format;
    if (!sweep_model.empty()) spec.model_path = sweep_model;
    spec.validate();
    const auto records = hbs::run_sweep(spec);
    hbs::write_sweep_outputs(spec, records);
    hbs::write_tradeoff_csv(std::cout, hbs::emit_tradeoff(records));
  } else if (gen->parsed()) {
    const auto spec = load_spec(gen_config, gen_over);
    const auto ds = hbs::generate_dataset(spec.base, gen_episodes, gen_slots, gen_seed);
    hbs::save_dataset(gen_out, ds);
    std::cout << json{{"samples", ds.size()}, {"features", ds.feature_size()}, {"out", gen_out}}.dump() << '\n';
  } else if (tr->parsed()) {
    const auto ds = hbs::load_dataset(tr_data);
    const auto [train_set, eval_set] = ds.split(tr_beta);
    if (!tr_quiet) {
      topt.on_epoch = [](int epoch, double loss) {
        std::cerr << "epoch " << epoch << " loss " << std::setprecision(6) << loss << '\n';
      };
    }
    const auto result = tr_init.empty() ? hbs::train(train_set, topt) : hbs::train(train_set, hbs::load_model(tr_init), topt);
    hbs::save_model(tr_out, result.model);
    json out{{"initial_loss", result.initial_loss},
             {"final_loss", result.epoch_loss.empty() ? result.initial_loss : result.epoch_loss.back()},
             {"seconds", result.seconds},
             {"train_samples", train_set.size()},
             {"out", tr_out}};
    if (eval_set.size() > 0) {
      const auto rep = hbs::evaluate_classifier(result.model, eval_set);
      out["eval_accuracy"] = rep.accuracy;
      out["zero_baseline"] = rep.zero_baseline;
    }
    std::cout << out.dump(2) << '\n';
  } else if (ev->parsed()) {
    const auto ds = hbs::load_dataset(ev_data);
    const auto eval_set = ds.split(ev_beta).second;
    const auto rep = hbs::evaluate_classifier(hbs::load_model(ev_model), eval_set);
    std::cout << json{{"samples", eval_set.size()},
                      {"accuracy", rep.accuracy},
                      {"zero_baseline", rep.zero_baseline},
                      {"positive_rate", rep.positive_rate},
                      {"predicted_rate", rep.predicted_rate},
                      {"loss", rep.loss}}
                     .dump(2)
              << '\n';
  } else if (prof->parsed()) {
    const auto spec = load_spec(prof_config, prof_over);
    json out = json::array();
    for (const auto& name : prof_scheds) {
      auto policy = hbs::make_any_policy(name, maybe_model(name, prof_model));
      std::vector<hbs::SlotRecord> all;
      for (int r = 0; r < prof_reps; ++r) {
        hbs::SimConfig cfg = spec.base;
        cfg.seed = hbs::make_stream(spec.base.seed, {7, static_cast<std::uint64_t>(r)})();
        auto res = hbs::run_episode(cfg, *policy);
        all.insert(all.end(), res.slots.begin(), res.slots.end());
      }
      const auto p = hbs::profile_components(all);
      out.push_back({{"scheduler", name},
                     {"slots", p.slots},
                     {"mean", timings_json(p.mean)},
                     {"mean_total", p.mean_total},
                     {"median_total", p.median_total}});
    }
    std::cout << out.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hbs::ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"key", e.key()}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "runtime"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}
