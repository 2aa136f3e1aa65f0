/*
 * Copyright 2026 The cfdsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfd/harness/commands.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--override", args.overrides,
                  "key=value configuration override (repeatable)");
  cmd->add_option("--seed", args.seed, "run seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

cfd::ExperimentConfig assemble(const CommonArgs& args) {
  cfd::ConfigMap map = args.config_path.empty()
                           ? cfd::ConfigMap::from_string("")
                           : cfd::ConfigMap::from_file(args.config_path);
  for (const std::string& kv : args.overrides) map.apply_override(kv);
  if (args.seed_set) map.apply_override("run.seed=" + std::to_string(args.seed));
  if (!args.out_dir.empty()) map.apply_override("run.out=" + args.out_dir);
  cfd::ExperimentConfig cfg = cfd::make_experiment_config(map);
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic federated-learning simulator with coded dropout"};
  app.require_subcommand(1);

  CommonArgs gen_args, train_args, adapt_args;
  CLI::App* gen = app.add_subcommand(
      "gen-codes", "generate per-layer mask matrices and a metrics report");
  add_common(gen, gen_args);
  CLI::App* train =
      app.add_subcommand("train", "run a federated training session");
  add_common(train, train_args);
  CLI::App* adapt = app.add_subcommand(
      "adapt", "search the server learning rate with early-abort sessions");
  add_common(adapt, adapt_args);

  std::vector<std::string> report_inputs;
  std::string report_out = ".";
  CLI::App* report = app.add_subcommand(
      "report", "aggregate metrics CSVs into round and bytes tables");
  report->add_option("inputs", report_inputs, "metrics csv files")->required();
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) cfd::run_gen_codes(assemble(gen_args));
    if (train->parsed()) cfd::run_train(assemble(train_args));
    if (adapt->parsed()) cfd::run_adapt(assemble(adapt_args));
    if (report->parsed()) cfd::run_report(report_inputs, report_out);
  } catch (const cfd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool config_fault = e.code() == cfd::ErrorCode::ConfigError ||
                              e.code() == cfd::ErrorCode::ParseError;
    return config_fault ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
