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

#include "cfd/harness/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>

#include "cfd/codes/gold.hpp"
#include "cfd/fed/session.hpp"
#include "cfd/harness/csv.hpp"

namespace cfd {

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string strategy_label(const ExperimentConfig& cfg) {
  return cfg.round.alpha == 0.0 ? "none"
                                : code_variant_name(cfg.round.strategy.variant);
}

}  // namespace

void run_gen_codes(const ExperimentConfig& cfg) {
  std::vector<int> widths;
  if (cfg.codes_width > 0) {
    widths.push_back(cfg.codes_width);
  } else {
    const ModelSpec spec = validate_model_and_strategy(cfg);
    widths = maskable_widths(spec);
    require(!widths.empty(), ErrorCode::ConfigError,
            "the model has no maskable layers; set codes.width");
  }

  std::ofstream report(out_path(cfg, "codes_report.txt"));
  require(report.good(), ErrorCode::IoError, "cannot open codes report");
  for (size_t i = 0; i < widths.size(); ++i) {
    const MaskMatrix m = build_mask_matrix(
        {cfg.round.strategy.variant, derive_seed(cfg.seed, "gen_codes", i)},
        widths[i], cfg.round.clients_per_round, cfg.round.alpha,
        cfg.round.cwc_max_iters);
    const std::string file =
        "codes_w" + std::to_string(widths[i]) + "_" +
        code_variant_name(m.variant) + ".txt";
    save_mask_matrix(out_path(cfg, file), m);

    report << "file " << file << '\n';
    report << "width " << m.layer_width << '\n';
    report << "rows " << m.rows.size() << '\n';
    report << "weight " << m.keep_weight << '\n';
    report << "strategy " << code_variant_name(m.variant) << '\n';
    report << "rows_identical " << (mask_rows_identical(m) ? "true" : "false")
           << '\n';
    report << "min_pairwise_distance " << mask_min_pairwise_distance(m)
           << '\n';
    if (m.variant == CodeVariant::Cwc)
      report << "achieved_min_distance " << m.achieved_min_distance << '\n';
    if (m.variant == CodeVariant::Gold) {
      int degree = 0;
      while ((1 << (degree + 1)) <= m.layer_width) ++degree;
      const auto pair = preferred_pair(degree);
      const long long max_corr =
          max_cross_correlation_scan(gold_family(pair->first, pair->second));
      report << "family_max_abs_correlation " << max_corr << '\n';
      report << "family_correlation_bound " << gold_correlation_bound(degree)
             << '\n';
    }
    report << '\n';
  }
  std::cout << "wrote " << widths.size() << " mask matrix file(s) to "
            << cfg.out_dir << '\n';
}

void run_train(const ExperimentConfig& cfg) {
  validate_model_and_strategy(cfg);
  const FedEnvironment<float> env = build_environment<float>(cfg);
  FlSession<float> session(&env, cfg.optimizer, cfg.eta,
                           derive_seed(cfg.seed, "train_session"));

  MetricsCsv csv(out_path(cfg, "metrics.csv"));
  const std::string label = strategy_label(cfg);
  for (int t = 0; t < cfg.rounds; ++t) {
    const RoundMetrics& m = session.advance_round();
    std::optional<double> test_acc;
    const bool eval_now =
        cfg.eval_interval > 0 && session.has_test_data() &&
        ((t + 1) % cfg.eval_interval == 0 || t + 1 == cfg.rounds);
    if (eval_now) test_acc = session.test_accuracy();
    csv.write_row(m, cfg.eta, label, test_acc, session.cumulative_bytes());
  }
  save_weights(out_path(cfg, "final_weights.bin"), env.spec,
               session.weights());

  std::cout << "trained " << cfg.rounds << " rounds (" << label
            << "), final median train accuracy "
            << fmt_fixed6(session.history().back().median_train_acc);
  if (cfg.eval_interval > 0 && session.has_test_data())
    std::cout << ", test accuracy " << fmt_fixed6(session.test_accuracy());
  std::cout << ", total bytes " << session.cumulative_bytes() << '\n';
}

void run_adapt(const ExperimentConfig& cfg) {
  validate_model_and_strategy(cfg);
  const FedEnvironment<float> env = build_environment<float>(cfg);
  const SessionFactory factory =
      make_fl_session_factory<float>(&env, cfg.optimizer);

  std::vector<SessionResult> partial;
  AdaptationResult result;
  try {
    result = run_adaptation(factory, cfg.adapt, &partial);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoCandidateReachedTarget)
      write_adaptation_log(out_path(cfg, "adapt_log.csv"), partial,
                           std::nullopt);
    throw;
  }

  AdaptationSummary summary;
  summary.eta_star_log10 = result.eta_star_log10;
  summary.r_star = result.r_star;
  summary.overhead = result.overhead;
  summary.baseline_extra_rounds =
      static_cast<long long>(candidates_tried(cfg.adapt.steps) - 1) *
      cfg.adapt.max_rounds;
  write_adaptation_log(out_path(cfg, "adapt_log.csv"), result.sessions,
                       summary);

  std::cout << "selected eta_log10 " << fmt_compact(result.eta_star_log10)
            << " (eta " << fmt_compact(std::pow(10.0, result.eta_star_log10))
            << ") after " << result.total_rounds_executed
            << " rounds; rounds to target " << result.r_star << ", overhead "
            << result.overhead << " vs full-session baseline "
            << summary.baseline_extra_rounds << '\n';
}

void run_report(const std::vector<std::string>& inputs,
                const std::string& out_dir) {
  require(!inputs.empty(), ErrorCode::ConfigError,
          "report needs at least one metrics csv");
  std::filesystem::create_directories(out_dir);

  struct Agg {
    int runs = 0;
    double median_sum = 0;
    int test_runs = 0;
    double test_sum = 0;
    double bytes_sum = 0;
  };
  std::map<std::pair<std::string, int>, Agg> by_round;
  for (const std::string& path : inputs) {
    for (const MetricsRow& r : read_metrics_csv(path)) {
      Agg& a = by_round[{r.strategy, r.round}];
      a.runs += 1;
      a.median_sum += r.median_train_acc;
      a.bytes_sum += static_cast<double>(r.cumulative_bytes);
      if (r.test_acc) {
        a.test_runs += 1;
        a.test_sum += *r.test_acc;
      }
    }
  }

  std::ofstream rounds_out(
      (std::filesystem::path(out_dir) / "report_rounds.csv").string());
  require(rounds_out.good(), ErrorCode::IoError, "cannot open report output");
  rounds_out << "strategy,round,runs,mean_median_train_acc,mean_test_acc\n";
  std::ofstream bytes_out(
      (std::filesystem::path(out_dir) / "report_bytes.csv").string());
  require(bytes_out.good(), ErrorCode::IoError, "cannot open report output");
  bytes_out << "strategy,round,mean_cumulative_bytes,mean_test_acc\n";

  for (const auto& [key, a] : by_round) {
    rounds_out << key.first << ',' << key.second << ',' << a.runs << ','
               << fmt_fixed6(a.median_sum / a.runs) << ','
               << (a.test_runs ? fmt_fixed6(a.test_sum / a.test_runs)
                               : std::string())
               << '\n';
    if (a.test_runs)
      bytes_out << key.first << ',' << key.second << ','
                << fmt_compact(a.bytes_sum / a.runs) << ','
                << fmt_fixed6(a.test_sum / a.test_runs) << '\n';
  }
  std::cout << "wrote report_rounds.csv and report_bytes.csv to " << out_dir
            << '\n';
}

}  // namespace cfd
