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

#ifndef CFD_HARNESS_CSV_HPP
#define CFD_HARNESS_CSV_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "cfd/adapt/adapt.hpp"
#include "cfd/fed/round.hpp"

namespace cfd {

// Round metrics schema:
//   round,eta,strategy,median_train_acc,mean_train_acc,test_acc,
//   bytes_down,bytes_up,cumulative_bytes
// test_acc stays empty on rounds without an evaluation.
class MetricsCsv {
 public:
  MetricsCsv(const std::string& path);
  void write_row(const RoundMetrics& m, double eta,
                 const std::string& strategy, std::optional<double> test_acc,
                 unsigned long long cumulative_bytes);

 private:
  std::ofstream out_;
};

struct MetricsRow {
  int round = 0;
  double eta = 0.0;
  std::string strategy;
  double median_train_acc = 0.0;
  double mean_train_acc = 0.0;
  std::optional<double> test_acc;
  unsigned long long bytes_down = 0, bytes_up = 0, cumulative_bytes = 0;
};

std::vector<MetricsRow> read_metrics_csv(const std::string& path);

struct AdaptationSummary {
  double eta_star_log10 = 0.0;
  int r_star = 0;
  long long overhead = 0;
  long long baseline_extra_rounds = 0;
};

// Adaptation log schema:
//   step,eta_log10,round,median_acc,window_mean,aborted,reached
// one row per executed round per candidate; the terminal row of a session
// carries its aborted/reached flag. A successful search appends a
// '# eta_star_log10=... r_star=... overhead=... baseline_extra_rounds=...'
// summary line.
void write_adaptation_log(const std::string& path,
                          const std::vector<SessionResult>& sessions,
                          const std::optional<AdaptationSummary>& summary);

// Deterministic number formatting shared by all emitters.
std::string fmt_fixed6(double v);
std::string fmt_compact(double v);

}  // namespace cfd

#endif  // CFD_HARNESS_CSV_HPP
