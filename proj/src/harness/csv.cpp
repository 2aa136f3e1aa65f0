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

#include "cfd/harness/csv.hpp"

#include <cstdio>
#include <sstream>

namespace cfd {

std::string fmt_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

MetricsCsv::MetricsCsv(const std::string& path) : out_(path) {
  require(out_.good(), ErrorCode::IoError, "cannot open " + path);
  out_ << "round,eta,strategy,median_train_acc,mean_train_acc,test_acc,"
          "bytes_down,bytes_up,cumulative_bytes\n";
}

void MetricsCsv::write_row(const RoundMetrics& m, double eta,
                           const std::string& strategy,
                           std::optional<double> test_acc,
                           unsigned long long cumulative_bytes) {
  out_ << m.round << ',' << fmt_compact(eta) << ',' << strategy << ','
       << fmt_fixed6(m.median_train_acc) << ','
       << fmt_fixed6(m.mean_train_acc) << ','
       << (test_acc ? fmt_fixed6(*test_acc) : std::string()) << ','
       << m.bytes_down << ',' << m.bytes_up << ',' << cumulative_bytes
       << '\n';
  require(out_.good(), ErrorCode::IoError, "metrics write failed");
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError,
          path + " is empty");
  require(line.rfind("round,eta,strategy,", 0) == 0, ErrorCode::ParseError,
          path + " does not look like a metrics file");

  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    require(cells.size() == 9, ErrorCode::ParseError,
            "bad metrics row in " + path);
    MetricsRow r;
    r.round = std::stoi(cells[0]);
    r.eta = std::stod(cells[1]);
    r.strategy = cells[2];
    r.median_train_acc = std::stod(cells[3]);
    r.mean_train_acc = std::stod(cells[4]);
    if (!cells[5].empty()) r.test_acc = std::stod(cells[5]);
    r.bytes_down = std::stoull(cells[6]);
    r.bytes_up = std::stoull(cells[7]);
    r.cumulative_bytes = std::stoull(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_adaptation_log(const std::string& path,
                          const std::vector<SessionResult>& sessions,
                          const std::optional<AdaptationSummary>& summary) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  out << "step,eta_log10,round,median_acc,window_mean,aborted,reached\n";
  for (const SessionResult& s : sessions) {
    for (int r = 0; r < s.rounds_run; ++r) {
      const bool last = r + 1 == s.rounds_run;
      out << s.step << ',' << fmt_compact(s.eta_log10) << ',' << r + 1 << ','
          << fmt_fixed6(s.round_medians[static_cast<size_t>(r)]) << ','
          << fmt_fixed6(s.window_means[static_cast<size_t>(r)]) << ','
          << (last && s.aborted ? 1 : 0) << ',' << (last && s.reached ? 1 : 0)
          << '\n';
    }
  }
  if (summary) {
    out << "# eta_star_log10=" << fmt_compact(summary->eta_star_log10)
        << " r_star=" << summary->r_star << " overhead=" << summary->overhead
        << " baseline_extra_rounds=" << summary->baseline_extra_rounds
        << '\n';
  }
  require(out.good(), ErrorCode::IoError, "failed writing " + path);
}

}  // namespace cfd
