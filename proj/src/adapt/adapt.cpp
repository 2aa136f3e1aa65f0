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

#include "cfd/adapt/adapt.hpp"

#include <algorithm>

#include "cfd/fed/round.hpp"

namespace cfd {

double median_window_accuracy(
    const std::vector<std::vector<double>>& per_round_accuracies, int window) {
  require(!per_round_accuracies.empty(), ErrorCode::EmptyHistory,
          "accuracy window over an empty history");
  require(window >= 1, ErrorCode::ConfigError, "window must be >= 1");
  const size_t rounds = per_round_accuracies.size();
  const size_t take = std::min<size_t>(static_cast<size_t>(window), rounds);
  double sum = 0;
  for (size_t i = rounds - take; i < rounds; ++i)
    sum += median_of(per_round_accuracies[i]);
  return sum / static_cast<double>(take);
}

long long overhead_rounds(int r0_star, const std::vector<int>& r_star_steps,
                          int r_star) {
  long long total = 3ll * r0_star;
  for (int r : r_star_steps) total += 2ll * r;
  return total - r_star;
}

int candidates_tried(int steps) { return 3 + 2 * steps + 1; }

namespace {

struct LiveSession {
  double eta_log10 = 0.0;
  std::unique_ptr<AdaptSession> session;
  SessionResult result;
  std::vector<std::vector<double>> history;
  bool finished = false;
};

}  // namespace

AdaptationResult run_adaptation(const SessionFactory& factory,
                                const AdaptationConfig& config,
                                std::vector<SessionResult>* partial_log) {
  config.validate();

  AdaptationResult out;
  int r_star = config.max_rounds;
  double eta_star = 0.0;
  bool have_star = false;
  double delta = config.delta_eta0;

  for (int step = 0; step <= config.steps; ++step) {
    std::vector<double> candidates;
    if (step == 0) {
      candidates = {config.eta0_log10 - delta, config.eta0_log10,
                    config.eta0_log10 + delta};
    } else {
      delta /= 2.0;
      candidates = {eta_star - delta, eta_star + delta};
    }
    std::sort(candidates.begin(), candidates.end());

    std::vector<LiveSession> live(candidates.size());
    for (size_t c = 0; c < candidates.size(); ++c) {
      live[c].eta_log10 = candidates[c];
      live[c].session = factory(candidates[c], step, static_cast<int>(c));
      live[c].result.step = step;
      live[c].result.eta_log10 = candidates[c];
    }

    for (;;) {
      // Tick boundary: cut off every session that has already run as many
      // rounds as the current best.
      bool any_live = false;
      for (LiveSession& s : live) {
        if (s.finished) continue;
        if (s.result.rounds_run >= r_star) {
          s.finished = true;
          s.result.aborted = true;
        } else {
          any_live = true;
        }
      }
      if (!any_live) break;

      // One synchronized round for every live session, in ascending eta so
      // that a tie on the same tick resolves to the smaller eta.
      for (LiveSession& s : live) {
        if (s.finished) continue;
        s.history.push_back(s.session->advance_round());
        s.result.rounds_run += 1;
        out.total_rounds_executed += 1;
        s.result.round_medians.push_back(median_of(s.history.back()));
        const double win = median_window_accuracy(s.history, config.window);
        s.result.window_means.push_back(win);
        if (win >= config.gamma_target) {
          s.finished = true;
          s.result.reached = true;
          if (!have_star || s.result.rounds_run < r_star) {
            have_star = true;
            r_star = s.result.rounds_run;
            eta_star = s.eta_log10;
          }
        }
      }
    }

    for (LiveSession& s : live) out.sessions.push_back(std::move(s.result));

    if (!have_star) {
      if (partial_log) *partial_log = out.sessions;
      fail(ErrorCode::NoCandidateReachedTarget,
           "no candidate reached the accuracy target within " +
               std::to_string(config.max_rounds) + " rounds");
    }
    if (step == 0)
      out.r_star_step0 = r_star;
    else
      out.r_star_per_step.push_back(r_star);
  }

  out.eta_star_log10 = eta_star;
  out.r_star = r_star;
  out.overhead = out.total_rounds_executed - r_star;
  if (partial_log) *partial_log = out.sessions;
  return out;
}

}  // namespace cfd
