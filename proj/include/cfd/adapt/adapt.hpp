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

#ifndef CFD_ADAPT_ADAPT_HPP
#define CFD_ADAPT_ADAPT_HPP

#include <functional>
#include <memory>
#include <vector>

#include "cfd/error.hpp"

namespace cfd {

// Fast server learning-rate search. Candidate sessions run in lockstep,
// one round per tick; a session stops as soon as its accuracy window
// reaches the target (recording a new best when it got there in fewer
// rounds than the best so far) and aborts at the next tick boundary once
// it has run as many rounds as the current best. Step 0 probes
// {eta0 - delta, eta0, eta0 + delta}; each of the `steps` refinement steps
// halves delta and probes {eta* - delta, eta* + delta}. All arithmetic is
// in log10 of eta.
struct AdaptationConfig {
  double gamma_target = 20.0 / 62.0;
  int window = 10;          // q: rounds averaged into the accuracy window
  int steps = 3;            // n_a refinement steps after step 0
  double eta0_log10 = 0.0;
  double delta_eta0 = 1.0;  // initial log10 spacing
  int max_rounds = 500;

  void validate() const {
    require(gamma_target > 0.0 && gamma_target < 1.0, ErrorCode::ConfigError,
            "gamma target must lie in (0, 1)");
    require(window >= 1, ErrorCode::ConfigError, "window must be >= 1");
    require(steps >= 0, ErrorCode::ConfigError, "steps must be >= 0");
    require(delta_eta0 > 0.0, ErrorCode::ConfigError,
            "delta eta must be positive");
    require(max_rounds >= 1, ErrorCode::ConfigError,
            "max rounds must be >= 1");
  }
};

// One candidate FL session, advanced round by round by the coordinator.
class AdaptSession {
 public:
  virtual ~AdaptSession() = default;
  // Runs one round and returns its per-client training accuracies.
  virtual std::vector<double> advance_round() = 0;
};

using SessionFactory = std::function<std::unique_ptr<AdaptSession>(
    double eta_log10, int step, int candidate)>;

struct SessionResult {
  int step = 0;
  double eta_log10 = 0.0;
  int rounds_run = 0;
  bool reached = false;  // accuracy window hit the target
  bool aborted = false;  // cut off at the current best round count
  std::vector<double> round_medians;
  std::vector<double> window_means;
};

struct AdaptationResult {
  double eta_star_log10 = 0.0;
  int r_star = 0;
  int r_star_step0 = 0;
  std::vector<int> r_star_per_step;  // best after each refinement step
  long long total_rounds_executed = 0;
  long long overhead = 0;  // total executed minus r_star
  std::vector<SessionResult> sessions;
};

// Per-round median over that round's client accuracies, then the mean of
// the most recent min(window, rounds) medians.
double median_window_accuracy(
    const std::vector<std::vector<double>>& per_round_accuracies, int window);

// Search overhead in rounds: 3 r*_0 + 2 sum_i r*_i - r*.
long long overhead_rounds(int r0_star, const std::vector<int>& r_star_steps,
                          int r_star);

// Sessions the search launches plus the final production run; running all
// of them to completion would cost (count - 1) * max_rounds extra rounds.
int candidates_tried(int steps);

// Throws NoCandidateReachedTarget when no session attains the target
// within max_rounds; partial_log (when given) then carries the sessions
// that ran.
AdaptationResult run_adaptation(const SessionFactory& factory,
                                const AdaptationConfig& config,
                                std::vector<SessionResult>* partial_log = nullptr);

}  // namespace cfd

#endif  // CFD_ADAPT_ADAPT_HPP
