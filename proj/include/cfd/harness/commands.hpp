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

#ifndef CFD_HARNESS_COMMANDS_HPP
#define CFD_HARNESS_COMMANDS_HPP

#include <string>
#include <vector>

#include "cfd/harness/config.hpp"

namespace cfd {

// Writes one mask matrix per target layer width plus a metrics report
// (max family cross-correlation for Gold, achieved minimum distance for
// CWC, identical-rows flag for the baseline).
void run_gen_codes(const ExperimentConfig& cfg);

// Runs a full training session: per-round metrics CSV, periodic test
// evaluation, final weights blob.
void run_train(const ExperimentConfig& cfg);

// Runs the server learning-rate search over real sessions and writes the
// adaptation log; on failure the partial log is still written before the
// error propagates.
void run_adapt(const ExperimentConfig& cfg);

// Merges training metrics CSVs into per-round and bytes-vs-accuracy
// aggregate tables grouped by strategy.
void run_report(const std::vector<std::string>& inputs,
                const std::string& out_dir);

}  // namespace cfd

#endif  // CFD_HARNESS_COMMANDS_HPP
