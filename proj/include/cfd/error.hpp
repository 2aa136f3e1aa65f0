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

#ifndef CFD_ERROR_HPP
#define CFD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cfd {

enum class ErrorCode {
  // code generation
  NonPrimitivePolynomial,
  UnsupportedDegree,
  DegreeMismatch,
  LengthMismatch,
  Infeasible,
  StrategyInfeasible,
  // model / training
  ShapeMismatch,
  MaskShapeMismatch,
  EmptyDataset,
  ModeMismatch,
  EmptyCohort,
  // adaptation
  EmptyHistory,
  NoCandidateReachedTarget,
  // data ingestion
  BadMagic,
  CountMismatch,
  TruncatedFile,
  TooFewSamples,
  // harness
  ConfigError,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace cfd

#endif  // CFD_ERROR_HPP
