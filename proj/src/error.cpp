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

#include "cfd/error.hpp"

namespace cfd {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPrimitivePolynomial: return "NonPrimitivePolynomial";
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::StrategyInfeasible: return "StrategyInfeasible";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MaskShapeMismatch: return "MaskShapeMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::NoCandidateReachedTarget: return "NoCandidateReachedTarget";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace cfd
