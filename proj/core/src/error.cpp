// Copyright 2026 The kickshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "kickshape/error.hpp"

namespace kickshape {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::kInvalidDimension: return "invalid-dimension";
        case ErrorCode::kShape: return "shape";
        case ErrorCode::kValidity: return "validity";
        case ErrorCode::kIntegrationDiverged: return "integration-diverged";
        case ErrorCode::kNoSteadyState: return "no-steady-state";
        case ErrorCode::kAdmissibility: return "admissibility";
        case ErrorCode::kNormalization: return "normalization";
        case ErrorCode::kAlignment: return "alignment";
        case ErrorCode::kInfeasibleProtocol: return "infeasible-protocol";
        case ErrorCode::kGradientUnavailable: return "gradient-unavailable";
        case ErrorCode::kRange: return "range";
        case ErrorCode::kFactorization: return "factorization";
        case ErrorCode::kConfig: return "config";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

IntegrationDiverged::IntegrationDiverged(std::size_t step, const std::string& message)
    : Error(ErrorCode::kIntegrationDiverged, message + " (step " + std::to_string(step) + ")"),
      step_(step) {}

}  // namespace kickshape
