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


#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kickshape {

enum class ErrorCode {
    kInvalidDimension,
    kShape,
    kValidity,
    kIntegrationDiverged,
    kNoSteadyState,
    kAdmissibility,
    kNormalization,
    kAlignment,
    kInfeasibleProtocol,
    kGradientUnavailable,
    kRange,
    kFactorization,
    kConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures onto exit statuses without
/// parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when a Riccati or filter recursion produces NaN/Inf or leaves the
/// PSD cone by more than round-off.
class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(std::size_t step, const std::string& message);

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace kickshape
