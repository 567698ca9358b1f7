// Copyright 2026 the combspec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "combspec/error.hpp"

namespace combspec {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
            return "invalid_argument";
        case ErrorCode::IncommensurateGrid:
            return "incommensurate_grid";
        case ErrorCode::Nyquist:
            return "nyquist";
        case ErrorCode::Budget:
            return "budget_exceeded";
        case ErrorCode::RankDeficient:
            return "rank_deficient";
        case ErrorCode::Propagation:
            return "propagation";
        case ErrorCode::WindowTooShort:
            return "window_too_short";
        case ErrorCode::Config:
            return "config";
        case ErrorCode::Io:
            return "io";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace combspec
