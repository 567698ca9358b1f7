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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace combspec {

enum class ErrorCode {
    InvalidArgument,
    IncommensurateGrid,
    Nyquist,
    Budget,
    RankDeficient,
    Propagation,
    WindowTooShort,
    Config,
    Io,
};

std::string_view error_code_name(ErrorCode code);

// Base of every error raised by the library. `context()` carries the
// chain of callers that annotated the error on its way out.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& context() const noexcept { return context_; }
    void add_context(std::string frame) { context_.push_back(std::move(frame)); }

private:
    ErrorCode code_;
    std::vector<std::string> context_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool ok, ErrorCode code, const std::string& message) {
    if (!ok) {
        fail(code, message);
    }
}

}  // namespace combspec
