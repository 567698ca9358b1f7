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

#include <string>
#include <vector>

#include "combspec/config.hpp"
#include "combspec/io.hpp"

namespace combspec {

struct RunOptions {
    // run the inversion even when [inversion] enabled is false
    bool force_inversion = false;
};

struct RunResult {
    ArtifactBundle bundle;
    // manifest.json content, also present in the bundle
    std::string manifest;
    std::vector<std::string> warnings;
};

// Computes every artifact in memory; nothing touches the disk. Errors
// carry a context chain naming the stage that failed.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace combspec
