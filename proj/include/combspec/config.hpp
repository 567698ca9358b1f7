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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "combspec/aom.hpp"
#include "combspec/comb_signals.hpp"
#include "combspec/combfield.hpp"
#include "combspec/error.hpp"
#include "combspec/lockin.hpp"
#include "combspec/material.hpp"

namespace combspec {

enum class ExperimentKind { DualLinear, QuadThird, DualThird, AomFluorescence, OracleCheck };

std::string kind_name(ExperimentKind kind);

struct GridConfig {
    double step = 0.0;
    // 0 skips the time-domain path
    std::size_t samples = 0;
    bool time_domain = false;
    std::optional<double> cutoff;
    std::optional<int> detect = 0;
    Branch branch = Branch::Selected;
    std::optional<std::int64_t> max_tooth;
    std::size_t max_terms = 20'000'000;
    Projection projection = Projection::full();
    // dual_third only: "all_one" or "two_by_two"
    std::string variant = "all_one";
};

struct AomConfig {
    DelayGrid delays;
    // 0 picks the smallest whole-period record of at least 4096 shots
    std::size_t shots = 0;
    LockInMode mode = LockInMode::Periodic;
    std::vector<int> pathways;
};

struct InversionConfig {
    bool enabled = false;
    double lambda = 0.0;
    // quad_third: one run per listed offset of the detected comb
    std::vector<double> detect_offsets;
};

struct OracleConfig {
    double dt = 0.0;
    std::size_t samples = 0;
    std::vector<double> amplitudes;
};

struct OutputConfig {
    std::string dir = "out";
    bool time_series = false;
    bool terms = false;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::DualLinear;
    std::string name = "experiment";
    LevelSystem system;
    std::vector<CombSpec> combs;
    std::vector<AomPulseTrainSpec> trains;
    GridConfig grid;
    LockInConfig lockin;
    AomConfig aom;
    InversionConfig inversion;
    OracleConfig oracle;
    OutputConfig output;
    // sorted section.key=value lines of the source, hashed into the manifest
    std::string canonical;
    std::string hash;
    std::vector<std::string> warnings;

    FrequencyGrid frequency_grid() const { return FrequencyGrid{grid.step}; }
};

// Every violation found in one pass.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

// INI text with sections [experiment], [system], [comb.N], [train.N],
// [grid], [delays], [lockin], [inversion], [oracle], [output]. Throws
// ConfigError listing every problem; unknown sections and keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig validate_config(const std::filesystem::path& path);

// Effective configuration as canonical INI text, defaults filled in.
std::string echo_config(const ExperimentConfig& cfg);

}  // namespace combspec
