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


#include <CLI11.hpp>
#include <algorithm>
#include <json.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "combspec/config.hpp"
#include "combspec/error.hpp"
#include "combspec/experiment.hpp"
#include "combspec/parallel.hpp"

namespace {

using json = nlohmann::json;
using namespace combspec;

int report(const Error& e) {
    json err = {{"status", "error"},
                {"code", std::string(error_code_name(e.code()))},
                {"message", e.what()},
                {"context", e.context()}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
        err["problems"] = ce->problems();
    }
    std::cerr << err.dump(2) << "\n";
    return e.code() == ErrorCode::Config ? 2 : 1;
}

std::filesystem::path output_dir(const ExperimentConfig& cfg, const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("COMBSPEC_OUT_DIR"); env && *env) {
        return env;
    }
    return cfg.output.dir;
}

int run(const std::string& config, const std::string& out_flag, const RunOptions& opts,
        std::optional<ExperimentKind> need, const std::string& command) {
    const ExperimentConfig cfg = validate_config(config);
    if (need && cfg.kind != *need) {
        fail(ErrorCode::Config, command + " needs kind = " + kind_name(*need) + ", got " + kind_name(cfg.kind));
    }
    if (opts.force_inversion && cfg.kind != ExperimentKind::DualLinear && cfg.kind != ExperimentKind::QuadThird &&
        cfg.kind != ExperimentKind::DualThird) {
        fail(ErrorCode::Config, "invert only applies to dual_linear, quad_third and dual_third");
    }
    for (const auto& w : cfg.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    const RunResult result = run_experiment(cfg, opts);
    for (const auto& w : result.warnings) {
        if (std::find(cfg.warnings.begin(), cfg.warnings.end(), w) == cfg.warnings.end()) {
            std::cerr << "warning: " << w << "\n";
        }
    }
    const auto dir = output_dir(cfg, out_flag);
    result.bundle.commit(dir);
    json files = json::array();
    for (const auto& [name, content] : result.bundle.files()) {
        files.push_back(name);
    }
    std::cout << json{{"status", "ok"}, {"out_dir", dir.string()}, {"files", files}}.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Comb and pulse-train spectroscopy simulator"};
    app.require_subcommand(1);
    std::string config;
    std::string out_dir;
    unsigned threads = 0;
    long long seed = 0;

    auto add_common = [&](CLI::App* sub, bool outputs) {
        sub->add_option("--config", config, "experiment configuration (INI)")->required();
        if (outputs) {
            sub->add_option("--out-dir", out_dir, "output directory (overrides COMBSPEC_OUT_DIR and [output] dir)");
            sub->add_option("--seed", seed, "reserved; every pipeline is deterministic");
            sub->add_option("--threads", threads, "worker thread cap (0 = all cores)");
        }
    };
    auto* validate = app.add_subcommand("validate", "check a configuration and print its effective form");
    add_common(validate, false);
    auto* run_cmd = app.add_subcommand("run", "run an experiment and write its artifacts");
    add_common(run_cmd, true);
    auto* invert = app.add_subcommand("invert", "run a comb experiment with susceptibility recovery");
    add_common(invert, true);
    auto* oracle = app.add_subcommand("oracle", "run an oracle_check experiment");
    add_common(oracle, true);

    CLI11_PARSE(app, argc, argv);
    try {
        set_thread_count(threads);
        if (validate->parsed()) {
            const ExperimentConfig cfg = validate_config(config);
            for (const auto& w : cfg.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            std::cout << echo_config(cfg);
            return 0;
        }
        if (run_cmd->parsed()) {
            return run(config, out_dir, {}, std::nullopt, "run");
        }
        if (invert->parsed()) {
            return run(config, out_dir, {true}, std::nullopt, "invert");
        }
        return run(config, out_dir, {}, ExperimentKind::OracleCheck, "oracle");
    } catch (const Error& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::cerr << json{{"status", "error"}, {"code", "internal"}, {"message", e.what()}}.dump(2) << "\n";
        return 1;
    }
}
