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


#include "combspec/experiment.hpp"

#include <json.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "combspec/aom.hpp"
#include "combspec/comb_signals.hpp"
#include "combspec/inversion.hpp"
#include "combspec/kernels.hpp"
#include "combspec/lockin.hpp"
#include "combspec/oracle.hpp"
#include "combspec/parallel.hpp"

#ifndef COMBSPEC_VERSION
#define COMBSPEC_VERSION "0.0.0"
#endif

namespace combspec {

using json = nlohmann::json;
using cd = std::complex<double>;

namespace {

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (Error& e) {
        e.add_context(name);
        throw;
    }
}

json rank_json(const RankReport& r) {
    return {{"unknowns", r.unknowns},
            {"constrained", r.constrained},
            {"rows", r.rows},
            {"rank", r.rank},
            {"full_rank", r.full_rank()},
            {"condition", std::isfinite(r.condition) ? json(r.condition) : json("inf")}};
}

CsvTable term_table(const Spectrum& s) {
    CsvTable t;
    t.header = {"m", "combs", "teeth", "chi_args", "weight_re", "weight_im", "chi_re", "chi_im"};
    for (const auto& [m, spike] : s.spikes) {
        for (const auto& term : spike.terms) {
            std::string combs;
            std::string teeth;
            for (int j = 0; j < 4; ++j) {
                if (term.combs[j] < 0) {
                    continue;
                }
                combs += (combs.empty() ? "" : " ") + std::to_string(term.combs[j]);
                teeth += (teeth.empty() ? "" : " ") + std::to_string(term.teeth[j]);
            }
            std::string args;
            for (int j = 0; j < (term.order == 1 ? 1 : 3); ++j) {
                args += (j ? " " : "") + std::to_string(term.chi_args[j]);
            }
            t.add_row({std::to_string(m), combs, teeth, args, format_double(term.weight.real()),
                       format_double(term.weight.imag()), format_double(term.chi.real()),
                       format_double(term.chi.imag())});
        }
    }
    return t;
}

void run_linear(const ExperimentConfig& cfg, bool invert, RunResult& out, json& results) {
    const FrequencyGrid grid = cfg.frequency_grid();
    LinearOptions opts;
    opts.detect = cfg.grid.detect;
    opts.projection = cfg.grid.projection;
    opts.branch = cfg.grid.branch;
    Spectrum spec = stage("linear_signal_freq", [&] { return linear_signal_freq(cfg.combs, cfg.system, grid, opts); });
    if (cfg.grid.cutoff) {
        spec = apply_lowpass(spec, *cfg.grid.cutoff);
    }
    out.bundle.add("spikes.csv", spike_table(spec).str());
    if (cfg.output.terms) {
        out.bundle.add("terms.csv", term_table(spec).str());
    }
    results["spikes"] = spec.spikes.size();
    if (cfg.grid.time_domain) {
        const std::size_t n = cfg.grid.samples ? cfg.grid.samples : linear_signal_min_samples(cfg.combs, grid, opts);
        TimeSeries ts =
            stage("linear_signal_time", [&] { return linear_signal_time(cfg.combs, cfg.system, grid, opts, n); });
        if (cfg.grid.cutoff) {
            ts = apply_lowpass(ts, *cfg.grid.cutoff);
        }
        std::int64_t top = 0;
        for (const auto& [m, spike] : spec.spikes) {
            top = std::max(top, std::abs(m));
        }
        const Spectrum dft = to_spectrum(ts, top);
        out.bundle.add("spikes_dft.csv", spike_table(dft).str());
        if (cfg.output.time_series) {
            out.bundle.add("series.csv", series_table(ts).str());
        }
        results["samples"] = n;
        results["time_vs_freq_max_relative_difference"] = max_relative_difference(dft, spec);
    }
    if (invert) {
        require(cfg.grid.detect.has_value(), ErrorCode::Config, "linear inversion needs a single detected comb");
        const LinearInversion inv = stage("invert_linear", [&] {
            return invert_linear(spec, cfg.combs, grid, {*cfg.grid.detect, std::nullopt});
        });
        out.bundle.add("chi1.csv", chi1_table(inv, spec).str());
        results["inversion"] = {{"samples", inv.samples.size()},
                                {"recoverable", inv.recoverable},
                                {"weight_spread", inv.weight_spread}};
    }
}

Spectrum third_order(const ExperimentConfig& cfg, std::span<const CombSpec> combs, bool terms) {
    const FrequencyGrid grid = cfg.frequency_grid();
    ThirdOrderOptions opts;
    opts.projection = cfg.grid.projection;
    opts.max_tooth = cfg.grid.max_tooth;
    opts.max_terms = cfg.grid.max_terms;
    opts.branch = cfg.grid.branch;
    opts.record_terms = terms;
    Spectrum s;
    if (cfg.kind == ExperimentKind::QuadThird) {
        s = stage("quad_comb_signal", [&] { return quad_comb_signal(combs, cfg.system, grid, opts); });
    } else if (cfg.grid.variant == "two_by_two") {
        s = stage("dual_comb_two_by_two", [&] { return dual_comb_two_by_two(combs, cfg.system, grid, opts); });
    } else {
        s = stage("dual_comb_third", [&] { return dual_comb_third(combs, cfg.system, grid, opts); });
    }
    if (cfg.grid.cutoff) {
        s = apply_lowpass(s, *cfg.grid.cutoff);
    }
    return s;
}

void run_third(const ExperimentConfig& cfg, bool invert, RunResult& out, json& results) {
    const bool dual = cfg.kind == ExperimentKind::DualThird;
    const bool terms = invert || dual || cfg.output.terms;
    std::vector<Spectrum> runs;
    runs.push_back(third_order(cfg, cfg.combs, terms));
    out.bundle.add("spikes.csv", spike_table(runs[0]).str());
    if (cfg.output.terms) {
        out.bundle.add("terms.csv", term_table(runs[0]).str());
    }
    results["spikes"] = runs[0].spikes.size();
    if (!invert && !dual) {
        return;
    }
    if (invert && !dual) {
        for (std::size_t r = 0; r < cfg.inversion.detect_offsets.size(); ++r) {
            std::vector<CombSpec> combs = cfg.combs;
            combs[0].offset = cfg.inversion.detect_offsets[r];
            Spectrum s = third_order(cfg, combs, true);
            out.bundle.add("spikes_run" + std::to_string(r + 1) + ".csv", spike_table(s).str());
            runs.push_back(std::move(s));
        }
    }
    const FoldingSystem sys =
        stage("build_folding_system", [&] { return build_folding_system(runs, cfg.inversion.lambda); });
    const RankReport rank = rank_report(sys);
    results["rank"] = rank_json(rank);
    results["unconstrained"] = sys.unconstrained().size();
    if (invert) {
        const FoldingSolution sol = stage("solve_folding", [&] { return solve_folding(sys); });
        out.bundle.add("chi3.csv", chi3_table(sys, sol).str());
        results["solution"] = {{"max_relative_residual", sol.max_relative_residual},
                               {"residual_tolerance", kFoldingResidualTolerance}};
    }
}

void run_aom(const ExperimentConfig& cfg, RunResult& out, json& results, json& tolerances) {
    const auto pathways = enumerate_pathways(cfg.system, Detection::Fluorescence);
    const std::string table = pathway_table(pathways);
    out.bundle.add("pathways.md", table);
    results["pathways"] = pathways.size();
    results["pathway_table_sha256"] = pathway_table_hash(pathways);

    const double period = cfg.trains[0].rep_period;
    std::size_t shots = cfg.aom.shots;
    if (shots == 0) {
        std::vector<double> mods{cfg.lockin.modulation(Reference::Plus), cfg.lockin.modulation(Reference::Minus)};
        const std::array<double, 4> phis{cfg.trains[0].aom_freq, cfg.trains[1].aom_freq, cfg.trains[2].aom_freq,
                                         cfg.trains[3].aom_freq};
        for (const auto& p : pathways) {
            mods.push_back(p.net_modulation(phis));
        }
        shots = stage("default_shot_count", [&] { return default_shot_count(mods, period); });
    }
    const DelayMap map = stage("run_delay_map", [&] {
        return run_delay_map(cfg.system, cfg.trains, cfg.aom.delays, cfg.lockin, shots, cfg.aom.mode,
                             cfg.aom.pathways);
    });
    CsvTable t;
    t.header = {"t1", "t3", "group", "re", "im", "expected_re", "expected_im"};
    const std::size_t n3 = map.t3.size();
    double err_plus = 0.0, err_minus = 0.0, ref_plus = 0.0, ref_minus = 0.0;
    for (std::size_t i = 0; i < map.t1.size(); ++i) {
        for (std::size_t k = 0; k < n3; ++k) {
            const std::size_t idx = i * n3 + k;
            for (int g = 0; g < 2; ++g) {
                const cd v = g == 0 ? map.plus[idx] : map.minus[idx];
                const cd e = g == 0 ? map.expected_plus[idx] : map.expected_minus[idx];
                t.add_row({format_double(map.t1[i]), format_double(map.t3[k]), g == 0 ? "plus" : "minus",
                           format_double(v.real()), format_double(v.imag()), format_double(e.real()),
                           format_double(e.imag())});
            }
            err_plus = std::max(err_plus, std::abs(map.plus[idx] - map.expected_plus[idx]));
            err_minus = std::max(err_minus, std::abs(map.minus[idx] - map.expected_minus[idx]));
            ref_plus = std::max(ref_plus, std::abs(map.expected_plus[idx]));
            ref_minus = std::max(ref_minus, std::abs(map.expected_minus[idx]));
        }
    }
    out.bundle.add("delay_map.csv", t.str());
    results["shots"] = shots;
    results["lockin_gain"] = map.gain;
    results["plus_crosstalk"] = ref_plus > 0.0 ? err_plus / ref_plus : err_plus;
    results["minus_crosstalk"] = ref_minus > 0.0 ? err_minus / ref_minus : err_minus;
    if (n3 >= 9) {
        std::vector<cd> row(map.plus.begin(), map.plus.begin() + static_cast<std::ptrdiff_t>(n3));
        const ExponentialFit fit = fit_exponentials(row, map.t3[1] - map.t3[0], 4);
        results["t3_fit"] = {{"group", "plus"}, {"t1", map.t1[0]}, {"frequency", fit.frequency}, {"decay", fit.decay}};
    }
    for (const auto& w : map.warnings) {
        out.warnings.push_back(w);
    }
    tolerances["lockin_window_taus"] = kLockInWindowTaus;
    tolerances["lockin_repeats"] = static_cast<std::size_t>(
        std::ceil(kLockInWindowTaus * cfg.lockin.tau / (period * static_cast<double>(shots)) - 1e-12));
    tolerances["modulation_period_cycles"] = 1e-9;
    tolerances["prony_order"] = 4;
}

void run_oracle(const ExperimentConfig& cfg, RunResult& out, json& results, json& tolerances) {
    const ScalingReport rep = stage("linear_scaling", [&] {
        return linear_scaling(cfg.system, cfg.trains, cfg.oracle.dt, cfg.oracle.samples, cfg.oracle.amplitudes);
    });
    CsvTable t;
    t.header = {"amplitude", "deviation"};
    for (const auto& p : rep.points) {
        t.add_row({format_double(p.amplitude), format_double(p.deviation)});
    }
    out.bundle.add("scaling.csv", t.str());
    results["slope"] = rep.slope;

    auto trains = cfg.trains;
    const double amax = *std::max_element(cfg.oracle.amplitudes.begin(), cfg.oracle.amplitudes.end());
    for (auto& tr : trains) {
        tr.amplitude = amax;
    }
    const PulseTrainField field(trains);
    const Trajectory traj = stage("propagate", [&] {
        return propagate({cfg.system, field_of(field), 0.0, cfg.oracle.dt, cfg.oracle.samples - 1, 1});
    });
    const FluxCheck flux = population_flux_check(traj, cfg.system);
    results["trajectory"] = {{"amplitude", amax},
                             {"max_trace_error", traj.max_trace_error},
                             {"max_hermiticity_error", traj.max_hermiticity_error},
                             {"min_population", traj.min_population},
                             {"max_population", traj.max_population},
                             {"energy_balance_error", energy_balance_error(traj)},
                             {"flux_residual", flux.relative},
                             {"flux_flagged", flux.flagged}};
    if (cfg.output.time_series) {
        out.bundle.add("trajectory.csv", trajectory_table(traj).str());
    }
    tolerances["trace_abort"] = kTraceAbort;
    tolerances["dt_resolution_fraction"] = 0.01;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    RunResult out;
    out.warnings = cfg.warnings;
    json results = json::object();
    json tolerances = {{"grid_relative", kGridTolerance}};
    json truncation = json::object();
    const bool invert = cfg.inversion.enabled || opts.force_inversion;
    if (!cfg.combs.empty()) {
        json floors = json::array();
        json teeth = json::array();
        for (const auto& c : cfg.combs) {
            floors.push_back(c.tooth_floor);
            teeth.push_back(enumerate_teeth(c).size());
        }
        tolerances["tooth_floor"] = floors;
        truncation["teeth"] = teeth;
        if (cfg.grid.cutoff) {
            truncation["cutoff"] = *cfg.grid.cutoff;
        }
    }
    const std::string kn = kind_name(cfg.kind);
    stage(kn, [&] {
        switch (cfg.kind) {
            case ExperimentKind::DualLinear:
                run_linear(cfg, invert, out, results);
                break;
            case ExperimentKind::QuadThird:
            case ExperimentKind::DualThird:
                run_third(cfg, invert, out, results);
                truncation["max_terms"] = cfg.grid.max_terms;
                if (cfg.grid.max_tooth) {
                    truncation["max_tooth"] = *cfg.grid.max_tooth;
                }
                break;
            case ExperimentKind::AomFluorescence:
                run_aom(cfg, out, results, tolerances);
                break;
            case ExperimentKind::OracleCheck:
                run_oracle(cfg, out, results, tolerances);
                break;
        }
        if (invert && (cfg.kind == ExperimentKind::QuadThird || cfg.kind == ExperimentKind::DualThird)) {
            tolerances["folding_residual"] = kFoldingResidualTolerance;
            tolerances["lambda"] = cfg.inversion.lambda;
        }
        return 0;
    });

    json files = json::object();
    for (const auto& [name, content] : out.bundle.files()) {
        files[name] = sha256_hex(content);
    }
    json modules = json::object();
    for (const char* m : {"combfield", "material", "comb_signals", "lockin", "aom", "inversion", "oracle", "cli_io"}) {
        modules[m] = COMBSPEC_VERSION;
    }
    const json manifest = {{"tool", "combspec"},
                           {"version", COMBSPEC_VERSION},
                           {"kind", kn},
                           {"name", cfg.name},
                           {"config_sha256", cfg.hash},
                           {"modules", modules},
                           {"isa", std::string(kernels::isa_name(kernels::active_isa()))},
                           {"threads", thread_count()},
                           {"tolerances", tolerances},
                           {"truncation", truncation},
                           {"results", results},
                           {"files", files},
                           {"warnings", out.warnings}};
    out.manifest = manifest.dump(2) + "\n";
    out.bundle.add("manifest.json", out.manifest);
    return out;
}

}  // namespace combspec
