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

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "combspec/spectrum.hpp"

namespace combspec {

struct GaussianEnvelope {
    double sigma = 1.0;
    double amplitude = 1.0;

    double operator()(double detuning) const;
};

// One comb. Tooth n sits at n * spacing() + ce_offset with spacing() =
// rep_spacing + offset.
struct CombSpec {
    std::string name = "comb";
    double rep_spacing = 1.0;
    double offset = 0.0;
    double carrier = 0.0;
    double ce_offset = 0.0;
    double global_phase = 0.0;
    GaussianEnvelope envelope;
    double tooth_floor = 1e-8;

    double spacing() const { return rep_spacing + offset; }
    double period() const;
    // Throws InvalidArgument naming the first broken invariant.
    void validate() const;
    // Soft checks (offset ratio outside the small-detuning regime).
    std::vector<std::string> warnings() const;
};

struct CombTooth {
    std::int64_t index = 0;
    double frequency = 0.0;
    std::complex<double> amplitude{};
};

// Teeth with |amplitude| >= tooth_floor * A, sorted by index. Empty when
// A == 0 or the envelope misses every tooth.
std::vector<CombTooth> enumerate_teeth(const CombSpec& comb);

// Largest detuning from the carrier that clears the floor.
double envelope_reach(const CombSpec& comb);

inline constexpr double kGridTolerance = 1e-9;

struct FrequencyGrid {
    double step = 1.0;

    // Nearest grid index; throws IncommensurateGrid when freq is not a
    // multiple of step to 1e-9 relative. `what` names the quantity.
    std::int64_t index_of(double freq, const std::string& what) const;
    double frequency(std::int64_t index) const { return static_cast<double>(index) * step; }
};

// Integer grid image of a comb: tooth n lands at n * spacing_steps + ce_steps.
struct GridComb {
    std::int64_t spacing_steps = 0;
    std::int64_t ce_steps = 0;
    std::int64_t offset_steps = 0;
};

GridComb grid_comb(const CombSpec& comb, const FrequencyGrid& grid);

// A positive-branch tooth or its negative-frequency mirror. `tooth` is the
// signed tooth label: n for the tooth itself, -n for its mirror.
struct FieldComponent {
    std::int64_t index = 0;
    std::int64_t tooth = 0;
    std::complex<double> amplitude{};
};

// Both branches of one comb, ordered by (index, tooth).
std::vector<FieldComponent> comb_components(const CombSpec& comb, const FrequencyGrid& grid);

// E(omega) of the comb set; conj(E(omega)) == E(-omega) exactly.
Spectrum eval_field_freq(std::span<const CombSpec> combs, const FrequencyGrid& grid, bool record_terms = true);

struct AomPulseTrainSpec {
    std::string name = "train";
    double delay = 0.0;
    double rep_period = 1.0;
    double aom_freq = 0.0;
    double carrier = 0.0;
    double amplitude = 1.0;
    // Gaussian temporal width; ignored when impulsive.
    double duration = 1.0;
    bool impulsive = false;
    std::int64_t pulse_count = 1;

    void validate() const;
    double pulse_center(std::int64_t n) const { return delay + static_cast<double>(n) * rep_period; }
    // exp(i aom_freq n T), the per-pulse AOM phase factor.
    std::complex<double> aom_phase(std::int64_t n) const;
};

// Complex field sum_n E~(t - t_j - nT) exp(i w (t - t_j - nT) + i phi n T).
// For impulsive trains this returns the pulse weight when t hits a pulse
// center (within 1e-12 T) and 0 elsewhere.
std::complex<double> eval_field_time(const AomPulseTrainSpec& spec, double t);
std::complex<double> eval_field_time_derivative(const AomPulseTrainSpec& spec, double t);

// Real field E(t) = sum_j Re E_j(t) of a set of Gaussian trains.
class PulseTrainField {
public:
    explicit PulseTrainField(std::vector<AomPulseTrainSpec> trains);

    double value(double t) const;
    double derivative(double t) const;
    // Time after which every envelope is below 1e-16 of its peak.
    double end_time() const;
    const std::vector<AomPulseTrainSpec>& trains() const { return trains_; }

private:
    std::vector<AomPulseTrainSpec> trains_;
};

}  // namespace combspec
