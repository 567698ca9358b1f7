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

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace combspec {

// One summed product behind a spike. For field spectra only combs[0] and
// teeth[0] are used; linear terms use slots 0 (detected) and 1; third-order
// terms use all four, with chi_args holding the grid indices of the three
// input frequencies in slot order.
struct SpectrumTerm {
    int order = 0;
    std::array<int, 4> combs{-1, -1, -1, -1};
    std::array<std::int64_t, 4> teeth{};
    std::array<std::int64_t, 3> chi_args{};
    std::complex<double> weight{};
    std::complex<double> chi{1.0, 0.0};

    std::complex<double> contribution() const { return weight * chi; }
};

struct Spike {
    std::complex<double> value{};
    std::size_t term_count = 0;
    std::vector<SpectrumTerm> terms;
};

// Sparse signal on the grid omega = index * step. Values are Fourier-series
// coefficients: S(t) = sum_index value * exp(-i index step t).
struct Spectrum {
    double step = 0.0;
    std::map<std::int64_t, Spike> spikes;
    std::string kind;
    std::string projection = "full";
    double min_rep_spacing = std::numeric_limits<double>::infinity();
    std::optional<double> cutoff;
    bool has_terms = false;

    std::complex<double> at(std::int64_t index) const;
    double frequency(std::int64_t index) const { return static_cast<double>(index) * step; }
    void add(std::int64_t index, const SpectrumTerm& term, bool record);
    void add_value(std::int64_t index, std::complex<double> value);
    double max_abs() const;
};

// Real samples at t_s = s * dt. The window is 2 pi / grid_step so the
// series coefficients land on the paired spectrum grid.
struct TimeSeries {
    double dt = 0.0;
    double grid_step = 0.0;
    std::vector<double> samples;
    double min_rep_spacing = std::numeric_limits<double>::infinity();
    std::optional<double> cutoff;

    double window() const { return dt * static_cast<double>(samples.size()); }
    double time(std::size_t s) const { return dt * static_cast<double>(s); }
};

// Brick wall: keep |omega| <= cutoff. Requires 0 < cutoff < min_rep_spacing.
Spectrum apply_lowpass(const Spectrum& spectrum, double cutoff);
TimeSeries apply_lowpass(const TimeSeries& series, double cutoff);

// Series coefficients of a sampled signal on its own grid, keeping
// |index| <= max_index.
Spectrum to_spectrum(const TimeSeries& series, std::int64_t max_index);

// max_i |a_i - b_i| / max_i |b_i| over the union of indices.
double max_relative_difference(const Spectrum& a, const Spectrum& b);

}  // namespace combspec
