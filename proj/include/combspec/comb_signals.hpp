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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "combspec/combfield.hpp"
#include "combspec/material.hpp"
#include "combspec/spectrum.hpp"

namespace combspec {

// Selected keeps only tooth pairings whose labels cancel (the slow n' = 0
// band); All keeps every pairing so a brick-wall filter can do the same job.
enum class Branch { Selected, All };

struct LinearOptions {
    // Heterodyne comb; nullopt means every comb is detected.
    std::optional<int> detect;
    Projection projection = Projection::full();
    Branch branch = Branch::Selected;
    bool record_terms = true;
};

// S(t) = -dE_d/dt <V>(t), returned as Fourier-series spikes. The (l, k)
// term is i w_l E_d(w_l) chi(w_k) E(w_k) at index(l) + index(k).
Spectrum linear_signal_freq(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                            const LinearOptions& opts = {});

// Direct synthesis on t_s = s T / N over one window T = 2 pi / grid.step.
// Throws Nyquist if the product band does not fit in N samples.
TimeSeries linear_signal_time(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                              const LinearOptions& opts, std::size_t samples);

// Smallest power of two that satisfies the Nyquist check above.
std::size_t linear_signal_min_samples(std::span<const CombSpec> combs, const FrequencyGrid& grid,
                                      const LinearOptions& opts);

struct ThirdOrderOptions {
    Projection projection = Projection::full();
    // |tooth label| bound on the three interaction slots; nullopt keeps
    // every tooth above the envelope floor.
    std::optional<std::int64_t> max_tooth;
    std::size_t max_terms = 20'000'000;
    Branch branch = Branch::Selected;
    bool record_terms = true;
};

// Quad comb: comb 0 detects, combs 1..3 interact once each. Includes the
// 3! assignments of combs to the symmetric chi3 slots.
Spectrum quad_comb_signal(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                          const ThirdOrderOptions& opts = {});

// Dual comb, comb 0 detects and all three interactions come from comb 1.
Spectrum dual_comb_third(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                         const ThirdOrderOptions& opts = {});

// Dual comb, one interaction with comb 0 and two with comb 1; the three
// slot orderings are summed. Term teeth are {detected, m, p, q} with
// p' = p + q the class label.
Spectrum dual_comb_two_by_two(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                              const ThirdOrderOptions& opts = {});

// First-order dipole <V>(t_s) for an arbitrary sampled real field on a
// periodic window of N samples spaced dt.
std::vector<double> linear_dipole_response(const LevelSystem& sys, std::span<const double> field, double dt,
                                           const Projection& proj = Projection::full());

}  // namespace combspec
