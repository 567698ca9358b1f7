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

#include "combspec/spectrum.hpp"

namespace combspec {

inline constexpr double kLockInWindowTaus = 5.0;

enum class Reference { Plus, Minus };

struct LockInConfig {
    double phi21 = 0.0;
    double phi43 = 0.0;
    double omega_bar21 = 0.0;
    double omega_bar43 = 0.0;
    double theta = 0.0;
    double tau = 0.2;

    void validate() const;
    // True when theta is neither 0 nor pi/2.
    bool theta_flagged() const;
    // phi43 + phi21 or phi43 - phi21.
    double modulation(Reference ref) const;
};

// cos(wb43 t3 +- wb21 t1 - (phi43 +- phi21) t' - theta)
double reference_waveform(const LockInConfig& cfg, Reference ref, double t3, double t1, double tprime);

// (1/tau) int S R exp(-t'/tau) dt' by the trapezoid rule over the record.
// Throws WindowTooShort unless the record spans 5 tau.
double lockin_demodulate(const TimeSeries& signal, const TimeSeries& reference, double tau);

// Same integral over ceil(5 tau / L) back-to-back copies of a record of
// length L that is one full period of both inputs, summed in closed form.
double lockin_demodulate_periodic(const TimeSeries& signal, const TimeSeries& reference, double tau);

// Number of record repetitions the periodic variant integrates over.
std::size_t lockin_repeats(const TimeSeries& signal, double tau);

double downshift_map(double omega_material, double omega_ref);

}  // namespace combspec
