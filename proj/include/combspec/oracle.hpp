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
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "combspec/aom.hpp"
#include "combspec/combfield.hpp"
#include "combspec/io.hpp"
#include "combspec/material.hpp"

namespace combspec {

struct ScalarField {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

ScalarField field_of(const PulseTrainField& field);

// H = H0 - E(t) V with pure dephasing gamma_ab on coherences and
// relaxation of populations toward the ground state at Gamma_a.
struct PropagationRun {
    LevelSystem system;
    ScalarField field;
    double t_start = 0.0;
    double dt = 1e-3;
    std::size_t steps = 0;
    std::size_t record_stride = 1;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> field;
    std::vector<double> field_derivative;
    // <V>
    std::vector<double> dipole;
    // S = -dE/dt <V>
    std::vector<double> power;
    // summed over the emitting set
    std::vector<double> population;
    // <P_e V>
    std::vector<std::complex<double>> pe_v;
    // <H0>
    std::vector<double> energy;
    // running integral of S
    std::vector<double> work;

    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_population = 1.0;
    double max_population = 0.0;
    std::size_t steps = 0;
};

inline constexpr double kTraceAbort = 1e-8;

// Fixed-step RK4 from rho = |g><g|, with the work integral carried as an
// extra state. Requires dt <= 0.01 * 2 pi / max |energy|; aborts with
// Propagation when the trace drifts by more than 1e-8.
Trajectory propagate(const PropagationRun& run);

// Five-point derivative of the recorded population.
std::vector<double> population_flux(const Trajectory& traj);

struct FluxCheck {
    double max_residual = 0.0;
    double relative = 0.0;
    // relaxation present: reported, not asserted
    bool flagged = false;
};

// Numerical dP_e/dt against -2 E Im<P_e V> on interior samples.
FluxCheck population_flux_check(const Trajectory& traj, const LevelSystem& sys);

// |W(end) - (<H0>(end) - <H0>(start))| / |<H0>(end) - <H0>(start)|.
double energy_balance_error(const Trajectory& traj);

CsvTable trajectory_table(const Trajectory& traj);

struct ScalingPoint {
    double amplitude = 0.0;
    double deviation = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
};

// |S_oracle - S_linear| / |S_linear| on the samples t_s = s dt, s < n,
// where S_linear comes from the frequency-domain first-order response to
// the same sampled field. linear_scaling sets every train amplitude to
// each listed value in turn and fits the log-log slope.
double linear_deviation(const LevelSystem& sys, const std::vector<AomPulseTrainSpec>& trains, double dt,
                        std::size_t samples);
ScalingReport linear_scaling(const LevelSystem& sys, const std::vector<AomPulseTrainSpec>& trains, double dt,
                             std::size_t samples, std::span<const double> amplitudes);

// Emitting population after four delta kicks, kick j being
// exp(i a_j K(theta_j)) with K = exp(-i theta) V_up + exp(i theta) V_down
// (rotating-wave impulsive limit), with free relaxing evolution between.
double kicked_population(const LevelSystem& sys, const std::array<double, 4>& areas,
                         const std::array<double, 4>& phases, const DelayPoint& delay);

// Fourth-order coefficient of exp(i sum s_j theta_j) in the kicked
// population, by M-step phase cycling of each pulse and Richardson
// elimination of the a^6 term. Comparable to the sum of impulsive_response
// over pathways with these signs.
std::complex<double> kicked_pathway_signal(const LevelSystem& sys, const std::array<int, 4>& signs,
                                           const DelayPoint& delay, double area = 0.02, int cycles = 8);

}  // namespace combspec
