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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "combspec/combfield.hpp"
#include "combspec/lockin.hpp"
#include "combspec/material.hpp"
#include "combspec/spectrum.hpp"

namespace combspec {

enum class Side { Ket, Bra };
enum class Detection { Fluorescence, Heterodyne };

// Sign s is -1 when the interaction takes the E+ component (ket raise or
// bra lower) and +1 for E-. The shot phase of a pathway is
// exp(i sum_j s_j phi_j m T).
struct Interaction {
    Side side = Side::Ket;
    int from = 0;
    int to = 0;
    int sign = 0;
};

struct PathwaySignature {
    int id = 0;
    std::string label;
    Detection detection = Detection::Fluorescence;
    std::vector<Interaction> interactions;
    std::vector<int> signs;
    // (ket, bra) after each interaction
    std::vector<std::pair<int, int>> intervals;
    bool involves_f = false;
    // k_I, k_II, k_III or "other"; heterodyne only
    std::string heterodyne_class;

    double net_modulation(std::span<const double> phis) const;
    // All arrows flipped: ket <-> bra, signs negated.
    PathwaySignature conjugate() const;
};

// Representatives of every conjugate pair (the member with last sign +1).
// Fluorescence: four interactions ending in an emitting population. The
// g/e-only diagrams take ids 1..4 by the position of their lone-side
// interaction; f-manifold diagrams follow. Heterodyne: three interactions
// ending in a radiating coherence (metadata only).
std::vector<PathwaySignature> enumerate_pathways(const LevelSystem& sys, Detection detection);

// Markdown table of a catalog and a stable hash of its content.
std::string pathway_table(const std::vector<PathwaySignature>& pathways);
std::string pathway_table_hash(const std::vector<PathwaySignature>& pathways);

// Impulsive-limit response: (i mu) per ket interaction, (-i mu) per bra
// interaction, exp((-i w_ab - gamma_ab) t) per interval. Heterodyne
// pathways end with the emitted dipole factor mu_{bra,ket}.
std::complex<double> impulsive_response(const LevelSystem& sys, const PathwaySignature& pathway, double t3, double t2,
                                        double t1);

struct DelayPoint {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
};

struct DelayAxis {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 1;

    double at(std::size_t i) const { return start + step * static_cast<double>(i); }
};

struct DelayGrid {
    DelayAxis t1;
    DelayAxis t2;
    DelayAxis t3;

    void validate() const;
    // Row-major over (t1, t2, t3) with t3 fastest.
    std::vector<DelayPoint> points() const;
    // t1, t3 in [0, 5/gamma] with 64 steps, t2 fixed.
    static DelayGrid standard(double gamma, double t2 = 0.0, std::size_t steps = 64);
};

struct PathwayTerm {
    int id = 0;
    std::complex<double> amplitude{};
    double modulation = 0.0;
};

// R_i(t3,t2,t1) times the pulse areas, with the shot-to-shot modulation
// sum_j s_j phi_j. `only` restricts to the listed ids.
std::vector<PathwayTerm> pathway_terms(const LevelSystem& sys, const std::vector<PathwaySignature>& pathways,
                                       std::span<const AomPulseTrainSpec> trains, const DelayPoint& delay,
                                       const std::vector<int>& only = {});

// S_m = sum_i 2 Re(A_i exp(i Omega_i m T)), m in [0, shots).
TimeSeries shot_record(std::span<const PathwayTerm> terms, double period, std::size_t shots);

// One record per delay point.
std::vector<TimeSeries> shot_sequence(const LevelSystem& sys, std::span<const AomPulseTrainSpec> trains,
                                      const DelayGrid& grid, std::size_t shots);

// Smallest shot count P such that every modulation completes an integer
// number of cycles in P T (to 1e-9 cycles); nullopt if none below max.
std::optional<std::size_t> common_period_shots(std::span<const double> modulations, double period,
                                               std::size_t max_shots = 1'000'000);
// Smallest multiple of the common period at or above `minimum`.
std::size_t default_shot_count(std::span<const double> modulations, double period, std::size_t minimum = 4096);

struct GroupAmplitudes {
    // S_LI(0) + i S_LI(pi/2) for each reference
    std::complex<double> plus{};
    std::complex<double> minus{};
};

enum class LockInMode { Direct, Periodic };

GroupAmplitudes extract_pathway_groups(const TimeSeries& record, const LockInConfig& cfg, double t3, double t1,
                                       LockInMode mode);

// Differences between cfg and the beat frequencies set by the trains.
std::vector<std::string> lockin_mismatch_warnings(const LockInConfig& cfg, std::span<const AomPulseTrainSpec> trains);

// DC gain of the lock-in integral for the given record geometry.
double lockin_gain(std::size_t shots, double period, double tau, LockInMode mode);

struct DelayMap {
    std::vector<double> t1;
    std::vector<double> t3;
    double t2 = 0.0;
    std::size_t shots = 0;
    double gain = 1.0;
    // row-major, t3 fastest
    std::vector<std::complex<double>> plus;
    std::vector<std::complex<double>> minus;
    // model group sums times exp(i A0) times the gain
    std::vector<std::complex<double>> expected_plus;
    std::vector<std::complex<double>> expected_minus;
    std::vector<std::string> warnings;
};

// Full pipeline over a t1 x t3 grid at fixed t2: records, lock-in, groups.
DelayMap run_delay_map(const LevelSystem& sys, std::span<const AomPulseTrainSpec> trains, const DelayGrid& grid,
                       const LockInConfig& cfg, std::size_t shots, LockInMode mode,
                       const std::vector<int>& only = {});

struct ExponentialFit {
    std::vector<std::complex<double>> roots;
    std::vector<std::complex<double>> amplitudes;
    // of the largest-amplitude root, for data ~ exp((-i w - g) t)
    double frequency = 0.0;
    double decay = 0.0;
};

// Prony / linear-prediction fit of uniformly sampled data with `order`
// damped complex exponentials.
ExponentialFit fit_exponentials(std::span<const std::complex<double>> data, double dt, int order);

}  // namespace combspec
