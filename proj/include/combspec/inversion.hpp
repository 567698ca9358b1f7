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

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "combspec/combfield.hpp"
#include "combspec/io.hpp"
#include "combspec/spectrum.hpp"

namespace combspec {

struct LinearSample {
    std::int64_t spike = 0;
    std::int64_t tooth = 0;
    double frequency = 0.0;
    std::complex<double> chi{};
    std::complex<double> weight{};
    bool recoverable = false;
    std::string reason;
};

struct LinearInversion {
    std::vector<LinearSample> samples;
    std::size_t recoverable = 0;
    // max |weight| / min |weight| over recoverable samples
    double weight_spread = 0.0;
};

struct LinearInversionOptions {
    int detect = 0;
    // Samples whose tooth weight falls below floor * A are unrecoverable;
    // nullopt uses each comb's own tooth_floor.
    std::optional<double> weight_floor;
};

// chi1 at the positive-frequency teeth of the interacting comb, divided out
// of the Selected-branch spikes of a two-comb linear spectrum.
LinearInversion invert_linear(const Spectrum& spectrum, std::span<const CombSpec> combs, const FrequencyGrid& grid,
                              const LinearInversionOptions& opts = {});

using ChiKey = std::array<std::int64_t, 3>;

struct FoldingRow {
    std::size_t run = 0;
    std::int64_t spike = 0;
};

// Stacked A x = b over one or more third-order runs. Columns are chi3
// samples keyed by their sorted argument indices.
struct FoldingSystem {
    double step = 0.0;
    std::vector<ChiKey> unknowns;
    std::vector<FoldingRow> rows;
    Eigen::MatrixXcd a;
    Eigen::VectorXcd b;
    // per column; 0 marks an unknown no row constrains
    std::vector<std::size_t> constraint_count;
    double lambda = 0.0;

    std::vector<ChiKey> unconstrained() const;
};

// Rows come from the recorded spike terms, so every entry is backed by
// metadata. Requires term-recording third-order spectra on one grid.
FoldingSystem build_folding_system(std::span<const Spectrum> runs, double lambda = 0.0);

struct RankReport {
    std::size_t unknowns = 0;
    std::size_t constrained = 0;
    std::size_t rows = 0;
    std::size_t rank = 0;
    double condition = 0.0;
    std::vector<double> singular_values;

    bool full_rank() const { return rank == constrained; }
};

// Rank of A restricted to constrained columns; singular values below
// max(rows, cols) * eps * s_max count as zero.
RankReport rank_report(const FoldingSystem& system);

struct FoldingSolution {
    std::vector<ChiKey> unknowns;
    Eigen::VectorXcd x;
    std::vector<bool> constrained;
    Eigen::VectorXcd residuals;
    // max |residual| / max |b|
    double max_relative_residual = 0.0;
    RankReport rank;
};

inline constexpr double kFoldingResidualTolerance = 1e-9;

// Minimizes |Ax - b|^2 + lambda |x|^2 by orthogonal factorization of the
// augmented system [A; sqrt(lambda) I]. With lambda == 0 the constrained
// columns must have full rank, otherwise RankDeficient is thrown.
// Unconstrained unknowns come back as 0 and flagged.
FoldingSolution solve_folding(const FoldingSystem& system);

Eigen::VectorXcd forward_folding(const FoldingSystem& system, const Eigen::VectorXcd& x);

// Columns w1, w2, w3, re, im, constraints, residual (max |row residual|
// over rows that touch the sample).
CsvTable chi3_table(const FoldingSystem& system, const FoldingSolution& solution);
// Columns tooth, frequency, re, im, constraints, residual.
CsvTable chi1_table(const LinearInversion& inversion, const Spectrum& spectrum);

}  // namespace combspec
