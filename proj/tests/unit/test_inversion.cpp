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


#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "combspec/comb_signals.hpp"
#include "combspec/error.hpp"
#include "combspec/inversion.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace combspec;
using cd = std::complex<double>;

namespace {

CombSpec comb(double rep, double offset, double carrier, double sigma) {
    CombSpec c;
    c.rep_spacing = rep;
    c.offset = offset;
    c.carrier = carrier;
    c.envelope.sigma = sigma;
    return c;
}

std::vector<CombSpec> quad(double detect_offset, double o1, double o2, double o3) {
    return {comb(1.0, detect_offset, 0.0, 50.0), comb(1.0, o1, 0.0, 50.0), comb(1.0, o2, 0.0, 50.0),
            comb(1.0, o3, 0.0, 50.0)};
}

const LevelSystem& ladder() {
    static const LevelSystem s = LevelSystem::ladder(1.5, 3.2, 1.0, 0.7, 0.2, 0.1);
    return s;
}

Spectrum quad_run(const std::vector<CombSpec>& combs, std::int64_t max_tooth, const LevelSystem& sys = ladder()) {
    ThirdOrderOptions opts;
    opts.max_tooth = max_tooth;
    return quad_comb_signal(combs, sys, FrequencyGrid{1e-3}, opts);
}

}  // namespace

TEST_CASE("linear inversion recovers chi1 at every recoverable tooth") {
    const auto sys = LevelSystem::two_level(100.0, 1.0, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 100.0, 20.0), comb(1.0, 1e-3, 100.0, 20.0)};
    const FrequencyGrid grid{1e-3};
    LinearOptions opts;
    opts.detect = 0;
    const Spectrum s = apply_lowpass(linear_signal_freq(combs, sys, grid, opts), 0.5);
    const LinearInversion inv = invert_linear(s, combs, grid);
    CHECK(inv.recoverable > 200);
    for (const auto& smp : inv.samples) {
        if (!smp.recoverable) {
            continue;
        }
        const cd want = oracle::chi1_two_level(100.0, 1.0, 1.0, smp.frequency);
        CHECK(std::abs(smp.chi - want) <= 1e-12 * std::abs(want));
        CHECK(smp.frequency == doctest::Approx(1.001 * static_cast<double>(smp.tooth)));
    }
}

TEST_CASE("teeth below the floor are flagged, not extrapolated") {
    const auto sys = LevelSystem::two_level(100.0, 1.0, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 100.0, 20.0), comb(1.0, 1e-3, 100.0, 20.0)};
    const FrequencyGrid grid{1e-3};
    LinearOptions opts;
    opts.detect = 0;
    const Spectrum s = apply_lowpass(linear_signal_freq(combs, sys, grid, opts), 0.5);
    LinearInversionOptions io;
    io.weight_floor = 1e-3;
    const LinearInversion inv = invert_linear(s, combs, grid, io);
    std::size_t flagged = 0;
    for (const auto& smp : inv.samples) {
        const double g = combs[1].envelope(smp.frequency - 100.0);
        if (g < 1e-3) {
            CHECK_FALSE(smp.recoverable);
            CHECK(smp.reason == "tooth weight below the envelope floor");
            CHECK(smp.chi == cd(0.0, 0.0));
            ++flagged;
        }
    }
    CHECK(flagged > 0);
    const CsvTable t = chi1_table(inv, s);
    CHECK(t.header == std::vector<std::string>{"tooth", "frequency", "re", "im", "constraints", "residual"});
    CHECK(t.rows.size() == inv.samples.size());
}

TEST_CASE("collisions at zero carrier offset are reported") {
    // with a carrier-envelope offset on the probe, tooth n and the mirror of
    // tooth -(n + 4) land on the same down-converted index
    const auto sys = LevelSystem::two_level(2.0, 0.5, 1.0);
    CombSpec probe = comb(1.0, 1e-2, 0.0, 3.0);
    probe.ce_offset = 2e-2;
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 0.0, 3.0), probe};
    const FrequencyGrid grid{1e-2};
    const Spectrum s = linear_signal_freq(combs, sys, grid, LinearOptions{});
    const LinearInversion inv = invert_linear(s, combs, grid);
    bool saw = false;
    for (const auto& smp : inv.samples) {
        saw = saw || smp.reason.find("collision") != std::string::npos;
    }
    CHECK(saw);
}

TEST_CASE("single run with separated offsets has one row per triple") {
    // 1, 5, 26: m + 5p + 26q is unique for |m|,|p|,|q| <= 2
    const Spectrum s = quad_run(quad(0.0, 1e-3, 5e-3, 26e-3), 2);
    const std::vector<Spectrum> runs{s};
    const FoldingSystem fs = build_folding_system(runs);
    const RankReport r = rank_report(fs);
    std::size_t triples = 0;
    for (int m = -2; m <= 2; ++m) {
        for (int p = -2; p <= 2; ++p) {
            for (int q = -2; q <= 2; ++q) {
                // the detected tooth at zero frequency has no prefactor
                triples += (m + p + q != 0) ? 1 : 0;
            }
        }
    }
    CHECK(r.constrained == triples);
    CHECK(r.rank == triples);
    CHECK(r.full_rank());
    const FoldingSolution sol = solve_folding(fs);
    CHECK(sol.max_relative_residual <= kFoldingResidualTolerance);
}

TEST_CASE("folded single run is rank deficient and a second offset fixes it") {
    const Spectrum a = quad_run(quad(0.0, 3e-3, 7e-3, 13e-3), 2);
    const Spectrum b = quad_run(quad(-20e-3, 3e-3, 7e-3, 13e-3), 2);
    const std::vector<Spectrum> one{a};
    const std::vector<Spectrum> dup{a, a};
    const std::vector<Spectrum> two{a, b};
    const RankReport r1 = rank_report(build_folding_system(one));
    const RankReport rd = rank_report(build_folding_system(dup));
    const RankReport r2 = rank_report(build_folding_system(two));
    CHECK_FALSE(r1.full_rank());
    CHECK(rd.rank == r1.rank);
    CHECK(r2.rank >= r1.rank);
    CHECK(r2.full_rank());
    try {
        solve_folding(build_folding_system(one));
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
        CHECK(std::string(e.what()).find("lambda > 0") != std::string::npos);
    }
    const FoldingSolution sol = solve_folding(build_folding_system(two));
    const FoldingSystem fs = build_folding_system(two);
    double worst = 0.0;
    for (std::size_t j = 0; j < fs.unknowns.size(); ++j) {
        if (!sol.constrained[j]) {
            CHECK(sol.x[static_cast<Eigen::Index>(j)] == cd(0.0, 0.0));
            continue;
        }
        const auto& k = fs.unknowns[j];
        const cd truth = chi3(ladder(), 1e-3 * static_cast<double>(k[2]), 1e-3 * static_cast<double>(k[1]),
                              1e-3 * static_cast<double>(k[0]));
        worst = std::max(worst, std::abs(sol.x[static_cast<Eigen::Index>(j)] - truth) / std::abs(truth));
    }
    CHECK(worst <= 1e-9);
    const Eigen::VectorXcd fwd = forward_folding(fs, sol.x);
    CHECK((fwd - fs.b).norm() <= 1e-12 * fs.b.norm());
    const CsvTable t = chi3_table(fs, sol);
    CHECK(t.rows.size() == fs.unknowns.size());
}

TEST_CASE("ridge solution shrinks to zero as lambda grows") {
    const std::vector<Spectrum> runs{quad_run(quad(0.0, 3e-3, 7e-3, 13e-3), 1)};
    double last = std::numeric_limits<double>::infinity();
    std::vector<double> scaled;
    for (double lambda : {1e-6, 1e-2, 1e2, 1e8, 1e12}) {
        const FoldingSolution sol = solve_folding(build_folding_system(runs, lambda));
        const double norm = sol.x.norm();
        CHECK(norm <= last * (1.0 + 1e-12));
        last = norm;
        scaled.push_back(norm * lambda);
    }
    // x -> A^H b / lambda
    CHECK(scaled[4] == doctest::Approx(scaled[3]).epsilon(1e-3));
}

TEST_CASE("zero response gives a zero solution under ridge") {
    const auto dark = LevelSystem::ladder(1.5, 3.2, 0.0, 0.0, 0.2, 0.1);
    const std::vector<Spectrum> runs{quad_run(quad(0.0, 3e-3, 7e-3, 13e-3), 1, dark)};
    const FoldingSystem fs = build_folding_system(runs, 1e-3);
    CHECK(fs.b.norm() == 0.0);
    const FoldingSolution sol = solve_folding(fs);
    CHECK(sol.x.norm() == 0.0);
}

TEST_CASE("runs need recorded terms and one grid") {
    ThirdOrderOptions opts;
    opts.max_tooth = 1;
    opts.record_terms = false;
    const std::vector<Spectrum> bare{quad_comb_signal(quad(0.0, 3e-3, 7e-3, 13e-3), ladder(), FrequencyGrid{1e-3}, opts)};
    CHECK_THROWS_AS(build_folding_system(bare), Error);
    opts.record_terms = true;
    const std::vector<Spectrum> mixed{
        quad_comb_signal(quad(0.0, 3e-3, 7e-3, 13e-3), ladder(), FrequencyGrid{1e-3}, opts),
        quad_comb_signal(quad(0.0, 3e-3, 7e-3, 13e-3), ladder(), FrequencyGrid{5e-4}, opts)};
    CHECK_THROWS_AS(build_folding_system(mixed), Error);
}
