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
#include <numbers>
#include <random>
#include <vector>

#include "combspec/comb_signals.hpp"
#include "combspec/error.hpp"
#include "combspec/spectrum.hpp"
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

// -dE_d/dt <V> at t from the comb teeth directly, in long double.
long double direct_signal(const std::vector<CombSpec>& combs, const LevelSystem& sys, int detect, double t) {
    long double edot = 0.0L;
    long double dip = 0.0L;
    for (std::size_t j = 0; j < combs.size(); ++j) {
        for (const auto& tooth : enumerate_teeth(combs[j])) {
            const long double w = tooth.frequency;
            const std::complex<long double> a(tooth.amplitude.real(), tooth.amplitude.imag());
            const std::complex<long double> ph(std::cos(w * t), -std::sin(w * t));
            // E(t) = sum 2 Re(A e^{-i w t})
            if (static_cast<int>(j) == detect) {
                edot += 2.0L * (std::complex<long double>(0.0L, -w) * a * ph).real();
            }
            const cd chi = chi1(sys, tooth.frequency);
            dip += 2.0L * (std::complex<long double>(chi.real(), chi.imag()) * a * ph).real();
        }
    }
    return -edot * dip;
}

}  // namespace

TEST_CASE("time synthesis matches a direct long double sum over teeth") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.01, 10.0, 2.0)};
    const FrequencyGrid grid{0.01};
    LinearOptions opts;
    opts.detect = 0;
    opts.branch = Branch::All;
    const std::size_t n = linear_signal_min_samples(combs, grid, opts);
    const TimeSeries ts = linear_signal_time(combs, sys, grid, opts, n);
    double scale = 0.0;
    for (double v : ts.samples) {
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t s = 0; s < n; s += n / 64) {
        const auto want = static_cast<double>(direct_signal(combs, sys, 0, ts.time(s)));
        CHECK(std::abs(ts.samples[s] - want) <= 1e-10 * scale);
    }
}

TEST_CASE("time and frequency paths agree on a small dual comb") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.01, 10.0, 2.0)};
    const FrequencyGrid grid{0.01};
    LinearOptions opts;
    opts.detect = 0;
    opts.branch = Branch::All;
    const Spectrum f = linear_signal_freq(combs, sys, grid, opts);
    const std::size_t n = linear_signal_min_samples(combs, grid, opts);
    const Spectrum d = to_spectrum(linear_signal_time(combs, sys, grid, opts, n), static_cast<std::int64_t>(n / 2 - 1));
    CHECK(max_relative_difference(d, f) <= 1e-11);
}

TEST_CASE("too few samples is a Nyquist error stating the needed step") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.01, 10.0, 2.0)};
    LinearOptions opts;
    try {
        linear_signal_time(combs, sys, FrequencyGrid{0.01}, opts, 64);
        FAIL("expected Nyquist");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Nyquist);
        CHECK(std::string(e.what()).find("dt <") != std::string::npos);
    }
}

TEST_CASE("a single comb puts all Selected weight at DC") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0)};
    const Spectrum s = linear_signal_freq(combs, sys, FrequencyGrid{0.01});
    REQUIRE(s.spikes.size() == 1);
    CHECK(s.spikes.begin()->first == 0);
    // DC value is the mean absorbed power, sum over teeth 2 w |A|^2 Im chi
    double want = 0.0;
    for (const auto& t : enumerate_teeth(combs[0])) {
        want += 2.0 * t.frequency * std::norm(t.amplitude) * chi1(sys, t.frequency).imag();
    }
    CHECK(s.at(0).real() == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(s.at(0).imag()) <= 1e-12 * want);
}

TEST_CASE("degenerate combs collapse every Selected spike to DC") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.0, 10.0, 2.0)};
    const Spectrum s = linear_signal_freq(combs, sys, FrequencyGrid{0.01});
    CHECK(s.spikes.size() == 1);
    CHECK(s.spikes.count(0) == 1);
}

TEST_CASE("brick wall at half the spacing keeps the down-converted band") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.01, 10.0, 2.0)};
    const FrequencyGrid grid{0.01};
    LinearOptions all;
    all.detect = 0;
    all.branch = Branch::All;
    LinearOptions sel = all;
    sel.branch = Branch::Selected;
    const Spectrum filtered = apply_lowpass(linear_signal_freq(combs, sys, grid, all), 0.5);
    const Spectrum selected = linear_signal_freq(combs, sys, grid, sel);
    for (const auto& [idx, spike] : filtered.spikes) {
        CHECK(std::abs(grid.frequency(idx)) <= 0.5);
        for (const auto& t : spike.terms) {
            CHECK(t.teeth[0] + t.teeth[1] == 0);
        }
    }
    CHECK(max_relative_difference(filtered, selected) <= 1e-14);

    SUBCASE("lowpass is idempotent") {
        const Spectrum twice = apply_lowpass(filtered, 0.5);
        CHECK(max_relative_difference(twice, filtered) == 0.0);
    }
    SUBCASE("cutoff must sit below the spacing") {
        CHECK_THROWS_AS(apply_lowpass(filtered, 1.5), Error);
        CHECK_THROWS_AS(apply_lowpass(filtered, 0.0), Error);
    }
}

TEST_CASE("time-domain lowpass passes in-band tones with unit gain") {
    TimeSeries ts;
    const std::size_t n = 1024;
    ts.grid_step = 0.01;
    ts.dt = 2.0 * std::numbers::pi / (0.01 * static_cast<double>(n));
    ts.min_rep_spacing = 1.0;
    ts.samples.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double t = ts.time(s);
        ts.samples[s] = std::cos(0.2 * t + 0.3) + 0.5 * std::cos(3.0 * t);
    }
    const TimeSeries lp = apply_lowpass(ts, 0.5);
    for (std::size_t s = 0; s < n; s += 31) {
        CHECK(lp.samples[s] == doctest::Approx(std::cos(0.2 * ts.time(s) + 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("far-detuned carrier suppresses the signal") {
    // the dispersive wing Re chi ~ 1/detuning is not cut by the envelope, so
    // the dispersive wing keeps the ratio near gamma / detuning, so the
    // line must be narrow
    const auto sys = LevelSystem::two_level(10.0, 1e-6, 1.0);
    const FrequencyGrid grid{0.01};
    LinearOptions opts;
    opts.detect = 0;
    auto peak = [&](double carrier) {
        const std::vector<CombSpec> combs{comb(1.0, 0.0, carrier, 1.0), comb(1.0, 0.01, carrier, 1.0)};
        const std::size_t n = linear_signal_min_samples(combs, grid, opts);
        const TimeSeries lp = apply_lowpass(linear_signal_time(combs, sys, grid, opts, n), 0.5);
        double m = 0.0;
        for (double v : lp.samples) {
            m = std::max(m, std::abs(v));
        }
        return m;
    };
    CHECK(peak(30.0) <= 1e-6 * peak(10.0));
}

TEST_CASE("zero field and zero coupling give zero signal") {
    auto dark = comb(1.0, 0.0, 10.0, 2.0);
    dark.envelope.amplitude = 0.0;
    const std::vector<CombSpec> combs{dark, comb(1.0, 0.01, 10.0, 2.0)};
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    LinearOptions opts;
    opts.detect = 0;
    const Spectrum s = linear_signal_freq(combs, sys, FrequencyGrid{0.01}, opts);
    CHECK(s.max_abs() == 0.0);
    const std::size_t n = linear_signal_min_samples(combs, FrequencyGrid{0.01}, opts);
    for (double v : linear_signal_time(combs, sys, FrequencyGrid{0.01}, opts, n).samples) {
        CHECK(v == 0.0);
    }
    const auto off = LevelSystem::two_level(10.0, 0.5, 0.0);
    const std::vector<CombSpec> lit{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.01, 10.0, 2.0)};
    CHECK(linear_signal_freq(lit, off, FrequencyGrid{0.01}).max_abs() == 0.0);
}

TEST_CASE("emitting projection reuses the linear path with chi_e") {
    const auto sys = LevelSystem::two_level(10.0, 0.5, 1.0);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 2.0), comb(1.0, 0.01, 10.0, 2.0)};
    LinearOptions opts;
    opts.detect = 0;
    opts.projection = Projection::emitting();
    const Spectrum s = linear_signal_freq(combs, sys, FrequencyGrid{0.01}, opts);
    CHECK(s.projection == "emitting");
    for (const auto& [idx, spike] : s.spikes) {
        for (const auto& t : spike.terms) {
            CHECK(t.chi == chi1(sys, 0.01 * static_cast<double>(t.chi_args[0]), Projection::emitting()));
        }
    }
}

TEST_CASE("linear dipole response of a sampled tone") {
    const auto sys = LevelSystem::two_level(2.0, 0.3, 1.0);
    const std::size_t n = 256;
    const double dt = 0.05;
    const double w = 2.0 * std::numbers::pi * 10.0 / (static_cast<double>(n) * dt);
    std::vector<double> field(n);
    for (std::size_t s = 0; s < n; ++s) {
        field[s] = std::cos(w * dt * static_cast<double>(s));
    }
    const auto v = linear_dipole_response(sys, field, dt);
    const cd chi = chi1(sys, w);
    for (std::size_t s = 0; s < n; s += 17) {
        const double t = dt * static_cast<double>(s);
        CHECK(v[s] == doctest::Approx((chi * std::polar(1.0, -w * t)).real()).epsilon(1e-12));
    }
}

TEST_CASE("quad comb spikes land on 3m + 7p + 13q") {
    const auto sys = LevelSystem::ladder(2.0, 4.0, 1.0, 0.8, 0.2, 0.1);
    std::vector<CombSpec> combs{comb(1.0, 0.0, 0.0, 50.0), comb(1.0, 3e-3, 0.0, 50.0), comb(1.0, 7e-3, 0.0, 50.0),
                                comb(1.0, 13e-3, 0.0, 50.0)};
    ThirdOrderOptions opts;
    opts.max_tooth = 1;
    const Spectrum s = quad_comb_signal(combs, sys, FrequencyGrid{1e-3}, opts);
    for (const auto& [idx, spike] : s.spikes) {
        for (const auto& t : spike.terms) {
            CHECK(idx == 3 * t.teeth[1] + 7 * t.teeth[2] + 13 * t.teeth[3]);
            CHECK(t.teeth[0] == -(t.teeth[1] + t.teeth[2] + t.teeth[3]));
        }
    }
}

TEST_CASE("quad comb term carries the symmetric chi3 and six assignments") {
    const auto sys = LevelSystem::ladder(2.0, 4.0, 1.0, 0.8, 0.2, 0.1);
    std::vector<CombSpec> combs{comb(1.0, 0.0, 0.0, 50.0), comb(1.0, 3e-3, 0.0, 50.0), comb(1.0, 7e-3, 0.0, 50.0),
                                comb(1.0, 13e-3, 0.0, 50.0)};
    ThirdOrderOptions opts;
    opts.max_tooth = 1;
    const FrequencyGrid grid{1e-3};
    const Spectrum s = quad_comb_signal(combs, sys, grid, opts);
    std::size_t checked = 0;
    for (const auto& [idx, spike] : s.spikes) {
        for (const auto& t : spike.terms) {
            if (t.weight == 0.0) {
                continue;
            }
            const cd want = oracle::total(oracle::chi3_by_diagrams(sys, grid.frequency(t.chi_args[2]),
                                                                   grid.frequency(t.chi_args[1]),
                                                                   grid.frequency(t.chi_args[0])));
            CHECK(std::abs(t.chi - want) <= 1e-12 * std::abs(want));
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("term budget is enforced with the needed truncation in the message") {
    const auto sys = LevelSystem::ladder(2.0, 4.0, 1.0, 0.8, 0.2, 0.1);
    std::vector<CombSpec> combs{comb(1.0, 0.0, 0.0, 50.0), comb(1.0, 3e-3, 0.0, 50.0), comb(1.0, 7e-3, 0.0, 50.0),
                                comb(1.0, 13e-3, 0.0, 50.0)};
    ThirdOrderOptions opts;
    opts.max_terms = 1000;
    try {
        quad_comb_signal(combs, sys, FrequencyGrid{1e-3}, opts);
        FAIL("expected Budget");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Budget);
        CHECK(std::string(e.what()).find("max_tooth") != std::string::npos);
    }
}

TEST_CASE("third-order arity checks") {
    const auto sys = LevelSystem::ladder(2.0, 4.0, 1.0, 0.8, 0.2, 0.1);
    const std::vector<CombSpec> three{comb(1.0, 0.0, 0.0, 5.0), comb(1.0, 3e-3, 0.0, 5.0), comb(1.0, 7e-3, 0.0, 5.0)};
    CHECK_THROWS_AS(quad_comb_signal(three, sys, FrequencyGrid{1e-3}), Error);
    CHECK_THROWS_AS(dual_comb_third(three, sys, FrequencyGrid{1e-3}), Error);
}

TEST_CASE("dual comb third order with zero coupling is zero") {
    const auto sys = LevelSystem::ladder(2.0, 4.0, 0.0, 0.0, 0.2, 0.1);
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 0.0, 50.0), comb(1.0, 1e-3, 0.0, 50.0)};
    ThirdOrderOptions opts;
    opts.max_tooth = 2;
    CHECK(dual_comb_third(combs, sys, FrequencyGrid{1e-3}, opts).max_abs() == 0.0);
    CHECK(dual_comb_two_by_two(combs, sys, FrequencyGrid{1e-3}, opts).max_abs() == 0.0);
}

TEST_CASE("two-photon resonance peaks at the predicted class") {
    const std::vector<CombSpec> combs{comb(1.0, 0.0, 10.0, 3.0), comb(1.0, 1e-3, 10.0, 3.0)};
    ThirdOrderOptions opts;
    opts.record_terms = false;
    for (double w_fg : {21.0, 23.0}) {
        const auto sys = LevelSystem::ladder(9.0, w_fg, 1.0, 1.0, 0.3, 0.05);
        const Spectrum s = dual_comb_two_by_two(combs, sys, FrequencyGrid{1e-3}, opts);
        const auto p = static_cast<std::int64_t>(std::lround(w_fg / 1.001));
        CAPTURE(w_fg);
        CHECK(std::abs(s.at(p)) > std::abs(s.at(p - 1)));
        CHECK(std::abs(s.at(p)) > std::abs(s.at(p + 1)));
    }
}
