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
#include <set>
#include <vector>

#include "combspec/combfield.hpp"
#include "combspec/error.hpp"
#include "doctest.h"

using namespace combspec;

namespace {

CombSpec reference_comb() {
    CombSpec c;
    c.name = "ref";
    c.rep_spacing = 1.0;
    c.carrier = 100.0;
    c.envelope.sigma = 20.0;
    return c;
}

}  // namespace

TEST_CASE("tooth at the carrier carries the full amplitude") {
    const auto teeth = enumerate_teeth(reference_comb());
    std::size_t hits = 0;
    for (const auto& t : teeth) {
        if (t.index == 100) {
            CHECK(t.amplitude == std::complex<double>(1.0, 0.0));
            ++hits;
        }
    }
    CHECK(hits == 1);
}

TEST_CASE("tooth count follows the Gaussian floor") {
    const auto c = reference_comb();
    const auto teeth = enumerate_teeth(c);
    const auto half = static_cast<std::int64_t>(std::floor(20.0 * std::sqrt(2.0 * std::log(1e8))));
    CHECK(teeth.size() == static_cast<std::size_t>(2 * half + 1));
    CHECK(teeth.size() == 243);
    CHECK(teeth.front().index == 100 - half);
    CHECK(teeth.back().index == 100 + half);
    // brute scan over a much wider range agrees
    std::size_t scan = 0;
    for (int n = -1000; n <= 1000; ++n) {
        scan += c.envelope(n - 100.0) >= 1e-8 ? 1 : 0;
    }
    CHECK(scan == teeth.size());
}

TEST_CASE("zero amplitude gives no teeth and a warning") {
    auto c = reference_comb();
    c.envelope.amplitude = 0.0;
    CHECK(enumerate_teeth(c).empty());
    CHECK_FALSE(c.warnings().empty());
}

TEST_CASE("invalid combs are rejected with the field named") {
    auto c = reference_comb();
    c.envelope.sigma = -1.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sigma"), Error);
    c = reference_comb();
    c.rep_spacing = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = reference_comb();
    c.carrier = std::nan("");
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("grid images of two offset combs are integer multiples") {
    CombSpec a = reference_comb();
    CombSpec b = reference_comb();
    b.offset = 1e-3;
    const FrequencyGrid grid{1e-3};
    CHECK(grid_comb(a, grid).spacing_steps == 1000);
    CHECK(grid_comb(b, grid).spacing_steps == 1001);
    for (const auto& comp : comb_components(b, grid)) {
        CHECK(comp.index == 1001 * comp.tooth);
    }
}

TEST_CASE("tooth index to frequency and back is the identity") {
    CombSpec c = reference_comb();
    c.offset = 7e-3;
    c.ce_offset = 0.25;
    const FrequencyGrid grid{1e-3};
    const GridComb g = grid_comb(c, grid);
    for (const auto& t : enumerate_teeth(c)) {
        const std::int64_t idx = grid.index_of(t.frequency, "tooth");
        CHECK(idx == t.index * g.spacing_steps + g.ce_steps);
        CHECK((idx - g.ce_steps) / g.spacing_steps == t.index);
    }
}

TEST_CASE("incommensurate offsets name the comb") {
    CombSpec c = reference_comb();
    c.name = "wobbly";
    c.offset = 1.5e-3;
    try {
        comb_components(c, FrequencyGrid{1e-3});
        FAIL("expected IncommensurateGrid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncommensurateGrid);
        CHECK(std::string(e.what()).find("wobbly") != std::string::npos);
    }
}

TEST_CASE("field spectrum is conjugate symmetric") {
    CombSpec a = reference_comb();
    a.global_phase = 0.7;
    a.ce_offset = 0.125;
    CombSpec b = reference_comb();
    b.offset = 1e-3;
    b.global_phase = -1.3;
    SUBCASE("single comb") {
        const std::vector<CombSpec> combs{a};
        const Spectrum e = eval_field_freq(combs, FrequencyGrid{1e-3});
        for (const auto& [idx, spike] : e.spikes) {
            CHECK(e.at(-idx) == std::conj(spike.value));
        }
    }
    SUBCASE("two combs") {
        const std::vector<CombSpec> combs{a, b};
        const Spectrum e = eval_field_freq(combs, FrequencyGrid{1e-3});
        for (const auto& [idx, spike] : e.spikes) {
            CHECK(e.at(-idx) == std::conj(spike.value));
        }
    }
}

TEST_CASE("empty comb list gives a zero spectrum") {
    const std::vector<CombSpec> none;
    CHECK(eval_field_freq(none, FrequencyGrid{1e-3}).spikes.empty());
}

TEST_CASE("pulse train amplitude at centres carries the AOM phase") {
    AomPulseTrainSpec t;
    t.rep_period = 2.0;
    t.delay = 1.0;
    t.carrier = 3.0;
    t.duration = 0.1;
    t.amplitude = 0.5;
    t.pulse_count = 3;
    t.aom_freq = 0.0;
    CHECK(std::abs(eval_field_time(t, t.pulse_center(0)) - std::complex<double>(0.5, 0.0)) <= 1e-15);
    t.aom_freq = std::numbers::pi / t.rep_period;
    CHECK(std::abs(eval_field_time(t, t.pulse_center(1)) - std::complex<double>(-0.5, 0.0)) <= 1e-15);
    CHECK(std::abs(t.aom_phase(2) - std::complex<double>(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("impulsive trains are zero between pulses") {
    AomPulseTrainSpec t;
    t.impulsive = true;
    t.rep_period = 1.0;
    t.pulse_count = 4;
    CHECK(eval_field_time(t, 0.5) == std::complex<double>(0.0, 0.0));
    CHECK(eval_field_time(t, 2.0) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("real field derivative matches a finite difference") {
    AomPulseTrainSpec t;
    t.rep_period = 10.0;
    t.delay = 5.0;
    t.carrier = 2.0;
    t.duration = 1.5;
    t.pulse_count = 2;
    t.aom_freq = 0.3;
    const PulseTrainField f({t});
    const double h = 1e-5;
    for (double x : {3.0, 5.2, 14.1, 16.0}) {
        const double fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
        CHECK(f.derivative(x) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(std::abs(f.value(f.end_time() + 1.0)) < 1e-16);
}
