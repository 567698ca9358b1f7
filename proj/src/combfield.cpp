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

#include "combspec/combfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "combspec/error.hpp"

namespace combspec {

namespace {

constexpr std::int64_t kMaxTeeth = 100'000'000;
// exp(-x^2/2) < 1e-17 beyond this many widths
constexpr double kEnvelopeWidths = 9.0;

bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

double GaussianEnvelope::operator()(double detuning) const {
    return amplitude * std::exp(-detuning * detuning / (2.0 * sigma * sigma));
}

double CombSpec::period() const { return 2.0 * std::numbers::pi / spacing(); }

void CombSpec::validate() const {
    const std::string who = "'" + name + "': ";
    require(finite_all({rep_spacing, offset, carrier, ce_offset, global_phase, envelope.sigma,
                        envelope.amplitude, tooth_floor}),
            ErrorCode::InvalidArgument, who + "comb parameters must be finite");
    require(rep_spacing > 0.0, ErrorCode::InvalidArgument, who + "rep_spacing must be > 0");
    require(spacing() > 0.0, ErrorCode::InvalidArgument, who + "rep_spacing + offset must be > 0");
    require(envelope.sigma > 0.0, ErrorCode::InvalidArgument, who + "envelope sigma must be > 0");
    require(envelope.amplitude >= 0.0, ErrorCode::InvalidArgument, who + "envelope amplitude must be >= 0");
    require(tooth_floor > 0.0 && tooth_floor < 1.0, ErrorCode::InvalidArgument,
            who + "tooth_floor must lie in (0, 1)");
}

std::vector<std::string> CombSpec::warnings() const {
    std::vector<std::string> out;
    if (std::abs(offset) > 0.1 * rep_spacing) {
        out.push_back("'" + name + "': |offset|/rep_spacing = " + fmt(std::abs(offset) / rep_spacing) +
                      " is outside the small-offset regime");
    }
    if (envelope.amplitude == 0.0) {
        out.push_back("'" + name + "': zero envelope amplitude, comb is degenerate");
    }
    return out;
}

double envelope_reach(const CombSpec& comb) {
    return comb.envelope.sigma * std::sqrt(2.0 * std::log(1.0 / comb.tooth_floor));
}

std::vector<CombTooth> enumerate_teeth(const CombSpec& comb) {
    comb.validate();
    std::vector<CombTooth> teeth;
    if (comb.envelope.amplitude == 0.0) {
        return teeth;
    }
    const double reach = envelope_reach(comb);
    const double dw = comb.spacing();
    const double lo = std::ceil((comb.carrier - reach - comb.ce_offset) / dw) - 1.0;
    const double hi = std::floor((comb.carrier + reach - comb.ce_offset) / dw) + 1.0;
    require(hi - lo < static_cast<double>(kMaxTeeth), ErrorCode::Budget,
            "'" + comb.name + "': envelope spans more than 1e8 teeth");
    const double floor_abs = comb.tooth_floor * comb.envelope.amplitude;
    const std::complex<double> phase = std::polar(1.0, comb.global_phase);
    for (auto n = static_cast<std::int64_t>(lo); n <= static_cast<std::int64_t>(hi); ++n) {
        const double w = static_cast<double>(n) * dw + comb.ce_offset;
        const double g = comb.envelope(w - comb.carrier);
        if (g >= floor_abs) {
            teeth.push_back({n, w, phase * g});
        }
    }
    return teeth;
}

std::int64_t FrequencyGrid::index_of(double freq, const std::string& what) const {
    require(std::isfinite(step) && step > 0.0, ErrorCode::InvalidArgument, "grid step must be > 0");
    require(std::isfinite(freq), ErrorCode::InvalidArgument, what + " is not finite");
    const double q = freq / step;
    const double r = std::round(q);
    if (std::abs(q - r) > kGridTolerance * std::max(1.0, std::abs(q))) {
        fail(ErrorCode::IncommensurateGrid,
             what + " = " + fmt(freq) + " is not an integer multiple of the grid step " + fmt(step));
    }
    return static_cast<std::int64_t>(r);
}

GridComb grid_comb(const CombSpec& comb, const FrequencyGrid& grid) {
    comb.validate();
    GridComb g;
    const std::int64_t rep = grid.index_of(comb.rep_spacing, "'" + comb.name + "' rep_spacing");
    g.offset_steps = grid.index_of(comb.offset, "'" + comb.name + "' offset");
    g.spacing_steps = rep + g.offset_steps;
    g.ce_steps = grid.index_of(comb.ce_offset, "'" + comb.name + "' ce_offset");
    require(g.spacing_steps > 0, ErrorCode::IncommensurateGrid,
            "'" + comb.name + "': tooth spacing maps to a non-positive number of grid steps");
    return g;
}

std::vector<FieldComponent> comb_components(const CombSpec& comb, const FrequencyGrid& grid) {
    const GridComb g = grid_comb(comb, grid);
    std::vector<FieldComponent> out;
    for (const CombTooth& tooth : enumerate_teeth(comb)) {
        const std::int64_t index = tooth.index * g.spacing_steps + g.ce_steps;
        // the integer image must reproduce the tooth frequency
        const double image = grid.frequency(index);
        if (std::abs(image - tooth.frequency) > kGridTolerance * std::max(1.0, std::abs(tooth.frequency))) {
            fail(ErrorCode::IncommensurateGrid, "'" + comb.name + "' tooth n=" + std::to_string(tooth.index) +
                                                    " at " + fmt(tooth.frequency) + " is off the grid");
        }
        out.push_back({index, tooth.index, tooth.amplitude});
        out.push_back({-index, -tooth.index, std::conj(tooth.amplitude)});
    }
    std::sort(out.begin(), out.end(), [](const FieldComponent& a, const FieldComponent& b) {
        return a.index != b.index ? a.index < b.index : a.tooth < b.tooth;
    });
    return out;
}

Spectrum eval_field_freq(std::span<const CombSpec> combs, const FrequencyGrid& grid, bool record_terms) {
    Spectrum spec;
    spec.step = grid.step;
    spec.kind = "field";
    spec.has_terms = record_terms;
    for (std::size_t j = 0; j < combs.size(); ++j) {
        spec.min_rep_spacing = std::min(spec.min_rep_spacing, combs[j].spacing());
        // per-comb partial sums hold at most two commuting terms, which keeps
        // conj(E(w)) == E(-w) bit exact after the cross-comb sum
        std::map<std::int64_t, std::complex<double>> partial;
        for (const FieldComponent& c : comb_components(combs[j], grid)) {
            partial[c.index] += c.amplitude;
            Spike& spike = spec.spikes[c.index];
            ++spike.term_count;
            if (record_terms) {
                SpectrumTerm term;
                term.order = 0;
                term.combs[0] = static_cast<int>(j);
                term.teeth[0] = c.tooth;
                term.weight = c.amplitude;
                spike.terms.push_back(term);
            }
        }
        for (const auto& [index, value] : partial) {
            spec.spikes[index].value += value;
        }
    }
    return spec;
}

void AomPulseTrainSpec::validate() const {
    const std::string who = "'" + name + "': ";
    require(finite_all({delay, rep_period, aom_freq, carrier, amplitude, duration}), ErrorCode::InvalidArgument,
            who + "pulse-train parameters must be finite");
    require(rep_period > 0.0, ErrorCode::InvalidArgument, who + "rep_period must be > 0");
    require(pulse_count >= 1, ErrorCode::InvalidArgument, who + "pulse_count must be >= 1");
    require(impulsive || duration > 0.0, ErrorCode::InvalidArgument, who + "Gaussian duration must be > 0");
}

std::complex<double> AomPulseTrainSpec::aom_phase(std::int64_t n) const {
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double per_pulse = std::fmod(static_cast<long double>(aom_freq) * rep_period, two_pi);
    const long double phase = std::fmod(per_pulse * static_cast<long double>(n), two_pi);
    return std::polar(1.0, static_cast<double>(phase));
}

namespace {

// Pulse indices whose envelope can matter at time t.
std::pair<std::int64_t, std::int64_t> pulse_window(const AomPulseTrainSpec& spec, double t) {
    const double reach = spec.impulsive ? 0.0 : kEnvelopeWidths * spec.duration;
    const double rel = t - spec.delay;
    auto lo = static_cast<std::int64_t>(std::floor((rel - reach) / spec.rep_period));
    auto hi = static_cast<std::int64_t>(std::ceil((rel + reach) / spec.rep_period));
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, spec.pulse_count - 1);
    return {lo, hi};
}

}  // namespace

std::complex<double> eval_field_time(const AomPulseTrainSpec& spec, double t) {
    spec.validate();
    std::complex<double> sum{};
    const auto [lo, hi] = pulse_window(spec, t);
    for (std::int64_t n = lo; n <= hi; ++n) {
        const double tau = t - spec.pulse_center(n);
        if (spec.impulsive) {
            if (std::abs(tau) <= 1e-12 * std::max(1.0, spec.rep_period)) {
                sum += spec.amplitude * spec.aom_phase(n);
            }
            continue;
        }
        const double g = spec.amplitude * std::exp(-tau * tau / (2.0 * spec.duration * spec.duration));
        sum += g * std::polar(1.0, spec.carrier * tau) * spec.aom_phase(n);
    }
    return sum;
}

std::complex<double> eval_field_time_derivative(const AomPulseTrainSpec& spec, double t) {
    spec.validate();
    require(!spec.impulsive, ErrorCode::InvalidArgument, "'" + spec.name + "': impulsive train has no derivative");
    std::complex<double> sum{};
    const auto [lo, hi] = pulse_window(spec, t);
    const double s2 = spec.duration * spec.duration;
    for (std::int64_t n = lo; n <= hi; ++n) {
        const double tau = t - spec.pulse_center(n);
        const double g = spec.amplitude * std::exp(-tau * tau / (2.0 * s2));
        const std::complex<double> factor(-tau / s2, spec.carrier);
        sum += factor * g * std::polar(1.0, spec.carrier * tau) * spec.aom_phase(n);
    }
    return sum;
}

PulseTrainField::PulseTrainField(std::vector<AomPulseTrainSpec> trains) : trains_(std::move(trains)) {
    for (const auto& tr : trains_) {
        tr.validate();
        require(!tr.impulsive, ErrorCode::InvalidArgument,
                "'" + tr.name + "': time-domain propagation needs finite-width pulses");
    }
}

double PulseTrainField::value(double t) const {
    double v = 0.0;
    for (const auto& tr : trains_) {
        v += eval_field_time(tr, t).real();
    }
    return v;
}

double PulseTrainField::derivative(double t) const {
    double v = 0.0;
    for (const auto& tr : trains_) {
        v += eval_field_time_derivative(tr, t).real();
    }
    return v;
}

double PulseTrainField::end_time() const {
    double end = 0.0;
    for (const auto& tr : trains_) {
        end = std::max(end, tr.pulse_center(tr.pulse_count - 1) + kEnvelopeWidths * tr.duration);
    }
    return end;
}

}  // namespace combspec
