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

#include "combspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "combspec/error.hpp"
#include "combspec/fft.hpp"

namespace combspec {

std::complex<double> Spectrum::at(std::int64_t index) const {
    auto it = spikes.find(index);
    return it == spikes.end() ? std::complex<double>{} : it->second.value;
}

void Spectrum::add(std::int64_t index, const SpectrumTerm& term, bool record) {
    Spike& spike = spikes[index];
    spike.value += term.contribution();
    ++spike.term_count;
    if (record) {
        spike.terms.push_back(term);
    }
}

void Spectrum::add_value(std::int64_t index, std::complex<double> value) {
    Spike& spike = spikes[index];
    spike.value += value;
    ++spike.term_count;
}

double Spectrum::max_abs() const {
    double m = 0.0;
    for (const auto& [index, spike] : spikes) {
        m = std::max(m, std::abs(spike.value));
    }
    return m;
}

namespace {

void check_cutoff(double cutoff, double min_rep_spacing) {
    require(std::isfinite(cutoff) && cutoff > 0.0, ErrorCode::InvalidArgument,
            "low-pass cutoff must be positive and finite");
    if (!(cutoff < min_rep_spacing)) {
        std::ostringstream msg;
        msg << "low-pass cutoff " << cutoff << " is not below the smallest repetition spacing "
            << min_rep_spacing << "; n' != 0 bands would pass";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
}

}  // namespace

Spectrum apply_lowpass(const Spectrum& spectrum, double cutoff) {
    check_cutoff(cutoff, spectrum.min_rep_spacing);
    Spectrum out = spectrum;
    out.spikes.clear();
    for (const auto& [index, spike] : spectrum.spikes) {
        if (std::abs(spectrum.frequency(index)) <= cutoff) {
            out.spikes.emplace(index, spike);
        }
    }
    out.cutoff = spectrum.cutoff ? std::min(*spectrum.cutoff, cutoff) : cutoff;
    return out;
}

TimeSeries apply_lowpass(const TimeSeries& series, double cutoff) {
    check_cutoff(cutoff, series.min_rep_spacing);
    const auto n = static_cast<std::int64_t>(series.samples.size());
    auto coeffs = series_coefficients(std::span<const double>(series.samples));
    for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t signed_k = (2 * k > n) ? k - n : k;
        if (std::abs(static_cast<double>(signed_k) * series.grid_step) > cutoff) {
            coeffs[static_cast<std::size_t>(k)] = 0.0;
        }
    }
    const auto back = series_synthesis(coeffs);
    TimeSeries out = series;
    for (std::size_t s = 0; s < back.size(); ++s) {
        out.samples[s] = back[s].real();
    }
    out.cutoff = series.cutoff ? std::min(*series.cutoff, cutoff) : cutoff;
    return out;
}

Spectrum to_spectrum(const TimeSeries& series, std::int64_t max_index) {
    const auto n = static_cast<std::int64_t>(series.samples.size());
    require(n > 0, ErrorCode::InvalidArgument, "cannot transform an empty time series");
    require(2 * max_index < n, ErrorCode::InvalidArgument, "requested band exceeds the Nyquist range");
    const auto coeffs = series_coefficients(std::span<const double>(series.samples));
    Spectrum out;
    out.step = series.grid_step;
    out.kind = "dft";
    out.min_rep_spacing = series.min_rep_spacing;
    out.cutoff = series.cutoff;
    for (std::int64_t k = -max_index; k <= max_index; ++k) {
        const std::int64_t slot = k < 0 ? k + n : k;
        out.add_value(k, coeffs[static_cast<std::size_t>(slot)]);
    }
    return out;
}

double max_relative_difference(const Spectrum& a, const Spectrum& b) {
    double num = 0.0;
    for (const auto& [index, spike] : a.spikes) {
        num = std::max(num, std::abs(spike.value - b.at(index)));
    }
    for (const auto& [index, spike] : b.spikes) {
        num = std::max(num, std::abs(a.at(index) - spike.value));
    }
    const double den = b.max_abs();
    if (den == 0.0) {
        return num;
    }
    return num / den;
}

}  // namespace combspec
