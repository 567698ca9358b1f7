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

#include "combspec/comb_signals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "combspec/error.hpp"
#include "combspec/fft.hpp"
#include "combspec/kernels.hpp"
#include "combspec/parallel.hpp"

namespace combspec {

using cd = std::complex<double>;

namespace {

constexpr cd kI{0.0, 1.0};

double min_spacing(std::span<const CombSpec> combs) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : combs) {
        m = std::min(m, c.spacing());
    }
    return m;
}

std::vector<int> detect_set(std::span<const CombSpec> combs, const std::optional<int>& detect) {
    std::vector<int> out;
    if (detect) {
        require(*detect >= 0 && *detect < static_cast<int>(combs.size()), ErrorCode::InvalidArgument,
                "unknown detect comb index " + std::to_string(*detect));
        out.push_back(*detect);
    } else {
        for (int j = 0; j < static_cast<int>(combs.size()); ++j) {
            out.push_back(j);
        }
    }
    return out;
}

// Label -> component positions, in component order.
std::unordered_map<std::int64_t, std::vector<std::size_t>> by_label(const std::vector<FieldComponent>& comps) {
    std::unordered_map<std::int64_t, std::vector<std::size_t>> map;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        map[comps[i].tooth].push_back(i);
    }
    return map;
}

}  // namespace

Spectrum linear_signal_freq(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                            const LinearOptions& opts) {
    sys.validate();
    const auto detected = detect_set(combs, opts.detect);
    std::vector<std::vector<FieldComponent>> comps;
    comps.reserve(combs.size());
    for (const auto& c : combs) {
        comps.push_back(comb_components(c, grid));
    }

    Spectrum spec;
    spec.step = grid.step;
    spec.kind = "linear";
    spec.projection = opts.projection.name();
    spec.min_rep_spacing = min_spacing(combs);
    spec.has_terms = opts.record_terms;

    std::unordered_map<std::int64_t, cd> chi_cache;
    auto chi_at = [&](std::int64_t index) {
        auto it = chi_cache.find(index);
        if (it != chi_cache.end()) {
            return it->second;
        }
        const cd v = chi1(sys, grid.frequency(index), opts.projection);
        chi_cache.emplace(index, v);
        return v;
    };

    for (int j : detected) {
        const auto& dcomps = comps[j];
        const auto labels = by_label(dcomps);
        for (int k = 0; k < static_cast<int>(combs.size()); ++k) {
            for (const FieldComponent& ck : comps[k]) {
                const cd chi = chi_at(ck.index);
                auto emit = [&](const FieldComponent& cl) {
                    SpectrumTerm term;
                    term.order = 1;
                    term.combs = {j, k, -1, -1};
                    term.teeth = {cl.tooth, ck.tooth, 0, 0};
                    term.chi_args = {ck.index, 0, 0};
                    term.weight = kI * grid.frequency(cl.index) * cl.amplitude * ck.amplitude;
                    term.chi = chi;
                    spec.add(cl.index + ck.index, term, opts.record_terms);
                };
                if (opts.branch == Branch::Selected) {
                    auto it = labels.find(-ck.tooth);
                    if (it != labels.end()) {
                        for (std::size_t pos : it->second) {
                            emit(dcomps[pos]);
                        }
                    }
                } else {
                    for (const FieldComponent& cl : dcomps) {
                        emit(cl);
                    }
                }
            }
        }
    }
    return spec;
}

namespace {

struct Band {
    std::vector<kernels::Harmonic> harmonics;
    std::int64_t max_index = 0;
};

// Positive-frequency half of a conjugate-symmetric component set, with the
// factor 2 folded in so that Re(sum) reproduces the real signal.
void push_half(Band& band, std::int64_t index, cd value) {
    if (index < 0) {
        return;
    }
    band.harmonics.push_back({index, index == 0 ? value : 2.0 * value});
    band.max_index = std::max(band.max_index, index);
}

struct LinearBands {
    Band derivative;
    Band dipole;
};

LinearBands linear_bands(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                         const LinearOptions& opts) {
    const auto detected = detect_set(combs, opts.detect);
    LinearBands bands;
    for (int j = 0; j < static_cast<int>(combs.size()); ++j) {
        const bool is_detected = std::find(detected.begin(), detected.end(), j) != detected.end();
        for (const FieldComponent& c : comb_components(combs[j], grid)) {
            const double w = grid.frequency(c.index);
            if (is_detected) {
                push_half(bands.derivative, c.index, -kI * w * c.amplitude);
            }
            push_half(bands.dipole, c.index, chi1(sys, w, opts.projection) * c.amplitude);
        }
    }
    return bands;
}

std::size_t required_samples(const LinearBands& b) {
    const std::int64_t top = b.derivative.max_index + b.dipole.max_index;
    return static_cast<std::size_t>(2 * top + 1);
}

}  // namespace

std::size_t linear_signal_min_samples(std::span<const CombSpec> combs, const FrequencyGrid& grid,
                                      const LinearOptions& opts) {
    LinearBands b;
    const auto detected = detect_set(combs, opts.detect);
    for (int j = 0; j < static_cast<int>(combs.size()); ++j) {
        for (const FieldComponent& c : comb_components(combs[j], grid)) {
            if (c.index < 0) {
                continue;
            }
            if (std::find(detected.begin(), detected.end(), j) != detected.end()) {
                b.derivative.max_index = std::max(b.derivative.max_index, c.index);
            }
            b.dipole.max_index = std::max(b.dipole.max_index, c.index);
        }
    }
    std::size_t n = 1;
    while (n < required_samples(b)) {
        n <<= 1;
    }
    return n;
}

TimeSeries linear_signal_time(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                              const LinearOptions& opts, std::size_t samples) {
    sys.validate();
    require(samples > 0, ErrorCode::InvalidArgument, "time grid needs at least one sample");
    const LinearBands bands = linear_bands(combs, sys, grid, opts);
    const double window = 2.0 * std::numbers::pi / grid.step;
    const double dt = window / static_cast<double>(samples);
    if (samples < required_samples(bands)) {
        const double top = grid.frequency(bands.derivative.max_index + bands.dipole.max_index);
        std::ostringstream msg;
        msg.precision(6);
        msg << "time grid violates Nyquist for the product band up to " << top << " rad/time: dt = " << dt
            << " but dt < " << std::numbers::pi / top << " is required (at least " << required_samples(bands)
            << " samples over the window)";
        fail(ErrorCode::Nyquist, msg.str());
    }
    TimeSeries ts;
    ts.dt = dt;
    ts.grid_step = grid.step;
    ts.min_rep_spacing = min_spacing(combs);
    ts.samples.assign(samples, 0.0);
    std::vector<double> edot(samples);
    kernels::synthesize_harmonics(bands.derivative.harmonics, edot);
    kernels::synthesize_harmonics(bands.dipole.harmonics, ts.samples);
    for (std::size_t s = 0; s < samples; ++s) {
        ts.samples[s] *= -edot[s];
    }
    return ts;
}

namespace {

enum class ThirdKind { Quad, DualThird, TwoByTwo };

std::vector<FieldComponent> bounded(const std::vector<FieldComponent>& comps, const std::optional<std::int64_t>& cap) {
    if (!cap) {
        return comps;
    }
    std::vector<FieldComponent> out;
    for (const auto& c : comps) {
        if (std::abs(c.tooth) <= *cap) {
            out.push_back(c);
        }
    }
    return out;
}

Spectrum third_order(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                     const ThirdOrderOptions& opts, ThirdKind kind) {
    sys.validate();
    std::string name;
    std::array<int, 3> slot_comb{};
    double multiplicity = 1.0;
    switch (kind) {
        case ThirdKind::Quad:
            require(combs.size() == 4, ErrorCode::InvalidArgument, "quad comb signal requires exactly 4 combs");
            name = "quad_third";
            slot_comb = {1, 2, 3};
            multiplicity = 6.0;
            break;
        case ThirdKind::DualThird:
            require(combs.size() == 2, ErrorCode::InvalidArgument, "dual comb third order requires exactly 2 combs");
            name = "dual_third";
            slot_comb = {1, 1, 1};
            break;
        case ThirdKind::TwoByTwo:
            require(combs.size() == 2, ErrorCode::InvalidArgument, "two-by-two signal requires exactly 2 combs");
            name = "two_by_two";
            slot_comb = {0, 1, 1};
            multiplicity = 3.0;
            break;
    }

    std::vector<std::vector<FieldComponent>> full(combs.size());
    for (std::size_t j = 0; j < combs.size(); ++j) {
        full[j] = comb_components(combs[j], grid);
    }
    const std::vector<FieldComponent>& detect = full[0];
    std::array<std::vector<FieldComponent>, 3> slots;
    for (int s = 0; s < 3; ++s) {
        slots[s] = bounded(full[slot_comb[s]], opts.max_tooth);
    }
    const std::size_t n1 = slots[0].size();
    const std::size_t n2 = slots[1].size();
    const std::size_t n3 = slots[2].size();
    const std::size_t triples = n1 * n2 * n3;
    const std::size_t per_triple = opts.branch == Branch::All ? detect.size() : 1;
    if (triples * per_triple > opts.max_terms) {
        std::ostringstream msg;
        msg << name << " needs " << triples * per_triple << " products (" << n1 << " x " << n2 << " x " << n3
            << " slot teeth); the budget is " << opts.max_terms << ". Lower max_tooth or raise max_terms";
        fail(ErrorCode::Budget, msg.str());
    }
    const auto labels = by_label(detect);

    Spectrum spec;
    spec.step = grid.step;
    spec.kind = name;
    spec.projection = opts.projection.name();
    spec.min_rep_spacing = min_spacing(combs);
    spec.has_terms = opts.record_terms;

    struct Emitted {
        std::int64_t index;
        SpectrumTerm term;
    };
    constexpr std::size_t kChunk = 1 << 15;
    std::vector<std::vector<Emitted>> results;
    for (std::size_t base = 0; base < triples; base += kChunk) {
        const std::size_t count = std::min(kChunk, triples - base);
        results.assign(count, {});
        parallel_for(count, [&](std::size_t local) {
            const std::size_t t = base + local;
            const FieldComponent& a = slots[0][t / (n2 * n3)];
            const FieldComponent& b = slots[1][(t / n3) % n2];
            const FieldComponent& c = slots[2][t % n3];
            const std::int64_t label = a.tooth + b.tooth + c.tooth;
            std::vector<std::size_t> partners;
            if (opts.branch == Branch::Selected) {
                auto it = labels.find(-label);
                if (it == labels.end()) {
                    return;
                }
                partners = it->second;
            } else {
                partners.resize(detect.size());
                for (std::size_t i = 0; i < detect.size(); ++i) {
                    partners[i] = i;
                }
            }
            const cd field = a.amplitude * b.amplitude * c.amplitude;
            std::optional<cd> chi;
            auto& out = results[local];
            for (std::size_t pos : partners) {
                const FieldComponent& l = detect[pos];
                SpectrumTerm term;
                term.order = 3;
                term.combs = {0, slot_comb[0], slot_comb[1], slot_comb[2]};
                term.teeth = {l.tooth, a.tooth, b.tooth, c.tooth};
                term.chi_args = {a.index, b.index, c.index};
                term.weight = multiplicity * kI * grid.frequency(l.index) * l.amplitude * field;
                if (term.weight == 0.0) {
                    // a zero prefactor constrains nothing; skip the (possibly
                    // singular) chi evaluation
                    term.chi = 0.0;
                } else {
                    if (!chi) {
                        chi = chi3(sys, grid.frequency(c.index), grid.frequency(b.index), grid.frequency(a.index),
                                   opts.projection);
                    }
                    term.chi = *chi;
                }
                out.push_back({l.index + a.index + b.index + c.index, term});
            }
        });
        for (const auto& slot : results) {
            for (const auto& e : slot) {
                spec.add(e.index, e.term, opts.record_terms);
            }
        }
    }
    return spec;
}

}  // namespace

Spectrum quad_comb_signal(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                          const ThirdOrderOptions& opts) {
    return third_order(combs, sys, grid, opts, ThirdKind::Quad);
}

Spectrum dual_comb_third(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                         const ThirdOrderOptions& opts) {
    return third_order(combs, sys, grid, opts, ThirdKind::DualThird);
}

Spectrum dual_comb_two_by_two(std::span<const CombSpec> combs, const LevelSystem& sys, const FrequencyGrid& grid,
                              const ThirdOrderOptions& opts) {
    return third_order(combs, sys, grid, opts, ThirdKind::TwoByTwo);
}

std::vector<double> linear_dipole_response(const LevelSystem& sys, std::span<const double> field, double dt,
                                           const Projection& proj) {
    sys.validate();
    require(dt > 0.0, ErrorCode::InvalidArgument, "sample spacing must be > 0");
    const auto n = static_cast<std::int64_t>(field.size());
    auto coeffs = series_coefficients(field);
    const double step = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t signed_k = (2 * k > n) ? k - n : k;
        coeffs[static_cast<std::size_t>(k)] *= chi1(sys, static_cast<double>(signed_k) * step, proj);
    }
    const auto back = series_synthesis(coeffs);
    std::vector<double> out(field.size());
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s] = back[s].real();
    }
    return out;
}

}  // namespace combspec
