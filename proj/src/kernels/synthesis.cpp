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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "combspec/kernels.hpp"
#include "combspec/parallel.hpp"

namespace combspec::kernels {

namespace {

// exp(-2 pi i j / n) for integer j in [0, n), folded into [-pi, pi].
std::complex<double> root_of_unity(std::int64_t j, std::int64_t n) {
    if (2 * j > n) {
        j -= n;
    }
    const double theta = -2.0 * std::numbers::pi * (static_cast<double>(j) / static_cast<double>(n));
    return std::polar(1.0, theta);
}

std::int64_t wrap(std::int64_t k, std::int64_t n) {
    std::int64_t r = k % n;
    return r < 0 ? r + n : r;
}

}  // namespace

void synthesize_harmonics(std::span<const Harmonic> harmonics, std::span<double> out) {
    const auto n = static_cast<std::int64_t>(out.size());
    std::fill(out.begin(), out.end(), 0.0);
    if (n == 0 || harmonics.empty()) {
        return;
    }
    const std::size_t tones = harmonics.size();
    std::vector<std::int64_t> kk(tones);
    std::vector<std::complex<double>> rot(tones);
    for (std::size_t i = 0; i < tones; ++i) {
        kk[i] = wrap(harmonics[i].k, n);
        rot[i] = root_of_unity(kk[i], n);
    }
    const std::size_t blocks = (out.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t s0 = b * kBlock;
        const std::size_t len = std::min(kBlock, out.size() - s0);
        std::vector<std::complex<double>> start(tones);
        for (std::size_t i = 0; i < tones; ++i) {
            // k*s0 < n^2 stays inside int64 for any practical n
            const std::int64_t j = wrap(kk[i] * static_cast<std::int64_t>(s0), n);
            start[i] = harmonics[i].amplitude * root_of_unity(j, n);
        }
        rotate_accumulate(start.data(), rot.data(), tones, out.data() + s0, len);
    });
}

void synthesize_tones(std::span<const Tone> tones, double t0, double dt, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (out.empty() || tones.empty()) {
        return;
    }
    const std::size_t count = tones.size();
    std::vector<std::complex<double>> rot(count);
    for (std::size_t i = 0; i < count; ++i) {
        const long double step = static_cast<long double>(tones[i].omega) * dt;
        rot[i] = std::polar(1.0, -static_cast<double>(std::fmod(step, 2.0L * std::numbers::pi_v<long double>)));
    }
    const std::size_t blocks = (out.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t s0 = b * kBlock;
        const std::size_t len = std::min(kBlock, out.size() - s0);
        const long double t = static_cast<long double>(t0) + static_cast<long double>(s0) * dt;
        std::vector<std::complex<double>> start(count);
        for (std::size_t i = 0; i < count; ++i) {
            const long double phase =
                std::fmod(static_cast<long double>(tones[i].omega) * t, 2.0L * std::numbers::pi_v<long double>);
            start[i] = tones[i].amplitude * std::polar(1.0, -static_cast<double>(phase));
        }
        rotate_accumulate(start.data(), rot.data(), count, out.data() + s0, len);
    });
}

}  // namespace combspec::kernels
