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

#include "combspec/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace combspec {

namespace {

// fftw planning is not thread safe; execution on private buffers is
std::mutex g_plan_mutex;

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer alloc(std::size_t n) {
    return Buffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1))));
}

std::vector<std::complex<double>> transform(const Buffer& in, std::size_t n, int sign, double scale) {
    Buffer out = alloc(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(plan);
    }
    std::vector<std::complex<double>> result(n);
    for (std::size_t i = 0; i < n; ++i) {
        result[i] = std::complex<double>(out[i][0] * scale, out[i][1] * scale);
    }
    return result;
}

}  // namespace

std::vector<std::complex<double>> series_coefficients(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n == 0) {
        return {};
    }
    Buffer in = alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = samples[i];
        in[i][1] = 0.0;
    }
    return transform(in, n, FFTW_BACKWARD, 1.0 / static_cast<double>(n));
}

std::vector<std::complex<double>> series_coefficients(std::span<const std::complex<double>> samples) {
    const std::size_t n = samples.size();
    if (n == 0) {
        return {};
    }
    Buffer in = alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = samples[i].real();
        in[i][1] = samples[i].imag();
    }
    return transform(in, n, FFTW_BACKWARD, 1.0 / static_cast<double>(n));
}

std::vector<std::complex<double>> series_synthesis(std::span<const std::complex<double>> coeffs) {
    const std::size_t n = coeffs.size();
    if (n == 0) {
        return {};
    }
    Buffer in = alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = coeffs[i].real();
        in[i][1] = coeffs[i].imag();
    }
    return transform(in, n, FFTW_FORWARD, 1.0);
}

}  // namespace combspec
