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

#include <immintrin.h>

#include <cmath>

#include "combspec/kernels.hpp"

namespace combspec::kernels::avx2 {

void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t k = 0; k < tones; ++k) {
        const std::complex<double> r1 = r[k];
        const std::complex<double> r2 = r1 * r1;
        const std::complex<double> r3 = r2 * r1;
        const std::complex<double> r4 = r2 * r2;
        const std::complex<double> p0 = z[k];
        const std::complex<double> p1 = p0 * r1;
        const std::complex<double> p2 = p0 * r2;
        const std::complex<double> p3 = p0 * r3;
        __m256d pr = _mm256_setr_pd(p0.real(), p1.real(), p2.real(), p3.real());
        __m256d pi = _mm256_setr_pd(p0.imag(), p1.imag(), p2.imag(), p3.imag());
        const __m256d sr = _mm256_set1_pd(r4.real());
        const __m256d si = _mm256_set1_pd(r4.imag());
        for (std::size_t s = 0; s < n4; s += 4) {
            _mm256_storeu_pd(out + s, _mm256_add_pd(_mm256_loadu_pd(out + s), pr));
            const __m256d nr = _mm256_fmsub_pd(pr, sr, _mm256_mul_pd(pi, si));
            pi = _mm256_fmadd_pd(pr, si, _mm256_mul_pd(pi, sr));
            pr = nr;
        }
        alignas(32) double tail[4];
        _mm256_store_pd(tail, pr);
        for (std::size_t s = n4; s < n; ++s) {
            out[s] += tail[s - n4];
        }
    }
}

double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay) {
    const double q = std::exp(-decay);
    const double q2 = q * q;
    const double q4 = q2 * q2;
    double acc = 0.0;
    for (std::size_t b = 0; b < n; b += kBlock) {
        const std::size_t end = std::min(n, b + kBlock);
        const std::size_t end4 = b + ((end - b) & ~std::size_t{3});
        const double w0 = std::exp(-decay * static_cast<double>(b));
        __m256d w = _mm256_setr_pd(w0, w0 * q, w0 * q2, w0 * q2 * q);
        const __m256d step = _mm256_set1_pd(q4);
        __m256d sum = _mm256_setzero_pd();
        std::size_t k = b;
        for (; k < end4; k += 4) {
            const __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k));
            sum = _mm256_fmadd_pd(xy, w, sum);
            w = _mm256_mul_pd(w, step);
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, sum);
        double part = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
        alignas(32) double wl[4];
        _mm256_store_pd(wl, w);
        for (std::size_t j = 0; k < end; ++k, ++j) {
            part += x[k] * y[k] * wl[j];
        }
        acc += part;
    }
    return acc;
}

}  // namespace combspec::kernels::avx2
