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

#include <arm_neon.h>

#include <cmath>

#include "combspec/kernels.hpp"

namespace combspec::kernels::neon {

void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n) {
    const std::size_t n2 = n & ~std::size_t{1};
    for (std::size_t k = 0; k < tones; ++k) {
        const std::complex<double> r1 = r[k];
        const std::complex<double> r2 = r1 * r1;
        const std::complex<double> p0 = z[k];
        const std::complex<double> p1 = p0 * r1;
        const double pr_init[2] = {p0.real(), p1.real()};
        const double pi_init[2] = {p0.imag(), p1.imag()};
        float64x2_t pr = vld1q_f64(pr_init);
        float64x2_t pi = vld1q_f64(pi_init);
        const float64x2_t sr = vdupq_n_f64(r2.real());
        const float64x2_t si = vdupq_n_f64(r2.imag());
        for (std::size_t s = 0; s < n2; s += 2) {
            vst1q_f64(out + s, vaddq_f64(vld1q_f64(out + s), pr));
            const float64x2_t nr = vfmsq_f64(vmulq_f64(pr, sr), pi, si);
            pi = vfmaq_f64(vmulq_f64(pi, sr), pr, si);
            pr = nr;
        }
        if (n2 < n) {
            out[n2] += vgetq_lane_f64(pr, 0);
        }
    }
}

double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay) {
    const double q = std::exp(-decay);
    const double q2 = q * q;
    double acc = 0.0;
    for (std::size_t b = 0; b < n; b += kBlock) {
        const std::size_t end = std::min(n, b + kBlock);
        const std::size_t end2 = b + ((end - b) & ~std::size_t{1});
        const double w0 = std::exp(-decay * static_cast<double>(b));
        const double w_init[2] = {w0, w0 * q};
        float64x2_t w = vld1q_f64(w_init);
        const float64x2_t step = vdupq_n_f64(q2);
        float64x2_t sum = vdupq_n_f64(0.0);
        std::size_t k = b;
        for (; k < end2; k += 2) {
            const float64x2_t xy = vmulq_f64(vld1q_f64(x + k), vld1q_f64(y + k));
            sum = vfmaq_f64(sum, xy, w);
            w = vmulq_f64(w, step);
        }
        double part = vgetq_lane_f64(sum, 0) + vgetq_lane_f64(sum, 1);
        if (k < end) {
            part += x[k] * y[k] * vgetq_lane_f64(w, 0);
        }
        acc += part;
    }
    return acc;
}

}  // namespace combspec::kernels::neon
