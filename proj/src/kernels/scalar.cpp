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

#include "combspec/kernels.hpp"

namespace combspec::kernels::scalar {

void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n) {
    for (std::size_t k = 0; k < tones; ++k) {
        double pr = z[k].real();
        double pi = z[k].imag();
        const double rr = r[k].real();
        const double ri = r[k].imag();
        for (std::size_t s = 0; s < n; ++s) {
            out[s] += pr;
            const double nr = pr * rr - pi * ri;
            pi = pr * ri + pi * rr;
            pr = nr;
        }
    }
}

double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay) {
    const double q = std::exp(-decay);
    double acc = 0.0;
    for (std::size_t b = 0; b < n; b += kBlock) {
        const std::size_t end = std::min(n, b + kBlock);
        double w = std::exp(-decay * static_cast<double>(b));
        double part = 0.0;
        for (std::size_t k = b; k < end; ++k) {
            part += x[k] * y[k] * w;
            w *= q;
        }
        acc += part;
    }
    return acc;
}

}  // namespace combspec::kernels::scalar
