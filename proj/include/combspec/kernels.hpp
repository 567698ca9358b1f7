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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace combspec::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// ISA picked at first use: best supported, unless COMBSPEC_ISA names one.
Isa active_isa();
// Throws InvalidArgument if the ISA is not available on this machine.
void set_active_isa(Isa isa);

// out[s] += Re(z_k * r_k^s) summed over tones k, for s in [0, n).
// z is the starting phasor (amplitude included), r the per-sample rotation.
void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n);

// sum_k x_k y_k exp(-decay k) for k in [0, n).
double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay);

// Variant entry points, exposed for equivalence tests.
namespace scalar {
void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n);
double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay);
}  // namespace scalar

namespace avx2 {
void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n);
double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay);
}  // namespace avx2

namespace neon {
void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n);
double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay);
}  // namespace neon

// Samples per block between exact phase restarts.
inline constexpr std::size_t kBlock = 512;

struct Harmonic {
    std::int64_t k;
    std::complex<double> amplitude;
};

// out[s] = sum_k Re(a_k exp(-2 pi i k s / n)) with exact integer phase
// reduction at every block start.
void synthesize_harmonics(std::span<const Harmonic> harmonics, std::span<double> out);

struct Tone {
    double omega;
    std::complex<double> amplitude;
};

// out[s] = sum_k Re(a_k exp(-i omega_k (t0 + s dt))).
void synthesize_tones(std::span<const Tone> tones, double t0, double dt, std::span<double> out);

}  // namespace combspec::kernels
