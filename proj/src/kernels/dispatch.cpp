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

#include <atomic>
#include <cstdlib>
#include <string>

#include "combspec/error.hpp"
#include "combspec/kernels.hpp"

namespace combspec::kernels {

#if !defined(COMBSPEC_HAVE_AVX2)
namespace avx2 {
void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n) {
    scalar::rotate_accumulate(z, r, tones, out, n);
}
double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay) {
    return scalar::exp_weighted_dot(x, y, n, decay);
}
}  // namespace avx2
#endif

#if !defined(COMBSPEC_HAVE_NEON)
namespace neon {
void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n) {
    scalar::rotate_accumulate(z, r, tones, out, n);
}
double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay) {
    return scalar::exp_weighted_dot(x, y, n, decay);
}
}  // namespace neon
#endif

namespace {

std::atomic<int> g_isa{-1};

Isa detect_best() {
#if defined(COMBSPEC_HAVE_AVX2)
    if (isa_supported(Isa::Avx2)) {
        return Isa::Avx2;
    }
#endif
#if defined(COMBSPEC_HAVE_NEON)
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

Isa resolve() {
    int v = g_isa.load();
    if (v >= 0) {
        return static_cast<Isa>(v);
    }
    Isa isa = detect_best();
    if (const char* env = std::getenv("COMBSPEC_ISA")) {
        const std::string want(env);
        for (Isa cand : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == isa_name(cand) && isa_supported(cand)) {
                isa = cand;
            }
        }
    }
    g_isa.store(static_cast<int>(isa));
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
        case Isa::Neon:
            return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(COMBSPEC_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(COMBSPEC_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() { return resolve(); }

void set_active_isa(Isa isa) {
    require(isa_supported(isa), ErrorCode::InvalidArgument,
            "kernel ISA '" + std::string(isa_name(isa)) + "' is not supported on this machine");
    g_isa.store(static_cast<int>(isa));
}

void rotate_accumulate(const std::complex<double>* z, const std::complex<double>* r,
                       std::size_t tones, double* out, std::size_t n) {
    switch (resolve()) {
        case Isa::Avx2:
            avx2::rotate_accumulate(z, r, tones, out, n);
            return;
        case Isa::Neon:
            neon::rotate_accumulate(z, r, tones, out, n);
            return;
        case Isa::Scalar:
            break;
    }
    scalar::rotate_accumulate(z, r, tones, out, n);
}

double exp_weighted_dot(const double* x, const double* y, std::size_t n, double decay) {
    switch (resolve()) {
        case Isa::Avx2:
            return avx2::exp_weighted_dot(x, y, n, decay);
        case Isa::Neon:
            return neon::exp_weighted_dot(x, y, n, decay);
        case Isa::Scalar:
            break;
    }
    return scalar::exp_weighted_dot(x, y, n, decay);
}

}  // namespace combspec::kernels
