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
#include <span>
#include <vector>

namespace combspec {

// Series convention used throughout: f(t_s) = sum_k C_k exp(-2 pi i k s / N).

// C_k for k in [0, N); negative frequencies sit at k + N.
std::vector<std::complex<double>> series_coefficients(std::span<const double> samples);
std::vector<std::complex<double>> series_coefficients(std::span<const std::complex<double>> samples);

// f_s from a full coefficient vector.
std::vector<std::complex<double>> series_synthesis(std::span<const std::complex<double>> coeffs);

}  // namespace combspec
