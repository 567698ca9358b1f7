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

#include "combspec/lockin.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "combspec/error.hpp"
#include "combspec/kernels.hpp"

namespace combspec {

void LockInConfig::validate() const {
    for (double v : {phi21, phi43, omega_bar21, omega_bar43, theta, tau}) {
        require(std::isfinite(v), ErrorCode::InvalidArgument, "lock-in parameters must be finite");
    }
    require(tau > 0.0, ErrorCode::InvalidArgument, "lock-in time constant must be > 0");
}

bool LockInConfig::theta_flagged() const { return theta != 0.0 && theta != std::numbers::pi / 2.0; }

double LockInConfig::modulation(Reference ref) const {
    return ref == Reference::Plus ? phi43 + phi21 : phi43 - phi21;
}

double reference_waveform(const LockInConfig& cfg, Reference ref, double t3, double t1, double tprime) {
    const double sign = ref == Reference::Plus ? 1.0 : -1.0;
    return std::cos(cfg.omega_bar43 * t3 + sign * cfg.omega_bar21 * t1 - cfg.modulation(ref) * tprime - cfg.theta);
}

namespace {

void check_pair(const TimeSeries& signal, const TimeSeries& reference, double tau) {
    require(tau > 0.0 && std::isfinite(tau), ErrorCode::InvalidArgument, "lock-in time constant must be > 0");
    require(signal.samples.size() == reference.samples.size() && signal.dt == reference.dt,
            ErrorCode::InvalidArgument, "signal and reference must share one time grid");
    require(signal.dt > 0.0, ErrorCode::InvalidArgument, "time step must be > 0");
    require(signal.samples.size() >= 2, ErrorCode::InvalidArgument, "lock-in needs at least two samples");
}

}  // namespace

double lockin_demodulate(const TimeSeries& signal, const TimeSeries& reference, double tau) {
    check_pair(signal, reference, tau);
    const std::size_t n = signal.samples.size();
    const double span = signal.dt * static_cast<double>(n - 1);
    if (span < kLockInWindowTaus * tau) {
        std::ostringstream msg;
        msg << "lock-in window " << span << " covers " << span / tau << " tau; the tail exp(-" << span / tau
            << ") = " << std::exp(-span / tau) << " exceeds the exp(-5) = " << std::exp(-kLockInWindowTaus)
            << " truncation allowance";
        fail(ErrorCode::WindowTooShort, msg.str());
    }
    const double decay = signal.dt / tau;
    const double* s = signal.samples.data();
    const double* r = reference.samples.data();
    double sum = kernels::exp_weighted_dot(s, r, n, decay);
    sum -= 0.5 * s[0] * r[0];
    sum -= 0.5 * s[n - 1] * r[n - 1] * std::exp(-decay * static_cast<double>(n - 1));
    return sum * decay;
}

std::size_t lockin_repeats(const TimeSeries& signal, double tau) {
    const double period = signal.dt * static_cast<double>(signal.samples.size());
    return static_cast<std::size_t>(std::ceil(kLockInWindowTaus * tau / period - 1e-12));
}

double lockin_demodulate_periodic(const TimeSeries& signal, const TimeSeries& reference, double tau) {
    check_pair(signal, reference, tau);
    const std::size_t n = signal.samples.size();
    const double repeats = static_cast<double>(std::max<std::size_t>(1, lockin_repeats(signal, tau)));
    const double decay = signal.dt / tau;
    const double block = kernels::exp_weighted_dot(signal.samples.data(), reference.samples.data(), n, decay);
    const double ln = decay * static_cast<double>(n);
    // sum over R copies of a period: block * (1 - Q^R) / (1 - Q), Q = q^n
    const double geometric = std::expm1(-ln * repeats) / std::expm1(-ln);
    const double f0 = signal.samples[0] * reference.samples[0];
    const double tail = std::exp(-ln * repeats);
    const double sum = block * geometric - 0.5 * f0 + 0.5 * f0 * tail;
    return sum * decay;
}

double downshift_map(double omega_material, double omega_ref) { return omega_material - omega_ref; }

}  // namespace combspec
