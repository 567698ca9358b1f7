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

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace combspec {

// Few-level system with H0 = diag(energies) and V = dipole. Coherence
// a != b relaxes at dephasing(a, b); population a relaxes toward
// equilibrium at population_decay[a].
struct LevelSystem {
    std::vector<double> energies;
    Eigen::MatrixXd dipole;
    Eigen::MatrixXd dephasing;
    std::vector<double> population_decay;
    int ground = 0;
    std::vector<int> emitting;

    int size() const { return static_cast<int>(energies.size()); }
    double transition(int a, int b) const { return energies[a] - energies[b]; }
    // Relaxation rate of |a><b|: Gamma_a on the diagonal, gamma_ab off it.
    double relaxation(int a, int b) const;
    bool uniform_population_decay() const;
    // 0 for the ground state, 1 for levels dipole-coupled to it, 2 above.
    int manifold(int a) const;
    bool has_f_manifold() const;
    // Susceptibilities need every coherence to dephase; the propagator
    // also accepts closed systems.
    void validate(bool require_dephasing = true) const;

    static LevelSystem two_level(double omega_eg, double gamma, double mu, double population_decay = 0.0);
    // g - e - f ladder with g-f dipole zero.
    static LevelSystem ladder(double omega_eg, double omega_fg, double mu_eg, double mu_fe, double gamma,
                              double population_decay = 0.0);
};

class Projection {
public:
    enum class Kind { Full, Level, Emitting };

    static Projection full() { return Projection(Kind::Full, -1); }
    static Projection onto(int level) { return Projection(Kind::Level, level); }
    static Projection emitting() { return Projection(Kind::Emitting, -1); }

    Kind kind() const { return kind_; }
    int level() const { return level_; }
    std::string name() const;

private:
    Projection(Kind kind, int level) : kind_(kind), level_(level) {}
    Kind kind_;
    int level_;
};

// chi1(w) = sum_a mu_ga^2 [1/(w_ag - w - i g_ag) + 1/(w_ag + w + i g_ag)].
std::complex<double> chi1(const LevelSystem& sys, double omega, const Projection& proj = Projection::full());

// Per-final-level decomposition (V rho1)_aa; entries sum to chi1.
std::vector<std::complex<double>> chi1_by_level(const LevelSystem& sys, double omega);

// Time-ordered third-order term, omega1 acting first.
std::vector<std::complex<double>> chi3_time_ordered_by_level(const LevelSystem& sys, double omega3, double omega2,
                                                             double omega1);

// Intrinsically symmetric chi3: the mean over the six orderings of the
// time-ordered term. Arguments are sorted first so the result is bit
// identical under any permutation.
std::complex<double> chi3(const LevelSystem& sys, double omega3, double omega2, double omega1,
                          const Projection& proj = Projection::full());
std::vector<std::complex<double>> chi3_by_level(const LevelSystem& sys, double omega3, double omega2, double omega1);

struct SusceptibilityQuery {
    int order = 1;
    // order 1: {omega}; order 3: {omega3, omega2, omega1}
    std::array<double, 3> frequencies{};
};

// |sum_{a != g} chi_a + chi_g - chi| for the query.
double projection_sum_check(const LevelSystem& sys, const SusceptibilityQuery& query);

}  // namespace combspec
