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

#include "combspec/material.hpp"

#include <algorithm>
#include <cmath>

#include "combspec/error.hpp"

namespace combspec {

using cd = std::complex<double>;

double LevelSystem::relaxation(int a, int b) const {
    return a == b ? population_decay[a] : dephasing(a, b);
}

bool LevelSystem::uniform_population_decay() const {
    return std::all_of(population_decay.begin(), population_decay.end(),
                       [&](double g) { return g == population_decay.front(); });
}

int LevelSystem::manifold(int a) const {
    if (a == ground) {
        return 0;
    }
    return dipole(ground, a) != 0.0 ? 1 : 2;
}

bool LevelSystem::has_f_manifold() const {
    for (int a = 0; a < size(); ++a) {
        if (manifold(a) == 2) {
            return true;
        }
    }
    return false;
}

void LevelSystem::validate(bool require_dephasing) const {
    const int n = size();
    require(n >= 1, ErrorCode::InvalidArgument, "level system needs at least one level");
    require(dipole.rows() == n && dipole.cols() == n, ErrorCode::InvalidArgument, "dipole matrix must be N x N");
    require(dephasing.rows() == n && dephasing.cols() == n, ErrorCode::InvalidArgument,
            "dephasing matrix must be N x N");
    require(static_cast<int>(population_decay.size()) == n, ErrorCode::InvalidArgument,
            "population_decay needs one rate per level");
    require(ground >= 0 && ground < n, ErrorCode::InvalidArgument, "ground index out of range");
    for (int a = 0; a < n; ++a) {
        require(std::isfinite(energies[a]), ErrorCode::InvalidArgument, "level energies must be finite");
        require(energies[ground] <= energies[a], ErrorCode::InvalidArgument, "ground must have the lowest energy");
        require(std::isfinite(population_decay[a]) && population_decay[a] >= 0.0, ErrorCode::InvalidArgument,
                "population decay rates must be >= 0");
        for (int b = 0; b < n; ++b) {
            require(std::isfinite(dipole(a, b)), ErrorCode::InvalidArgument, "dipole entries must be finite");
            require(dipole(a, b) == dipole(b, a), ErrorCode::InvalidArgument, "dipole matrix must be symmetric");
            if (a != b) {
                require(dephasing(a, b) == dephasing(b, a), ErrorCode::InvalidArgument,
                        "dephasing matrix must be symmetric");
                require(std::isfinite(dephasing(a, b)) && dephasing(a, b) >= 0.0, ErrorCode::InvalidArgument,
                        "dephasing rates must be >= 0");
                require(!require_dephasing || dephasing(a, b) > 0.0, ErrorCode::InvalidArgument,
                        "dephasing rates must be > 0 for every coherence");
            }
        }
    }
    for (int e : emitting) {
        require(e >= 0 && e < n, ErrorCode::InvalidArgument, "emitting level out of range");
        require(e != ground, ErrorCode::InvalidArgument, "emitting set must exclude the ground state");
    }
}

LevelSystem LevelSystem::two_level(double omega_eg, double gamma, double mu, double population_decay) {
    LevelSystem s;
    s.energies = {0.0, omega_eg};
    s.dipole = Eigen::MatrixXd::Zero(2, 2);
    s.dipole(0, 1) = s.dipole(1, 0) = mu;
    s.dephasing = Eigen::MatrixXd::Constant(2, 2, gamma);
    s.population_decay = {population_decay, population_decay};
    s.ground = 0;
    s.emitting = {1};
    return s;
}

LevelSystem LevelSystem::ladder(double omega_eg, double omega_fg, double mu_eg, double mu_fe, double gamma,
                                double population_decay) {
    LevelSystem s;
    s.energies = {0.0, omega_eg, omega_fg};
    s.dipole = Eigen::MatrixXd::Zero(3, 3);
    s.dipole(0, 1) = s.dipole(1, 0) = mu_eg;
    s.dipole(1, 2) = s.dipole(2, 1) = mu_fe;
    s.dephasing = Eigen::MatrixXd::Constant(3, 3, gamma);
    s.population_decay = {population_decay, population_decay, population_decay};
    s.ground = 0;
    s.emitting = {1};
    return s;
}

std::string Projection::name() const {
    switch (kind_) {
        case Kind::Full:
            return "full";
        case Kind::Level:
            return "level:" + std::to_string(level_);
        case Kind::Emitting:
            return "emitting";
    }
    return "unknown";
}

namespace {

// Dense N x N density-matrix work on row-major storage; N is tiny.
class Liouville {
public:
    explicit Liouville(const LevelSystem& sys) : sys_(sys), n_(sys.size()) {}

    std::vector<cd> ground_state() const {
        std::vector<cd> rho(n_ * n_);
        rho[sys_.ground * n_ + sys_.ground] = 1.0;
        return rho;
    }

    // V rho - rho V
    std::vector<cd> commutator(const std::vector<cd>& rho) const {
        std::vector<cd> out(n_ * n_);
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                cd acc = 0.0;
                for (int c = 0; c < n_; ++c) {
                    acc += sys_.dipole(a, c) * rho[c * n_ + b] - rho[a * n_ + c] * sys_.dipole(c, b);
                }
                out[a * n_ + b] = acc;
            }
        }
        return out;
    }

    // rho_ab <- rho_ab / (w_ab - Omega - i gamma_ab)
    void resolve(std::vector<cd>& rho, double omega) const {
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                cd& r = rho[a * n_ + b];
                if (r == 0.0) {
                    continue;
                }
                const cd den(sys_.transition(a, b) - omega, -sys_.relaxation(a, b));
                if (den == 0.0) {
                    fail(ErrorCode::InvalidArgument,
                         "population resonance at zero frequency with zero population decay is singular "
                         "(level " + std::to_string(a) + "); set population_decay > 0");
                }
                r /= den;
            }
        }
    }

    // (V rho)_xx for every x
    std::vector<cd> emitted(const std::vector<cd>& rho) const {
        std::vector<cd> d(n_);
        for (int x = 0; x < n_; ++x) {
            cd acc = 0.0;
            for (int c = 0; c < n_; ++c) {
                acc += sys_.dipole(x, c) * rho[c * n_ + x];
            }
            d[x] = acc;
        }
        return d;
    }

private:
    const LevelSystem& sys_;
    int n_;
};

void check_finite(std::initializer_list<double> args) {
    for (double w : args) {
        require(std::isfinite(w), ErrorCode::InvalidArgument, "susceptibility arguments must be finite");
    }
}

cd project(const LevelSystem& sys, const std::vector<cd>& by_level, const Projection& proj) {
    switch (proj.kind()) {
        case Projection::Kind::Level:
            require(proj.level() >= 0 && proj.level() < sys.size(), ErrorCode::InvalidArgument,
                    "projection level out of range");
            return by_level[proj.level()];
        case Projection::Kind::Emitting: {
            cd acc = 0.0;
            for (int e : sys.emitting) {
                acc += by_level[e];
            }
            return acc;
        }
        case Projection::Kind::Full:
            break;
    }
    cd acc = 0.0;
    for (const cd& v : by_level) {
        acc += v;
    }
    return acc;
}

}  // namespace

std::vector<cd> chi1_by_level(const LevelSystem& sys, double omega) {
    check_finite({omega});
    Liouville lv(sys);
    auto rho = lv.commutator(lv.ground_state());
    lv.resolve(rho, omega);
    return lv.emitted(rho);
}

cd chi1(const LevelSystem& sys, double omega, const Projection& proj) {
    check_finite({omega});
    if (proj.kind() != Projection::Kind::Full) {
        return project(sys, chi1_by_level(sys, omega), proj);
    }
    const int g = sys.ground;
    cd acc = 0.0;
    for (int a = 0; a < sys.size(); ++a) {
        if (a == g) {
            continue;
        }
        const double mu2 = sys.dipole(g, a) * sys.dipole(g, a);
        if (mu2 == 0.0) {
            continue;
        }
        const double wag = sys.transition(a, g);
        const double gam = sys.dephasing(a, g);
        acc += mu2 * (1.0 / cd(wag - omega, -gam) + 1.0 / cd(wag + omega, gam));
    }
    return acc;
}

std::vector<cd> chi3_time_ordered_by_level(const LevelSystem& sys, double omega3, double omega2, double omega1) {
    check_finite({omega3, omega2, omega1});
    require(sys.size() >= 2, ErrorCode::InvalidArgument, "chi3 needs at least two levels");
    Liouville lv(sys);
    auto rho = lv.commutator(lv.ground_state());
    lv.resolve(rho, omega1);
    rho = lv.commutator(rho);
    lv.resolve(rho, omega1 + omega2);
    rho = lv.commutator(rho);
    lv.resolve(rho, omega1 + omega2 + omega3);
    return lv.emitted(rho);
}

std::vector<cd> chi3_by_level(const LevelSystem& sys, double omega3, double omega2, double omega1) {
    std::array<double, 3> w{omega3, omega2, omega1};
    std::sort(w.begin(), w.end());
    static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<cd> out(sys.size());
    for (const auto& p : kPerms) {
        const auto term = chi3_time_ordered_by_level(sys, w[p[0]], w[p[1]], w[p[2]]);
        for (int x = 0; x < sys.size(); ++x) {
            out[x] += term[x];
        }
    }
    for (cd& v : out) {
        v /= 6.0;
    }
    return out;
}

cd chi3(const LevelSystem& sys, double omega3, double omega2, double omega1, const Projection& proj) {
    return project(sys, chi3_by_level(sys, omega3, omega2, omega1), proj);
}

double projection_sum_check(const LevelSystem& sys, const SusceptibilityQuery& query) {
    require(query.order == 1 || query.order == 3, ErrorCode::InvalidArgument, "query order must be 1 or 3");
    const auto& f = query.frequencies;
    std::vector<cd> parts;
    cd full;
    if (query.order == 1) {
        parts = chi1_by_level(sys, f[0]);
        full = chi1(sys, f[0]);
    } else {
        parts = chi3_by_level(sys, f[0], f[1], f[2]);
        // independent grouping: time-ordered terms traced whole, then averaged
        std::array<double, 3> w{f[0], f[1], f[2]};
        std::sort(w.begin(), w.end());
        cd acc = 0.0;
        do {
            const auto term = chi3_time_ordered_by_level(sys, w[0], w[1], w[2]);
            cd tr = 0.0;
            for (const cd& v : term) {
                tr += v;
            }
            acc += tr;
        } while (std::next_permutation(w.begin(), w.end()));
        full = acc / 6.0;
    }
    cd sum = parts[sys.ground];
    for (int a = 0; a < sys.size(); ++a) {
        if (a != sys.ground) {
            sum += parts[a];
        }
    }
    return std::abs(sum - full);
}

}  // namespace combspec
