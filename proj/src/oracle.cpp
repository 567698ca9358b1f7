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


#include "combspec/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "combspec/comb_signals.hpp"
#include "combspec/error.hpp"

namespace combspec {

using cd = std::complex<double>;

ScalarField field_of(const PulseTrainField& field) {
    return {[field](double t) { return field.value(t); }, [field](double t) { return field.derivative(t); }};
}

namespace {

constexpr cd kI{0.0, 1.0};

// Dense n x n density matrix plus the work integral in one flat state.
class Liouvillian {
public:
    explicit Liouvillian(const LevelSystem& sys) : sys_(sys), n_(sys.size()) {
        relax_.resize(n_ * n_);
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                relax_[idx(a, b)] = sys.relaxation(a, b);
            }
        }
    }

    std::size_t size() const { return static_cast<std::size_t>(n_ * n_ + 1); }
    std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a * n_ + b); }

    double dipole(const std::vector<cd>& y) const {
        double v = 0.0;
        for (int a = 0; a < n_; ++a) {
            for (int c = 0; c < n_; ++c) {
                v += sys_.dipole(a, c) * y[idx(c, a)].real();
            }
        }
        return v;
    }

    void rhs(const std::vector<cd>& y, double e, double edot, std::vector<cd>& dy) const {
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                cd comm = sys_.transition(a, b) * y[idx(a, b)];
                cd vr = 0.0;
                for (int c = 0; c < n_; ++c) {
                    vr += sys_.dipole(a, c) * y[idx(c, b)] - y[idx(a, c)] * sys_.dipole(c, b);
                }
                comm -= e * vr;
                cd relax = y[idx(a, b)];
                if (a == b && a == sys_.ground) {
                    relax -= 1.0;
                }
                dy[idx(a, b)] = -kI * comm - relax_[idx(a, b)] * relax;
            }
        }
        dy[size() - 1] = -edot * dipole(y);
    }

private:
    const LevelSystem& sys_;
    int n_;
    std::vector<double> relax_;
};

}  // namespace

Trajectory propagate(const PropagationRun& run) {
    const LevelSystem& sys = run.system;
    sys.validate(false);
    require(sys.uniform_population_decay(), ErrorCode::InvalidArgument,
            "the oracle conserves trace only with one population decay rate for every level");
    require(run.dt > 0.0 && std::isfinite(run.dt), ErrorCode::InvalidArgument, "time step must be > 0");
    require(run.record_stride >= 1, ErrorCode::InvalidArgument, "record stride must be >= 1");
    require(static_cast<bool>(run.field.value) && static_cast<bool>(run.field.derivative),
            ErrorCode::InvalidArgument, "propagation needs a field and its derivative");
    double emax = 0.0;
    for (double e : sys.energies) {
        emax = std::max(emax, std::abs(e));
    }
    if (emax > 0.0 && run.dt > 0.01 * 2.0 * std::numbers::pi / emax * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "time step " << run.dt << " does not resolve the fastest level; use dt <= "
            << 0.01 * 2.0 * std::numbers::pi / emax;
        fail(ErrorCode::InvalidArgument, msg.str());
    }

    const int n = sys.size();
    Liouvillian L(sys);
    std::vector<cd> y(L.size(), 0.0);
    y[L.idx(sys.ground, sys.ground)] = 1.0;
    std::vector<cd> k1(L.size()), k2(L.size()), k3(L.size()), k4(L.size()), tmp(L.size());

    Trajectory traj;
    traj.steps = run.steps;
    const std::size_t records = run.steps / run.record_stride + 1;
    for (auto* v : {&traj.t, &traj.field, &traj.field_derivative, &traj.dipole, &traj.power, &traj.population,
                    &traj.energy, &traj.work}) {
        v->reserve(records);
    }
    traj.pe_v.reserve(records);

    auto record = [&](double t, double e, double edot) {
        const double v = L.dipole(y);
        double pop = 0.0;
        cd pev = 0.0;
        for (int x : sys.emitting) {
            pop += y[L.idx(x, x)].real();
            for (int c = 0; c < n; ++c) {
                pev += sys.dipole(x, c) * y[L.idx(c, x)];
            }
        }
        double h0 = 0.0;
        for (int a = 0; a < n; ++a) {
            h0 += sys.energies[a] * y[L.idx(a, a)].real();
        }
        traj.t.push_back(t);
        traj.field.push_back(e);
        traj.field_derivative.push_back(edot);
        traj.dipole.push_back(v);
        traj.power.push_back(-edot * v);
        traj.population.push_back(pop);
        traj.pe_v.push_back(pev);
        traj.energy.push_back(h0);
        traj.work.push_back(y.back().real());
    };
    auto check = [&](std::size_t step, double t) {
        cd trace = 0.0;
        for (int a = 0; a < n; ++a) {
            const double p = y[L.idx(a, a)].real();
            trace += y[L.idx(a, a)];
            traj.min_population = std::min(traj.min_population, p);
            traj.max_population = std::max(traj.max_population, p);
            for (int b = a; b < n; ++b) {
                traj.max_hermiticity_error =
                    std::max(traj.max_hermiticity_error, std::abs(y[L.idx(a, b)] - std::conj(y[L.idx(b, a)])));
            }
        }
        const double drift = std::abs(trace - 1.0);
        traj.max_trace_error = std::max(traj.max_trace_error, drift);
        if (drift > kTraceAbort) {
            std::ostringstream msg;
            msg << "trace drifted by " << drift << " at step " << step << " (t = " << t
                << "); reduce the time step below " << run.dt;
            fail(ErrorCode::Propagation, msg.str());
        }
    };

    const double h = run.dt;
    double t = run.t_start;
    double e0 = run.field.value(t);
    double d0 = run.field.derivative(t);
    check(0, t);
    record(t, e0, d0);
    const std::size_t m = L.size();
    for (std::size_t step = 1; step <= run.steps; ++step) {
        const double th = t + 0.5 * h;
        const double t1 = run.t_start + static_cast<double>(step) * h;
        const double eh = run.field.value(th);
        const double dh = run.field.derivative(th);
        const double e1 = run.field.value(t1);
        const double d1 = run.field.derivative(t1);
        L.rhs(y, e0, d0, k1);
        for (std::size_t i = 0; i < m; ++i) {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        L.rhs(tmp, eh, dh, k2);
        for (std::size_t i = 0; i < m; ++i) {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        L.rhs(tmp, eh, dh, k3);
        for (std::size_t i = 0; i < m; ++i) {
            tmp[i] = y[i] + h * k3[i];
        }
        L.rhs(tmp, e1, d1, k4);
        for (std::size_t i = 0; i < m; ++i) {
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = t1;
        e0 = e1;
        d0 = d1;
        check(step, t);
        if (step % run.record_stride == 0) {
            record(t, e0, d0);
        }
    }
    return traj;
}

std::vector<double> population_flux(const Trajectory& traj) {
    const std::size_t n = traj.population.size();
    std::vector<double> out(n, 0.0);
    if (n < 5) {
        return out;
    }
    const double h = traj.t[1] - traj.t[0];
    const auto& p = traj.population;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        out[i] = (p[i - 2] - 8.0 * p[i - 1] + 8.0 * p[i + 1] - p[i + 2]) / (12.0 * h);
    }
    out[0] = (p[1] - p[0]) / h;
    out[1] = (p[2] - p[0]) / (2.0 * h);
    out[n - 2] = (p[n - 1] - p[n - 3]) / (2.0 * h);
    out[n - 1] = (p[n - 1] - p[n - 2]) / h;
    return out;
}

FluxCheck population_flux_check(const Trajectory& traj, const LevelSystem& sys) {
    FluxCheck fc;
    for (int a = 0; a < sys.size(); ++a) {
        for (int b = 0; b < sys.size(); ++b) {
            fc.flagged = fc.flagged || sys.relaxation(a, b) > 0.0;
        }
    }
    const auto flux = population_flux(traj);
    double scale = 0.0;
    for (std::size_t i = 2; i + 2 < flux.size(); ++i) {
        const double model = -2.0 * traj.field[i] * traj.pe_v[i].imag();
        fc.max_residual = std::max(fc.max_residual, std::abs(flux[i] - model));
        scale = std::max(scale, std::abs(model));
    }
    fc.relative = scale > 0.0 ? fc.max_residual / scale : fc.max_residual;
    return fc;
}

double energy_balance_error(const Trajectory& traj) {
    require(!traj.energy.empty(), ErrorCode::InvalidArgument, "empty trajectory");
    const double de = traj.energy.back() - traj.energy.front();
    const double err = std::abs(traj.work.back() - de);
    return de != 0.0 ? err / std::abs(de) : err;
}

CsvTable trajectory_table(const Trajectory& traj) {
    CsvTable t;
    t.header = {"t", "field", "dipole", "power", "population", "energy", "work"};
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        t.add_row({format_double(traj.t[i]), format_double(traj.field[i]), format_double(traj.dipole[i]),
                   format_double(traj.power[i]), format_double(traj.population[i]), format_double(traj.energy[i]),
                   format_double(traj.work[i])});
    }
    return t;
}

double linear_deviation(const LevelSystem& sys, const std::vector<AomPulseTrainSpec>& trains, double dt,
                        std::size_t samples) {
    require(samples >= 2, ErrorCode::InvalidArgument, "need at least two samples");
    const PulseTrainField field(trains);
    require(field.end_time() < dt * static_cast<double>(samples), ErrorCode::InvalidArgument,
            "the pulse trains must end inside the sampled window");
    std::vector<double> e(samples);
    std::vector<double> edot(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = dt * static_cast<double>(s);
        e[s] = field.value(t);
        edot[s] = field.derivative(t);
    }
    const auto v1 = linear_dipole_response(sys, e, dt);
    PropagationRun run{sys, field_of(field), 0.0, dt, samples - 1, 1};
    const Trajectory traj = propagate(run);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double s1 = -edot[s] * v1[s];
        const double d = traj.power[s] - s1;
        num += d * d;
        den += s1 * s1;
    }
    require(den > 0.0, ErrorCode::InvalidArgument, "linear signal vanishes; nothing to compare");
    return std::sqrt(num / den);
}

ScalingReport linear_scaling(const LevelSystem& sys, const std::vector<AomPulseTrainSpec>& trains, double dt,
                             std::size_t samples, std::span<const double> amplitudes) {
    require(amplitudes.size() >= 2, ErrorCode::InvalidArgument, "scaling fit needs at least two amplitudes");
    ScalingReport rep;
    for (double a : amplitudes) {
        require(a > 0.0, ErrorCode::InvalidArgument, "amplitudes must be > 0");
        auto scaled = trains;
        for (auto& tr : scaled) {
            tr.amplitude = a;
        }
        rep.points.push_back({a, linear_deviation(sys, scaled, dt, samples)});
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(rep.points.size());
    for (const auto& p : rep.points) {
        const double x = std::log(p.amplitude);
        const double y = std::log(p.deviation);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

namespace {

// K(theta): raising part of V times exp(-i theta) plus its adjoint.
Eigen::MatrixXcd kick_generator(const LevelSystem& sys, double theta) {
    const int n = sys.size();
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
    const cd up = std::polar(1.0, -theta);
    for (int to = 0; to < n; ++to) {
        for (int from = 0; from < n; ++from) {
            const double de = sys.energies[to] - sys.energies[from];
            if (de > 0.0 || (de == 0.0 && to > from)) {
                k(to, from) = up * sys.dipole(to, from);
                k(from, to) = std::conj(up) * sys.dipole(from, to);
            }
        }
    }
    return k;
}

void apply_kick(const LevelSystem& sys, double area, double theta, Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(kick_generator(sys, theta));
    const Eigen::Index n = eig.eigenvalues().size();
    Eigen::VectorXcd phase(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phase(i) = std::polar(1.0, area * eig.eigenvalues()(i));
    }
    const Eigen::MatrixXcd u = eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
    rho = u * rho * u.adjoint();
}

void evolve(const LevelSystem& sys, double t, Eigen::MatrixXcd& rho) {
    for (int a = 0; a < sys.size(); ++a) {
        for (int b = 0; b < sys.size(); ++b) {
            if (a == b) {
                const double eq = a == sys.ground ? 1.0 : 0.0;
                rho(a, a) = eq + (rho(a, a) - eq) * std::exp(-sys.relaxation(a, a) * t);
            } else {
                rho(a, b) *= std::exp(cd(-sys.relaxation(a, b), -sys.transition(a, b)) * t);
            }
        }
    }
}

double kicked(const LevelSystem& sys, const std::array<double, 4>& areas, const std::array<double, 4>& phases,
              const DelayPoint& delay) {
    const int n = sys.size();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    rho(sys.ground, sys.ground) = 1.0;
    const std::array<double, 3> waits{delay.t1, delay.t2, delay.t3};
    for (int j = 0; j < 4; ++j) {
        apply_kick(sys, areas[j], phases[j], rho);
        if (j < 3) {
            evolve(sys, waits[j], rho);
        }
    }
    double p = 0.0;
    for (int x : sys.emitting) {
        p += rho(x, x).real();
    }
    return p;
}

}  // namespace

double kicked_population(const LevelSystem& sys, const std::array<double, 4>& areas,
                         const std::array<double, 4>& phases, const DelayPoint& delay) {
    sys.validate();
    return kicked(sys, areas, phases, delay);
}

std::complex<double> kicked_pathway_signal(const LevelSystem& sys, const std::array<int, 4>& signs,
                                           const DelayPoint& delay, double area, int cycles) {
    sys.validate();
    require(area > 0.0 && cycles >= 4, ErrorCode::InvalidArgument, "need area > 0 and at least 4 phase steps");
    auto coefficient = [&](double a) {
        cd sum = 0.0;
        std::array<int, 4> k{};
        const int total = cycles * cycles * cycles * cycles;
        for (int flat = 0; flat < total; ++flat) {
            int rest = flat;
            for (int j = 0; j < 4; ++j) {
                k[j] = rest % cycles;
                rest /= cycles;
            }
            std::array<double, 4> phases{};
            int phase_steps = 0;
            for (int j = 0; j < 4; ++j) {
                phases[j] = 2.0 * std::numbers::pi * k[j] / cycles;
                phase_steps += signs[j] * k[j];
            }
            const int wrapped = ((phase_steps % cycles) + cycles) % cycles;
            sum += kicked(sys, {a, a, a, a}, phases, delay) * std::polar(1.0, -2.0 * std::numbers::pi * wrapped / cycles);
        }
        return sum / static_cast<double>(total) / std::pow(a, 4);
    };
    return (4.0 * coefficient(0.5 * area) - coefficient(area)) / 3.0;
}

}  // namespace combspec
