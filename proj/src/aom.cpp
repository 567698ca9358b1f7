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

#include "combspec/aom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "combspec/error.hpp"
#include "combspec/io.hpp"
#include "combspec/kernels.hpp"
#include "combspec/parallel.hpp"

namespace combspec {

using cd = std::complex<double>;

double PathwaySignature::net_modulation(std::span<const double> phis) const {
    require(phis.size() >= signs.size(), ErrorCode::InvalidArgument, "need one AOM frequency per interaction");
    double sum = 0.0;
    for (std::size_t j = 0; j < signs.size(); ++j) {
        sum += signs[j] * phis[j];
    }
    return sum;
}

PathwaySignature PathwaySignature::conjugate() const {
    PathwaySignature c = *this;
    for (auto& in : c.interactions) {
        in.side = in.side == Side::Ket ? Side::Bra : Side::Ket;
        in.sign = -in.sign;
    }
    for (auto& s : c.signs) {
        s = -s;
    }
    for (auto& iv : c.intervals) {
        std::swap(iv.first, iv.second);
    }
    return c;
}

namespace {

bool raises(const LevelSystem& sys, int from, int to) {
    const double df = sys.energies[to] - sys.energies[from];
    return df > 0.0 || (df == 0.0 && to > from);
}

int interaction_sign(const LevelSystem& sys, Side side, int from, int to) {
    const bool up = raises(sys, from, to);
    if (side == Side::Ket) {
        return up ? -1 : +1;
    }
    return up ? +1 : -1;
}

std::string describe(const std::vector<Interaction>& seq) {
    std::ostringstream os;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (k) {
            os << ' ';
        }
        os << (seq[k].side == Side::Ket ? 'K' : 'B') << seq[k].from << '>' << seq[k].to;
    }
    return os.str();
}

void enumerate(const LevelSystem& sys, int depth, int ket, int bra, std::vector<Interaction>& seq,
               std::vector<std::pair<int, int>>& iv, std::vector<PathwaySignature>& out, Detection det) {
    const int n = sys.size();
    if (static_cast<int>(seq.size()) == depth) {
        PathwaySignature p;
        p.detection = det;
        bool keep = false;
        if (det == Detection::Fluorescence) {
            keep = ket == bra && std::find(sys.emitting.begin(), sys.emitting.end(), ket) != sys.emitting.end();
        } else {
            keep = ket != bra && sys.dipole(ket, bra) != 0.0;
        }
        if (!keep) {
            return;
        }
        p.interactions = seq;
        p.intervals = iv;
        for (const auto& in : seq) {
            p.signs.push_back(in.sign);
        }
        for (const auto& [k, b] : iv) {
            p.involves_f = p.involves_f || sys.manifold(k) == 2 || sys.manifold(b) == 2;
        }
        p.label = describe(seq);
        out.push_back(std::move(p));
        return;
    }
    for (Side side : {Side::Ket, Side::Bra}) {
        const int from = side == Side::Ket ? ket : bra;
        for (int to = 0; to < n; ++to) {
            if (to == from || sys.dipole(from, to) == 0.0) {
                continue;
            }
            seq.push_back({side, from, to, interaction_sign(sys, side, from, to)});
            const int nk = side == Side::Ket ? to : ket;
            const int nb = side == Side::Bra ? to : bra;
            iv.emplace_back(nk, nb);
            enumerate(sys, depth, nk, nb, seq, iv, out, det);
            iv.pop_back();
            seq.pop_back();
        }
    }
}

// Position (1-based) of the only interaction on its side, or 9.
int lone_position(const PathwaySignature& p) {
    int kets = 0;
    int bras = 0;
    for (const auto& in : p.interactions) {
        (in.side == Side::Ket ? kets : bras)++;
    }
    for (std::size_t k = 0; k < p.interactions.size(); ++k) {
        const bool ket = p.interactions[k].side == Side::Ket;
        if ((ket && kets == 1) || (!ket && bras == 1)) {
            return static_cast<int>(k) + 1;
        }
    }
    return 9;
}

std::string heterodyne_class(const std::vector<int>& s) {
    if (s == std::vector<int>{+1, -1, -1}) {
        return "k_I";
    }
    if (s == std::vector<int>{-1, +1, -1}) {
        return "k_II";
    }
    if (s == std::vector<int>{-1, -1, +1}) {
        return "k_III";
    }
    return "other";
}

}  // namespace

std::vector<PathwaySignature> enumerate_pathways(const LevelSystem& sys, Detection detection) {
    sys.validate();
    const int depth = detection == Detection::Fluorescence ? 4 : 3;
    std::vector<PathwaySignature> all;
    std::vector<Interaction> seq;
    std::vector<std::pair<int, int>> iv;
    enumerate(sys, depth, sys.ground, sys.ground, seq, iv, all, detection);

    std::vector<PathwaySignature> reps;
    for (auto& p : all) {
        bool rep = false;
        if (detection == Detection::Fluorescence) {
            rep = p.signs.back() == +1;
        } else {
            const auto [k, b] = p.intervals.back();
            rep = raises(sys, b, k);
            p.heterodyne_class = heterodyne_class(p.signs);
        }
        if (rep) {
            reps.push_back(std::move(p));
        }
    }
    auto key = [](const PathwaySignature& p) {
        std::vector<int> seq_key;
        for (const auto& in : p.interactions) {
            seq_key.push_back(in.side == Side::Ket ? 0 : 1);
            seq_key.push_back(in.from);
            seq_key.push_back(in.to);
        }
        return std::make_tuple(p.involves_f ? 1 : 0, lone_position(p), seq_key);
    };
    std::stable_sort(reps.begin(), reps.end(),
                     [&](const PathwaySignature& a, const PathwaySignature& b) { return key(a) < key(b); });
    for (std::size_t i = 0; i < reps.size(); ++i) {
        reps[i].id = static_cast<int>(i) + 1;
    }
    return reps;
}

std::string pathway_table(const std::vector<PathwaySignature>& pathways) {
    std::ostringstream os;
    os << "| id | interactions | signs | intervals | modulation | f | class |\n";
    os << "|---:|---|---|---|---|:-:|---|\n";
    for (const auto& p : pathways) {
        os << "| " << p.id << " | " << p.label << " | ";
        for (std::size_t j = 0; j < p.signs.size(); ++j) {
            os << (p.signs[j] > 0 ? '+' : '-');
        }
        os << " | ";
        for (std::size_t k = 0; k < p.intervals.size(); ++k) {
            if (k) {
                os << ", ";
            }
            os << '(' << p.intervals[k].first << ',' << p.intervals[k].second << ')';
        }
        os << " | ";
        for (std::size_t j = 0; j < p.signs.size(); ++j) {
            os << (p.signs[j] > 0 ? "+" : "-") << "phi" << j + 1;
        }
        os << " | " << (p.involves_f ? "y" : "n") << " | "
           << (p.heterodyne_class.empty() ? "-" : p.heterodyne_class) << " |\n";
    }
    return os.str();
}

std::string pathway_table_hash(const std::vector<PathwaySignature>& pathways) {
    return sha256_hex(pathway_table(pathways));
}

cd impulsive_response(const LevelSystem& sys, const PathwaySignature& pathway, double t3, double t2, double t1) {
    require(t1 >= 0.0 && t2 >= 0.0 && t3 >= 0.0, ErrorCode::InvalidArgument, "delays must be >= 0");
    const std::array<double, 3> delays{t1, t2, t3};
    cd r = 1.0;
    for (const auto& in : pathway.interactions) {
        const double mu = sys.dipole(in.from, in.to);
        r *= in.side == Side::Ket ? cd(0.0, mu) : cd(0.0, -mu);
    }
    for (std::size_t k = 0; k < pathway.intervals.size() && k < 3; ++k) {
        const auto [a, b] = pathway.intervals[k];
        const double t = delays[k];
        r *= std::exp(cd(-sys.relaxation(a, b), -sys.transition(a, b)) * t);
    }
    if (pathway.detection == Detection::Heterodyne) {
        const auto [a, b] = pathway.intervals.back();
        r *= sys.dipole(b, a);
    }
    return r;
}

void DelayGrid::validate() const {
    for (const DelayAxis* ax : {&t1, &t2, &t3}) {
        require(ax->start >= 0.0 && std::isfinite(ax->start), ErrorCode::InvalidArgument, "delays must be >= 0");
        require(ax->step > 0.0 && std::isfinite(ax->step), ErrorCode::InvalidArgument, "delay steps must be > 0");
        require(ax->count >= 1, ErrorCode::InvalidArgument, "delay axes need at least one point");
    }
}

std::vector<DelayPoint> DelayGrid::points() const {
    validate();
    std::vector<DelayPoint> out;
    out.reserve(t1.count * t2.count * t3.count);
    for (std::size_t i = 0; i < t1.count; ++i) {
        for (std::size_t j = 0; j < t2.count; ++j) {
            for (std::size_t k = 0; k < t3.count; ++k) {
                out.push_back({t1.at(i), t2.at(j), t3.at(k)});
            }
        }
    }
    return out;
}

DelayGrid DelayGrid::standard(double gamma, double t2, std::size_t steps) {
    require(gamma > 0.0, ErrorCode::InvalidArgument, "standard delay grid needs gamma > 0");
    require(steps >= 2, ErrorCode::InvalidArgument, "standard delay grid needs at least two steps");
    DelayGrid g;
    const double step = (5.0 / gamma) / static_cast<double>(steps - 1);
    g.t1 = {0.0, step, steps};
    g.t2 = {t2, 1.0, 1};
    g.t3 = {0.0, step, steps};
    return g;
}

namespace {

void check_trains(std::span<const AomPulseTrainSpec> trains) {
    require(trains.size() == 4, ErrorCode::InvalidArgument, "the AOM experiment needs exactly 4 pulse trains");
    for (const auto& tr : trains) {
        tr.validate();
        require(tr.impulsive, ErrorCode::InvalidArgument, "'" + tr.name + "' must be impulsive");
        require(tr.rep_period == trains[0].rep_period, ErrorCode::InvalidArgument,
                "all pulse trains must share one repetition period");
    }
}

}  // namespace

std::vector<PathwayTerm> pathway_terms(const LevelSystem& sys, const std::vector<PathwaySignature>& pathways,
                                       std::span<const AomPulseTrainSpec> trains, const DelayPoint& delay,
                                       const std::vector<int>& only) {
    check_trains(trains);
    const std::array<double, 4> phis{trains[0].aom_freq, trains[1].aom_freq, trains[2].aom_freq, trains[3].aom_freq};
    double areas = 1.0;
    for (const auto& tr : trains) {
        areas *= tr.amplitude;
    }
    std::vector<PathwayTerm> out;
    for (const auto& p : pathways) {
        if (!only.empty() && std::find(only.begin(), only.end(), p.id) == only.end()) {
            continue;
        }
        const cd r = impulsive_response(sys, p, delay.t3, delay.t2, delay.t1);
        out.push_back({p.id, areas * r, p.net_modulation(phis)});
    }
    return out;
}

TimeSeries shot_record(std::span<const PathwayTerm> terms, double period, std::size_t shots) {
    require(period > 0.0, ErrorCode::InvalidArgument, "shot period must be > 0");
    require(shots >= 1, ErrorCode::InvalidArgument, "need at least one shot");
    std::vector<kernels::Tone> tones;
    for (const auto& t : terms) {
        if (!(std::abs(t.modulation) < std::numbers::pi / period)) {
            std::ostringstream msg;
            msg << "pathway " << t.id << " modulation " << t.modulation << " rad/time aliases: |sum s_j phi_j| < "
                << std::numbers::pi / period << " is required at shot period " << period;
            fail(ErrorCode::Nyquist, msg.str());
        }
        tones.push_back({-t.modulation, 2.0 * t.amplitude});
    }
    TimeSeries ts;
    ts.dt = period;
    ts.grid_step = 2.0 * std::numbers::pi / (period * static_cast<double>(shots));
    ts.samples.assign(shots, 0.0);
    kernels::synthesize_tones(tones, 0.0, period, ts.samples);
    return ts;
}

std::vector<TimeSeries> shot_sequence(const LevelSystem& sys, std::span<const AomPulseTrainSpec> trains,
                                      const DelayGrid& grid, std::size_t shots) {
    check_trains(trains);
    const auto pathways = enumerate_pathways(sys, Detection::Fluorescence);
    const auto points = grid.points();
    std::vector<TimeSeries> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        const auto terms = pathway_terms(sys, pathways, trains, points[i]);
        out[i] = shot_record(terms, trains[0].rep_period, shots);
    });
    return out;
}

std::optional<std::size_t> common_period_shots(std::span<const double> modulations, double period,
                                               std::size_t max_shots) {
    for (std::size_t p = 1; p <= max_shots; ++p) {
        bool ok = true;
        for (double w : modulations) {
            const double cycles = w * period * static_cast<double>(p) / (2.0 * std::numbers::pi);
            if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, std::abs(cycles))) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return p;
        }
    }
    return std::nullopt;
}

std::size_t default_shot_count(std::span<const double> modulations, double period, std::size_t minimum) {
    const auto p = common_period_shots(modulations, period);
    require(p.has_value(), ErrorCode::InvalidArgument,
            "modulation frequencies share no common period below 1e6 shots");
    return ((minimum + *p - 1) / *p) * *p;
}

namespace {

TimeSeries reference_series(const LockInConfig& cfg, Reference ref, double t3, double t1, double theta,
                            const TimeSeries& like) {
    LockInConfig c = cfg;
    c.theta = theta;
    TimeSeries r = like;
    for (std::size_t m = 0; m < r.samples.size(); ++m) {
        r.samples[m] = reference_waveform(c, ref, t3, t1, like.time(m));
    }
    return r;
}

double demod(const TimeSeries& s, const TimeSeries& r, double tau, LockInMode mode) {
    return mode == LockInMode::Periodic ? lockin_demodulate_periodic(s, r, tau) : lockin_demodulate(s, r, tau);
}

}  // namespace

GroupAmplitudes extract_pathway_groups(const TimeSeries& record, const LockInConfig& cfg, double t3, double t1,
                                       LockInMode mode) {
    cfg.validate();
    GroupAmplitudes g;
    for (Reference ref : {Reference::Plus, Reference::Minus}) {
        const double in_phase = demod(record, reference_series(cfg, ref, t3, t1, 0.0, record), cfg.tau, mode);
        const double quad =
            demod(record, reference_series(cfg, ref, t3, t1, std::numbers::pi / 2.0, record), cfg.tau, mode);
        (ref == Reference::Plus ? g.plus : g.minus) = cd(in_phase, quad);
    }
    return g;
}

std::vector<std::string> lockin_mismatch_warnings(const LockInConfig& cfg, std::span<const AomPulseTrainSpec> trains) {
    std::vector<std::string> out;
    if (trains.size() != 4) {
        return out;
    }
    const double phi21 = trains[1].aom_freq - trains[0].aom_freq;
    const double phi43 = trains[3].aom_freq - trains[2].aom_freq;
    auto check = [&](const char* name, double want, double have) {
        if (std::abs(want - have) > 1e-9 * std::max(1.0, std::abs(have))) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "lock-in " << name << " = " << want << " rad/time but the trains beat at " << have
                << " rad/time (" << have / (2.0 * std::numbers::pi) << " cycles/time)";
            out.push_back(msg.str());
        }
    };
    check("phi21", cfg.phi21, phi21);
    check("phi43", cfg.phi43, phi43);
    if (cfg.theta_flagged()) {
        out.push_back("lock-in theta is neither 0 nor pi/2");
    }
    return out;
}

double lockin_gain(std::size_t shots, double period, double tau, LockInMode mode) {
    TimeSeries ones;
    ones.dt = period;
    ones.samples.assign(shots, 1.0);
    return demod(ones, ones, tau, mode);
}

DelayMap run_delay_map(const LevelSystem& sys, std::span<const AomPulseTrainSpec> trains, const DelayGrid& grid,
                       const LockInConfig& cfg, std::size_t shots, LockInMode mode, const std::vector<int>& only) {
    check_trains(trains);
    cfg.validate();
    grid.validate();
    require(grid.t2.count == 1, ErrorCode::InvalidArgument, "delay maps are taken at a single t2");
    const double period = trains[0].rep_period;
    const auto pathways = enumerate_pathways(sys, Detection::Fluorescence);

    DelayMap map;
    map.t2 = grid.t2.start;
    map.shots = shots;
    map.warnings = lockin_mismatch_warnings(cfg, trains);
    for (std::size_t i = 0; i < grid.t1.count; ++i) {
        map.t1.push_back(grid.t1.at(i));
    }
    for (std::size_t k = 0; k < grid.t3.count; ++k) {
        map.t3.push_back(grid.t3.at(k));
    }
    if (mode == LockInMode::Periodic) {
        std::vector<double> mods{cfg.modulation(Reference::Plus), cfg.modulation(Reference::Minus)};
        const std::array<double, 4> phis{trains[0].aom_freq, trains[1].aom_freq, trains[2].aom_freq,
                                         trains[3].aom_freq};
        for (const auto& p : pathways) {
            mods.push_back(p.net_modulation(phis));
        }
        for (double w : mods) {
            const double cycles = w * period * static_cast<double>(shots) / (2.0 * std::numbers::pi);
            if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, std::abs(cycles))) {
                std::ostringstream msg;
                msg << "a record of " << shots << " shots holds " << cycles
                    << " cycles of a modulation; periodic lock-in needs whole periods (try a multiple of "
                    << common_period_shots(mods, period).value_or(0) << ")";
                fail(ErrorCode::InvalidArgument, msg.str());
            }
        }
    }
    map.gain = lockin_gain(shots, period, cfg.tau, mode);

    const std::size_t n1 = grid.t1.count;
    const std::size_t n3 = grid.t3.count;
    map.plus.resize(n1 * n3);
    map.minus.resize(n1 * n3);
    map.expected_plus.resize(n1 * n3);
    map.expected_minus.resize(n1 * n3);
    const double w_plus = cfg.modulation(Reference::Plus);
    const double w_minus = cfg.modulation(Reference::Minus);
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    parallel_for(n1 * n3, [&](std::size_t idx) {
        const double t1 = map.t1[idx / n3];
        const double t3 = map.t3[idx % n3];
        const auto terms = pathway_terms(sys, pathways, trains, {t1, map.t2, t3}, only);
        const TimeSeries record = shot_record(terms, period, shots);
        const GroupAmplitudes g = extract_pathway_groups(record, cfg, t3, t1, mode);
        map.plus[idx] = g.plus;
        map.minus[idx] = g.minus;
        cd ep = 0.0;
        cd em = 0.0;
        for (const auto& t : terms) {
            if (same(t.modulation, w_plus)) {
                ep += t.amplitude;
            } else if (same(t.modulation, w_minus)) {
                em += t.amplitude;
            }
        }
        const double a_plus = cfg.omega_bar43 * t3 + cfg.omega_bar21 * t1;
        const double a_minus = cfg.omega_bar43 * t3 - cfg.omega_bar21 * t1;
        map.expected_plus[idx] = map.gain * ep * std::polar(1.0, a_plus);
        map.expected_minus[idx] = map.gain * em * std::polar(1.0, a_minus);
    });
    return map;
}

ExponentialFit fit_exponentials(std::span<const cd> data, double dt, int order) {
    const int n = static_cast<int>(data.size());
    require(order >= 1 && n >= 2 * order + 1, ErrorCode::InvalidArgument,
            "exponential fit needs at least 2*order+1 samples");
    require(dt > 0.0, ErrorCode::InvalidArgument, "sample spacing must be > 0");
    // forward linear prediction: x_k = -sum_j a_j x_{k-j}
    Eigen::MatrixXcd a(n - order, order);
    Eigen::VectorXcd b(n - order);
    for (int k = order; k < n; ++k) {
        for (int j = 1; j <= order; ++j) {
            a(k - order, j - 1) = data[k - j];
        }
        b(k - order) = -data[k];
    }
    const Eigen::VectorXcd coef = a.completeOrthogonalDecomposition().solve(b);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(order, order);
    for (int j = 0; j < order; ++j) {
        companion(0, j) = -coef(j);
    }
    for (int i = 1; i < order; ++i) {
        companion(i, i - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(companion);
    const Eigen::VectorXcd roots = eig.eigenvalues();

    Eigen::MatrixXcd vander(n, order);
    for (int k = 0; k < order; ++k) {
        cd z = 1.0;
        for (int i = 0; i < n; ++i) {
            vander(i, k) = z;
            z *= roots(k);
        }
    }
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) {
        x(i) = data[i];
    }
    const Eigen::VectorXcd amps = vander.completeOrthogonalDecomposition().solve(x);

    ExponentialFit fit;
    int best = 0;
    for (int k = 0; k < order; ++k) {
        fit.roots.push_back(roots(k));
        fit.amplitudes.push_back(amps(k));
        if (std::abs(amps(k)) > std::abs(amps(best))) {
            best = k;
        }
    }
    fit.frequency = -std::arg(roots(best)) / dt;
    fit.decay = -std::log(std::abs(roots(best))) / dt;
    return fit;
}

}  // namespace combspec
