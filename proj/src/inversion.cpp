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


#include "combspec/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "combspec/error.hpp"
#include "combspec/parallel.hpp"

namespace combspec {

using cd = std::complex<double>;

namespace {

struct SpikeModel {
    cd weight{};
    std::set<std::int64_t> chi_indices;
    std::int64_t detect_index = 0;
    cd detect_amp{};
    cd comb_amp{};
    std::int64_t tooth = 0;
    bool has_tooth = false;
};

std::map<std::int64_t, cd> amplitude_by_index(const std::vector<FieldComponent>& comps) {
    std::map<std::int64_t, cd> out;
    for (const auto& c : comps) {
        out[c.index] += c.amplitude;
    }
    return out;
}

}  // namespace

LinearInversion invert_linear(const Spectrum& spectrum, std::span<const CombSpec> combs, const FrequencyGrid& grid,
                              const LinearInversionOptions& opts) {
    require(combs.size() == 2, ErrorCode::InvalidArgument, "linear inversion needs exactly 2 combs");
    require(opts.detect == 0 || opts.detect == 1, ErrorCode::InvalidArgument, "detect comb must be 0 or 1");
    require(spectrum.kind == "linear", ErrorCode::InvalidArgument, "linear inversion needs a linear spectrum");
    require(spectrum.step == grid.step, ErrorCode::InvalidArgument, "spectrum and grid steps differ");
    const int d = opts.detect;
    const int other = 1 - d;
    std::array<std::vector<FieldComponent>, 2> comps{comb_components(combs[0], grid),
                                                     comb_components(combs[1], grid)};
    std::array<std::map<std::int64_t, cd>, 2> amps{amplitude_by_index(comps[0]), amplitude_by_index(comps[1])};

    std::multimap<std::int64_t, std::size_t> detect_labels;
    for (std::size_t i = 0; i < comps[d].size(); ++i) {
        detect_labels.emplace(comps[d][i].tooth, i);
    }
    std::map<std::int64_t, SpikeModel> model;
    for (int j = 0; j < 2; ++j) {
        for (const auto& ck : comps[j]) {
            const auto [lo, hi] = detect_labels.equal_range(-ck.tooth);
            for (auto it = lo; it != hi; ++it) {
                const FieldComponent& cl = comps[d][it->second];
                SpikeModel& s = model[cl.index + ck.index];
                s.weight += cd(0.0, grid.frequency(cl.index)) * cl.amplitude * ck.amplitude;
                s.chi_indices.insert(ck.index);
                s.detect_index = cl.index;
                if (j == other && !s.has_tooth) {
                    s.tooth = ck.tooth;
                    s.has_tooth = true;
                }
            }
        }
    }

    const double floor_d = opts.weight_floor.value_or(combs[d].tooth_floor) * combs[d].envelope.amplitude;
    const double floor_k = opts.weight_floor.value_or(combs[other].tooth_floor) * combs[other].envelope.amplitude;
    auto amp_at = [&](int comb, std::int64_t index) {
        const auto it = amps[comb].find(index);
        return it == amps[comb].end() ? cd{} : it->second;
    };
    LinearInversion out;
    double wmin = std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    for (const auto& [index, s] : model) {
        if (!s.has_tooth) {
            continue;
        }
        const std::int64_t k = *s.chi_indices.begin();
        if (k <= 0) {
            continue;
        }
        LinearSample sample;
        sample.spike = index;
        sample.tooth = s.tooth;
        sample.frequency = grid.frequency(k);
        sample.weight = s.weight;
        if (s.chi_indices.size() != 1) {
            sample.reason = "spike collision: several chi arguments fold onto this index";
        } else if (index == 0) {
            sample.reason = "zero-frequency spike";
        } else if (s.detect_index == 0 || s.weight == 0.0) {
            sample.reason = "zero prefactor";
        } else if (std::abs(amp_at(d, s.detect_index)) < floor_d || std::abs(amp_at(other, k)) < floor_k) {
            sample.reason = "tooth weight below the envelope floor";
        } else if (!spectrum.spikes.count(index)) {
            sample.reason = "no spike in the spectrum";
        } else {
            sample.chi = spectrum.at(index) / s.weight;
            sample.recoverable = true;
            ++out.recoverable;
            wmin = std::min(wmin, std::abs(s.weight));
            wmax = std::max(wmax, std::abs(s.weight));
        }
        out.samples.push_back(std::move(sample));
    }
    std::sort(out.samples.begin(), out.samples.end(),
              [](const LinearSample& a, const LinearSample& b) { return a.frequency < b.frequency; });
    out.weight_spread = out.recoverable ? wmax / wmin : 0.0;
    return out;
}

std::vector<ChiKey> FoldingSystem::unconstrained() const {
    std::vector<ChiKey> out;
    for (std::size_t c = 0; c < unknowns.size(); ++c) {
        if (constraint_count[c] == 0) {
            out.push_back(unknowns[c]);
        }
    }
    return out;
}

FoldingSystem build_folding_system(std::span<const Spectrum> runs, double lambda) {
    require(!runs.empty(), ErrorCode::InvalidArgument, "folding system needs at least one run");
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be >= 0");
    FoldingSystem sys;
    sys.step = runs[0].step;
    sys.lambda = lambda;
    std::map<ChiKey, std::size_t> columns;
    std::vector<const Spike*> spikes;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const Spectrum& s = runs[r];
        require(s.has_terms, ErrorCode::InvalidArgument, "run " + std::to_string(r) + " carries no term metadata");
        require(s.step == sys.step, ErrorCode::InvalidArgument, "runs must share one frequency grid");
        for (const auto& [index, spike] : s.spikes) {
            bool any = false;
            for (const auto& t : spike.terms) {
                require(t.order == 3, ErrorCode::InvalidArgument, "folding needs third-order terms");
                ChiKey key = t.chi_args;
                std::sort(key.begin(), key.end());
                columns.emplace(key, 0);
                any = any || t.weight != 0.0;
            }
            if (any) {
                sys.rows.push_back({r, index});
                spikes.push_back(&spike);
            }
        }
    }
    std::size_t c = 0;
    for (auto& [key, col] : columns) {
        col = c++;
        sys.unknowns.push_back(key);
    }
    sys.a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sys.rows.size()),
                                   static_cast<Eigen::Index>(sys.unknowns.size()));
    sys.b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.rows.size()));
    parallel_for(sys.rows.size(), [&](std::size_t i) {
        const auto row = static_cast<Eigen::Index>(i);
        for (const auto& t : spikes[i]->terms) {
            ChiKey key = t.chi_args;
            std::sort(key.begin(), key.end());
            sys.a(row, static_cast<Eigen::Index>(columns.at(key))) += t.weight;
        }
        sys.b(row) = spikes[i]->value;
    });
    sys.constraint_count.assign(sys.unknowns.size(), 0);
    for (Eigen::Index col = 0; col < sys.a.cols(); ++col) {
        for (Eigen::Index row = 0; row < sys.a.rows(); ++row) {
            if (sys.a(row, col) != 0.0) {
                ++sys.constraint_count[col];
            }
        }
    }
    return sys;
}

namespace {

std::vector<Eigen::Index> constrained_columns(const FoldingSystem& s) {
    std::vector<Eigen::Index> cols;
    for (std::size_t c = 0; c < s.unknowns.size(); ++c) {
        if (s.constraint_count[c] > 0) {
            cols.push_back(static_cast<Eigen::Index>(c));
        }
    }
    return cols;
}

Eigen::MatrixXcd select_columns(const Eigen::MatrixXcd& a, const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXcd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    }
    return out;
}

}  // namespace

RankReport rank_report(const FoldingSystem& system) {
    RankReport rep;
    rep.unknowns = system.unknowns.size();
    rep.rows = system.rows.size();
    const auto cols = constrained_columns(system);
    rep.constrained = cols.size();
    if (cols.empty() || rep.rows == 0) {
        return rep;
    }
    const Eigen::MatrixXcd ac = select_columns(system.a, cols);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(ac);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double tol = static_cast<double>(std::max(ac.rows(), ac.cols())) *
                       std::numeric_limits<double>::epsilon() * smax;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        rep.singular_values.push_back(sv(i));
        if (sv(i) > tol) {
            ++rep.rank;
        }
    }
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    rep.condition = rep.rank == rep.constrained && smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    return rep;
}

Eigen::VectorXcd forward_folding(const FoldingSystem& system, const Eigen::VectorXcd& x) {
    require(x.size() == static_cast<Eigen::Index>(system.unknowns.size()), ErrorCode::InvalidArgument,
            "solution length does not match the unknowns");
    return system.a * x;
}

FoldingSolution solve_folding(const FoldingSystem& system) {
    require(system.lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");
    FoldingSolution sol;
    sol.unknowns = system.unknowns;
    sol.rank = rank_report(system);
    sol.x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(system.unknowns.size()));
    sol.constrained.assign(system.unknowns.size(), false);
    const auto cols = constrained_columns(system);
    for (auto c : cols) {
        sol.constrained[static_cast<std::size_t>(c)] = true;
    }
    if (!cols.empty() && system.a.rows() > 0) {
        const Eigen::MatrixXcd ac = select_columns(system.a, cols);
        Eigen::VectorXcd xc;
        if (system.lambda == 0.0) {
            if (!sol.rank.full_rank()) {
                std::ostringstream msg;
                msg << "folding system has rank " << sol.rank.rank << " for " << sol.rank.constrained
                    << " constrained unknowns; set lambda > 0 or add runs with other offsets";
                fail(ErrorCode::RankDeficient, msg.str());
            }
            xc = ac.colPivHouseholderQr().solve(system.b);
        } else {
            const Eigen::Index n = ac.cols();
            Eigen::MatrixXcd aug(ac.rows() + n, n);
            aug.topRows(ac.rows()) = ac;
            aug.bottomRows(n) = Eigen::MatrixXcd::Identity(n, n) * std::sqrt(system.lambda);
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(ac.rows() + n);
            rhs.head(ac.rows()) = system.b;
            xc = aug.householderQr().solve(rhs);
        }
        for (std::size_t j = 0; j < cols.size(); ++j) {
            sol.x(cols[j]) = xc(static_cast<Eigen::Index>(j));
        }
    }
    sol.residuals = forward_folding(system, sol.x) - system.b;
    const double bmax = system.b.size() ? system.b.cwiseAbs().maxCoeff() : 0.0;
    const double rmax = sol.residuals.size() ? sol.residuals.cwiseAbs().maxCoeff() : 0.0;
    sol.max_relative_residual = bmax > 0.0 ? rmax / bmax : rmax;
    return sol;
}

CsvTable chi3_table(const FoldingSystem& system, const FoldingSolution& solution) {
    CsvTable t;
    t.header = {"w1", "w2", "w3", "re", "im", "constraints", "residual"};
    for (std::size_t c = 0; c < system.unknowns.size(); ++c) {
        const auto& k = system.unknowns[c];
        const auto col = static_cast<Eigen::Index>(c);
        std::vector<std::string> row{format_double(system.step * static_cast<double>(k[0])),
                                     format_double(system.step * static_cast<double>(k[1])),
                                     format_double(system.step * static_cast<double>(k[2]))};
        if (solution.constrained[c]) {
            double res = 0.0;
            for (Eigen::Index r = 0; r < system.a.rows(); ++r) {
                if (system.a(r, col) != 0.0) {
                    res = std::max(res, std::abs(solution.residuals(r)));
                }
            }
            row.insert(row.end(), {format_double(solution.x(col).real()), format_double(solution.x(col).imag()),
                                   std::to_string(system.constraint_count[c]), format_double(res)});
        } else {
            row.insert(row.end(), {"", "", "0", ""});
        }
        t.add_row(std::move(row));
    }
    return t;
}

CsvTable chi1_table(const LinearInversion& inversion, const Spectrum& spectrum) {
    CsvTable t;
    t.header = {"tooth", "frequency", "re", "im", "constraints", "residual"};
    for (const auto& s : inversion.samples) {
        std::vector<std::string> row{std::to_string(s.tooth), format_double(s.frequency)};
        if (s.recoverable) {
            const double res = std::abs(s.weight * s.chi - spectrum.at(s.spike));
            row.insert(row.end(), {format_double(s.chi.real()), format_double(s.chi.imag()), "1", format_double(res)});
        } else {
            row.insert(row.end(), {"", "", "0", ""});
        }
        t.add_row(std::move(row));
    }
    return t;
}

}  // namespace combspec
