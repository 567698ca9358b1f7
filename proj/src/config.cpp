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


#include "combspec/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "combspec/io.hpp"

namespace combspec {

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::DualLinear:
            return "dual_linear";
        case ExperimentKind::QuadThird:
            return "quad_third";
        case ExperimentKind::DualThird:
            return "dual_third";
        case ExperimentKind::AomFluorescence:
            return "aom_fluorescence";
        case ExperimentKind::OracleCheck:
            return "oracle_check";
    }
    return "unknown";
}

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? sep : "") + v[i];
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(ErrorCode::Config, std::to_string(problems.size()) + " configuration problem(s): " + join(problems, "; ")),
      problems_(std::move(problems)) {}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"experiment", {"kind", "name"}},
        {"system",
         {"model", "omega_eg", "omega_fg", "mu", "mu_fe", "gamma", "population_decay", "energies", "dipole",
          "dephasing", "ground", "emitting"}},
        {"comb",
         {"name", "rep_spacing", "offset", "carrier", "ce_offset", "global_phase", "sigma", "amplitude",
          "tooth_floor"}},
        {"train",
         {"name", "delay", "rep_period", "aom_freq", "carrier", "amplitude", "duration", "impulsive", "pulse_count"}},
        {"grid",
         {"step", "samples", "time_domain", "cutoff", "detect", "branch", "max_tooth", "max_terms", "projection",
          "variant"}},
        {"delays",
         {"t1_start", "t1_step", "t1_count", "t2", "t3_start", "t3_step", "t3_count", "shots", "mode", "pathways"}},
        {"lockin", {"phi21", "phi43", "omega_bar21", "omega_bar43", "theta", "tau"}},
        {"inversion", {"enabled", "lambda", "detect_offsets"}},
        {"oracle", {"dt", "samples", "amplitudes"}},
        {"output", {"dir", "time_series", "terms"}},
    };
    return s;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// number, "pi", or a product/quotient of those: 2*pi*8e3, pi/2
std::optional<double> parse_number(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 1.0;
    char op = '*';
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find_first_of("*/", pos);
        const std::string tok = trim(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        double f = 0.0;
        if (tok == "pi") {
            f = std::numbers::pi;
        } else {
            const char* first = tok.data();
            const char* last = tok.data() + tok.size();
            if (!tok.empty() && *first == '+') {
                ++first;
            }
            const auto [ptr, ec] = std::from_chars(first, last, f);
            if (tok.empty() || ec != std::errc() || ptr != last) {
                return std::nullopt;
            }
        }
        value = op == '*' ? value * f : value / f;
        if (next == std::string::npos) {
            break;
        }
        op = text[next];
        pos = next + 1;
    }
    if (!std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : raw) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!trim(cur).empty()) {
                out.push_back(trim(cur));
            }
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) {
        out.push_back(trim(cur));
    }
    return out;
}

class Reader {
public:
    struct Section {
        std::string name;
        std::map<std::string, std::string> values;
    };

    std::vector<std::string> problems;

    bool has(const Section* s, const std::string& key) const { return s && s->values.count(key); }

    std::optional<double> number(const Section* s, const std::string& key) {
        if (!has(s, key)) {
            return std::nullopt;
        }
        const auto v = parse_number(s->values.at(key));
        if (!v) {
            problems.push_back("[" + s->name + "] " + key + " = '" + s->values.at(key) + "' is not a number");
        }
        return v;
    }

    double number_or(const Section* s, const std::string& key, double fallback) {
        return number(s, key).value_or(fallback);
    }

    double required(const Section* s, const std::string& section, const std::string& key) {
        if (!has(s, key)) {
            problems.push_back("[" + section + "] " + key + " is required");
            return 0.0;
        }
        return number_or(s, key, 0.0);
    }

    std::optional<std::int64_t> integer(const Section* s, const std::string& key) {
        const auto v = number(s, key);
        if (!v) {
            return std::nullopt;
        }
        if (std::round(*v) != *v || std::abs(*v) > 9.0e15) {
            problems.push_back("[" + s->name + "] " + key + " must be an integer");
            return std::nullopt;
        }
        return static_cast<std::int64_t>(*v);
    }

    std::optional<std::size_t> count(const Section* s, const std::string& key) {
        const auto v = integer(s, key);
        if (v && *v < 0) {
            problems.push_back("[" + s->name + "] " + key + " must be >= 0");
            return std::nullopt;
        }
        return v ? std::optional<std::size_t>(static_cast<std::size_t>(*v)) : std::nullopt;
    }

    bool boolean_or(const Section* s, const std::string& key, bool fallback) {
        if (!has(s, key)) {
            return fallback;
        }
        std::string v = trim(s->values.at(key));
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "yes" || v == "1" || v == "on") {
            return true;
        }
        if (v == "false" || v == "no" || v == "0" || v == "off") {
            return false;
        }
        problems.push_back("[" + s->name + "] " + key + " = '" + v + "' is not a boolean");
        return fallback;
    }

    std::string text_or(const Section* s, const std::string& key, const std::string& fallback) {
        return has(s, key) ? trim(s->values.at(key)) : fallback;
    }

    std::vector<double> numbers(const Section* s, const std::string& key) {
        std::vector<double> out;
        if (!has(s, key)) {
            return out;
        }
        for (const auto& tok : split_list(s->values.at(key))) {
            const auto v = parse_number(tok);
            if (!v) {
                problems.push_back("[" + s->name + "] " + key + ": '" + tok + "' is not a number");
            } else {
                out.push_back(*v);
            }
        }
        return out;
    }

    template <class F>
    void guard(const std::string& where, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            problems.push_back(where + ": " + e.what());
        }
    }
};

using Section = Reader::Section;

std::optional<ExperimentKind> parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::DualLinear, ExperimentKind::QuadThird, ExperimentKind::DualThird,
                   ExperimentKind::AomFluorescence, ExperimentKind::OracleCheck}) {
        if (kind_name(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<Projection> parse_projection(const std::string& s) {
    if (s == "full") {
        return Projection::full();
    }
    if (s == "emitting") {
        return Projection::emitting();
    }
    if (s.rfind("level:", 0) == 0) {
        const auto v = parse_number(s.substr(6));
        if (v && *v >= 0 && std::round(*v) == *v) {
            return Projection::onto(static_cast<int>(*v));
        }
    }
    return std::nullopt;
}

LevelSystem read_system(Reader& rd, const Section* s) {
    const std::string model = rd.text_or(s, "model", "two_level");
    const double gamma = rd.number_or(s, "gamma", 1.0);
    const double pop = rd.number_or(s, "population_decay", 0.0);
    LevelSystem sys;
    if (model == "two_level") {
        sys = LevelSystem::two_level(rd.number_or(s, "omega_eg", 1.0), gamma, rd.number_or(s, "mu", 1.0), pop);
    } else if (model == "ladder") {
        sys = LevelSystem::ladder(rd.number_or(s, "omega_eg", 1.0), rd.number_or(s, "omega_fg", 2.0),
                                  rd.number_or(s, "mu", 1.0), rd.number_or(s, "mu_fe", 1.0), gamma, pop);
    } else if (model == "custom") {
        sys.energies = rd.numbers(s, "energies");
        const int n = static_cast<int>(sys.energies.size());
        if (n < 2) {
            rd.problems.push_back("[system] custom model needs at least two energies");
            return LevelSystem::two_level(1.0, 1.0, 1.0);
        }
        const auto dip = rd.numbers(s, "dipole");
        if (dip.size() != static_cast<std::size_t>(n * n)) {
            rd.problems.push_back("[system] dipole needs " + std::to_string(n * n) + " row-major entries");
            return LevelSystem::two_level(1.0, 1.0, 1.0);
        }
        sys.dipole = Eigen::MatrixXd(n, n);
        for (int i = 0; i < n * n; ++i) {
            sys.dipole(i / n, i % n) = dip[i];
        }
        const auto deph = rd.numbers(s, "dephasing");
        if (deph.size() == static_cast<std::size_t>(n * n)) {
            sys.dephasing = Eigen::MatrixXd(n, n);
            for (int i = 0; i < n * n; ++i) {
                sys.dephasing(i / n, i % n) = deph[i];
            }
        } else if (deph.size() <= 1) {
            sys.dephasing = Eigen::MatrixXd::Constant(n, n, deph.empty() ? gamma : deph[0]);
        } else {
            rd.problems.push_back("[system] dephasing needs 1 or " + std::to_string(n * n) + " entries");
            sys.dephasing = Eigen::MatrixXd::Constant(n, n, gamma);
        }
        sys.population_decay.assign(n, pop);
        sys.ground = static_cast<int>(rd.number_or(s, "ground", 0.0));
        for (double e : rd.numbers(s, "emitting")) {
            sys.emitting.push_back(static_cast<int>(e));
        }
        if (sys.emitting.empty()) {
            for (int a = 0; a < n; ++a) {
                if (a != sys.ground) {
                    sys.emitting.push_back(a);
                }
            }
        }
    } else {
        rd.problems.push_back("[system] model must be two_level, ladder or custom, not '" + model + "'");
        return LevelSystem::two_level(1.0, 1.0, 1.0);
    }
    if (model != "custom") {
        for (const std::string key : {"energies", "dipole", "dephasing", "ground"}) {
            if (rd.has(s, key)) {
                rd.problems.push_back("[system] " + key + " only applies to model = custom");
            }
        }
        if (rd.has(s, "emitting")) {
            sys.emitting.clear();
            for (double e : rd.numbers(s, "emitting")) {
                sys.emitting.push_back(static_cast<int>(e));
            }
        }
    }
    rd.guard("[system]", [&] { sys.validate(); });
    return sys;
}

CombSpec read_comb(Reader& rd, const Section* s, const std::string& label) {
    CombSpec c;
    c.name = rd.text_or(s, "name", label);
    c.rep_spacing = rd.required(s, label, "rep_spacing");
    c.offset = rd.number_or(s, "offset", 0.0);
    c.carrier = rd.required(s, label, "carrier");
    c.ce_offset = rd.number_or(s, "ce_offset", 0.0);
    c.global_phase = rd.number_or(s, "global_phase", 0.0);
    c.envelope.sigma = rd.required(s, label, "sigma");
    c.envelope.amplitude = rd.number_or(s, "amplitude", 1.0);
    c.tooth_floor = rd.number_or(s, "tooth_floor", 1e-8);
    return c;
}

AomPulseTrainSpec read_train(Reader& rd, const Section* s, const std::string& label) {
    AomPulseTrainSpec t;
    t.name = rd.text_or(s, "name", label);
    t.delay = rd.number_or(s, "delay", 0.0);
    t.rep_period = rd.required(s, label, "rep_period");
    t.aom_freq = rd.number_or(s, "aom_freq", 0.0);
    t.carrier = rd.number_or(s, "carrier", 0.0);
    t.amplitude = rd.number_or(s, "amplitude", 1.0);
    t.duration = rd.number_or(s, "duration", 1.0);
    t.impulsive = rd.boolean_or(s, "impulsive", false);
    t.pulse_count = rd.integer(s, "pulse_count").value_or(1);
    return t;
}

bool comb_kind(ExperimentKind k) {
    return k == ExperimentKind::DualLinear || k == ExperimentKind::QuadThird || k == ExperimentKind::DualThird;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({std::string("INI syntax: ") + e.what()});
    }

    Reader rd;
    std::map<std::string, Section> sections;
    std::map<int, std::string> comb_labels;
    std::map<int, std::string> train_labels;
    std::vector<std::string> canon;
    for (const auto& [name, child] : tree) {
        if (child.empty() && !child.data().empty()) {
            rd.problems.push_back("key '" + name + "' appears outside any section");
            continue;
        }
        const auto dot = name.find('.');
        const std::string base = name.substr(0, dot);
        const auto it = schema().find(base);
        const bool indexed = base == "comb" || base == "train";
        if (it == schema().end() || indexed != (dot != std::string::npos)) {
            rd.problems.push_back("unknown section [" + name + "]");
            continue;
        }
        if (indexed) {
            const auto idx = parse_number(name.substr(dot + 1));
            if (!idx || *idx < 0 || std::round(*idx) != *idx || name.substr(dot + 1).find_first_not_of("0123456789") !=
                                                                   std::string::npos) {
                rd.problems.push_back("section [" + name + "] needs a non-negative integer index");
                continue;
            }
            (base == "comb" ? comb_labels : train_labels)[static_cast<int>(*idx)] = name;
        }
        Section sec{name, {}};
        for (const auto& [key, leaf] : child) {
            if (!it->second.count(key)) {
                rd.problems.push_back("unknown key '" + key + "' in [" + name + "]");
                continue;
            }
            sec.values[key] = trim(leaf.data());
            canon.push_back(name + "." + key + "=" + trim(leaf.data()));
        }
        sections[name] = std::move(sec);
    }
    std::sort(canon.begin(), canon.end());

    auto section = [&](const std::string& n) -> const Section* {
        const auto it = sections.find(n);
        return it == sections.end() ? nullptr : &it->second;
    };

    ExperimentConfig cfg;
    cfg.canonical = join(canon, "\n") + "\n";
    cfg.hash = sha256_hex(cfg.canonical);

    const Section* exp = section("experiment");
    std::optional<ExperimentKind> kind;
    if (!rd.has(exp, "kind")) {
        rd.problems.push_back("[experiment] kind is required");
    } else {
        kind = parse_kind(exp->values.at("kind"));
        if (!kind) {
            rd.problems.push_back("[experiment] kind '" + exp->values.at("kind") +
                                  "' is not one of dual_linear, quad_third, dual_third, aom_fluorescence, "
                                  "oracle_check");
        }
    }
    cfg.kind = kind.value_or(ExperimentKind::DualLinear);
    cfg.name = rd.text_or(exp, "name", "experiment");

    if (!section("system")) {
        rd.problems.push_back("[system] section is required");
    }
    cfg.system = read_system(rd, section("system"));

    for (auto* labels : {&comb_labels, &train_labels}) {
        int expect = 0;
        for (const auto& [idx, label] : *labels) {
            if (idx != expect) {
                rd.problems.push_back("section indices must run 0, 1, 2, ...; found [" + label + "]");
                break;
            }
            ++expect;
        }
    }
    for (const auto& [idx, label] : comb_labels) {
        CombSpec c = read_comb(rd, section(label), label);
        rd.guard("[" + label + "]", [&] {
            c.validate();
            for (const auto& w : c.warnings()) {
                cfg.warnings.push_back("[" + label + "] " + w);
            }
        });
        cfg.combs.push_back(std::move(c));
    }
    for (const auto& [idx, label] : train_labels) {
        AomPulseTrainSpec t = read_train(rd, section(label), label);
        rd.guard("[" + label + "]", [&] { t.validate(); });
        cfg.trains.push_back(std::move(t));
    }

    // grid
    const Section* grid = section("grid");
    cfg.grid.step = rd.number_or(grid, "step", 0.0);
    cfg.grid.samples = rd.count(grid, "samples").value_or(0);
    cfg.grid.time_domain = rd.boolean_or(grid, "time_domain", cfg.grid.samples > 0);
    if (rd.has(grid, "cutoff")) {
        cfg.grid.cutoff = rd.number(grid, "cutoff");
    }
    const std::string detect = rd.text_or(grid, "detect", "0");
    if (detect == "all") {
        cfg.grid.detect = std::nullopt;
    } else {
        cfg.grid.detect = static_cast<int>(rd.integer(grid, "detect").value_or(0));
    }
    const std::string branch = rd.text_or(grid, "branch", "selected");
    if (branch == "selected" || branch == "all") {
        cfg.grid.branch = branch == "all" ? Branch::All : Branch::Selected;
    } else {
        rd.problems.push_back("[grid] branch must be selected or all");
    }
    if (rd.has(grid, "max_tooth")) {
        cfg.grid.max_tooth = rd.integer(grid, "max_tooth");
    }
    cfg.grid.max_terms = rd.count(grid, "max_terms").value_or(cfg.grid.max_terms);
    const auto proj = parse_projection(rd.text_or(grid, "projection", "full"));
    if (!proj) {
        rd.problems.push_back("[grid] projection must be full, emitting or level:N");
    } else if (proj->kind() == Projection::Kind::Level && proj->level() >= cfg.system.size()) {
        rd.problems.push_back("[grid] projection level " + std::to_string(proj->level()) + " is out of range");
    } else {
        cfg.grid.projection = *proj;
    }
    cfg.grid.variant = rd.text_or(grid, "variant", "all_one");
    if (cfg.grid.variant != "all_one" && cfg.grid.variant != "two_by_two") {
        rd.problems.push_back("[grid] variant must be all_one or two_by_two");
    }

    // kind-specific arity and cross references
    const std::size_t ncombs = cfg.combs.size();
    const std::string kn = kind_name(cfg.kind);
    if (kind) {
        const std::size_t want_combs = cfg.kind == ExperimentKind::QuadThird ? 4 : comb_kind(cfg.kind) ? 2 : 0;
        if (comb_kind(cfg.kind)) {
            if (ncombs != want_combs) {
                rd.problems.push_back(kn + " requires " + std::to_string(want_combs) + " combs");
            }
            if (!cfg.trains.empty()) {
                rd.problems.push_back(kn + " does not use [train.N] sections");
            }
            if (!(cfg.grid.step > 0.0)) {
                rd.problems.push_back("[grid] step must be > 0 for " + kn);
            } else {
                for (std::size_t j = 0; j < ncombs; ++j) {
                    rd.guard("[comb." + std::to_string(j) + "]", [&] { grid_comb(cfg.combs[j], cfg.frequency_grid()); });
                }
            }
            if (cfg.grid.detect && (*cfg.grid.detect < 0 || *cfg.grid.detect >= static_cast<int>(ncombs))) {
                rd.problems.push_back("[grid] detect must name one of the combs or be 'all'");
            }
            if (cfg.grid.cutoff) {
                double min_rep = std::numeric_limits<double>::infinity();
                for (const auto& c : cfg.combs) {
                    min_rep = std::min(min_rep, c.spacing());
                }
                if (!(*cfg.grid.cutoff > 0.0 && *cfg.grid.cutoff < min_rep)) {
                    rd.problems.push_back("[grid] cutoff must lie in (0, smallest tooth spacing)");
                }
            }
        } else {
            if (ncombs) {
                rd.problems.push_back(kn + " does not use [comb.N] sections");
            }
            if (cfg.kind == ExperimentKind::AomFluorescence && cfg.trains.size() != 4) {
                rd.problems.push_back("aom_fluorescence requires 4 trains");
            }
            if (cfg.kind == ExperimentKind::OracleCheck && cfg.trains.empty()) {
                rd.problems.push_back("oracle_check requires at least 1 train");
            }
        }
        if (cfg.kind == ExperimentKind::AomFluorescence) {
            for (const auto& t : cfg.trains) {
                if (!t.impulsive) {
                    rd.problems.push_back("'" + t.name + "': aom_fluorescence uses impulsive trains");
                }
                if (t.rep_period != cfg.trains[0].rep_period) {
                    rd.problems.push_back("'" + t.name + "': all trains need one rep_period");
                }
            }
        }
        if (cfg.kind == ExperimentKind::OracleCheck) {
            for (const auto& t : cfg.trains) {
                if (t.impulsive) {
                    rd.problems.push_back("'" + t.name + "': oracle_check needs finite-width pulses");
                }
            }
        }
    }

    // delays
    const Section* delays = section("delays");
    if (delays && cfg.kind != ExperimentKind::AomFluorescence) {
        rd.problems.push_back("[delays] only applies to aom_fluorescence");
    }
    if (cfg.kind == ExperimentKind::AomFluorescence) {
        double gamma = 1.0;
        if (cfg.system.size() >= 2) {
            const int e = cfg.system.emitting.empty() ? 1 : cfg.system.emitting.front();
            gamma = cfg.system.relaxation(e, cfg.system.ground);
        }
        DelayGrid g;
        if (gamma > 0.0) {
            g = DelayGrid::standard(gamma);
        }
        g.t1.start = rd.number_or(delays, "t1_start", g.t1.start);
        g.t1.step = rd.number_or(delays, "t1_step", g.t1.step);
        g.t1.count = rd.count(delays, "t1_count").value_or(g.t1.count);
        g.t2.start = rd.number_or(delays, "t2", 0.0);
        g.t3.start = rd.number_or(delays, "t3_start", g.t3.start);
        g.t3.step = rd.number_or(delays, "t3_step", g.t3.step);
        g.t3.count = rd.count(delays, "t3_count").value_or(g.t3.count);
        rd.guard("[delays]", [&] { g.validate(); });
        cfg.aom.delays = g;
        cfg.aom.shots = rd.count(delays, "shots").value_or(0);
        const std::string mode = rd.text_or(delays, "mode", "periodic");
        if (mode == "periodic" || mode == "direct") {
            cfg.aom.mode = mode == "direct" ? LockInMode::Direct : LockInMode::Periodic;
        } else {
            rd.problems.push_back("[delays] mode must be periodic or direct");
        }
        for (double id : rd.numbers(delays, "pathways")) {
            cfg.aom.pathways.push_back(static_cast<int>(id));
        }
    }

    // lock-in
    const Section* lock = section("lockin");
    if (lock && cfg.kind != ExperimentKind::AomFluorescence) {
        rd.problems.push_back("[lockin] only applies to aom_fluorescence");
    }
    if (cfg.trains.size() == 4) {
        cfg.lockin.phi21 = cfg.trains[1].aom_freq - cfg.trains[0].aom_freq;
        cfg.lockin.phi43 = cfg.trains[3].aom_freq - cfg.trains[2].aom_freq;
    }
    cfg.lockin.phi21 = rd.number_or(lock, "phi21", cfg.lockin.phi21);
    cfg.lockin.phi43 = rd.number_or(lock, "phi43", cfg.lockin.phi43);
    cfg.lockin.omega_bar21 = rd.number_or(lock, "omega_bar21", 0.0);
    cfg.lockin.omega_bar43 = rd.number_or(lock, "omega_bar43", 0.0);
    cfg.lockin.theta = rd.number_or(lock, "theta", 0.0);
    cfg.lockin.tau = rd.number_or(lock, "tau", cfg.lockin.tau);
    if (cfg.kind == ExperimentKind::AomFluorescence) {
        rd.guard("[lockin]", [&] { cfg.lockin.validate(); });
        for (const auto& w : lockin_mismatch_warnings(cfg.lockin, cfg.trains)) {
            cfg.warnings.push_back("[lockin] " + w);
        }
    }

    // inversion
    const Section* inv = section("inversion");
    cfg.inversion.enabled = rd.boolean_or(inv, "enabled", false);
    cfg.inversion.lambda = rd.number_or(inv, "lambda", 0.0);
    cfg.inversion.detect_offsets = rd.numbers(inv, "detect_offsets");
    if (cfg.inversion.lambda < 0.0) {
        rd.problems.push_back("[inversion] lambda must be >= 0");
    }
    if (inv && !comb_kind(cfg.kind)) {
        rd.problems.push_back("[inversion] only applies to comb experiments");
    }
    if (!cfg.inversion.detect_offsets.empty() && cfg.kind != ExperimentKind::QuadThird) {
        rd.problems.push_back("[inversion] detect_offsets only applies to quad_third");
    }
    if (comb_kind(cfg.kind) && cfg.grid.step > 0.0 && ncombs > 0) {
        for (double off : cfg.inversion.detect_offsets) {
            CombSpec c = cfg.combs[0];
            c.offset = off;
            rd.guard("[inversion] detect_offsets", [&] { grid_comb(c, cfg.frequency_grid()); });
        }
    }

    // oracle
    const Section* orc = section("oracle");
    if (orc && cfg.kind != ExperimentKind::OracleCheck) {
        rd.problems.push_back("[oracle] only applies to oracle_check");
    }
    if (cfg.kind == ExperimentKind::OracleCheck) {
        cfg.oracle.dt = rd.required(orc, "oracle", "dt");
        cfg.oracle.samples = rd.count(orc, "samples").value_or(0);
        cfg.oracle.amplitudes = rd.numbers(orc, "amplitudes");
        if (cfg.oracle.amplitudes.empty()) {
            cfg.oracle.amplitudes = {1e-3, 1e-4, 1e-5};
        }
        if (!(cfg.oracle.dt > 0.0)) {
            rd.problems.push_back("[oracle] dt must be > 0");
        }
        if (cfg.oracle.samples < 2) {
            rd.problems.push_back("[oracle] samples must be >= 2");
        }
        if (!cfg.system.uniform_population_decay()) {
            rd.problems.push_back("[system] oracle_check needs one population_decay for every level");
        }
    }

    // output
    const Section* out = section("output");
    cfg.output.dir = rd.text_or(out, "dir", cfg.output.dir);
    cfg.output.time_series = rd.boolean_or(out, "time_series", false);
    cfg.output.terms = rd.boolean_or(out, "terms", false);

    if (!rd.problems.empty()) {
        throw ConfigError(rd.problems);
    }
    return cfg;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError({"cannot read " + path.string()});
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace {

std::string list(const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) {
        s.push_back(format_double(x));
    }
    return join(s, ", ");
}

}  // namespace

std::string echo_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    const auto f = format_double;
    os << "[experiment]\nkind = " << kind_name(cfg.kind) << "\nname = " << cfg.name << "\n\n";
    const LevelSystem& s = cfg.system;
    std::vector<double> energies(s.energies.begin(), s.energies.end());
    std::vector<double> dip;
    std::vector<double> deph;
    for (int a = 0; a < s.size(); ++a) {
        for (int b = 0; b < s.size(); ++b) {
            dip.push_back(s.dipole(a, b));
            deph.push_back(s.dephasing(a, b));
        }
    }
    std::vector<double> emitting(s.emitting.begin(), s.emitting.end());
    os << "[system]\nmodel = custom\nenergies = " << list(energies) << "\ndipole = " << list(dip)
       << "\ndephasing = " << list(deph) << "\npopulation_decay = "
       << f(s.population_decay.empty() ? 0.0 : s.population_decay[0]) << "\nground = " << s.ground
       << "\nemitting = " << list(emitting) << "\n";
    for (std::size_t j = 0; j < cfg.combs.size(); ++j) {
        const auto& c = cfg.combs[j];
        os << "\n[comb." << j << "]\nname = " << c.name << "\nrep_spacing = " << f(c.rep_spacing)
           << "\noffset = " << f(c.offset) << "\ncarrier = " << f(c.carrier) << "\nce_offset = " << f(c.ce_offset)
           << "\nglobal_phase = " << f(c.global_phase) << "\nsigma = " << f(c.envelope.sigma)
           << "\namplitude = " << f(c.envelope.amplitude) << "\ntooth_floor = " << f(c.tooth_floor) << "\n";
    }
    for (std::size_t j = 0; j < cfg.trains.size(); ++j) {
        const auto& t = cfg.trains[j];
        os << "\n[train." << j << "]\nname = " << t.name << "\ndelay = " << f(t.delay)
           << "\nrep_period = " << f(t.rep_period) << "\naom_freq = " << f(t.aom_freq) << "\ncarrier = "
           << f(t.carrier) << "\namplitude = " << f(t.amplitude) << "\nduration = " << f(t.duration)
           << "\nimpulsive = " << (t.impulsive ? "true" : "false") << "\npulse_count = " << t.pulse_count << "\n";
    }
    if (comb_kind(cfg.kind)) {
        os << "\n[grid]\nstep = " << f(cfg.grid.step) << "\nsamples = " << cfg.grid.samples
           << "\ntime_domain = " << (cfg.grid.time_domain ? "true" : "false") << "\n";
        if (cfg.grid.cutoff) {
            os << "cutoff = " << f(*cfg.grid.cutoff) << "\n";
        }
        os << "detect = " << (cfg.grid.detect ? std::to_string(*cfg.grid.detect) : "all")
           << "\nbranch = " << (cfg.grid.branch == Branch::All ? "all" : "selected") << "\n";
        if (cfg.grid.max_tooth) {
            os << "max_tooth = " << *cfg.grid.max_tooth << "\n";
        }
        os << "max_terms = " << cfg.grid.max_terms << "\nprojection = " << cfg.grid.projection.name()
           << "\nvariant = " << cfg.grid.variant << "\n";
        os << "\n[inversion]\nenabled = " << (cfg.inversion.enabled ? "true" : "false")
           << "\nlambda = " << f(cfg.inversion.lambda) << "\n";
        if (!cfg.inversion.detect_offsets.empty()) {
            os << "detect_offsets = " << list(cfg.inversion.detect_offsets) << "\n";
        }
    }
    if (cfg.kind == ExperimentKind::AomFluorescence) {
        const auto& d = cfg.aom.delays;
        os << "\n[delays]\nt1_start = " << f(d.t1.start) << "\nt1_step = " << f(d.t1.step)
           << "\nt1_count = " << d.t1.count << "\nt2 = " << f(d.t2.start) << "\nt3_start = " << f(d.t3.start)
           << "\nt3_step = " << f(d.t3.step) << "\nt3_count = " << d.t3.count << "\nshots = " << cfg.aom.shots
           << "\nmode = " << (cfg.aom.mode == LockInMode::Direct ? "direct" : "periodic") << "\n";
        if (!cfg.aom.pathways.empty()) {
            std::vector<double> ids(cfg.aom.pathways.begin(), cfg.aom.pathways.end());
            os << "pathways = " << list(ids) << "\n";
        }
        const auto& l = cfg.lockin;
        os << "\n[lockin]\nphi21 = " << f(l.phi21) << "\nphi43 = " << f(l.phi43) << "\nomega_bar21 = "
           << f(l.omega_bar21) << "\nomega_bar43 = " << f(l.omega_bar43) << "\ntheta = " << f(l.theta)
           << "\ntau = " << f(l.tau) << "\n";
    }
    if (cfg.kind == ExperimentKind::OracleCheck) {
        os << "\n[oracle]\ndt = " << f(cfg.oracle.dt) << "\nsamples = " << cfg.oracle.samples
           << "\namplitudes = " << list(cfg.oracle.amplitudes) << "\n";
    }
    os << "\n[output]\ndir = " << cfg.output.dir << "\ntime_series = " << (cfg.output.time_series ? "true" : "false")
       << "\nterms = " << (cfg.output.terms ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace combspec
