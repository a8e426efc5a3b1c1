// Copyright 2026 The hybridsim Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hybridsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hybridsim {

std::string_view to_string(Experiment e) {
    switch (e) {
    case Experiment::Evolve: return "evolve";
    case Experiment::Master: return "master";
    case Experiment::Wigner: return "wigner";
    case Experiment::SweepBeta: return "sweep-beta";
    case Experiment::ScanInitial: return "scan-initial";
    case Experiment::Limits: return "limits";
    }
    return "?";
}

std::string_view to_string(LimitsRegime r) {
    return r == LimitsRegime::SlowRabi ? "slow-rabi" : "small-beta";
}

std::string_view to_string(FReference r) {
    return r == FReference::Matched ? "matched" : "undamped";
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

SystemParams RunConfig::system() const {
    SystemParams p;
    p.omega = omega;
    p.nu = nu;
    p.g = g;
    p.set_beta(beta);
    p.kappa = kappa;
    p.Gamma = Gamma;
    p.gamma = gamma;
    p.mbar = mbar;
    return p;
}

TimeGrid RunConfig::time_grid(double default_end_tau) const {
    return {t_start_tau, t_end_tau.value_or(default_end_tau), n_samples};
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view v, int line) {
    v = trim(v);
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("cannot parse '" + std::string(v) + "' as a number", line);
    if (!std::isfinite(out))
        throw ConfigError("value must be finite", line);
    return out;
}

int parse_int(std::string_view v, int line) {
    v = trim(v);
    int out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("cannot parse '" + std::string(v) + "' as an integer", line);
    return out;
}

bool parse_bool(std::string_view v, int line) {
    v = trim(v);
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    throw ConfigError("expected true or false, got '" + std::string(v) + "'", line);
}

std::vector<double> parse_list(std::string_view v, int line) {
    std::vector<double> out;
    v = trim(v);
    if (v.empty())
        return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = v.find(',', pos);
        out.push_back(parse_double(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos), line));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

template <typename Enum>
Enum parse_enum(std::string_view v, int line, std::initializer_list<std::pair<std::string_view, Enum>> options) {
    v = trim(v);
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (v == name)
            return value;
        allowed += (allowed.empty() ? "" : " | ") + std::string(name);
    }
    throw ConfigError("unknown value '" + std::string(v) + "' (expected " + allowed + ")", line);
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto real = [&t](const char* key, double RunConfig::*field) {
            t[key] = [field](RunConfig& c, std::string_view v, int line) { c.*field = parse_double(v, line); };
        };
        auto integer = [&t](const char* key, int RunConfig::*field) {
            t[key] = [field](RunConfig& c, std::string_view v, int line) { c.*field = parse_int(v, line); };
        };
        auto list = [&t](const char* key, std::vector<double> RunConfig::*field) {
            t[key] = [field](RunConfig& c, std::string_view v, int line) { c.*field = parse_list(v, line); };
        };
        auto flag = [&t](const char* key, bool RunConfig::*field) {
            t[key] = [field](RunConfig& c, std::string_view v, int line) { c.*field = parse_bool(v, line); };
        };
        t["experiment"] = [](RunConfig& c, std::string_view v, int line) {
            c.experiment = parse_enum<Experiment>(v, line,
                                                  {{"evolve", Experiment::Evolve},
                                                   {"master", Experiment::Master},
                                                   {"wigner", Experiment::Wigner},
                                                   {"sweep-beta", Experiment::SweepBeta},
                                                   {"scan-initial", Experiment::ScanInitial},
                                                   {"limits", Experiment::Limits}});
        };
        real("omega", &RunConfig::omega);
        real("nu", &RunConfig::nu);
        real("g", &RunConfig::g);
        real("beta", &RunConfig::beta);
        real("kappa", &RunConfig::kappa);
        real("Gamma", &RunConfig::Gamma);
        real("gamma", &RunConfig::gamma);
        real("mbar", &RunConfig::mbar);
        integer("n_cav", &RunConfig::n_cav);
        integer("n_mec", &RunConfig::n_mec);
        real("t_start_tau", &RunConfig::t_start_tau);
        t["t_end_tau"] = [](RunConfig& c, std::string_view v, int line) { c.t_end_tau = parse_double(v, line); };
        integer("n_samples", &RunConfig::n_samples);
        real("alpha_re", &RunConfig::alpha_re);
        real("alpha_im", &RunConfig::alpha_im);
        real("initial_mbar", &RunConfig::initial_mbar);
        list("snapshot_times_tau", &RunConfig::snapshot_times_tau);
        t["wigner_x_min"] = [](RunConfig& c, std::string_view v, int l) { c.wigner_grid.x_min = parse_double(v, l); };
        t["wigner_x_max"] = [](RunConfig& c, std::string_view v, int l) { c.wigner_grid.x_max = parse_double(v, l); };
        t["wigner_p_min"] = [](RunConfig& c, std::string_view v, int l) { c.wigner_grid.p_min = parse_double(v, l); };
        t["wigner_p_max"] = [](RunConfig& c, std::string_view v, int l) { c.wigner_grid.p_max = parse_double(v, l); };
        t["wigner_n_x"] = [](RunConfig& c, std::string_view v, int l) { c.wigner_grid.n_x = parse_int(v, l); };
        t["wigner_n_p"] = [](RunConfig& c, std::string_view v, int l) { c.wigner_grid.n_p = parse_int(v, l); };
        list("beta_values", &RunConfig::beta_values);
        list("alpha_values", &RunConfig::alpha_values);
        list("mbar_values", &RunConfig::mbar_values);
        t["f_reference"] = [](RunConfig& c, std::string_view v, int line) {
            c.f_reference = parse_enum<FReference>(v, line,
                                                   {{"matched", FReference::Matched},
                                                    {"undamped", FReference::Undamped}});
        };
        integer("f_n_angles", &RunConfig::f_n_angles);
        real("f_t_max_tau", &RunConfig::f_t_max_tau);
        integer("f_n_samples", &RunConfig::f_n_samples);
        t["regime"] = [](RunConfig& c, std::string_view v, int line) {
            c.regime = parse_enum<LimitsRegime>(v, line,
                                                {{"slow-rabi", LimitsRegime::SlowRabi},
                                                 {"small-beta", LimitsRegime::SmallBeta}});
        };
        t["method"] = [](RunConfig& c, std::string_view v, int line) {
            c.method = parse_enum<LindbladMethod>(v, line,
                                                  {{"auto", LindbladMethod::Auto},
                                                   {"spectral", LindbladMethod::Spectral},
                                                   {"krylov", LindbladMethod::Krylov},
                                                   {"adaptive", LindbladMethod::Adaptive}});
        };
        flag("convergence_check", &RunConfig::convergence_check);
        flag("allow_nonconverged", &RunConfig::allow_nonconverged);
        flag("deterministic", &RunConfig::deterministic);
        t["out_dir"] = [](RunConfig& c, std::string_view v, int line) {
            v = trim(v);
            if (v.empty())
                throw ConfigError("out_dir must not be empty", line);
            c.out_dir = std::string(v);
        };
        return t;
    }();
    return table;
}

// Validation with the line of the responsible key when it is known.
void validate_with_lines(const RunConfig& c, const std::map<std::string, int, std::less<>>& lines) {
    auto line_of = [&lines](std::string_view key) {
        auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    auto fail = [&](std::string_view key, const std::string& what) {
        throw ConfigError(std::string(key) + ": " + what, line_of(key));
    };
    auto non_negative = [&](std::string_view key, double v) {
        if (v < 0.0)
            fail(key, "must be >= 0");
    };
    non_negative("omega", c.omega);
    non_negative("g", c.g);
    non_negative("beta", c.beta);
    non_negative("kappa", c.kappa);
    non_negative("Gamma", c.Gamma);
    non_negative("gamma", c.gamma);
    non_negative("mbar", c.mbar);
    non_negative("initial_mbar", c.initial_mbar);
    non_negative("t_start_tau", c.t_start_tau);
    if (c.nu <= 0.0)
        fail("nu", "must be > 0");
    if (c.n_cav < 2)
        fail("n_cav", "must be >= 2");
    if (c.n_mec < 2)
        fail("n_mec", "must be >= 2");
    if (c.n_samples < 2)
        fail("n_samples", "must be >= 2");
    if (c.t_end_tau && !(*c.t_end_tau > c.t_start_tau))
        fail("t_end_tau", "must exceed t_start_tau");
    for (double t : c.snapshot_times_tau)
        if (t < 0.0)
            fail("snapshot_times_tau", "times must be >= 0");
    try {
        c.wigner_grid.validate();
    } catch (const std::invalid_argument& e) {
        fail(lines.count("wigner_n_x") ? "wigner_n_x" : "wigner_x_min", e.what());
    }
    if (!c.deterministic)
        fail("deterministic", "only deterministic runs are implemented");

    const bool dissipative = c.kappa > 0.0 || c.Gamma > 0.0 || c.gamma > 0.0;
    switch (c.experiment) {
    case Experiment::Evolve:
        if (dissipative)
            fail("experiment", "evolve is unitary; use experiment = master with nonzero rates");
        if (c.initial_mbar > 0.0)
            fail("initial_mbar", "a thermal initial state needs experiment = master");
        break;
    case Experiment::Wigner:
        if (c.snapshot_times_tau.empty())
            fail("snapshot_times_tau", "experiment = wigner needs at least one snapshot time");
        break;
    case Experiment::SweepBeta:
        if (c.beta_values.empty())
            fail("beta_values", "experiment = sweep-beta needs beta_values");
        for (double b : c.beta_values)
            if (b < 0.0)
                fail("beta_values", "values must be >= 0");
        break;
    case Experiment::ScanInitial:
        if (c.alpha_values.empty())
            fail("alpha_values", "experiment = scan-initial needs alpha_values");
        if (c.mbar_values.empty())
            fail("mbar_values", "experiment = scan-initial needs mbar_values");
        for (double a : c.alpha_values)
            if (a < 0.0)
                fail("alpha_values", "values must be >= 0");
        for (double m : c.mbar_values)
            if (m < 0.0)
                fail("mbar_values", "values must be >= 0");
        if (c.f_n_angles < 1)
            fail("f_n_angles", "must be >= 1");
        if (c.f_n_samples < 600)
            fail("f_n_samples", "must be >= 600");
        if (c.f_t_max_tau <= 0.0)
            fail("f_t_max_tau", "must be > 0");
        break;
    case Experiment::Limits:
        if (dissipative)
            fail("experiment", "limits compares closed-system dynamics; rates must be 0");
        break;
    case Experiment::Master: break;
    }
}

} // namespace

void RunConfig::validate() const {
    validate_with_lines(*this, {});
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = setters();
        auto it = table.find(key);
        if (it == table.end())
            throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
        if (auto prev = seen.find(key); prev != seen.end())
            throw ConfigError("duplicate key '" + std::string(key) + "' (first on line " +
                                  std::to_string(prev->second) + ")",
                              line_no);
        seen.emplace(std::string(key), line_no);
        it->second(cfg, value, line_no);
    }
    for (const char* required : {"experiment", "g", "beta"})
        if (!seen.count(required))
            throw ConfigError(std::string("missing required key '") + required + "'");
    validate_with_lines(cfg, seen);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    auto kv = [&out](std::string_view k, const std::string& v) { out << k << " = " << v << '\n'; };
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? ", " : "") + format_double(v[i]);
        return s;
    };
    auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };
    kv("experiment", std::string(to_string(c.experiment)));
    kv("omega", format_double(c.omega));
    kv("nu", format_double(c.nu));
    kv("g", format_double(c.g));
    kv("beta", format_double(c.beta));
    kv("kappa", format_double(c.kappa));
    kv("Gamma", format_double(c.Gamma));
    kv("gamma", format_double(c.gamma));
    kv("mbar", format_double(c.mbar));
    kv("n_cav", std::to_string(c.n_cav));
    kv("n_mec", std::to_string(c.n_mec));
    kv("t_start_tau", format_double(c.t_start_tau));
    if (c.t_end_tau)
        kv("t_end_tau", format_double(*c.t_end_tau));
    kv("n_samples", std::to_string(c.n_samples));
    kv("alpha_re", format_double(c.alpha_re));
    kv("alpha_im", format_double(c.alpha_im));
    kv("initial_mbar", format_double(c.initial_mbar));
    kv("snapshot_times_tau", list(c.snapshot_times_tau));
    kv("wigner_x_min", format_double(c.wigner_grid.x_min));
    kv("wigner_x_max", format_double(c.wigner_grid.x_max));
    kv("wigner_p_min", format_double(c.wigner_grid.p_min));
    kv("wigner_p_max", format_double(c.wigner_grid.p_max));
    kv("wigner_n_x", std::to_string(c.wigner_grid.n_x));
    kv("wigner_n_p", std::to_string(c.wigner_grid.n_p));
    kv("beta_values", list(c.beta_values));
    kv("alpha_values", list(c.alpha_values));
    kv("mbar_values", list(c.mbar_values));
    kv("f_reference", std::string(to_string(c.f_reference)));
    kv("f_n_angles", std::to_string(c.f_n_angles));
    kv("f_t_max_tau", format_double(c.f_t_max_tau));
    kv("f_n_samples", std::to_string(c.f_n_samples));
    kv("regime", std::string(to_string(c.regime)));
    kv("method", std::string(to_string(c.method)));
    kv("convergence_check", boolean(c.convergence_check));
    kv("allow_nonconverged", boolean(c.allow_nonconverged));
    kv("deterministic", boolean(c.deterministic));
    kv("out_dir", c.out_dir);
    return out.str();
}

} // namespace hybridsim
