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


#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "hybridsim/analysis.hpp"

namespace hybridsim {

std::string_view to_string(SweepParameter s) {
    switch (s) {
    case SweepParameter::Beta: return "beta";
    case SweepParameter::AlphaMag: return "alpha_mag";
    case SweepParameter::Mbar: return "mbar";
    }
    return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view s) {
    if (s == "beta")
        return SweepParameter::Beta;
    if (s == "alpha_mag")
        return SweepParameter::AlphaMag;
    if (s == "mbar")
        return SweepParameter::Mbar;
    throw std::invalid_argument("unknown sweep parameter '" + std::string(s) + "' (beta | alpha_mag | mbar)");
}

void SweepSpec::validate() const {
    if (axes.empty())
        throw std::invalid_argument("SweepSpec: no axes");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].values.empty())
            throw std::invalid_argument("SweepSpec: axis " + std::string(to_string(axes[i].parameter)) + " is empty");
        for (double v : axes[i].values)
            if (!std::isfinite(v))
                throw std::invalid_argument("SweepSpec: non-finite value on axis " +
                                            std::string(to_string(axes[i].parameter)));
        for (std::size_t j = 0; j < i; ++j)
            if (axes[j].parameter == axes[i].parameter)
                throw std::invalid_argument("SweepSpec: duplicate axis " + std::string(to_string(axes[i].parameter)));
    }
    base.validate();
    grid.validate();
}

std::size_t SweepSpec::n_points() const {
    std::size_t n = 1;
    for (const auto& a : axes)
        n *= a.values.size();
    return n;
}

std::vector<double> SweepSpec::point(std::size_t index) const {
    std::vector<double> c(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const std::size_t len = axes[k].values.size();
        c[k] = axes[k].values[index % len];
        index /= len;
    }
    return c;
}

namespace {

using ReferenceCache = std::map<double, EvolutionRecord>; // keyed by β

bool f_mode(const SweepSpec& spec) {
    return std::any_of(spec.axes.begin(), spec.axes.end(),
                       [](const SweepAxis& a) { return a.parameter != SweepParameter::Beta; });
}

SweepRow run_point(const SweepSpec& spec, std::size_t index, const ReferenceCache& refs) {
    SweepRow row;
    row.coords = spec.point(index);
    SystemParams p = spec.base;
    double alpha_mag = 0.0, mbar = 0.0;
    bool f_mode = false;
    for (std::size_t k = 0; k < spec.axes.size(); ++k) {
        switch (spec.axes[k].parameter) {
        case SweepParameter::Beta: p.set_beta(row.coords[k]); break;
        case SweepParameter::AlphaMag: alpha_mag = row.coords[k]; f_mode = true; break;
        case SweepParameter::Mbar: mbar = row.coords[k]; f_mode = true; break;
        }
    }
    if (spec.override_point)
        spec.override_point(index, p);
    try {
        p.validate();
        if (f_mode) {
            auto it = spec.override_point ? refs.end() : refs.find(p.beta());
            const EvolutionRecord* ref = it == refs.end() ? nullptr : &it->second;
            row.F = measure_f(alpha_mag, mbar, p, spec.f_options, ref).F;
        } else {
            const TruncationScheme trunc(spec.n_cav, spec.n_mec);
            const Ket vac(Space::mechanics(spec.n_mec), Eigen::VectorXcd::Unit(spec.n_mec, 0));
            const Ket psi0 = product_state(kExcited, 0, vac, trunc);
            EvolutionRecord rec = p.dissipative()
                                      ? evolve_lindblad(p, DensityOperator::from_ket(psi0), spec.grid, spec.lindblad)
                                      : evolve_unitary(build_h_total(p, trunc), psi0, spec.grid, {p.tau(), {}});
            row.revivals = revival_report(rec, p);
            row.record = std::move(rec);
        }
        row.status = "ok";
    } catch (const std::exception& e) {
        row.status = e.what();
    }
    return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
    spec.validate();
    const std::size_t n = spec.n_points();
    std::vector<SweepRow> rows(n);

    // The F reference run depends only on the system parameters, so share it
    // across points unless a per-point hook may change them.
    ReferenceCache refs;
    if (f_mode(spec) && !spec.override_point) {
        std::vector<double> betas{spec.base.beta()};
        for (const auto& a : spec.axes)
            if (a.parameter == SweepParameter::Beta)
                betas = a.values;
        for (double b : betas) {
            SystemParams p = spec.base;
            p.set_beta(b);
            try {
                refs.emplace(p.beta(), f_reference_run(p, spec.f_options));
            } catch (const std::exception&) {
                // Left out; the affected points recompute and report the error.
            }
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
            rows[i] = run_point(spec, i, refs);
    };
    const int n_threads = static_cast<int>(std::min<std::size_t>(std::max(threads, 1), n));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return rows;
}

} // namespace hybridsim
