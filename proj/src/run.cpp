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
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hybridsim/config.hpp"

namespace hybridsim {

namespace {

namespace fs = std::filesystem;

class Output {
  public:
    Output(fs::path dir, RunSummary& summary) : dir_(std::move(dir)), summary_(summary) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << content;
        out.close();
        if (!out)
            throw std::runtime_error("write failed for " + path.string());
        summary_.files.push_back(name);
    }

  private:
    fs::path dir_;
    RunSummary& summary_;
};

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

std::string timeseries_csv(const EvolutionRecord& r) {
    std::string out = "t_over_tau,P_e,x_over_xi,n_cav,n_mec,purity\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += format_double(r.t_over_tau[i]) + ',' + format_double(r.P_e[i]) + ',' + format_double(r.x_over_xi[i]) +
               ',' + format_double(r.n_cav[i]) + ',' + format_double(r.n_mec[i]) + ',' +
               format_double(r.purity[i]) + '\n';
    }
    return out;
}

std::string wigner_csv(const WignerField& f) {
    std::string out = "x,p,W\n";
    for (int i = 0; i < f.grid.n_x; ++i)
        for (int j = 0; j < f.grid.n_p; ++j)
            out += format_double(f.grid.x(i)) + ',' + format_double(f.grid.p(j)) + ',' +
                   format_double(f.values(i, j)) + '\n';
    return out;
}

struct Meta {
    std::string config;
    std::vector<std::pair<std::string, std::string>> results;

    void add(const std::string& k, const std::string& v) { results.emplace_back(k, v); }
    void add(const std::string& k, double v) { add(k, format_double(v)); }

    [[nodiscard]] std::string text() const {
        std::string out = "# resolved configuration\n" + config + "\n# results\n";
        for (const auto& [k, v] : results)
            out += k + " = " + v + '\n';
        return out;
    }
};

// Initial state |e,0⟩ ⊗ D(α) thermal(m̄₀) D†(α).
DensityOperator initial_density(const RunConfig& c, const TruncationScheme& trunc) {
    const cplx alpha{c.alpha_re, c.alpha_im};
    return product_state(kExcited, 0, displaced_thermal(alpha, c.initial_mbar, trunc.n_mec()), trunc);
}

Ket initial_ket(const RunConfig& c, const TruncationScheme& trunc) {
    return product_state(kExcited, 0, coherent_state(cplx{c.alpha_re, c.alpha_im}, trunc.n_mec()), trunc);
}

bool needs_master(const RunConfig& c) {
    return c.experiment == Experiment::Master || c.kappa > 0.0 || c.Gamma > 0.0 || c.gamma > 0.0 ||
           c.initial_mbar > 0.0;
}

EvolutionRecord evolve_once(const RunConfig& c, int n_mec, const std::vector<double>& snapshots) {
    const SystemParams p = c.system();
    const TruncationScheme trunc(c.n_cav, n_mec);
    const TimeGrid grid = c.time_grid();
    if (needs_master(c)) {
        LindbladOptions o;
        o.method = c.method;
        o.snapshot_times_tau = snapshots;
        return evolve_lindblad(p, initial_density(c, trunc), grid, o);
    }
    return evolve_unitary(build_h_total(p, trunc), initial_ket(c, trunc), grid, {p.tau(), snapshots});
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void run_evolution(const RunConfig& c, const RunOptions& opts, Output& out, Meta& meta, RunSummary& summary) {
    const EvolutionRecord rec = evolve_once(c, c.n_mec, c.snapshot_times_tau);
    meta.add("method", rec.diagnostics.method);
    if (needs_master(c)) {
        meta.add("max_trace_drift", rec.diagnostics.max_trace_drift);
        meta.add("max_hermiticity_error", rec.diagnostics.max_hermiticity_error);
        meta.add("min_eigenvalue", rec.diagnostics.min_eigenvalue);
    } else {
        meta.add("max_norm_drift", rec.diagnostics.max_norm_drift);
    }

    if (c.convergence_check) {
        const EvolutionRecord doubled = evolve_once(c, 2 * c.n_mec, {});
        const double diff = sup_diff(rec.P_e, doubled.P_e);
        summary.converged = diff < 1e-5;
        meta.add("convergence_check", "n_mec " + std::to_string(c.n_mec) + " vs " + std::to_string(2 * c.n_mec));
        meta.add("convergence_sup_diff_P_e", diff);
        meta.add("converged", summary.converged ? "true" : "false");
        if (!summary.converged && !(opts.allow_nonconverged || c.allow_nonconverged)) {
            out.write("meta.txt", meta.text());
            throw ConvergenceError("truncation not converged: doubling n_mec changes P_e by " + format_double(diff) +
                                       " (>= 1e-5); see meta.txt",
                                   diff);
        }
    } else {
        meta.add("convergence_check", "skipped");
    }

    out.write("timeseries.csv", timeseries_csv(rec));
    for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
        const DensityOperator mec = reduced_mechanics(rec.snapshots[i].state);
        const WignerField f = wigner(mec, c.wigner_grid, opts.threads);
        out.write("wigner_" + std::to_string(i) + ".csv", wigner_csv(f));
        const std::string k = "wigner_" + std::to_string(i);
        meta.add(k + "_t_over_tau", rec.snapshots[i].t_over_tau);
        meta.add(k + "_negativity_volume", negativity_volume(f));
        meta.add(k + "_normalization", f.normalization());
    }
}

void run_sweep_beta(const RunConfig& c, const RunOptions& opts, Output& out, Meta& meta) {
    SweepSpec spec;
    spec.axes = {{SweepParameter::Beta, c.beta_values}};
    spec.base = c.system();
    spec.grid = c.time_grid();
    spec.n_cav = c.n_cav;
    spec.n_mec = c.n_mec;
    spec.lindblad.method = c.method;
    const auto rows = run_sweep(spec, opts.threads);

    std::string table = "beta,status,first_maximum_tau,first_dominant_tau,window_min,n_maxima\n";
    std::string series = "beta,t_over_tau,P_e\n";
    const std::string nan = "nan";
    int failures = 0;
    for (const auto& row : rows) {
        const std::string beta = format_double(row.coords[0]);
        if (row.status != "ok")
            ++failures;
        std::string first = nan, dominant = nan, wmin = nan, count = "0";
        if (row.revivals) {
            const auto& r = *row.revivals;
            if (!r.maxima_tau.empty())
                first = format_double(r.maxima_tau.front());
            if (!r.dominant_tau.empty())
                dominant = format_double(r.dominant_tau.front());
            if (!std::isnan(r.window_min))
                wmin = format_double(r.window_min);
            count = std::to_string(r.maxima_tau.size());
        }
        table += beta + ',' + csv_safe(row.status) + ',' + first + ',' + dominant + ',' + wmin + ',' + count + '\n';
        if (row.record)
            for (std::size_t i = 0; i < row.record->size(); ++i)
                series += beta + ',' + format_double(row.record->t_over_tau[i]) + ',' +
                          format_double(row.record->P_e[i]) + '\n';
    }
    out.write("sweep.csv", table);
    out.write("sweep_timeseries.csv", series);
    meta.add("sweep_points", std::to_string(rows.size()));
    meta.add("sweep_failures", std::to_string(failures));
    meta.add("convergence_check", "not performed for sweeps");
}

void run_scan_initial(const RunConfig& c, const RunOptions& opts, Output& out, Meta& meta) {
    SweepSpec spec;
    spec.axes = {{SweepParameter::AlphaMag, c.alpha_values}, {SweepParameter::Mbar, c.mbar_values}};
    spec.base = c.system();
    spec.grid = {0.0, c.f_t_max_tau, c.f_n_samples};
    spec.f_options.n_angles = c.f_n_angles;
    spec.f_options.t_max_tau = c.f_t_max_tau;
    spec.f_options.n_samples = c.f_n_samples;
    spec.f_options.reference = c.f_reference;
    spec.f_options.n_cav = c.n_cav;
    spec.f_options.n_mec = c.n_mec;
    spec.f_options.lindblad.method = c.method;
    const auto rows = run_sweep(spec, opts.threads);

    std::string table = "alpha_mag,mbar,status,F\n";
    int failures = 0;
    for (const auto& row : rows) {
        if (row.status != "ok")
            ++failures;
        table += format_double(row.coords[0]) + ',' + format_double(row.coords[1]) + ',' + csv_safe(row.status) +
                 ',' + (row.F ? format_double(*row.F) : std::string("nan")) + '\n';
    }
    out.write("sweep.csv", table);

    const double m_hi = std::max(2.0, *std::max_element(c.mbar_values.begin(), c.mbar_values.end()));
    std::vector<double> mbars;
    for (int i = 0; i <= 200; ++i)
        mbars.push_back(m_hi * i / 200.0);
    std::string contours = "level,alpha_mag,mbar\n";
    for (double level : {1.0, 2.75, 6.0})
        for (const auto& [a, m] : variance_contour(level, mbars))
            contours += format_double(level) + ',' + format_double(a) + ',' + format_double(m) + '\n';
    out.write("contours.csv", contours);
    meta.add("sweep_points", std::to_string(rows.size()));
    meta.add("sweep_failures", std::to_string(failures));
    meta.add("f_units", "time integral over nu*t");
}

void run_limits(const RunConfig& c, Output& out, Meta& meta) {
    const SystemParams p = c.system();
    const double tau = p.tau();
    double span_tau = c.t_end_tau.value_or(5.0);
    if (!c.t_end_tau) {
        if (c.regime == LimitsRegime::SlowRabi) {
            const double omega = std::abs(rwa_omega(p));
            if (omega > 0.0)
                span_tau = c.t_start_tau + 2.0 * std::numbers::pi / omega / tau;
        } else if (p.beta() > 0.0) {
            span_tau = c.t_start_tau + 4.0 * std::numbers::pi / (p.beta() * p.nu) / tau;
        }
    }
    const TimeGrid grid = c.time_grid(span_tau);
    const TruncationScheme trunc(c.n_cav, c.n_mec);
    const Ket vac(Space::mechanics(c.n_mec), Eigen::VectorXcd::Unit(c.n_mec, 0));
    const EvolutionRecord rec = evolve_unitary(build_h_total(p, trunc), product_state(kExcited, 0, vac, trunc), grid,
                                               {tau, {}});
    std::string csv = "t_over_tau,P_e_exact,P_e_analytic,abs_err\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const double t = rec.t_over_tau[i] * tau;
        const double analytic = c.regime == LimitsRegime::SlowRabi ? rwa_weights(t, p).stay : perturbative_pe(t, p);
        const double err = std::abs(rec.P_e[i] - analytic);
        worst = std::max(worst, err);
        csv += format_double(rec.t_over_tau[i]) + ',' + format_double(rec.P_e[i]) + ',' + format_double(analytic) +
               ',' + format_double(err) + '\n';
    }
    out.write("limits.csv", csv);
    meta.add("regime", std::string(to_string(c.regime)));
    meta.add("t_end_tau", grid.t_end);
    meta.add("max_abs_err", worst);
}

} // namespace

RunSummary run(const RunConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    RunSummary summary;
    Output out(opts.out_dir.value_or(cfg.out_dir), summary);
    Meta meta{serialize_config(cfg), {}};
    switch (cfg.experiment) {
    case Experiment::Evolve:
    case Experiment::Master:
    case Experiment::Wigner: run_evolution(cfg, opts, out, meta, summary); break;
    case Experiment::SweepBeta: run_sweep_beta(cfg, opts, out, meta); break;
    case Experiment::ScanInitial: run_scan_initial(cfg, opts, out, meta); break;
    case Experiment::Limits: run_limits(cfg, out, meta); break;
    }
    out.write("meta.txt", meta.text());
    return summary;
}

} // namespace hybridsim
