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

// analysis.hpp: limiting-case formulas, revival extraction, the initial-state
// measure F and parameter sweeps.

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hybridsim/dynamics.hpp"
#include "hybridsim/fock.hpp"
#include "hybridsim/model.hpp"

namespace hybridsim {

// ---------------------------------------------------------------------------
// Slow-Rabi limit (g ≪ ν, χ; β ≈ 1), initial state |e,0⟩|0⟩.

struct RwaWeights {
    double stay;     // |e,0⟩ and mechanical vacuum
    double transfer; // |g,1⟩ and D(β)|1⟩
};

/// Ω = 2g f(0).
double rwa_omega(const SystemParams& p);

/// Populations of the two-level slow-Rabi problem with coupling Ω/2 and
/// detuning δ = (β² − 1)ν: transfer = sin²ϑ sin²(W t), W = ½√(Ω² + δ²),
/// tanϑ = Ω/δ. β = 1 gives sin²ϑ = 1 without dividing by δ.
RwaWeights rwa_weights(double t, const SystemParams& p);

struct RwaReducedStates {
    DensityOperator mechanics;   // on Mechanics(n_mec)
    DensityOperator atom_cavity; // on Atom(2) ⊗ Cavity(n_cav)
};

RwaReducedStates rwa_reduced_states(double t, const SystemParams& p, const TruncationScheme& trunc);

// ---------------------------------------------------------------------------
// Small-β limit (β ≪ 1, 2g = ν).

/// ½[1 + cos(βνt/2) cos(νt)].
double perturbative_pe(double t, const SystemParams& p);

/// Series solution of the small-β Hamiltonian for |e,0⟩|0⟩, truncated at
/// m_max and renormalized, mapped back from the displaced frame by D(β/2).
/// Lives on Dressed(2) ⊗ Mechanics(n_mec).
Ket perturbative_state(double t, const SystemParams& p, int m_max, const TruncationScheme& trunc);

// ---------------------------------------------------------------------------
// Revivals

struct RevivalOptions {
    double smoothing_tau{0.05};     // moving-average width in units of τ
    double min_prominence{0.2};     // `dominant` needs this prominence
    double min_height{0.5};         // and this smoothed P_e (more than half returns)
    double window_start_tau{0.3};   // suppression window
    double window_end_tau{1.0};
};

struct RevivalReport {
    std::vector<double> smoothed;         // smoothed P_e on the record grid
    std::vector<double> maxima_tau;       // smoothed local maxima with a full window, t/τ
    std::vector<double> maxima_value;
    std::vector<double> prominence;
    std::vector<double> dominant_tau;     // maxima passing min_prominence and min_height
    std::vector<double> raw_maxima_tau;   // unsmoothed local maxima, for audit
    std::vector<double> T_n;              // maxima times in units of 1/ν
    std::vector<double> m_tilde;          // from T_n = nπ(1 − m̃β²/2)/g; 0 when β = 0
    double window_min{std::numeric_limits<double>::quiet_NaN()};
    std::string diagnostic;               // non-empty when no maxima were found
};

/// Centered moving average; samples near the ends average over the part of
/// the window inside the record.
std::vector<double> moving_average(const std::vector<double>& y, int width);

RevivalReport revival_report(const EvolutionRecord& record, const SystemParams& p,
                             const RevivalOptions& opts = {});

// ---------------------------------------------------------------------------
// Measure F

enum class FReference {
    Matched,  // reference run uses the probe's κ, Γ, γ
    Undamped, // reference run with κ = Γ = γ = 0
};

struct MeasureFOptions {
    int n_angles{8};
    double t_max_tau{1.2};
    int n_samples{601};
    FReference reference{FReference::Matched};
    int n_cav{3};
    int n_mec{45};
    LindbladOptions lindblad{};
};

struct MeasureFResult {
    double F;                      // mean over angles, units of 1/ν
    std::vector<double> per_angle;
    double richardson_delta;       // max |F(h) − F(2h)| over angles
    EvolutionRecord reference;
};

/// ∫ [P_ref − P_probe]² d(νt) over samples with t <= t_max_tau, trapezoid
/// rule using every `stride`-th sample. Throws std::invalid_argument when the
/// records' time grids differ.
double f_integral(const EvolutionRecord& reference, const EvolutionRecord& probe, double t_max_tau,
                  int stride = 1);

/// Initial state |e,0⟩⟨e,0| ⊗ μ_{α,m̄} on the composite space.
DensityOperator displaced_thermal_initial(cplx alpha, double mbar, const TruncationScheme& trunc);

/// F(|α|, m̄) averaged over n_angles equidistant phases of α. Throws
/// ConvergenceError when halving the step moves F by 1e-3 or more.
MeasureFResult measure_f(double alpha_mag, double mbar, const SystemParams& p, const MeasureFOptions& opts = {},
                         const EvolutionRecord* reference = nullptr);

/// Reference run used by measure_f.
EvolutionRecord f_reference_run(const SystemParams& p, const MeasureFOptions& opts);

/// Δm² = m̄(m̄+1) + (2m̄+1)|α|².
double phonon_number_variance(double alpha_mag, double mbar);

/// Points (|α|, m̄) on the curve Δm² = level for the given m̄ values; m̄ with
/// no non-negative |α| are skipped.
std::vector<std::pair<double, double>> variance_contour(double level, const std::vector<double>& mbar_values);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParameter { Beta, AlphaMag, Mbar };

std::string_view to_string(SweepParameter s);
SweepParameter sweep_parameter_from_string(std::string_view s);

struct SweepAxis {
    SweepParameter parameter;
    std::vector<double> values;
};

/// Cartesian product of the axes, first axis slowest. Axes over alpha_mag or
/// mbar make every point an F evaluation; a beta-only sweep records the
/// evolution of |e,0⟩|0⟩ at each point.
struct SweepSpec {
    std::vector<SweepAxis> axes;
    SystemParams base;
    TimeGrid grid{0.0, 5.0, 501};
    int n_cav{3};
    int n_mec{40};
    MeasureFOptions f_options{};
    LindbladOptions lindblad{};
    /// Optional per-point adjustment, called with the point index.
    std::function<void(std::size_t, SystemParams&)> override_point;

    /// Throws std::invalid_argument on empty or non-finite axes.
    void validate() const;
    [[nodiscard]] std::size_t n_points() const;
    [[nodiscard]] std::vector<double> point(std::size_t index) const;
};

struct SweepRow {
    std::vector<double> coords; // one value per axis
    std::string status;         // "ok" or the error message
    std::optional<double> F;
    std::optional<EvolutionRecord> record;
    std::optional<RevivalReport> revivals;
};

/// One row per point in input order; failures are recorded, not thrown.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 1);

} // namespace hybridsim
