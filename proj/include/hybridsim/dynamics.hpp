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

// dynamics.hpp: unitary and Lindblad time evolution plus observable
// extraction.
//
// Initial states are given at t = 0. Grid and snapshot times are in units of
// τ = 2π/ν; Hamiltonians are in units of ν.

#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsim/fock.hpp"
#include "hybridsim/model.hpp"

namespace hybridsim {

/// Uniform sampling of [t_start, t_end] (units of τ), endpoints included.
struct TimeGrid {
    double t_start{0.0};
    double t_end{1.0};
    int n_samples{2};

    /// Throws std::invalid_argument unless 0 <= t_start < t_end, n_samples >= 2.
    void validate() const;
    [[nodiscard]] double step() const { return (t_end - t_start) / (n_samples - 1); }
    [[nodiscard]] double at(int i) const { return t_start + i * step(); }
    [[nodiscard]] std::vector<double> times() const;

    bool operator==(const TimeGrid&) const = default;
};

struct Observables {
    double P_e{0.0};       // Tr[|e⟩⟨e| ρ]
    double x_over_xi{0.0}; // ⟨b + b†⟩
    double n_cav{0.0};     // ⟨a†a⟩
    double n_mec{0.0};     // ⟨b†b⟩
    double purity{1.0};    // Tr ρ²
};

/// Observables of a state on the composite space or on Polariton/Dressed ⊗
/// Mechanics (those are interpreted through |g,1⟩, |e,0⟩).
Observables observables(const Ket& psi);
Observables observables(const DensityOperator& rho);

/// Reduced state of the mechanical oscillator.
DensityOperator reduced_mechanics(const Ket& psi);
DensityOperator reduced_mechanics(const DensityOperator& rho);

struct Snapshot {
    double t_over_tau;
    DensityOperator state;
};

struct EvolutionDiagnostics {
    std::string method;
    double max_norm_drift{0.0};        // unitary: max |‖ψ‖ − 1|
    double max_trace_drift{0.0};       // Lindblad: max |Tr ρ − 1|
    double max_hermiticity_error{0.0}; // Lindblad: max |ρ − ρ†|
    double min_eigenvalue{1.0};        // Lindblad: smallest eigenvalue seen
};

struct EvolutionRecord {
    std::vector<double> t_over_tau;
    std::vector<double> P_e;
    std::vector<double> x_over_xi;
    std::vector<double> n_cav;
    std::vector<double> n_mec;
    std::vector<double> purity;
    std::vector<Snapshot> snapshots;
    EvolutionDiagnostics diagnostics;

    [[nodiscard]] std::size_t size() const { return t_over_tau.size(); }
    void push(double t, const Observables& o);
    /// Series by name: "P_e", "x_over_xi", "n_cav", "n_mec", "purity".
    [[nodiscard]] const std::vector<double>& series(std::string_view name) const;
};

struct EvolveOptions {
    double tau{2.0 * std::numbers::pi};
    std::vector<double> snapshot_times_tau;
};

/// e^{−iHt}ψ via the spectral decomposition of H.
class UnitaryPropagator {
  public:
    /// Throws NumericalError if H is not Hermitian within 1e-10.
    explicit UnitaryPropagator(const OperatorMatrix& h);

    [[nodiscard]] Ket evolve(const Ket& psi0, double t) const;
    [[nodiscard]] const Eigen::VectorXd& energies() const noexcept { return energies_; }
    [[nodiscard]] const Eigen::MatrixXcd& eigenvectors() const noexcept { return vectors_; }

  private:
    Space space_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
};

/// Samples e^{−iHt}ψ0 on the grid. Throws NumericalError for non-Hermitian H
/// or norm drift above 1e-8.
EvolutionRecord evolve_unitary(const OperatorMatrix& h, const Ket& psi0, const TimeGrid& grid,
                               const EvolveOptions& opts = {});

/// Dissipation channel contributing (rate/2)·D[op], D[X]ρ = 2XρX† − X†Xρ − ρX†X.
struct JumpOperator {
    std::string label;
    double rate;
    OperatorMatrix op;
};

/// k_B T/ħν = 1/ln(1 + 1/m̄); zero at m̄ = 0.
double thermal_energy_ratio(double mbar);

/// Atomic decay, cavity decay, photon-number dephasing and the coupled
/// mechanical channels b − βa†a, b† − βa†a. Zero-rate channels are omitted.
std::vector<JumpOperator> jump_operators(const SystemParams& p, const TruncationScheme& trunc);

/// 𝓛ρ = −i[H, ρ] + Σ (rate/2) D[X]ρ.
class LindbladGenerator {
  public:
    LindbladGenerator(OperatorMatrix h, std::vector<JumpOperator> jumps);

    [[nodiscard]] const Space& space() const noexcept { return h_.space(); }
    [[nodiscard]] const OperatorMatrix& hamiltonian() const noexcept { return h_; }
    [[nodiscard]] const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }

    /// Dense application, for checks and small problems.
    [[nodiscard]] Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

  private:
    OperatorMatrix h_;
    std::vector<JumpOperator> jumps_;
};

LindbladGenerator lindblad_generator(const SystemParams& p, const TruncationScheme& trunc);

enum class LindbladMethod {
    Auto,     // Spectral when the packed state is small, Krylov otherwise
    Spectral, // diagonalization of the Liouvillian
    Krylov,   // Arnoldi approximation of exp(𝓛t)ρ with adaptive substeps
    Adaptive, // embedded Runge–Kutta (Dormand–Prince 5(4))
};

std::string_view to_string(LindbladMethod m);

struct LindbladOptions {
    LindbladMethod method{LindbladMethod::Auto};
    double abs_tol{1e-12}; // Adaptive: absolute; Krylov: per-substep error relative to ‖ρ‖
    double rel_tol{1e-10}; // Adaptive only
    std::vector<double> snapshot_times_tau;
    bool check_positivity{true};
    /// Largest packed Liouvillian dimension Auto sends to the spectral path.
    int spectral_limit{625};
};

/// Lindblad evolution of ρ0 under build_h_total and jump_operators.
///
/// The state is split into blocks ρ_kl between excitation-number sectors;
/// only blocks reachable from ρ0 through the jump operators are propagated.
/// Generators without that structure fall back to a single block.
/// Throws NumericalError on step failure, trace drift above 1e-7, or an
/// eigenvalue below −1e-6.
EvolutionRecord evolve_lindblad(const SystemParams& p, const DensityOperator& rho0, const TimeGrid& grid,
                                const LindbladOptions& opts = {});

/// Same for an arbitrary generator; `tau` converts grid times to units of 1/ν.
EvolutionRecord evolve_lindblad(const LindbladGenerator& gen, const DensityOperator& rho0,
                                const TimeGrid& grid, double tau, const LindbladOptions& opts = {});

} // namespace hybridsim
