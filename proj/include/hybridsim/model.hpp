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

// model.hpp: Hamiltonians of the atom + cavity + movable-mirror system.
//
// Units: ħ = 1, frequencies in units of the mechanical frequency ν, time in
// units of 1/ν unless a name says `_tau` (τ = 2π/ν). Atom and cavity are
// resonant by construction (single `omega`).

#pragma once

#include <numbers>

#include "hybridsim/fock.hpp"

namespace hybridsim {

struct SystemParams {
    double omega{0.0}; // atom/cavity frequency
    double nu{1.0};    // mechanical frequency
    double g{0.0};     // dipole coupling
    double chi{0.0};   // optomechanical coupling
    double kappa{0.0}; // cavity decay
    double Gamma{0.0}; // atomic decay
    double gamma{0.0}; // mechanical decay
    double mbar{0.0};  // thermal phonon occupation of the mechanical bath

    [[nodiscard]] double beta() const { return chi / nu; }
    void set_beta(double b) { chi = b * nu; }
    [[nodiscard]] double tau() const { return 2.0 * std::numbers::pi / nu; }
    /// Atom–cavity detuning 4nβχ at maximal mirror elongation for n photons.
    [[nodiscard]] double effective_detuning(int n) const { return 4.0 * n * beta() * chi; }
    [[nodiscard]] bool dissipative() const { return kappa > 0.0 || Gamma > 0.0 || gamma > 0.0; }

    /// Throws std::invalid_argument on negative or non-finite fields, nu <= 0.
    void validate() const;
};

/// ω a†a + ν b†b − χ a†a (b + b†) on the composite space.
OperatorMatrix build_h_om(const SystemParams& p, const TruncationScheme& trunc);

/// H_om + ω|e⟩⟨e| + g(a†|g⟩⟨e| + a|e⟩⟨g|).
OperatorMatrix build_h_total(const SystemParams& p, const TruncationScheme& trunc);

/// N_exc = a†a + |e⟩⟨e|, conserved by build_h_total.
OperatorMatrix excitation_number(const TruncationScheme& trunc);

/// Composite-space operators used by builders and dissipators.
struct CompositeOperators {
    OperatorMatrix a;       // cavity annihilation
    OperatorMatrix b;       // mechanical annihilation
    OperatorMatrix sigma_m; // |g⟩⟨e|
    OperatorMatrix n_cav;   // a†a
    OperatorMatrix n_mec;   // b†b
    OperatorMatrix excited; // |e⟩⟨e|
};

CompositeOperators composite_operators(const TruncationScheme& trunc);

struct PolaronState {
    Ket state;
    double energy;
};

/// |n⟩ D(nβ)|m⟩_mec (atom in |g⟩) with energy ωn + νm − χ²n²/ν.
/// Throws std::out_of_range for n >= n_cav or m >= n_mec and ConvergenceError
/// when the displaced Fock state leaks more than 1e-6 above the cutoff.
PolaronState polaron_state(int n, int m, const SystemParams& p, const TruncationScheme& trunc);

/// Coherent amplitude nβ(1 − e^{−iνt}) of the mirror driven by n photons.
cplx optomech_trajectory(int n, double t, const SystemParams& p);

/// Maximal ⟨x⟩/ξ = 4nβ, reached at t = π/ν.
double max_displacement(int n, const SystemParams& p);

/// f(m) = −β/(m+1) e^{−β²/2} L_m^{(1)}(β²); f(m)√(m+1) = ⟨m|D(β)|m+1⟩.
double f_factor(int m, double beta);

/// Slow-Rabi effective Hamiltonian on Polariton ⊗ Mechanics (index 0 = |g,1⟩,
/// 1 = |e,0⟩):
///   ν b†b − χ|g,1⟩⟨g,1|(b+b†) + g[f(b†b) b D†(β)|e,0⟩⟨g,1| + H.c.] + ω.
/// The constant ω matches the single-excitation sector of build_h_total.
/// Intended for g ≪ ν, χ; no regime check.
OperatorMatrix build_h_rwa(const SystemParams& p, const TruncationScheme& trunc);

/// Small-β effective Hamiltonian on Dressed ⊗ Mechanics (index 0 = |+⟩, 1 = |−⟩):
///   ν b†b + g(|+⟩⟨+| − |−⟩⟨−|) − (β/2)ν(b|+⟩⟨−| + H.c.).
/// Valid for β ≪ 1 and |2g − ν| ≪ 2g + ν; no regime check.
OperatorMatrix build_h_beta(const SystemParams& p, const TruncationScheme& trunc);

/// Maps a ket on Polariton ⊗ Mechanics or Dressed ⊗ Mechanics into the
/// composite space (requires n_cav >= 2 and a matching n_mec).
Ket lift_pair_state(const Ket& psi, const TruncationScheme& trunc);

} // namespace hybridsim
