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

// wigner.hpp: mechanical Wigner function by displaced parity.
//
// Phase-space points are quadratures (x, p) with α = (x + ip)/√2, so the
// vacuum is W = (2/π) e^{−(x²+p²)} and fields are normalized against the
// α-plane measure d²α = dx dp / 2.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hybridsim/error.hpp"
#include "hybridsim/fock.hpp"

namespace hybridsim {

/// Inclusive uniform grid on [x_min, x_max] × [p_min, p_max].
struct PhaseSpaceGrid {
    double x_min{-5.0};
    double x_max{5.0};
    double p_min{-5.0};
    double p_max{5.0};
    int n_x{101};
    int n_p{101};

    /// Throws std::invalid_argument unless n_x, n_p >= 8 and max > min.
    void validate() const;
    [[nodiscard]] double dx() const { return (x_max - x_min) / (n_x - 1); }
    [[nodiscard]] double dp() const { return (p_max - p_min) / (n_p - 1); }
    [[nodiscard]] double x(int i) const { return x_min + i * dx(); }
    [[nodiscard]] double p(int j) const { return p_min + j * dp(); }
    /// d²α per grid cell.
    [[nodiscard]] double cell_area() const { return 0.5 * dx() * dp(); }

    bool operator==(const PhaseSpaceGrid&) const = default;
};

struct WignerField {
    PhaseSpaceGrid grid;
    Eigen::MatrixXd values;        // values(i, j) = W(x_i, p_j)
    double max_imag_residue{0.0};  // largest discarded imaginary part

    /// Riemann sum Σ W · cell_area; 1 up to windowing and grid error.
    [[nodiscard]] double normalization() const;
    [[nodiscard]] double normalization_error() const;
};

/// (2/π) Tr[ρ D(2α) Π] at a single point, Π = (−1)^{b†b}.
double wigner_point(const DensityOperator& rho_mec, cplx alpha);

struct QuadratureMoments {
    double mean_x, mean_p, sd_x, sd_p;
};

/// ⟨x⟩, ⟨p⟩ and their standard deviations, x = (b + b†)/√2, p = (b − b†)/(i√2).
QuadratureMoments quadrature_moments(const DensityOperator& rho_mec);

/// Field on the grid. Throws std::invalid_argument if ρ is not on a
/// mechanics-only space and NumericalError if the imaginary residue exceeds
/// 1e-10. Warns through `warn` when the grid misses mean ± 4 sd.
WignerField wigner(const DensityOperator& rho_mec, const PhaseSpaceGrid& grid, int threads = 1,
                   const WarningSink& warn = stderr_warnings());

/// Σ (|W| − W)/2 · cell_area.
double negativity_volume(const WignerField& field);

/// wigner() over each state in order. Throws std::invalid_argument when empty.
std::vector<WignerField> snapshot_series(const std::vector<DensityOperator>& states, const PhaseSpaceGrid& grid,
                                         int threads = 1, const WarningSink& warn = stderr_warnings());

} // namespace hybridsim
