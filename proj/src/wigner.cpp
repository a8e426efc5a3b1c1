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

#include "hybridsim/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace hybridsim {

void PhaseSpaceGrid::validate() const {
    if (n_x < 8 || n_p < 8)
        throw std::invalid_argument("PhaseSpaceGrid: n_x and n_p must be >= 8");
    if (!(x_max > x_min) || !(p_max > p_min) || !std::isfinite(x_max - x_min) || !std::isfinite(p_max - p_min))
        throw std::invalid_argument("PhaseSpaceGrid: need x_max > x_min and p_max > p_min");
}

double WignerField::normalization() const {
    return values.sum() * grid.cell_area();
}

double WignerField::normalization_error() const {
    return std::abs(normalization() - 1.0);
}

namespace {

void require_mechanics(const DensityOperator& rho) {
    const auto& f = rho.space().factors();
    if (f.size() != 1 || f[0].factor != Factor::Mechanics)
        throw std::invalid_argument("wigner: expected a mechanics-only state, got " + rho.space().describe());
}

// Tr[ρ D Π] = Σ_k (−1)^k Σ_m ρ_km D_mk.
cplx parity_trace(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& d) {
    cplx sum{};
    for (Eigen::Index k = 0; k < rho.rows(); ++k) {
        const cplx row = rho.row(k).transpose().cwiseProduct(d.col(k)).sum();
        sum += (k % 2 == 0) ? row : -row;
    }
    return sum;
}

} // namespace

double wigner_point(const DensityOperator& rho_mec, cplx alpha) {
    require_mechanics(rho_mec);
    const int n = rho_mec.space().dim();
    return 2.0 / std::numbers::pi * parity_trace(rho_mec.matrix(), displacement_matrix(2.0 * alpha, n)).real();
}

QuadratureMoments quadrature_moments(const DensityOperator& rho_mec) {
    require_mechanics(rho_mec);
    const Eigen::MatrixXcd& r = rho_mec.matrix();
    const int n = rho_mec.space().dim();
    cplx b{}, b2{};
    double nb = 0.0;
    // Tr[ρ b] = Σ_m ρ_{m,m−1} √m, Tr[ρ b²] = Σ_m ρ_{m,m−2} √(m(m−1)).
    for (int m = 0; m < n; ++m) {
        nb += m * r(m, m).real();
        if (m >= 1)
            b += r(m, m - 1) * std::sqrt(static_cast<double>(m));
        if (m >= 2)
            b2 += r(m, m - 2) * std::sqrt(static_cast<double>(m) * (m - 1));
    }
    const double s2 = std::sqrt(2.0);
    const double mean_x = s2 * b.real();
    const double mean_p = s2 * b.imag();
    // ⟨x²⟩ = (⟨b²⟩ + ⟨b†²⟩ + 2⟨b†b⟩ + 1)/2, ⟨p²⟩ = (−⟨b²⟩ − ⟨b†²⟩ + 2⟨b†b⟩ + 1)/2
    const double x2 = b2.real() + nb + 0.5;
    const double p2 = -b2.real() + nb + 0.5;
    return {mean_x, mean_p, std::sqrt(std::max(0.0, x2 - mean_x * mean_x)),
            std::sqrt(std::max(0.0, p2 - mean_p * mean_p))};
}

WignerField wigner(const DensityOperator& rho_mec, const PhaseSpaceGrid& grid, int threads,
                   const WarningSink& warn) {
    require_mechanics(rho_mec);
    grid.validate();
    const int n = rho_mec.space().dim();
    const Eigen::MatrixXcd& rho = rho_mec.matrix();

    const QuadratureMoments mom = quadrature_moments(rho_mec);
    if (mom.mean_x - 4 * mom.sd_x < grid.x_min || mom.mean_x + 4 * mom.sd_x > grid.x_max ||
        mom.mean_p - 4 * mom.sd_p < grid.p_min || mom.mean_p + 4 * mom.sd_p > grid.p_max) {
        std::ostringstream msg;
        msg << "wigner: grid window misses mean +- 4 sd (x " << mom.mean_x << " +- " << mom.sd_x << ", p "
            << mom.mean_p << " +- " << mom.sd_p << ")";
        warn({msg.str(), 0.0});
    }

    WignerField field{grid, Eigen::MatrixXd(grid.n_x, grid.n_p), 0.0};
    const int n_threads = std::clamp(threads, 1, grid.n_x);
    std::vector<double> residue(n_threads, 0.0);
    auto work = [&](int tid) {
        for (int i = tid; i < grid.n_x; i += n_threads)
            for (int j = 0; j < grid.n_p; ++j) {
                const cplx alpha = cplx{grid.x(i), grid.p(j)} / std::sqrt(2.0);
                const cplx w = 2.0 / std::numbers::pi * parity_trace(rho, displacement_matrix(2.0 * alpha, n));
                field.values(i, j) = w.real();
                residue[tid] = std::max(residue[tid], std::abs(w.imag()));
            }
    };
    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(work, t);
        for (auto& t : pool)
            t.join();
    }
    field.max_imag_residue = *std::max_element(residue.begin(), residue.end());
    if (field.max_imag_residue > 1e-10) {
        std::ostringstream msg;
        msg << "wigner: imaginary residue " << field.max_imag_residue << " (state not Hermitian?)";
        throw NumericalError(msg.str());
    }
    return field;
}

double negativity_volume(const WignerField& field) {
    return 0.5 * (field.values.cwiseAbs() - field.values).sum() * field.grid.cell_area();
}

std::vector<WignerField> snapshot_series(const std::vector<DensityOperator>& states, const PhaseSpaceGrid& grid,
                                         int threads, const WarningSink& warn) {
    if (states.empty())
        throw std::invalid_argument("snapshot_series: no states");
    std::vector<WignerField> out;
    out.reserve(states.size());
    for (const auto& s : states)
        out.push_back(wigner(s, grid, threads, warn));
    return out;
}

} // namespace hybridsim
