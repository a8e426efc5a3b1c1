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

// Shared helpers for the test suites: seeded random generators and small
// independent oracles.

#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "hybridsim/fock.hpp"

namespace hybridsim::testing {

using Gen = std::mt19937;

inline cplx random_complex(Gen& gen, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    return {n(gen), n(gen)};
}

inline Eigen::MatrixXcd random_matrix(Gen& gen, int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            m(i, j) = random_complex(gen);
    return m;
}

inline Eigen::MatrixXcd random_hermitian(Gen& gen, int n) {
    const Eigen::MatrixXcd a = random_matrix(gen, n, n);
    return 0.5 * (a + a.adjoint());
}

inline Ket random_ket(Gen& gen, const Space& space) {
    return Ket(space, random_matrix(gen, space.dim(), 1).col(0)).normalized();
}

/// G G† / Tr: full-rank, generically mixed.
inline DensityOperator random_density(Gen& gen, const Space& space, int rank = -1) {
    const int r = rank > 0 ? rank : space.dim();
    const Eigen::MatrixXcd g = random_matrix(gen, space.dim(), r);
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return {space, rho};
}

/// Density matrix supported on the lowest `k` levels of an n-level oscillator.
inline DensityOperator random_low_density(Gen& gen, int n, int k) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    rho.topLeftCorner(k, k) = random_density(gen, Space::mechanics(k)).matrix();
    return {Space::mechanics(n), rho};
}

inline double uniform(Gen& gen, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

/// Normalized Hermite function ψ_m(x) for x = (b + b†)/√2, by recurrence.
inline Eigen::VectorXd hermite_functions(int n, double x) {
    Eigen::VectorXd h(n);
    h(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (n > 1)
        h(1) = std::sqrt(2.0) * x * h(0);
    for (int m = 2; m < n; ++m)
        h(m) = std::sqrt(2.0 / m) * x * h(m - 1) - std::sqrt((m - 1.0) / m) * h(m - 2);
    return h;
}

} // namespace hybridsim::testing
