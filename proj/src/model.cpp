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

#include "hybridsim/model.hpp"

#include <cmath>
#include <string>

namespace hybridsim {

void SystemParams::validate() const {
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(std::string("SystemParams: ") + name + " must be finite and >= 0");
    };
    check(omega, "omega");
    check(g, "g");
    check(chi, "chi");
    check(kappa, "kappa");
    check(Gamma, "Gamma");
    check(gamma, "gamma");
    check(mbar, "mbar");
    if (!std::isfinite(nu) || nu <= 0.0)
        throw std::invalid_argument("SystemParams: nu must be finite and > 0");
}

namespace {

// Adds the optomechanical part ω a†a + ν b†b − χ a†a(b + b†) in place.
void add_h_om(const SystemParams& p, const TruncationScheme& tr, Eigen::MatrixXcd& h) {
    for (int atom = 0; atom < 2; ++atom)
        for (int c = 0; c < tr.n_cav(); ++c)
            for (int m = 0; m < tr.n_mec(); ++m) {
                const int i = tr.index(atom, c, m);
                h(i, i) += p.omega * c + p.nu * m;
                if (m + 1 < tr.n_mec()) {
                    const double off = -p.chi * c * std::sqrt(m + 1.0);
                    h(i, i + 1) += off;
                    h(i + 1, i) += off;
                }
            }
}

} // namespace

OperatorMatrix build_h_om(const SystemParams& p, const TruncationScheme& trunc) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(trunc.dim(), trunc.dim());
    add_h_om(p, trunc, h);
    return {trunc.space(), std::move(h)};
}

OperatorMatrix build_h_total(const SystemParams& p, const TruncationScheme& trunc) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(trunc.dim(), trunc.dim());
    add_h_om(p, trunc, h);
    for (int c = 0; c < trunc.n_cav(); ++c)
        for (int m = 0; m < trunc.n_mec(); ++m) {
            const int e = trunc.index(kExcited, c, m);
            h(e, e) += p.omega;
            // a†|g⟩⟨e| : |e,c⟩ → √(c+1)|g,c+1⟩
            if (c + 1 < trunc.n_cav()) {
                const int gi = trunc.index(kGround, c + 1, m);
                const double amp = p.g * std::sqrt(c + 1.0);
                h(gi, e) += amp;
                h(e, gi) += amp;
            }
        }
    return {trunc.space(), std::move(h)};
}

OperatorMatrix excitation_number(const TruncationScheme& trunc) {
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(trunc.dim(), trunc.dim());
    for (int atom = 0; atom < 2; ++atom)
        for (int c = 0; c < trunc.n_cav(); ++c)
            for (int m = 0; m < trunc.n_mec(); ++m) {
                const int i = trunc.index(atom, c, m);
                n(i, i) = static_cast<double>(c + atom);
            }
    return {trunc.space(), std::move(n)};
}

CompositeOperators composite_operators(const TruncationScheme& trunc) {
    Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(2, 2);
    sm(kGround, kExcited) = 1.0;
    Eigen::MatrixXcd ee = Eigen::MatrixXcd::Zero(2, 2);
    ee(kExcited, kExcited) = 1.0;
    return {
        embed(annihilation(Factor::Cavity, trunc.n_cav()), Factor::Cavity, trunc),
        embed(annihilation(Factor::Mechanics, trunc.n_mec()), Factor::Mechanics, trunc),
        embed(OperatorMatrix(Space::single(Factor::Atom, 2), sm), Factor::Atom, trunc),
        embed(OperatorMatrix(Space::single(Factor::Cavity, trunc.n_cav()), number_matrix(trunc.n_cav())),
              Factor::Cavity, trunc),
        embed(OperatorMatrix(Space::mechanics(trunc.n_mec()), number_matrix(trunc.n_mec())),
              Factor::Mechanics, trunc),
        embed(OperatorMatrix(Space::single(Factor::Atom, 2), ee), Factor::Atom, trunc),
    };
}

PolaronState polaron_state(int n, int m, const SystemParams& p, const TruncationScheme& trunc) {
    if (n < 0 || n >= trunc.n_cav() || m < 0 || m >= trunc.n_mec())
        throw std::out_of_range("polaron_state: (n, m) outside the truncation");
    const Eigen::MatrixXcd d = displacement_matrix(cplx{n * p.beta(), 0.0}, trunc.n_mec());
    const Eigen::VectorXcd column = d.col(m);
    const double leaked = std::max(0.0, 1.0 - column.squaredNorm());
    if (leaked > 1e-6)
        throw ConvergenceError("polaron_state: displaced Fock state exceeds cutoff n_mec=" +
                                   std::to_string(trunc.n_mec()),
                               leaked);
    Ket mech(Space::mechanics(trunc.n_mec()), column / column.norm());
    const double energy = p.omega * n + p.nu * m - p.chi * p.chi * n * n / p.nu;
    return {product_state(kGround, n, mech, trunc), energy};
}

cplx optomech_trajectory(int n, double t, const SystemParams& p) {
    return n * p.beta() * (1.0 - std::exp(cplx{0.0, -p.nu * t}));
}

double max_displacement(int n, const SystemParams& p) {
    return 4.0 * n * p.beta();
}

double f_factor(int m, double beta) {
    if (m < 0)
        throw std::invalid_argument("f_factor: m must be >= 0");
    return -beta / (m + 1.0) * std::exp(-0.5 * beta * beta) * laguerre(m, 1.0, beta * beta);
}

OperatorMatrix build_h_rwa(const SystemParams& p, const TruncationScheme& trunc) {
    const int n = trunc.n_mec();
    const double beta = p.beta();
    const Eigen::MatrixXcd b = annihilation_matrix(n);
    const Eigen::MatrixXcd num = number_matrix(n);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, n);
    for (int m = 0; m < n; ++m)
        f(m, m) = f_factor(m, beta);
    const Eigen::MatrixXcd coupling = p.g * f * b * displacement_matrix(cplx{beta, 0.0}, n).adjoint();

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    h.block(0, 0, n, n) = p.nu * num - p.chi * (b + b.adjoint()) + p.omega * id; // |g,1⟩
    h.block(n, n, n, n) = p.nu * num + p.omega * id;                             // |e,0⟩
    h.block(n, 0, n, n) = coupling;                                              // |e,0⟩⟨g,1|
    h.block(0, n, n, n) = coupling.adjoint();
    return {Space{{Factor::Polariton, 2}, {Factor::Mechanics, n}}, std::move(h)};
}

OperatorMatrix build_h_beta(const SystemParams& p, const TruncationScheme& trunc) {
    const int n = trunc.n_mec();
    const Eigen::MatrixXcd b = annihilation_matrix(n);
    const Eigen::MatrixXcd num = number_matrix(n);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    h.block(0, 0, n, n) = p.nu * num + p.g * id;       // |+⟩
    h.block(n, n, n, n) = p.nu * num - p.g * id;       // |−⟩
    h.block(0, n, n, n) = -0.5 * p.beta() * p.nu * b;  // b|+⟩⟨−|
    h.block(n, 0, n, n) = -0.5 * p.beta() * p.nu * b.adjoint();
    return {Space{{Factor::Dressed, 2}, {Factor::Mechanics, n}}, std::move(h)};
}

Ket lift_pair_state(const Ket& psi, const TruncationScheme& trunc) {
    const auto& f = psi.space().factors();
    if (f.size() != 2 || f[0].dim != 2 || !(f[1] == FactorDim{Factor::Mechanics, trunc.n_mec()}) ||
        (f[0].factor != Factor::Polariton && f[0].factor != Factor::Dressed))
        throw std::invalid_argument("lift_pair_state: expected polariton/dressed ⊗ mec(" +
                                    std::to_string(trunc.n_mec()) + "), got " + psi.space().describe());
    const int n = trunc.n_mec();
    Eigen::VectorXcd g1 = psi.amplitudes().head(n);
    Eigen::VectorXcd e0 = psi.amplitudes().tail(n);
    if (f[0].factor == Factor::Dressed) {
        const Eigen::VectorXcd plus = g1, minus = e0;
        g1 = (plus + minus) / std::sqrt(2.0);
        e0 = (plus - minus) / std::sqrt(2.0);
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(trunc.dim());
    v.segment(trunc.index(kGround, 1, 0), n) = g1;
    v.segment(trunc.index(kExcited, 0, 0), n) = e0;
    return {trunc.space(), std::move(v)};
}

} // namespace hybridsim
