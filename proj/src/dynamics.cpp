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

#include "hybridsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace hybridsim {

void TimeGrid::validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start < 0.0 || !(t_end > t_start))
        throw std::invalid_argument("TimeGrid: need 0 <= t_start < t_end");
    if (n_samples < 2)
        throw std::invalid_argument("TimeGrid: n_samples must be >= 2");
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(n_samples);
    for (int i = 0; i < n_samples; ++i)
        t[i] = at(i);
    t.back() = t_end;
    return t;
}

// ---------------------------------------------------------------------------
// Observables

namespace {

struct PairLayout {
    std::vector<int> atom; // per pair index
    std::vector<int> cav;
    int n_mec;
};

PairLayout pair_layout(const Space& s) {
    const auto& f = s.factors();
    if (f.size() == 3 && f[0].factor == Factor::Atom && f[1].factor == Factor::Cavity &&
        f[2].factor == Factor::Mechanics) {
        PairLayout l{{}, {}, f[2].dim};
        for (int a = 0; a < f[0].dim; ++a)
            for (int c = 0; c < f[1].dim; ++c) {
                l.atom.push_back(a);
                l.cav.push_back(c);
            }
        return l;
    }
    if (f.size() == 2 && f[0].factor == Factor::Polariton && f[1].factor == Factor::Mechanics)
        return {{kGround, kExcited}, {1, 0}, f[1].dim};
    throw std::invalid_argument("observables: unsupported space " + s.describe());
}

// Dressed → Polariton basis change on the pair factor: |±⟩ = (|g,1⟩ ± |e,0⟩)/√2.
Eigen::MatrixXcd dressed_to_polariton(int n_mec) {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n_mec, 2 * n_mec);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n_mec, n_mec);
    u.block(0, 0, n_mec, n_mec) = s * id;
    u.block(0, n_mec, n_mec, n_mec) = s * id;
    u.block(n_mec, 0, n_mec, n_mec) = s * id;
    u.block(n_mec, n_mec, n_mec, n_mec) = -s * id;
    return u;
}

bool is_dressed(const Space& s) {
    return s.factors().size() == 2 && s.factors()[0].factor == Factor::Dressed &&
           s.factors()[1].factor == Factor::Mechanics;
}

Space polariton_space(int n_mec) {
    return Space{{Factor::Polariton, 2}, {Factor::Mechanics, n_mec}};
}

} // namespace

Observables observables(const Ket& psi) {
    if (is_dressed(psi.space())) {
        const int n = psi.space().dim_of(Factor::Mechanics);
        return observables(Ket(polariton_space(n), dressed_to_polariton(n) * psi.amplitudes()));
    }
    const PairLayout l = pair_layout(psi.space());
    const Eigen::VectorXcd& v = psi.amplitudes();
    Observables o;
    cplx b{};
    for (std::size_t j = 0; j < l.atom.size(); ++j)
        for (int m = 0; m < l.n_mec; ++m) {
            const int i = static_cast<int>(j) * l.n_mec + m;
            const double pop = std::norm(v(i));
            if (l.atom[j] == kExcited)
                o.P_e += pop;
            o.n_cav += l.cav[j] * pop;
            o.n_mec += m * pop;
            if (m > 0)
                b += std::conj(v(i - 1)) * v(i) * std::sqrt(static_cast<double>(m));
        }
    o.x_over_xi = 2.0 * b.real();
    const double n2 = v.squaredNorm();
    o.purity = n2 * n2;
    return o;
}

Observables observables(const DensityOperator& rho) {
    if (is_dressed(rho.space())) {
        const int n = rho.space().dim_of(Factor::Mechanics);
        const Eigen::MatrixXcd u = dressed_to_polariton(n);
        return observables(DensityOperator(polariton_space(n), u * rho.matrix() * u.adjoint()));
    }
    const PairLayout l = pair_layout(rho.space());
    const Eigen::MatrixXcd& r = rho.matrix();
    Observables o;
    cplx b{};
    for (std::size_t j = 0; j < l.atom.size(); ++j)
        for (int m = 0; m < l.n_mec; ++m) {
            const int i = static_cast<int>(j) * l.n_mec + m;
            const double pop = r(i, i).real();
            if (l.atom[j] == kExcited)
                o.P_e += pop;
            o.n_cav += l.cav[j] * pop;
            o.n_mec += m * pop;
            if (m > 0)
                b += r(i, i - 1) * std::sqrt(static_cast<double>(m));
        }
    o.x_over_xi = 2.0 * b.real();
    o.purity = rho.purity();
    return o;
}

DensityOperator reduced_mechanics(const Ket& psi) {
    return reduced_mechanics(DensityOperator::from_ket(psi));
}

DensityOperator reduced_mechanics(const DensityOperator& rho) {
    return partial_trace(rho, {Factor::Mechanics});
}

// ---------------------------------------------------------------------------
// EvolutionRecord

void EvolutionRecord::push(double t, const Observables& o) {
    t_over_tau.push_back(t);
    P_e.push_back(o.P_e);
    x_over_xi.push_back(o.x_over_xi);
    n_cav.push_back(o.n_cav);
    n_mec.push_back(o.n_mec);
    purity.push_back(o.purity);
}

const std::vector<double>& EvolutionRecord::series(std::string_view name) const {
    if (name == "P_e")
        return P_e;
    if (name == "x_over_xi")
        return x_over_xi;
    if (name == "n_cav")
        return n_cav;
    if (name == "n_mec")
        return n_mec;
    if (name == "purity")
        return purity;
    throw std::invalid_argument("EvolutionRecord: unknown series " + std::string(name));
}

// ---------------------------------------------------------------------------
// Unitary propagation

UnitaryPropagator::UnitaryPropagator(const OperatorMatrix& h) : space_(h.space()) {
    const double herm = h.hermiticity_error();
    if (herm > 1e-10)
        throw NumericalError("evolve_unitary: Hamiltonian is not Hermitian (max |H - H†| = " +
                             std::to_string(herm) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
    if (es.info() != Eigen::Success)
        throw NumericalError("evolve_unitary: eigendecomposition failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Ket UnitaryPropagator::evolve(const Ket& psi0, double t) const {
    if (!(psi0.space() == space_))
        throw std::invalid_argument("UnitaryPropagator: state space differs from Hamiltonian space");
    Eigen::VectorXcd c = vectors_.adjoint() * psi0.amplitudes();
    for (Eigen::Index k = 0; k < c.size(); ++k)
        c(k) *= std::exp(cplx{0.0, -energies_(k) * t});
    return {space_, vectors_ * c};
}

EvolutionRecord evolve_unitary(const OperatorMatrix& h, const Ket& psi0, const TimeGrid& grid,
                               const EvolveOptions& opts) {
    grid.validate();
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("evolve_unitary: initial state is not normalized");
    const UnitaryPropagator prop(h);
    const Eigen::VectorXcd c0 = prop.eigenvectors().adjoint() * psi0.amplitudes();

    auto state_at = [&](double t_over_tau) {
        const double t = t_over_tau * opts.tau;
        Eigen::VectorXcd c = c0;
        for (Eigen::Index k = 0; k < c.size(); ++k)
            c(k) *= std::exp(cplx{0.0, -prop.energies()(k) * t});
        return Ket(h.space(), prop.eigenvectors() * c);
    };

    EvolutionRecord rec;
    rec.diagnostics.method = "spectral";
    for (double t : grid.times()) {
        const Ket psi = state_at(t);
        const double drift = std::abs(psi.norm() - 1.0);
        rec.diagnostics.max_norm_drift = std::max(rec.diagnostics.max_norm_drift, drift);
        rec.push(t, observables(psi));
    }
    for (double t : opts.snapshot_times_tau)
        rec.snapshots.push_back({t, DensityOperator::from_ket(state_at(t))});
    if (rec.diagnostics.max_norm_drift > 1e-8)
        throw NumericalError("evolve_unitary: norm drift " + std::to_string(rec.diagnostics.max_norm_drift));
    return rec;
}

// ---------------------------------------------------------------------------
// Dissipators

double thermal_energy_ratio(double mbar) {
    if (mbar < 0.0)
        throw std::invalid_argument("thermal_energy_ratio: mbar must be >= 0");
    if (mbar == 0.0)
        return 0.0;
    return 1.0 / std::log1p(1.0 / mbar);
}

std::vector<JumpOperator> jump_operators(const SystemParams& p, const TruncationScheme& trunc) {
    p.validate();
    const CompositeOperators ops = composite_operators(trunc);
    const double beta = p.beta();
    const Eigen::MatrixXcd shift = beta * ops.n_cav.matrix();
    std::vector<JumpOperator> out;
    if (p.Gamma > 0.0)
        out.push_back({"atom_decay", p.Gamma, ops.sigma_m});
    if (p.kappa > 0.0)
        out.push_back({"cavity_decay", p.kappa, ops.a});
    if (p.gamma > 0.0) {
        const double kt = thermal_energy_ratio(p.mbar);
        if (kt > 0.0 && beta != 0.0)
            out.push_back({"photon_dephasing", 8.0 * p.gamma * kt, OperatorMatrix(trunc.space(), shift)});
        if (p.mbar > 0.0)
            out.push_back({"mech_heating", p.gamma * p.mbar,
                           OperatorMatrix(trunc.space(), ops.b.matrix().adjoint() - shift)});
        out.push_back({"mech_damping", p.gamma * (p.mbar + 1.0),
                       OperatorMatrix(trunc.space(), ops.b.matrix() - shift)});
    }
    return out;
}

LindbladGenerator::LindbladGenerator(OperatorMatrix h, std::vector<JumpOperator> jumps)
    : h_(std::move(h)), jumps_(std::move(jumps)) {
    if (h_.hermiticity_error() > 1e-10)
        throw NumericalError("LindbladGenerator: Hamiltonian is not Hermitian");
    for (const auto& j : jumps_) {
        if (!(j.op.space() == h_.space()))
            throw std::invalid_argument("LindbladGenerator: jump operator " + j.label +
                                        " lives on a different space");
        if (!(j.rate >= 0.0))
            throw std::invalid_argument("LindbladGenerator: negative rate for " + j.label);
    }
}

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const {
    const Eigen::MatrixXcd& h = h_.matrix();
    const cplx i{0.0, 1.0};
    Eigen::MatrixXcd out = -i * (h * rho - rho * h);
    for (const auto& j : jumps_) {
        const Eigen::MatrixXcd& x = j.op.matrix();
        const Eigen::MatrixXcd xdx = x.adjoint() * x;
        out += j.rate * (x * rho * x.adjoint()) - 0.5 * j.rate * (xdx * rho + rho * xdx);
    }
    return out;
}

LindbladGenerator lindblad_generator(const SystemParams& p, const TruncationScheme& trunc) {
    return {build_h_total(p, trunc), jump_operators(p, trunc)};
}

} // namespace hybridsim
