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

// Block-sparse Lindblad propagation.
//
// H conserves N_exc and every jump operator shifts it by a fixed amount, so ρ
// splits into blocks ρ_kl between sectors k, l. Each block obeys
//
//   dρ_kl/dt = −i Heff_k ρ_kl + i ρ_kl Heff_l† + Σ_j rate_j X_j ρ_{k−s,l−s} X_j†
//
// with Heff = H − (i/2) Σ rate X†X. Blocks with k > l are adjoints of stored
// ones and never propagated.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "hybridsim/dynamics.hpp"

namespace hybridsim {

std::string_view to_string(LindbladMethod m) {
    switch (m) {
    case LindbladMethod::Auto: return "auto";
    case LindbladMethod::Spectral: return "spectral";
    case LindbladMethod::Krylov: return "krylov";
    case LindbladMethod::Adaptive: return "adaptive";
    }
    return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Vec = Eigen::VectorXcd;

SpMat sparse_block(const Eigen::MatrixXcd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const cplx v = m(rows[i], cols[j]);
            if (v != cplx{})
                trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
        }
    SpMat s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    s.setFromTriplets(trip.begin(), trip.end());
    return s;
}

// Integer grading q with H block diagonal and each jump shifting q uniformly.
// Returns false when the composite-space excitation number does not qualify.
bool excitation_grading(const LindbladGenerator& gen, std::vector<int>& q, std::vector<int>& shifts) {
    const auto& f = gen.space().factors();
    if (f.size() != 3 || f[0].factor != Factor::Atom || f[1].factor != Factor::Cavity ||
        f[2].factor != Factor::Mechanics)
        return false;
    const int nc = f[1].dim, nm = f[2].dim;
    q.assign(gen.space().dim(), 0);
    for (int a = 0; a < f[0].dim; ++a)
        for (int c = 0; c < nc; ++c)
            for (int m = 0; m < nm; ++m)
                q[(a * nc + c) * nm + m] = a + c;

    const Eigen::MatrixXcd& h = gen.hamiltonian().matrix();
    for (int j = 0; j < h.cols(); ++j)
        for (int i = 0; i < h.rows(); ++i)
            if (h(i, j) != cplx{} && q[i] != q[j])
                return false;
    shifts.clear();
    for (const auto& jump : gen.jumps()) {
        const Eigen::MatrixXcd& x = jump.op.matrix();
        std::optional<int> s;
        for (int j = 0; j < x.cols(); ++j)
            for (int i = 0; i < x.rows(); ++i)
                if (x(i, j) != cplx{}) {
                    if (s && *s != q[i] - q[j])
                        return false;
                    s = q[i] - q[j];
                }
        shifts.push_back(s.value_or(0));
    }
    return true;
}

struct Source {
    double rate;
    const SpMat* x_row; // X restricted to (k, k − s)
    const SpMat* x_col_adj; // (X restricted to (l, l − s))†
    int block;
};

struct Block {
    int k, l;
    Eigen::Index offset, rows, cols;
    std::vector<Source> sources;
};

// Packed representation of the reachable blocks and the linear map on it.
class BlockModel {
  public:
    BlockModel(const LindbladGenerator& gen, const Eigen::MatrixXcd& rho0) : dim_(gen.space().dim()) {
        std::vector<int> q, shifts;
        if (!excitation_grading(gen, q, shifts)) {
            q.assign(dim_, 0);
            shifts.assign(gen.jumps().size(), 0);
            graded_ = false;
        }
        std::map<int, std::vector<int>> by_q;
        for (int i = 0; i < dim_; ++i)
            by_q[q[i]].push_back(i);
        std::map<int, int> sector_of_q;
        for (auto& [value, members] : by_q) {
            sector_of_q[value] = static_cast<int>(members_.size());
            members_.push_back(members);
        }
        const int n_sec = static_cast<int>(members_.size());

        // Effective Hamiltonians per sector.
        Eigen::MatrixXcd heff = gen.hamiltonian().matrix();
        for (const auto& j : gen.jumps())
            heff -= cplx{0.0, 0.5 * j.rate} * (j.op.matrix().adjoint() * j.op.matrix());
        for (int k = 0; k < n_sec; ++k) {
            heff_.push_back(sparse_block(heff, members_[k], members_[k]));
            heff_adj_.push_back(SpMat(heff_.back().adjoint()));
        }

        // Jump restrictions: jump j maps sector k to the sector with q + s_j.
        std::vector<int> q_of_sector;
        for (auto& [value, idx] : sector_of_q)
            q_of_sector.push_back(value);
        jump_target_.assign(gen.jumps().size(), std::vector<int>(n_sec, -1));
        jump_mat_.resize(gen.jumps().size());
        jump_adj_.resize(gen.jumps().size());
        for (std::size_t j = 0; j < gen.jumps().size(); ++j) {
            jump_mat_[j].resize(n_sec);
            jump_adj_[j].resize(n_sec);
            for (int k = 0; k < n_sec; ++k) {
                auto it = sector_of_q.find(q_of_sector[k] + shifts[j]);
                if (it == sector_of_q.end())
                    continue;
                const int t = it->second;
                SpMat x = sparse_block(gen.jumps()[j].op.matrix(), members_[t], members_[k]);
                if (x.nonZeros() == 0)
                    continue;
                jump_target_[j][k] = t;
                jump_mat_[j][k] = x;
                jump_adj_[j][k] = SpMat(x.adjoint());
            }
        }

        // Reachable blocks, stored with k <= l.
        std::set<std::pair<int, int>> active;
        std::vector<std::pair<int, int>> queue;
        for (int k = 0; k < n_sec; ++k)
            for (int l = k; l < n_sec; ++l) {
                bool nonzero = false;
                for (int i : members_[k]) {
                    for (int c : members_[l])
                        if (rho0(i, c) != cplx{}) {
                            nonzero = true;
                            break;
                        }
                    if (nonzero)
                        break;
                }
                if (nonzero && active.insert({k, l}).second)
                    queue.push_back({k, l});
            }
        while (!queue.empty()) {
            auto [k, l] = queue.back();
            queue.pop_back();
            for (std::size_t j = 0; j < gen.jumps().size(); ++j) {
                const int tk = jump_target_[j][k], tl = jump_target_[j][l];
                if (tk < 0 || tl < 0)
                    continue;
                const std::pair<int, int> key{std::min(tk, tl), std::max(tk, tl)};
                if (active.insert(key).second)
                    queue.push_back(key);
            }
        }

        std::map<std::pair<int, int>, int> block_index;
        Eigen::Index offset = 0;
        for (auto [k, l] : active) {
            const auto rows = static_cast<Eigen::Index>(members_[k].size());
            const auto cols = static_cast<Eigen::Index>(members_[l].size());
            block_index[{k, l}] = static_cast<int>(blocks_.size());
            blocks_.push_back({k, l, offset, rows, cols, {}});
            offset += rows * cols;
        }
        packed_ = offset;

        // Sources: block (k, l) receives X ρ_{k',l'} X† from every stored (k', l')
        // mapped onto it by jump j.
        for (auto& [src, src_index] : block_index) {
            for (std::size_t j = 0; j < gen.jumps().size(); ++j) {
                const int tk = jump_target_[j][src.first], tl = jump_target_[j][src.second];
                if (tk < 0 || tl < 0)
                    continue;
                // The target tk <= tl always holds because the shift is uniform.
                Block& b = blocks_[block_index.at({tk, tl})];
                b.sources.push_back({gen.jumps()[j].rate, &jump_mat_[j][src.first],
                                     &jump_adj_[j][src.second], src_index});
            }
        }
    }

    [[nodiscard]] Eigen::Index packed_dim() const { return packed_; }
    [[nodiscard]] bool graded() const { return graded_; }
    [[nodiscard]] std::size_t n_blocks() const { return blocks_.size(); }
    [[nodiscard]] bool block_diagonal() const {
        return std::all_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.k == b.l; });
    }

    Vec pack(const Eigen::MatrixXcd& rho) const {
        Vec y(packed_);
        for (const auto& b : blocks_)
            for (Eigen::Index c = 0; c < b.cols; ++c)
                for (Eigen::Index r = 0; r < b.rows; ++r)
                    y(b.offset + c * b.rows + r) = rho(members_[b.k][r], members_[b.l][c]);
        return y;
    }

    Eigen::MatrixXcd unpack(const Vec& y) const {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (const auto& b : blocks_)
            for (Eigen::Index c = 0; c < b.cols; ++c)
                for (Eigen::Index r = 0; r < b.rows; ++r) {
                    const cplx v = y(b.offset + c * b.rows + r);
                    const int i = members_[b.k][r], j = members_[b.l][c];
                    rho(i, j) = v;
                    if (b.k != b.l)
                        rho(j, i) = std::conj(v);
                }
        return rho;
    }

    void apply(const cplx* y, cplx* dy) const {
        const cplx mi{0.0, -1.0};
        for (const auto& b : blocks_) {
            Eigen::Map<const Eigen::MatrixXcd> rho(y + b.offset, b.rows, b.cols);
            Eigen::Map<Eigen::MatrixXcd> out(dy + b.offset, b.rows, b.cols);
            out.noalias() = mi * (heff_[b.k] * rho);
            out.noalias() -= mi * (rho * heff_adj_[b.l]);
            for (const auto& s : b.sources) {
                const Block& sb = blocks_[s.block];
                Eigen::Map<const Eigen::MatrixXcd> src(y + sb.offset, sb.rows, sb.cols);
                Eigen::MatrixXcd tmp = (*s.x_row) * src;
                out.noalias() += s.rate * (tmp * (*s.x_col_adj));
            }
        }
    }

    Vec apply(const Vec& y) const {
        Vec dy(packed_);
        apply(y.data(), dy.data());
        return dy;
    }

    // Smallest eigenvalue of ρ, using the block structure when possible.
    double min_eigenvalue(const Vec& y) const {
        double lo = std::numeric_limits<double>::infinity();
        if (block_diagonal()) {
            for (const auto& b : blocks_) {
                Eigen::Map<const Eigen::MatrixXcd> rho(y.data() + b.offset, b.rows, b.cols);
                const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
                lo = std::min(lo, es.eigenvalues()(0));
            }
            return lo;
        }
        std::set<int> sectors;
        for (const auto& b : blocks_) {
            sectors.insert(b.k);
            sectors.insert(b.l);
        }
        std::vector<int> idx;
        for (int s : sectors)
            idx.insert(idx.end(), members_[s].begin(), members_[s].end());
        const Eigen::MatrixXcd full = unpack(y);
        Eigen::MatrixXcd sub(idx.size(), idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            for (std::size_t i = 0; i < idx.size(); ++i)
                sub(i, j) = full(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (sub + sub.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }

    double hermiticity_error(const Vec& y) const {
        double err = 0.0;
        for (const auto& b : blocks_) {
            if (b.k != b.l)
                continue;
            Eigen::Map<const Eigen::MatrixXcd> rho(y.data() + b.offset, b.rows, b.cols);
            err = std::max(err, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        }
        return err;
    }

    cplx trace(const Vec& y) const {
        cplx t{};
        for (const auto& b : blocks_)
            if (b.k == b.l)
                for (Eigen::Index r = 0; r < b.rows; ++r)
                    t += y(b.offset + r * b.rows + r);
        return t;
    }

  private:
    int dim_;
    bool graded_{true};
    Eigen::Index packed_{0};
    std::vector<std::vector<int>> members_;
    std::vector<SpMat> heff_, heff_adj_;
    std::vector<std::vector<int>> jump_target_;
    std::vector<std::vector<SpMat>> jump_mat_, jump_adj_;
    std::vector<Block> blocks_;
};

// Propagation y(t0) → y(t1) for t1 >= t0.
using Stepper = std::function<void(Vec&, double, double)>;

Stepper spectral_stepper(const BlockModel& model) {
    const Eigen::Index n = model.packed_dim();
    Eigen::MatrixXcd l(n, n);
    Vec e = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        e(i) = 1.0;
        l.col(i) = model.apply(e);
        e(i) = 0.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l);
    bool usable = es.info() == Eigen::Success;
    Eigen::MatrixXcd v, v_inv;
    Vec lambda;
    if (usable) {
        v = es.eigenvectors();
        lambda = es.eigenvalues();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
        v_inv = lu.inverse();
        const double cond = v.cwiseAbs().colwise().sum().maxCoeff() * v_inv.cwiseAbs().colwise().sum().maxCoeff();
        const double resid = (l * v - v * lambda.asDiagonal()).norm() / std::max(1.0, l.norm());
        usable = std::isfinite(cond) && cond < 1e6 && resid < 1e-12;
    }
    if (usable)
        return [v, v_inv, lambda](Vec& y, double t0, double t1) {
            Vec c = v_inv * y;
            for (Eigen::Index i = 0; i < c.size(); ++i)
                c(i) *= std::exp(lambda(i) * (t1 - t0));
            y = v * c;
        };
    // Defective or ill-conditioned Liouvillian: Padé matrix exponential, cached
    // by step length so uniform grids pay once.
    auto cache = std::make_shared<std::map<double, Eigen::MatrixXcd>>();
    return [l, cache](Vec& y, double t0, double t1) {
        const double dt = t1 - t0;
        if (dt == 0.0)
            return;
        auto it = cache->find(dt);
        if (it == cache->end())
            it = cache->emplace(dt, Eigen::MatrixXcd((l * dt).exp())).first;
        y = it->second * y;
    };
}

// Arnoldi approximation of exp(𝓛 dt) y. The Krylov basis does not depend on
// dt, so a failed error test only shortens the substep.
Stepper krylov_stepper(const BlockModel& model, double tol, int m_max = 40) {
    return [&model, tol, m_max](Vec& y, double t0, double t1) {
        double t = t0;
        std::vector<Vec> basis;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m_max + 1, m_max + 1);
        int guard = 0;
        while (t1 - t > 1e-14 * std::max(1.0, std::abs(t1))) {
            if (++guard > 1000000)
                throw NumericalError("evolve_lindblad: Krylov substep underflow");
            const double beta = y.norm();
            if (beta == 0.0)
                return;
            basis.assign(1, y / beta);
            h.setZero();
            double remaining = t1 - t;
            auto small_exp = [&](int j, double dt) { return Eigen::MatrixXcd((dt * h.topLeftCorner(j, j)).exp()); };
            // Saad's estimate: β |h_{j,j−1}| |[exp(dt H_j)]_{j−1,0}|.
            auto error_of = [&](int j, double dt) {
                const Eigen::MatrixXcd f = small_exp(j, dt);
                return beta * std::abs(h(j, j - 1)) * std::abs(f(j - 1, 0));
            };
            int used = 0;
            double dt = remaining;
            bool done = false;
            for (int j = 0; j < m_max && !done; ++j) {
                Vec w = model.apply(basis[j]);
                for (int i = 0; i <= j; ++i) {
                    h(i, j) = basis[i].dot(w);
                    w -= h(i, j) * basis[i];
                }
                // One reorthogonalization pass keeps the basis clean for long runs.
                for (int i = 0; i <= j; ++i) {
                    const cplx c = basis[i].dot(w);
                    h(i, j) += c;
                    w -= c * basis[i];
                }
                const double hn = w.norm();
                h(j + 1, j) = hn;
                if (hn <= 1e-13 * beta) { // invariant subspace: exact
                    used = j + 1;
                    done = true;
                    break;
                }
                basis.push_back(w / hn);
                if ((j >= 3 && j % 2 == 1) || j == m_max - 1) {
                    if (error_of(j + 1, dt) <= tol * beta) {
                        used = j + 1;
                        done = true;
                    }
                }
            }
            if (!done) {
                used = m_max;
                while (error_of(used, dt) > tol * beta) {
                    dt *= 0.5;
                    if (dt < 1e-12)
                        throw NumericalError("evolve_lindblad: Krylov step size underflow");
                }
                // Try to grow back a little within the accepted basis.
                while (dt * 1.25 <= remaining && error_of(used, dt * 1.25) <= tol * beta)
                    dt *= 1.25;
            }
            const Eigen::MatrixXcd f = small_exp(used, dt);
            Vec next = Vec::Zero(y.size());
            for (int i = 0; i < used; ++i)
                next += (beta * f(i, 0)) * basis[i];
            y = std::move(next);
            t += dt;
        }
    };
}

Stepper adaptive_stepper(const BlockModel& model, double abs_tol, double rel_tol) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cplx>;
    return [&model, abs_tol, rel_tol](Vec& y, double t0, double t1) {
        if (t1 <= t0)
            return;
        State s(y.data(), y.data() + y.size());
        auto rhs = [&model](const State& x, State& dx, double) {
            dx.resize(x.size());
            model.apply(x.data(), dx.data());
        };
        auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
        try {
            odeint::integrate_adaptive(stepper, rhs, s, t0, t1, std::min(1e-2, t1 - t0));
        } catch (const odeint::step_adjustment_error& e) {
            throw NumericalError(std::string("evolve_lindblad: step failure: ") + e.what());
        }
        y = Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size()));
    };
}

} // namespace

EvolutionRecord evolve_lindblad(const LindbladGenerator& gen, const DensityOperator& rho0, const TimeGrid& grid,
                                double tau, const LindbladOptions& opts) {
    grid.validate();
    if (!(rho0.space() == gen.space()))
        throw std::invalid_argument("evolve_lindblad: state space " + rho0.space().describe() +
                                    " differs from generator space " + gen.space().describe());
    if (!rho0.is_valid())
        throw std::invalid_argument("evolve_lindblad: initial state is not a valid density operator");
    if (!(tau > 0.0))
        throw std::invalid_argument("evolve_lindblad: tau must be > 0");

    const BlockModel model(gen, rho0.matrix());
    LindbladMethod method = opts.method;
    if (method == LindbladMethod::Auto)
        method = model.packed_dim() <= opts.spectral_limit ? LindbladMethod::Spectral : LindbladMethod::Krylov;

    Stepper step;
    switch (method) {
    case LindbladMethod::Spectral: step = spectral_stepper(model); break;
    case LindbladMethod::Krylov: step = krylov_stepper(model, opts.abs_tol); break;
    default: step = adaptive_stepper(model, opts.abs_tol, opts.rel_tol); break;
    }

    // Event times: grid samples and snapshots, visited in order from t = 0.
    struct Event {
        double t;
        int sample;   // -1 if snapshot only
        int snapshot; // -1 if sample only
    };
    std::vector<Event> events;
    const auto times = grid.times();
    for (int i = 0; i < static_cast<int>(times.size()); ++i)
        events.push_back({times[i], i, -1});
    for (int i = 0; i < static_cast<int>(opts.snapshot_times_tau.size()); ++i) {
        const double ts = opts.snapshot_times_tau[i];
        if (!(ts >= 0.0))
            throw std::invalid_argument("evolve_lindblad: snapshot times must be >= 0");
        events.push_back({ts, -1, i});
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

    EvolutionRecord rec;
    std::ostringstream label;
    label << to_string(method) << " (" << model.n_blocks() << " blocks, packed dim " << model.packed_dim()
          << (model.graded() ? "" : ", ungraded") << ")";
    rec.diagnostics.method = label.str();
    std::vector<Observables> samples(times.size());
    std::vector<std::optional<DensityOperator>> snaps(opts.snapshot_times_tau.size());

    Vec y = model.pack(rho0.matrix());
    double t_now = 0.0;
    for (const auto& ev : events) {
        step(y, t_now * tau, ev.t * tau);
        t_now = ev.t;

        const double trace_drift = std::abs(model.trace(y) - 1.0);
        const double herm = model.hermiticity_error(y);
        auto& d = rec.diagnostics;
        d.max_trace_drift = std::max(d.max_trace_drift, trace_drift);
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, herm);
        if (opts.check_positivity) {
            const double lo = model.min_eigenvalue(y);
            d.min_eigenvalue = std::min(d.min_eigenvalue, lo);
            if (lo < -1e-6) {
                std::ostringstream msg;
                msg << "evolve_lindblad: positivity violated at t/tau = " << ev.t << " (eigenvalue " << lo << ")";
                throw NumericalError(msg.str());
            }
        }
        if (trace_drift > 1e-7) {
            std::ostringstream msg;
            msg << "evolve_lindblad: trace drift " << trace_drift << " at t/tau = " << ev.t;
            throw NumericalError(msg.str());
        }
        DensityOperator rho(gen.space(), model.unpack(y));
        if (ev.sample >= 0)
            samples[ev.sample] = observables(rho);
        if (ev.snapshot >= 0)
            snaps[ev.snapshot] = std::move(rho);
    }
    for (std::size_t i = 0; i < times.size(); ++i)
        rec.push(times[i], samples[i]);
    for (std::size_t i = 0; i < snaps.size(); ++i)
        rec.snapshots.push_back({opts.snapshot_times_tau[i], std::move(*snaps[i])});
    return rec;
}

EvolutionRecord evolve_lindblad(const SystemParams& p, const DensityOperator& rho0, const TimeGrid& grid,
                                const LindbladOptions& opts) {
    const auto& f = rho0.space().factors();
    if (f.size() != 3 || f[0].factor != Factor::Atom || f[1].factor != Factor::Cavity ||
        f[2].factor != Factor::Mechanics)
        throw std::invalid_argument("evolve_lindblad: expected a composite atom ⊗ cav ⊗ mec state, got " +
                                    rho0.space().describe());
    const TruncationScheme trunc(f[1].dim, f[2].dim);
    return evolve_lindblad(lindblad_generator(p, trunc), rho0, grid, p.tau(), opts);
}

} // namespace hybridsim
