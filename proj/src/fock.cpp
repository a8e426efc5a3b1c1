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

#include "hybridsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hybridsim {

WarningSink stderr_warnings() {
    return [](const ConvergenceWarning& w) {
        std::cerr << "warning: " << w.message << " (leaked weight " << w.leaked_weight << ")\n";
    };
}

WarningSink ignore_warnings() {
    return [](const ConvergenceWarning&) {};
}

std::string_view to_string(Factor f) {
    switch (f) {
    case Factor::Atom: return "atom";
    case Factor::Cavity: return "cav";
    case Factor::Mechanics: return "mec";
    case Factor::Polariton: return "polariton";
    case Factor::Dressed: return "dressed";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Space

Space::Space(std::initializer_list<FactorDim> factors) : Space(std::vector<FactorDim>(factors)) {}

Space::Space(std::vector<FactorDim> factors) : factors_(std::move(factors)) {
    dim_ = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].dim < 1)
            throw std::invalid_argument("Space: factor dimension must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (factors_[j].factor == factors_[i].factor)
                throw std::invalid_argument("Space: duplicate factor " +
                                            std::string(to_string(factors_[i].factor)));
        dim_ *= factors_[i].dim;
    }
}

std::optional<std::size_t> Space::position(Factor f) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].factor == f)
            return i;
    return std::nullopt;
}

int Space::dim_of(Factor f) const {
    auto pos = position(f);
    if (!pos)
        throw std::invalid_argument("Space " + describe() + " has no factor " +
                                    std::string(to_string(f)));
    return factors_[*pos].dim;
}

std::string Space::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i)
            os << "⊗";
        os << to_string(factors_[i].factor) << "(" << factors_[i].dim << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// TruncationScheme

TruncationScheme::TruncationScheme(int n_cav, int n_mec) : n_cav_(n_cav), n_mec_(n_mec) {
    if (n_cav < 2 || n_mec < 2)
        throw std::invalid_argument("TruncationScheme: n_cav and n_mec must be >= 2");
}

int TruncationScheme::cutoff(Factor f) const {
    switch (f) {
    case Factor::Atom: return n_atom;
    case Factor::Cavity: return n_cav_;
    case Factor::Mechanics: return n_mec_;
    default: throw std::invalid_argument("factor is not part of the composite space");
    }
}

Space TruncationScheme::space() const {
    return Space{{Factor::Atom, n_atom}, {Factor::Cavity, n_cav_}, {Factor::Mechanics, n_mec_}};
}

// ---------------------------------------------------------------------------
// States and operators

Ket::Ket(Space space, Eigen::VectorXcd amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dim())
        throw std::invalid_argument("Ket: amplitude length does not match space " + space_.describe());
}

Ket Ket::normalized() const {
    const double n = norm();
    if (n == 0.0)
        throw std::invalid_argument("Ket: cannot normalize the zero vector");
    return {space_, amplitudes_ / n};
}

DensityOperator::DensityOperator(Space space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim())
        throw std::invalid_argument("DensityOperator: matrix shape does not match space " +
                                    space_.describe());
}

DensityOperator DensityOperator::from_ket(const Ket& psi) {
    return {psi.space(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

double DensityOperator::purity() const {
    // Tr ρ² = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
    return (matrix_.cwiseProduct(matrix_.transpose())).sum().real();
}

double DensityOperator::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
    Eigen::MatrixXcd h = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool DensityOperator::is_valid() const {
    return hermiticity_error() < 1e-10 && std::abs(trace() - 1.0) < 1e-8 && min_eigenvalue() >= -1e-8;
}

OperatorMatrix::OperatorMatrix(Space space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim())
        throw std::invalid_argument("OperatorMatrix: matrix shape does not match space " +
                                    space_.describe());
}

double OperatorMatrix::hermiticity_error() const {
    if (matrix_.size() == 0)
        return 0.0;
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (!(a.space() == b.space()))
        throw std::invalid_argument("operator spaces differ: " + a.space().describe() + " vs " +
                                    b.space().describe());
}

} // namespace

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b);
    return {a.space_, a.matrix_ * b.matrix_};
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b);
    return {a.space_, a.matrix_ + b.matrix_};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b);
    return {a.space_, a.matrix_ - b.matrix_};
}

// ---------------------------------------------------------------------------
// Laguerre polynomials and displacement matrix elements

double laguerre(int n, double a, double x) {
    if (n < 0)
        throw std::invalid_argument("laguerre: negative degree");
    if (n == 0)
        return 1.0;
    double prev = 1.0;
    double cur = 1.0 + a - x;
    for (int j = 1; j < n; ++j) {
        const double next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

// L_j^{(d)}(x) for j = 0..count-1 as mantissa·exp(log_scale); the scale keeps
// the recurrence finite for the large arguments reached by Wigner grids.
struct ScaledLaguerre {
    std::vector<double> mantissa;
    std::vector<double> log_scale;
};

void scaled_laguerre(int count, int d, double x, ScaledLaguerre& out) {
    out.mantissa.resize(count);
    out.log_scale.resize(count);
    if (count == 0)
        return;
    constexpr double kBig = 1e100;
    const double log_big = std::log(kBig);
    double prev = 1.0;
    double cur = 1.0;
    double scale = 0.0;
    out.mantissa[0] = 1.0;
    out.log_scale[0] = 0.0;
    if (count == 1)
        return;
    cur = 1.0 + d - x;
    out.mantissa[1] = cur;
    out.log_scale[1] = 0.0;
    for (int j = 1; j + 1 < count; ++j) {
        const double next = ((2.0 * j + 1.0 + d - x) * cur - (j + d) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
            cur /= kBig;
            prev /= kBig;
            scale += log_big;
        }
        out.mantissa[j + 1] = cur;
        out.log_scale[j + 1] = scale;
    }
}

// Fills (m, m+d) and (m+d, m) for all valid m at a fixed offset d.
template <typename Setter>
void displacement_diagonal(int n, int d, cplx alpha, ScaledLaguerre& buf, Setter&& set) {
    const double r = std::abs(alpha);
    const int count = n - d;
    if (r == 0.0) {
        if (d == 0)
            for (int m = 0; m < n; ++m)
                set(m, m, cplx{1.0, 0.0});
        else
            for (int m = 0; m < count; ++m) {
                set(m, m + d, cplx{});
                set(m + d, m, cplx{});
            }
        return;
    }
    const double x = r * r;
    const double log_r = std::log(r);
    const cplx unit = alpha / r;
    const cplx phase_lower = std::pow(unit, d);              // (α/|α|)^d  for m > k
    const cplx phase_upper = std::pow(-std::conj(unit), d);  // (−α*/|α|)^d for k > m
    scaled_laguerre(count, d, x, buf);
    for (int j = 0; j < count; ++j) {
        // smaller index j, larger index j + d
        const double log_mag = 0.5 * (std::lgamma(j + 1.0) - std::lgamma(j + d + 1.0)) + d * log_r -
                               0.5 * x + buf.log_scale[j];
        const double mag = std::exp(log_mag) * buf.mantissa[j];
        if (d == 0) {
            set(j, j, cplx{mag, 0.0});
        } else {
            set(j, j + d, mag * phase_upper);
            set(j + d, j, mag * phase_lower);
        }
    }
}

} // namespace

cplx displacement_element(int m, int k, cplx alpha) {
    if (m < 0 || k < 0)
        throw std::out_of_range("displacement_element: negative index");
    const int lo = std::min(m, k);
    const int d = std::abs(m - k);
    const double r = std::abs(alpha);
    if (r == 0.0)
        return d == 0 ? cplx{1.0, 0.0} : cplx{};
    const double x = r * r;
    const double lag = laguerre(lo, d, x);
    const double mag =
        std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + d + 1.0)) + d * std::log(r) - 0.5 * x) *
        lag;
    const cplx unit = alpha / r;
    return m >= k ? mag * std::pow(unit, d) : mag * std::pow(-std::conj(unit), d);
}

Eigen::MatrixXcd displacement_matrix(cplx alpha, int n) {
    if (n < 1)
        throw std::invalid_argument("displacement_matrix: cutoff must be positive");
    Eigen::MatrixXcd out(n, n);
    ScaledLaguerre buf;
    for (int d = 0; d < n; ++d)
        displacement_diagonal(n, d, alpha, buf, [&](int i, int j, cplx v) { out(i, j) = v; });
    return out;
}

// ---------------------------------------------------------------------------
// Elementary operators

Eigen::MatrixXcd annihilation_matrix(int n) {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
    for (int m = 1; m < n; ++m)
        b(m - 1, m) = std::sqrt(static_cast<double>(m));
    return b;
}

Eigen::MatrixXcd number_matrix(int n) {
    Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(n, n);
    for (int m = 0; m < n; ++m)
        num(m, m) = static_cast<double>(m);
    return num;
}

OperatorMatrix annihilation(Factor f, int n) {
    return {Space::single(f, n), annihilation_matrix(n)};
}

// ---------------------------------------------------------------------------
// State factories

Ket make_fock(Factor f, int m, const TruncationScheme& trunc) {
    const int n = trunc.cutoff(f);
    if (m < 0 || m >= n)
        throw std::out_of_range("make_fock: level " + std::to_string(m) + " outside [0, " +
                                std::to_string(n) + ") on " + std::string(to_string(f)));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v(m) = 1.0;
    return {Space::single(f, n), std::move(v)};
}

OperatorMatrix displacement_operator(cplx alpha, int n) {
    if (n < 2)
        throw std::invalid_argument("displacement_operator: cutoff must be >= 2");
    return {Space::mechanics(n), displacement_matrix(alpha, n)};
}

double coherent_leakage(cplx alpha, int n) {
    const double x = std::norm(alpha);
    if (x == 0.0)
        return 0.0;
    // 1 − Σ_{m<n} e^{-x} x^m / m!, summed in log space
    double kept = 0.0;
    for (int m = 0; m < n; ++m)
        kept += std::exp(-x + m * std::log(x) - std::lgamma(m + 1.0));
    return std::max(0.0, 1.0 - kept);
}

Ket coherent_state(cplx alpha, int n, const WarningSink& warn) {
    if (n < 2)
        throw std::invalid_argument("coherent_state: cutoff must be >= 2");
    const double leaked = coherent_leakage(alpha, n);
    if (leaked > 1e-8)
        warn({"coherent state |α|=" + std::to_string(std::abs(alpha)) + " exceeds cutoff " +
                  std::to_string(n),
              leaked});
    Eigen::VectorXcd v(n);
    const double x = std::norm(alpha);
    const double r = std::abs(alpha);
    const cplx unit = r > 0.0 ? alpha / r : cplx{1.0, 0.0};
    for (int m = 0; m < n; ++m) {
        if (r == 0.0) {
            v(m) = m == 0 ? 1.0 : 0.0;
            continue;
        }
        const double mag = std::exp(-0.5 * x + m * std::log(r) - 0.5 * std::lgamma(m + 1.0));
        v(m) = mag * std::pow(unit, m);
    }
    v /= v.norm();
    return {Space::mechanics(n), std::move(v)};
}

DensityOperator displaced_thermal(cplx alpha, double mbar, int n, const WarningSink& warn) {
    if (!(mbar >= 0.0) || !std::isfinite(mbar))
        throw std::invalid_argument("displaced_thermal: mbar must be finite and >= 0");
    if (n < 2)
        throw std::invalid_argument("displaced_thermal: cutoff must be >= 2");
    // Built on a padded basis and cropped, so the kept block holds the exact
    // matrix elements and `leaked` is the true weight above the cutoff.
    const int big = std::max(2 * n, n + 40);
    Eigen::VectorXd p(big);
    const double q = mbar / (mbar + 1.0);
    for (int k = 0; k < big; ++k)
        p(k) = (k == 0 ? 1.0 : std::pow(q, k)) / (mbar + 1.0);
    const Eigen::MatrixXcd d = displacement_matrix(alpha, big).topRows(n);
    Eigen::MatrixXcd rho = d * p.asDiagonal() * d.adjoint();
    const double kept = rho.trace().real();
    const double leaked = std::max(0.0, 1.0 - kept);
    if (leaked > 1e-6)
        throw ConvergenceError("displaced_thermal: cutoff " + std::to_string(n) +
                                   " too small for mbar=" + std::to_string(mbar) +
                                   ", |alpha|=" + std::to_string(std::abs(alpha)),
                               leaked);
    if (leaked > 1e-8)
        warn({"displaced thermal state near cutoff " + std::to_string(n), leaked});
    rho /= kept;
    return {Space::mechanics(n), std::move(rho)};
}

double displaced_thermal_number_variance(cplx alpha, double mbar) {
    return mbar * (mbar + 1.0) + (2.0 * mbar + 1.0) * std::norm(alpha);
}

// ---------------------------------------------------------------------------
// Tensor structure

namespace {

Space concat(const Space& a, const Space& b) {
    std::vector<FactorDim> f = a.factors();
    f.insert(f.end(), b.factors().begin(), b.factors().end());
    return Space(std::move(f));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

Ket tensor(const Ket& a, const Ket& b) {
    Eigen::VectorXcd v(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        v.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
    return {concat(a.space(), b.space()), std::move(v)};
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    return {concat(a.space(), b.space()), kron(a.matrix(), b.matrix())};
}

Ket product_state(int atom, int cav, const Ket& mechanics, const TruncationScheme& trunc) {
    if (!(mechanics.space() == Space::mechanics(trunc.n_mec())))
        throw std::invalid_argument("product_state: mechanics ket must live on mec(" +
                                    std::to_string(trunc.n_mec()) + ")");
    if (atom < 0 || atom > 1 || cav < 0 || cav >= trunc.n_cav())
        throw std::out_of_range("product_state: atom/cavity index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(trunc.dim());
    v.segment(trunc.index(atom, cav, 0), trunc.n_mec()) = mechanics.amplitudes();
    return {trunc.space(), std::move(v)};
}

DensityOperator product_state(int atom, int cav, const DensityOperator& mechanics,
                              const TruncationScheme& trunc) {
    if (!(mechanics.space() == Space::mechanics(trunc.n_mec())))
        throw std::invalid_argument("product_state: mechanics state must live on mec(" +
                                    std::to_string(trunc.n_mec()) + ")");
    if (atom < 0 || atom > 1 || cav < 0 || cav >= trunc.n_cav())
        throw std::out_of_range("product_state: atom/cavity index out of range");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(trunc.dim(), trunc.dim());
    const int off = trunc.index(atom, cav, 0);
    rho.block(off, off, trunc.n_mec(), trunc.n_mec()) = mechanics.matrix();
    return {trunc.space(), std::move(rho)};
}

OperatorMatrix embed(const OperatorMatrix& op, Factor f, const TruncationScheme& trunc) {
    const int n = trunc.cutoff(f);
    if (!(op.space() == Space::single(f, n)))
        throw std::invalid_argument("embed: operator lives on " + op.space().describe() +
                                    ", expected " + Space::single(f, n).describe());
    const int before = f == Factor::Atom ? 1 : (f == Factor::Cavity ? 2 : 2 * trunc.n_cav());
    const int after = f == Factor::Mechanics ? 1 : (f == Factor::Cavity ? trunc.n_mec() : trunc.n_cav() * trunc.n_mec());
    Eigen::MatrixXcd m = kron(Eigen::MatrixXcd::Identity(before, before),
                              kron(op.matrix(), Eigen::MatrixXcd::Identity(after, after)));
    return {trunc.space(), std::move(m)};
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Factor>& keep) {
    if (keep.empty())
        throw std::invalid_argument("partial_trace: empty keep set");
    const auto& factors = rho.space().factors();
    std::vector<bool> kept(factors.size(), false);
    for (Factor f : keep) {
        auto pos = rho.space().position(f);
        if (!pos)
            throw std::invalid_argument("partial_trace: state on " + rho.space().describe() +
                                        " has no factor " + std::string(to_string(f)));
        kept[*pos] = true;
    }
    std::vector<FactorDim> kept_factors;
    int dim_kept = 1;
    int dim_traced = 1;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (kept[i]) {
            kept_factors.push_back(factors[i]);
            dim_kept *= factors[i].dim;
        } else {
            dim_traced *= factors[i].dim;
        }
    }
    // Split every composite index into (kept, traced) linear indices.
    const int dim = rho.dim();
    std::vector<int> kept_index(dim);
    std::vector<int> traced_index(dim);
    for (int i = 0; i < dim; ++i) {
        int rem = i;
        int k = 0, t = 0, k_stride = 1, t_stride = 1;
        for (std::size_t f = factors.size(); f-- > 0;) {
            const int digit = rem % factors[f].dim;
            rem /= factors[f].dim;
            if (kept[f]) {
                k += digit * k_stride;
                k_stride *= factors[f].dim;
            } else {
                t += digit * t_stride;
                t_stride *= factors[f].dim;
            }
        }
        kept_index[i] = k;
        traced_index[i] = t;
    }
    std::vector<std::vector<int>> by_traced(dim_traced);
    for (int i = 0; i < dim; ++i)
        by_traced[traced_index[i]].push_back(i);

    Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(dim_kept, dim_kept);
    const Eigen::MatrixXcd& m = rho.matrix();
    for (const auto& group : by_traced)
        for (int i : group)
            for (int j : group)
                red(kept_index[i], kept_index[j]) += m(i, j);
    return {Space(std::move(kept_factors)), std::move(red)};
}

cplx expectation(const DensityOperator& rho, const OperatorMatrix& op) {
    if (!(rho.space() == op.space()))
        throw std::invalid_argument("expectation: state and operator spaces differ");
    return (rho.matrix().cwiseProduct(op.matrix().transpose())).sum();
}

cplx expectation(const Ket& psi, const OperatorMatrix& op) {
    if (!(psi.space() == op.space()))
        throw std::invalid_argument("expectation: state and operator spaces differ");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

} // namespace hybridsim
