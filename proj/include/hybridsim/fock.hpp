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

// fock.hpp: truncated Fock spaces, basis ordering, elementary operators and
// state factories for the atom ⊗ cavity ⊗ mechanics system.
//
// Basis ordering of the composite space is atom ⊗ cavity ⊗ mechanics with the
// mechanics index running fastest:
//
//     index(|i_atom, i_cav, i_mec>) = ((i_atom * n_cav) + i_cav) * n_mec + i_mec
//
// Atom index 0 is |g>, 1 is |e>. Every file writer follows this ordering.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hybridsim/error.hpp"

namespace hybridsim {

using cplx = std::complex<double>;

inline constexpr int kGround = 0;
inline constexpr int kExcited = 1;

/// Tensor factors a state or operator can live on.
///
/// `Polariton` is the two-level subspace {|g,1>, |e,0>} (index 0 = |g,1>,
/// 1 = |e,0>) and `Dressed` its rotated basis {|+>, |->} with
/// |±> = (|g,1> ± |e,0>)/√2 (index 0 = |+>, 1 = |->).
enum class Factor { Atom, Cavity, Mechanics, Polariton, Dressed };

std::string_view to_string(Factor f);

struct FactorDim {
    Factor factor;
    int dim;

    bool operator==(const FactorDim&) const = default;
};

/// Ordered list of tensor factors; the last factor varies fastest.
class Space {
  public:
    Space() = default;
    Space(std::initializer_list<FactorDim> factors);
    explicit Space(std::vector<FactorDim> factors);

    static Space single(Factor f, int dim) { return Space{{f, dim}}; }
    static Space mechanics(int n_mec) { return single(Factor::Mechanics, n_mec); }

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<FactorDim>& factors() const noexcept { return factors_; }
    [[nodiscard]] std::optional<std::size_t> position(Factor f) const;
    [[nodiscard]] bool has(Factor f) const { return position(f).has_value(); }
    /// Dimension of factor `f`; throws std::invalid_argument when absent.
    [[nodiscard]] int dim_of(Factor f) const;
    [[nodiscard]] std::string describe() const;

    bool operator==(const Space& other) const { return factors_ == other.factors_; }

  private:
    std::vector<FactorDim> factors_;
    int dim_{1};
};

/// Dimensions of the composite atom ⊗ cavity ⊗ mechanics space.
class TruncationScheme {
  public:
    static constexpr int n_atom = 2;

    /// Throws std::invalid_argument unless n_cav >= 2 and n_mec >= 2.
    TruncationScheme(int n_cav, int n_mec);

    [[nodiscard]] int n_cav() const noexcept { return n_cav_; }
    [[nodiscard]] int n_mec() const noexcept { return n_mec_; }
    [[nodiscard]] int dim() const noexcept { return n_atom * n_cav_ * n_mec_; }
    /// Cutoff of a factor of the composite space.
    [[nodiscard]] int cutoff(Factor f) const;
    [[nodiscard]] int index(int atom, int cav, int mec) const {
        return ((atom * n_cav_) + cav) * n_mec_ + mec;
    }
    [[nodiscard]] Space space() const;

    bool operator==(const TruncationScheme&) const = default;

  private:
    int n_cav_;
    int n_mec_;
};

class Ket {
  public:
    Ket(Space space, Eigen::VectorXcd amplitudes);

    [[nodiscard]] const Space& space() const noexcept { return space_; }
    [[nodiscard]] const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] int dim() const noexcept { return space_.dim(); }
    [[nodiscard]] double norm() const { return amplitudes_.norm(); }
    [[nodiscard]] Ket normalized() const;

  private:
    Space space_;
    Eigen::VectorXcd amplitudes_;
};

class DensityOperator {
  public:
    DensityOperator(Space space, Eigen::MatrixXcd matrix);
    static DensityOperator from_ket(const Ket& psi);

    [[nodiscard]] const Space& space() const noexcept { return space_; }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    [[nodiscard]] int dim() const noexcept { return space_.dim(); }

    [[nodiscard]] double trace() const { return matrix_.trace().real(); }
    [[nodiscard]] double purity() const;
    /// max |ρ − ρ†| elementwise.
    [[nodiscard]] double hermiticity_error() const;
    [[nodiscard]] double min_eigenvalue() const;
    /// Hermitian within 1e-10, unit trace within 1e-8, eigenvalues >= -1e-8.
    [[nodiscard]] bool is_valid() const;

  private:
    Space space_;
    Eigen::MatrixXcd matrix_;
};

class OperatorMatrix {
  public:
    OperatorMatrix(Space space, Eigen::MatrixXcd matrix);

    [[nodiscard]] const Space& space() const noexcept { return space_; }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    [[nodiscard]] int dim() const noexcept { return space_.dim(); }
    [[nodiscard]] double hermiticity_error() const;

    [[nodiscard]] OperatorMatrix adjoint() const { return {space_, matrix_.adjoint()}; }
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a) { return {a.space_, s * a.matrix_}; }

  private:
    Space space_;
    Eigen::MatrixXcd matrix_;
};

// ---------------------------------------------------------------------------
// Special functions

/// Generalized Laguerre polynomial L_n^{(a)}(x) by upward recurrence.
double laguerre(int n, double a, double x);

/// ⟨m|D(α)|k⟩ from the closed-form Laguerre expression.
cplx displacement_element(int m, int k, cplx alpha);

/// n×n matrix of ⟨m|D(α)|k⟩, m,k < n.
Eigen::MatrixXcd displacement_matrix(cplx alpha, int n);

// ---------------------------------------------------------------------------
// Elementary single-mode operators (dense n×n)

Eigen::MatrixXcd annihilation_matrix(int n);
Eigen::MatrixXcd number_matrix(int n);

/// Annihilation operator b (or a) as an operator on the factor `f`.
OperatorMatrix annihilation(Factor f, int n);

// ---------------------------------------------------------------------------
// State factories

/// Fock state |m> on factor `f` of the composite space; std::out_of_range if
/// m is outside [0, cutoff).
Ket make_fock(Factor f, int m, const TruncationScheme& trunc);

/// ⟨m|D(α)|k⟩ for m,k < n, returned as an operator on the mechanics factor.
OperatorMatrix displacement_operator(cplx alpha, int n);

/// Poisson weight of |α> above the cutoff n.
double coherent_leakage(cplx alpha, int n);

/// Normalized coherent state |α> truncated at n; warns when the Poisson tail
/// above the cutoff exceeds 1e-8.
Ket coherent_state(cplx alpha, int n, const WarningSink& warn = stderr_warnings());

/// D(α) ρ_th(m̄) D†(α) on n levels, renormalized to unit trace. Warns above
/// 1e-8 leaked weight and throws ConvergenceError above 1e-6.
DensityOperator displaced_thermal(cplx alpha, double mbar, int n,
                                  const WarningSink& warn = stderr_warnings());

/// Number variance m̄(m̄+1) + (2m̄+1)|α|² of a displaced thermal state.
double displaced_thermal_number_variance(cplx alpha, double mbar);

/// Tensor product of kets (spaces concatenated in argument order).
Ket tensor(const Ket& a, const Ket& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Ket |atom, cav> ⊗ |mech> on the composite space.
Ket product_state(int atom, int cav, const Ket& mechanics, const TruncationScheme& trunc);
DensityOperator product_state(int atom, int cav, const DensityOperator& mechanics,
                              const TruncationScheme& trunc);

/// Kronecker-lift an operator on one factor to the composite space.
OperatorMatrix embed(const OperatorMatrix& op, Factor f, const TruncationScheme& trunc);

/// Reduced density operator on the kept factors (in their original order).
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Factor>& keep);

/// Expectation value Tr[ρ X].
cplx expectation(const DensityOperator& rho, const OperatorMatrix& op);
cplx expectation(const Ket& psi, const OperatorMatrix& op);

} // namespace hybridsim
