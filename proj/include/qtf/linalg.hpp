// Copyright 2026 The qtf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "qtf/config.hpp"

namespace qtf {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Dense complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix ones(std::size_t rows, std::size_t cols);
    static CMatrix diagonal(std::span<const double> diag);
    static CMatrix from_columns(std::span<const CVector> columns, std::size_t dim);
    /// |v⟩⟨w|
    static CMatrix outer(const CVector &v, const CVector &w);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const cplx> entries() const noexcept { return data_; }

    CVector column(std::size_t c) const;
    CVector diagonal_entries() const;
    void set_column(std::size_t c, std::span<const cplx> values);

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const CMatrix &b);

    double max_abs() const noexcept;
    cplx trace() const;
    bool all_finite() const noexcept;
    /// ‖M − M†‖_max
    double hermitian_defect() const;
    /// (M + M†)/2
    CMatrix hermitian_part() const;

    CMatrix &operator+=(const CMatrix &o);
    CMatrix &operator-=(const CMatrix &o);
    CMatrix &operator*=(cplx s);

    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix &a, const CMatrix &b);
    friend CVector operator*(const CMatrix &a, const CVector &v);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// ⟨a|b⟩, antilinear in the first argument.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> v);
CVector kron(std::span<const cplx> a, std::span<const cplx> b);
CMatrix kron(const CMatrix &a, const CMatrix &b);
double max_abs_diff(const CMatrix &a, const CMatrix &b);

struct EigResult {
    std::vector<double> eigenvalues; // ascending
    CMatrix vectors;                 // columns are orthonormal eigenvectors
};

struct PsdVerdict {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
    double tolerance_used = 0.0;
};

/// Cyclic complex Jacobi. Throws NonSquare, NotHermitian, NoConvergence.
EigResult hermitian_eig(const CMatrix &m, const Tolerances &tol = kDefaultTolerances);

/// `rel_tol` is scaled by max(1, ‖M‖_max).
PsdVerdict is_psd(const CMatrix &m, double rel_tol = kDefaultTolerances.psd);

CMatrix hadamard(const CMatrix &a, const CMatrix &b);

/// Principal square root of a PSD matrix; eigenvalues in [−tol, 0) are clipped.
CMatrix matrix_sqrt_psd(const CMatrix &m, const Tolerances &tol = kDefaultTolerances);

/// Vectors v_i with ⟨v_i|v_j⟩ = G_ij, each of dimension rank(G).
/// Coordinates follow the eigenvalues of G in descending order.
std::vector<CVector> factor_gram(const CMatrix &g, const Tolerances &tol = kDefaultTolerances);

/// Singular values, descending, min(rows, cols) of them.
std::vector<double> singular_values(const CMatrix &m);

/// Full SVD M = U diag(s) V† with square unitary U and V.
struct Svd {
    CMatrix u;
    std::vector<double> s;
    CMatrix v;
};
Svd svd(const CMatrix &m);

/// Extends orthonormal columns to a dim×dim unitary. Remaining columns come
/// from canonical basis candidates by pivoted Gram-Schmidt.
CMatrix complete_to_unitary(std::span<const CVector> columns, std::size_t dim);

/// Lower-triangular L with L L† = M, or nullopt when M is not numerically PD.
std::optional<CMatrix> cholesky(const CMatrix &m);
/// Solves L L† x = b.
CVector cholesky_solve(const CMatrix &l, const CVector &b);
/// M⁻¹ from its Cholesky factor.
CMatrix cholesky_inverse(const CMatrix &l);

/// Nearest isometry (polar factor) of a tall full-column-rank matrix.
CMatrix nearest_isometry(const CMatrix &m);

/// exp(i·t·H) for Hermitian H.
CMatrix unitary_exp(const CMatrix &h, double t);

} // namespace qtf
