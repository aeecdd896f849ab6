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

#include "qtf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtf/error.hpp"

namespace qtf {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::TooManyColumns: return "TooManyColumns";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::InvalidAncillaGram: return "InvalidAncillaGram";
    case ErrorCode::InvalidBlockStructure: return "InvalidBlockStructure";
    case ErrorCode::NotAPurification: return "NotAPurification";
    case ErrorCode::CandidateNotConsistent: return "CandidateNotConsistent";
    case ErrorCode::BlockNotPsd: return "BlockNotPsd";
    case ErrorCode::ZeroOutputOverlapWithNonzeroInput: return "ZeroOutputOverlapWithNonzeroInput";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::DegenerateEta: return "DegenerateEta";
    case ErrorCode::CertificateNotFeasible: return "CertificateNotFeasible";
    case ErrorCode::GramMismatch: return "GramMismatch";
    case ErrorCode::OrthonormalizationFailure: return "OrthonormalizationFailure";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// CMatrix

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::ShapeMismatch, "entry count does not match rows*cols");
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_) {
            throw Error(ErrorCode::ShapeMismatch, "ragged initializer list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::ones(std::size_t rows, std::size_t cols) {
    return CMatrix(rows, cols, std::vector<cplx>(rows * cols, cplx(1.0)));
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
    CMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

CMatrix CMatrix::from_columns(std::span<const CVector> columns, std::size_t dim) {
    CMatrix m(dim, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != dim) {
            throw Error(ErrorCode::DimMismatch, "column has wrong dimension");
        }
        m.set_column(c, columns[c]);
    }
    return m;
}

CMatrix CMatrix::outer(const CVector &v, const CVector &w) {
    CMatrix m(v.size(), w.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
    return m;
}

CVector CMatrix::column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

CVector CMatrix::diagonal_entries() const {
    CVector v(std::min(rows_, cols_));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (*this)(i, i);
    return v;
}

void CMatrix::set_column(std::size_t c, std::span<const cplx> values) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
        throw Error(ErrorCode::ShapeMismatch, "block out of range");
    }
    CMatrix m(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) m(r, c) = (*this)(r0 + r, c0 + c);
    return m;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix &b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) {
        throw Error(ErrorCode::ShapeMismatch, "block out of range");
    }
    for (std::size_t r = 0; r < b.rows_; ++r)
        for (std::size_t c = 0; c < b.cols_; ++c) (*this)(r0 + r, c0 + c) = b(r, c);
}

double CMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (const auto &z : data_) m = std::max(m, std::abs(z));
    return m;
}

cplx CMatrix::trace() const {
    if (!is_square()) throw Error(ErrorCode::NonSquare, "trace of non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

bool CMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double CMatrix::hermitian_defect() const {
    if (!is_square()) throw Error(ErrorCode::NonSquare, "hermitian defect of non-square matrix");
    double d = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r; c < cols_; ++c)
            d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return d;
}

CMatrix CMatrix::hermitian_part() const {
    CMatrix h = *this + adjoint();
    h *= 0.5;
    return h;
}

CMatrix &CMatrix::operator+=(const CMatrix &o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::ShapeMismatch, "matrix sum");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::ShapeMismatch, "matrix difference");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

CMatrix &CMatrix::operator*=(cplx s) {
    for (auto &z : data_) z *= s;
    return *this;
}

CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "matrix product");
    CMatrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
        }
    }
    return m;
}

CVector operator*(const CMatrix &a, const CVector &v) {
    if (a.cols_ != v.size()) throw Error(ErrorCode::ShapeMismatch, "matrix-vector product");
    CVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * v[k];
        out[i] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// vector helpers

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "inner product");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto &z : v) s += std::norm(z);
    return std::sqrt(s);
}

CVector kron(std::span<const cplx> a, std::span<const cplx> b) {
    CVector out;
    out.reserve(a.size() * b.size());
    for (const auto &x : a)
        for (const auto &y : b) out.push_back(x * y);
    return out;
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return m;
}

double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "max_abs_diff");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
    return d;
}

// ---------------------------------------------------------------------------
// eigensolver

namespace {

double offdiag_frobenius(const CMatrix &a) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

// Rotates so that the first component of magnitude > 1e-6 is real positive.
void fix_phase(CMatrix &v, std::size_t col) {
    for (std::size_t r = 0; r < v.rows(); ++r) {
        const double mag = std::abs(v(r, col));
        if (mag > 1e-6) {
            const cplx phase = std::conj(v(r, col)) / mag;
            for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) *= phase;
            v(r, col) = mag;
            return;
        }
    }
}

bool lexicographic_less(const CVector &a, const CVector &b) {
    auto rounded = [](double x) { return std::round(x * 1e8); };
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ar = rounded(a[i].real()), br = rounded(b[i].real());
        if (ar != br) return ar < br;
        const double ai = rounded(a[i].imag()), bi = rounded(b[i].imag());
        if (ai != bi) return ai < bi;
    }
    return false;
}

} // namespace

EigResult hermitian_eig(const CMatrix &m, const Tolerances &tol) {
    if (!m.is_square()) throw Error(ErrorCode::NonSquare, "hermitian_eig needs a square matrix");
    if (!m.all_finite()) throw Error(ErrorCode::NotHermitian, "matrix has non-finite entries");
    const std::size_t n = m.rows();
    const double scale = Tolerances::scale(m.max_abs());
    if (m.hermitian_defect() > tol.hermitian * scale) {
        std::ostringstream os;
        os << "asymmetry " << m.hermitian_defect() << " exceeds " << tol.hermitian * scale;
        throw Error(ErrorCode::NotHermitian, os.str());
    }

    CMatrix a = m.hermitian_part();
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
    CMatrix v = CMatrix::identity(n);

    const double threshold = tol.jacobi_offdiag * scale;
    bool converged = n <= 1 || offdiag_frobenius(a) <= threshold;
    for (int sweep = 0; sweep < tol.jacobi_max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                const cplx phase = apq / mag; // e^{iφ}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]] on (p, q); A ← J† A J, V ← V J.
                const cplx sp = s * phase;
                const cplx sm = s * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sm * akq;
                    a(k, q) = sp * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sp * aqk;
                    a(q, k) = sm * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sm * vkq;
                    v(k, q) = sp * vkp + c * vkq;
                }
            }
        }
        converged = offdiag_frobenius(a) <= threshold;
    }
    if (!converged) {
        throw Error(ErrorCode::NoConvergence, "Jacobi sweep cap reached");
    }

    for (std::size_t c = 0; c < n; ++c) fix_phase(v, c);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<CVector> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = v.column(i);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });
    // Degenerate clusters are ordered by their (rounded) eigenvector entries.
    const double tie = 1e-10 * scale;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && a(order[end], order[end]).real() - a(order[end - 1], order[end - 1]).real() <= tie) ++end;
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t i, std::size_t j) { return lexicographic_less(cols[i], cols[j]); });
        start = end;
    }

    EigResult result;
    result.eigenvalues.resize(n);
    result.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        result.eigenvalues[k] = a(order[k], order[k]).real();
        result.vectors.set_column(k, cols[order[k]]);
    }
    return result;
}

PsdVerdict is_psd(const CMatrix &m, double rel_tol) {
    PsdVerdict verdict;
    verdict.tolerance_used = rel_tol * Tolerances::scale(m.max_abs());
    if (m.rows() == 0) {
        if (!m.is_square()) throw Error(ErrorCode::NonSquare, "is_psd needs a square matrix");
        verdict.is_psd = true;
        return verdict;
    }
    const auto eig = hermitian_eig(m);
    verdict.min_eigenvalue = eig.eigenvalues.front();
    verdict.is_psd = verdict.min_eigenvalue >= -verdict.tolerance_used;
    return verdict;
}

CMatrix hadamard(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "Hadamard product needs equal shapes");
    }
    CMatrix m(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c) * b(r, c);
    return m;
}

CMatrix matrix_sqrt_psd(const CMatrix &m, const Tolerances &tol) {
    const auto eig = hermitian_eig(m, tol);
    const double floor = -tol.psd * Tolerances::scale(m.max_abs());
    const std::size_t n = m.rows();
    CMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = eig.eigenvalues[k];
        if (lambda < floor) {
            std::ostringstream os;
            os << "eigenvalue " << lambda << " below " << floor;
            throw Error(ErrorCode::NotPsd, os.str());
        }
        const double root = std::sqrt(std::max(lambda, 0.0));
        if (root == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r(i, j) += root * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    }
    return r.hermitian_part();
}

std::vector<CVector> factor_gram(const CMatrix &g, const Tolerances &tol) {
    if (!g.is_square()) throw Error(ErrorCode::NonSquare, "Gram matrix must be square");
    const std::size_t n = g.rows();
    if (n == 0) return {};
    const auto eig = hermitian_eig(g, tol);
    const double scale = Tolerances::scale(g.max_abs());
    if (eig.eigenvalues.front() < -tol.psd * scale) {
        std::ostringstream os;
        os << "min eigenvalue " << eig.eigenvalues.front();
        throw Error(ErrorCode::NotPsd, os.str());
    }
    const double cutoff = tol.rank * scale;
    std::vector<std::size_t> kept;
    for (std::size_t k = n; k-- > 0;) {
        if (eig.eigenvalues[k] > cutoff) kept.push_back(k);
    }
    std::vector<CVector> out(n, CVector(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const double root = std::sqrt(eig.eigenvalues[kept[c]]);
        for (std::size_t i = 0; i < n; ++i) out[i][c] = root * std::conj(eig.vectors(i, kept[c]));
    }
    return out;
}

std::vector<double> singular_values(const CMatrix &m) {
    const std::size_t k = std::min(m.rows(), m.cols());
    if (k == 0) return {};
    const auto eig = hermitian_eig((m.adjoint() * m).hermitian_part());
    std::vector<double> s;
    for (std::size_t i = eig.eigenvalues.size(); i-- > 0 && s.size() < k;) {
        s.push_back(std::sqrt(std::max(eig.eigenvalues[i], 0.0)));
    }
    return s;
}

namespace {

// Modified Gram-Schmidt with re-orthogonalization; returns false when `v`
// is numerically inside span(basis).
bool orthonormalize_against(CVector &v, const std::vector<CVector> &basis, double drop) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto &b : basis) {
            const cplx c = inner(b, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
    }
    const double nv = norm(v);
    if (nv < drop) return false;
    for (auto &z : v) z /= nv;
    return true;
}

} // namespace

CMatrix complete_to_unitary(std::span<const CVector> columns, std::size_t dim) {
    if (columns.size() > dim) {
        throw Error(ErrorCode::TooManyColumns, "more columns than the target dimension");
    }
    std::vector<CVector> basis;
    basis.reserve(dim);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].size() != dim) throw Error(ErrorCode::DimMismatch, "column has wrong dimension");
        for (std::size_t j = 0; j <= i; ++j) {
            const cplx expected = i == j ? 1.0 : 0.0;
            if (std::abs(inner(columns[j], columns[i]) - expected) > 1e-8) {
                throw Error(ErrorCode::NotOrthonormal, "supplied columns are not orthonormal");
            }
        }
        basis.push_back(columns[i]);
    }

    constexpr double kDrop = 1e-10;
    std::vector<bool> used(dim, false);
    while (basis.size() < dim) {
        // Pivot: the canonical vector with the largest residual; lowest index wins ties.
        double best_norm = -1.0;
        std::size_t best = dim;
        CVector best_residual;
        for (std::size_t e = 0; e < dim; ++e) {
            if (used[e]) continue;
            CVector r(dim);
            r[e] = 1.0;
            for (const auto &b : basis) {
                const cplx c = std::conj(b[e]);
                for (std::size_t i = 0; i < dim; ++i) r[i] -= c * b[i];
            }
            const double nr = norm(r);
            if (nr > best_norm + 1e-12) {
                best_norm = nr;
                best = e;
                best_residual = std::move(r);
            }
        }
        if (best == dim) {
            throw Error(ErrorCode::OrthonormalizationFailure, "ran out of canonical candidates");
        }
        used[best] = true;
        if (!orthonormalize_against(best_residual, basis, kDrop)) continue;
        basis.push_back(std::move(best_residual));
    }
    return CMatrix::from_columns(basis, dim);
}

std::optional<CMatrix> cholesky(const CMatrix &m) {
    if (!m.is_square()) throw Error(ErrorCode::NonSquare, "cholesky");
    const std::size_t n = m.rows();
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

CVector cholesky_solve(const CMatrix &l, const CVector &b) {
    const std::size_t n = l.rows();
    if (b.size() != n) throw Error(ErrorCode::DimMismatch, "cholesky_solve");
    CVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    CVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = y[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * x[k];
        x[i] = s / l(i, i).real();
    }
    return x;
}

CMatrix cholesky_inverse(const CMatrix &l) {
    const std::size_t n = l.rows();
    CMatrix inv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        CVector e(n);
        e[c] = 1.0;
        inv.set_column(c, cholesky_solve(l, e));
    }
    return inv.hermitian_part();
}

Svd svd(const CMatrix &m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    const auto eig = hermitian_eig((m.adjoint() * m).hermitian_part());
    Svd out;
    out.v = CMatrix(cols, cols);
    for (std::size_t k = 0; k < cols; ++k) out.v.set_column(k, eig.vectors.column(cols - 1 - k));
    const std::size_t kmin = std::min(rows, cols);
    out.s.resize(kmin);
    for (std::size_t k = 0; k < kmin; ++k) out.s[k] = std::sqrt(std::max(eig.eigenvalues[cols - 1 - k], 0.0));

    const double cutoff = 1e-10 * Tolerances::scale(out.s.empty() ? 0.0 : out.s.front());
    std::vector<CVector> left;
    for (std::size_t k = 0; k < kmin; ++k) {
        if (out.s[k] <= cutoff) break;
        CVector u = m * out.v.column(k);
        if (!orthonormalize_against(u, left, 1e-12)) break;
        left.push_back(std::move(u));
    }
    out.u = complete_to_unitary(left, rows);
    return out;
}

CMatrix nearest_isometry(const CMatrix &m) {
    // m = U S V†  ->  U[:, :k] V†
    const auto d = svd(m);
    const std::size_t k = m.cols();
    CMatrix u = d.u.block(0, 0, m.rows(), k);
    return u * d.v.adjoint();
}

CMatrix unitary_exp(const CMatrix &h, double t) {
    const auto eig = hermitian_eig(h);
    const std::size_t n = h.rows();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ph = std::polar(1.0, t * eig.eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) += ph * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    }
    return out;
}

} // namespace qtf
