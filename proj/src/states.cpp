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

#include "qtf/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtf/error.hpp"

namespace qtf {

PureState::PureState(CVector amplitudes, double tol) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) throw Error(ErrorCode::InvalidState, "empty state vector");
    for (const auto &z : amplitudes_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(ErrorCode::InvalidState, "non-finite amplitude");
        }
    }
    const double n = norm(amplitudes_);
    if (std::abs(n - 1.0) > tol) {
        std::ostringstream os;
        os << "state norm " << n << " differs from 1";
        throw Error(ErrorCode::InvalidState, os.str());
    }
}

PureState PureState::normalized(CVector amplitudes) {
    const double n = norm(amplitudes);
    if (!(n > 0.0)) throw Error(ErrorCode::InvalidState, "cannot normalize the zero vector");
    for (auto &z : amplitudes) z /= n;
    return PureState(std::move(amplitudes));
}

DensityMatrix::DensityMatrix(CMatrix m, double tol) : matrix_(std::move(m)) {
    if (!matrix_.is_square() || matrix_.rows() == 0) {
        throw Error(ErrorCode::InvalidState, "density matrix must be square and non-empty");
    }
    if (!matrix_.all_finite()) throw Error(ErrorCode::InvalidState, "non-finite density matrix entry");
    if (matrix_.hermitian_defect() > tol) throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
    matrix_ = matrix_.hermitian_part();
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > tol) {
        std::ostringstream os;
        os << "density matrix trace " << tr << " differs from 1";
        throw Error(ErrorCode::InvalidState, os.str());
    }
    const auto v = is_psd(matrix_, tol);
    if (!v.is_psd) {
        std::ostringstream os;
        os << "density matrix has eigenvalue " << v.min_eigenvalue;
        throw Error(ErrorCode::InvalidState, os.str());
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState &psi) {
    return DensityMatrix(CMatrix::outer(psi.amplitudes(), psi.amplitudes()));
}

CVector EnsembleMember::scaled() const {
    CVector v = vector.amplitudes();
    const double root = std::sqrt(weight);
    for (auto &z : v) z *= root;
    return v;
}

namespace {

CMatrix ensemble_sum(const std::vector<EnsembleMember> &members, std::size_t dim) {
    CMatrix rho(dim, dim);
    for (const auto &m : members) {
        if (m.vector.dim() != dim) throw Error(ErrorCode::DimMismatch, "ensemble member dimension");
        rho += CMatrix::outer(m.vector.amplitudes(), m.vector.amplitudes()) * m.weight;
    }
    return rho;
}

} // namespace

StateEnsemble::StateEnsemble(std::vector<EnsembleMember> members, DensityMatrix source, double tol)
    : members_(std::move(members)), source_(std::move(source)) {
    if (members_.empty()) throw Error(ErrorCode::EmptySet, "ensemble has no members");
    for (const auto &m : members_) {
        if (!(m.weight > 0.0) || m.weight > 1.0 + tol) {
            throw Error(ErrorCode::InvalidState, "ensemble weights must lie in (0, 1]");
        }
    }
    const CMatrix rho = ensemble_sum(members_, source_.dim());
    if (max_abs_diff(rho, source_.matrix()) > tol) {
        throw Error(ErrorCode::InvalidState, "ensemble does not reconstruct its source state");
    }
}

StateEnsemble StateEnsemble::from_members(std::vector<EnsembleMember> members) {
    if (members.empty()) throw Error(ErrorCode::EmptySet, "ensemble has no members");
    const std::size_t dim = members.front().vector.dim();
    DensityMatrix source(ensemble_sum(members, dim));
    return StateEnsemble(std::move(members), std::move(source));
}

StateEnsemble StateEnsemble::singleton(const PureState &psi) {
    return StateEnsemble({EnsembleMember{1.0, psi}}, DensityMatrix::from_pure(psi));
}

PriorDistribution::PriorDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
    if (p_.empty()) throw Error(ErrorCode::InvalidProbability, "no prior probabilities");
    double sum = 0.0;
    for (double p : p_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidProbability, "negative prior");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "priors sum to " << sum;
        throw Error(ErrorCode::InvalidProbability, os.str());
    }
}

PriorDistribution PriorDistribution::uniform(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidProbability, "no states");
    return PriorDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::size_t GramMatrix::block_offset(std::size_t i) const {
    return std::accumulate(block_row_sizes.begin(), block_row_sizes.begin() + static_cast<std::ptrdiff_t>(i),
                           std::size_t{0});
}

GramMatrix gram_matrix(std::span<const PureState> states) {
    if (states.empty()) throw Error(ErrorCode::EmptySet, "gram_matrix of an empty set");
    const std::size_t n = states.size();
    const std::size_t dim = states.front().dim();
    GramMatrix g{CMatrix(n, n), std::vector<std::size_t>(n, 1)};
    for (std::size_t i = 0; i < n; ++i) {
        if (states[i].dim() != dim) throw Error(ErrorCode::DimMismatch, "states have different dimensions");
        g.matrix(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx v = inner(states[i].amplitudes(), states[j].amplitudes());
            g.matrix(i, j) = v;
            g.matrix(j, i) = std::conj(v);
        }
    }
    return g;
}

StateEnsemble spectral_decompose(const DensityMatrix &rho, const Tolerances &tol) {
    const auto eig = hermitian_eig(rho.matrix(), tol);
    const double cutoff = tol.rank * Tolerances::scale(rho.matrix().max_abs());
    std::vector<EnsembleMember> members;
    for (std::size_t k = eig.eigenvalues.size(); k-- > 0;) {
        if (eig.eigenvalues[k] <= cutoff) continue;
        members.push_back({eig.eigenvalues[k], PureState::normalized(eig.vectors.column(k))});
    }
    return StateEnsemble(std::move(members), rho);
}

GramMatrix block_gram(std::span<const StateEnsemble> ensembles) {
    if (ensembles.empty()) throw Error(ErrorCode::EmptySet, "block_gram of an empty set");
    const std::size_t dim = ensembles.front().dim();
    std::vector<CVector> vecs;
    GramMatrix g;
    for (const auto &e : ensembles) {
        if (e.dim() != dim) throw Error(ErrorCode::DimMismatch, "ensembles have different dimensions");
        g.block_row_sizes.push_back(e.size());
        for (const auto &m : e.members()) vecs.push_back(m.scaled());
    }
    const std::size_t n = vecs.size();
    g.matrix = CMatrix(n, n);
    std::size_t row = 0;
    for (const auto &e : ensembles) {
        for (const auto &m : e.members()) {
            g.matrix(row, row) = m.weight;
            ++row;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx v = inner(vecs[i], vecs[j]);
            g.matrix(i, j) = v;
            g.matrix(j, i) = std::conj(v);
        }
    }
    return g;
}

CMatrix normalized_cross_gram(const StateEnsemble &a, const StateEnsemble &b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "ensembles have different dimensions");
    CMatrix x(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t l = 0; l < b.size(); ++l)
            x(k, l) = inner(a.members()[k].vector.amplitudes(), b.members()[l].vector.amplitudes());
    return x;
}

CMatrix expand_blockwise(const CMatrix &y, std::span<const std::size_t> block_sizes) {
    if (!y.is_square() || y.rows() != block_sizes.size()) {
        throw Error(ErrorCode::ShapeMismatch, "block sizes do not match the Gram matrix");
    }
    const std::size_t n = std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
    CMatrix out(n, n);
    std::size_t r0 = 0;
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        std::size_t c0 = 0;
        for (std::size_t j = 0; j < block_sizes.size(); ++j) {
            for (std::size_t k = 0; k < block_sizes[i]; ++k)
                for (std::size_t l = 0; l < block_sizes[j]; ++l) out(r0 + k, c0 + l) = y(i, j);
            c0 += block_sizes[j];
        }
        r0 += block_sizes[i];
    }
    return out;
}

PureState purify(const DensityMatrix &sigma) {
    const std::size_t d = sigma.dim();
    const auto ens = spectral_decompose(sigma);
    CVector psi(d * d);
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const auto &m = ens.members()[k];
        const double root = std::sqrt(m.weight);
        for (std::size_t s = 0; s < d; ++s) psi[s * d + k] = root * m.vector.amplitudes()[s];
    }
    return PureState::normalized(std::move(psi));
}

std::pair<PureState, PureState> uhlmann_purifications(const DensityMatrix &s1, const DensityMatrix &s2) {
    if (s1.dim() != s2.dim()) throw Error(ErrorCode::DimMismatch, "uhlmann_purifications");
    const std::size_t d = s1.dim();
    const CMatrix r1 = matrix_sqrt_psd(s1.matrix());
    const CMatrix r2 = matrix_sqrt_psd(s2.matrix());
    // ⟨ϕ₁|ϕ₂⟩ = Tr(Mᵀ W) with M = √σ₁√σ₂; W = V U† for Mᵀ = U S V†.
    const auto d_svd = svd((r1 * r2).transpose());
    const CMatrix w = d_svd.v * d_svd.u.adjoint();
    CVector p1(d * d), p2(d * d);
    for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t q = 0; q < d; ++q) {
            p1[s * d + q] = r1(s, q);
            cplx acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += r2(s, j) * w(q, j);
            p2[s * d + q] = acc;
        }
    }
    return {PureState::normalized(std::move(p1)), PureState::normalized(std::move(p2))};
}

CMatrix partial_trace_second(std::span<const cplx> psi, std::size_t d1, std::size_t d2) {
    if (psi.size() != d1 * d2) throw Error(ErrorCode::DimMismatch, "partial trace dimensions");
    CMatrix out(d1, d1);
    for (std::size_t s = 0; s < d1; ++s)
        for (std::size_t t = 0; t < d1; ++t) {
            cplx acc = 0.0;
            for (std::size_t q = 0; q < d2; ++q) acc += psi[s * d2 + q] * std::conj(psi[t * d2 + q]);
            out(s, t) = acc;
        }
    return out;
}

CMatrix partial_trace_second(const CMatrix &rho, std::size_t d1, std::size_t d2) {
    if (rho.rows() != d1 * d2 || !rho.is_square()) throw Error(ErrorCode::DimMismatch, "partial trace dimensions");
    CMatrix out(d1, d1);
    for (std::size_t s = 0; s < d1; ++s)
        for (std::size_t t = 0; t < d1; ++t) {
            cplx acc = 0.0;
            for (std::size_t q = 0; q < d2; ++q) acc += rho(s * d2 + q, t * d2 + q);
            out(s, t) = acc;
        }
    return out;
}

double fidelity(const DensityMatrix &r1, const DensityMatrix &r2) {
    if (r1.dim() != r2.dim()) throw Error(ErrorCode::DimMismatch, "fidelity of states with different dimensions");
    const CMatrix root = matrix_sqrt_psd(r1.matrix());
    const CMatrix m = (root * r2.matrix() * root).hermitian_part();
    const auto eig = hermitian_eig(m);
    double f = 0.0;
    for (double lambda : eig.eigenvalues) {
        if (lambda > 1e-14) f += std::sqrt(lambda);
    }
    return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const CMatrix &a, const CMatrix &b) {
    const auto eig = hermitian_eig((a - b).hermitian_part());
    double s = 0.0;
    for (double lambda : eig.eigenvalues) s += std::abs(lambda);
    return 0.5 * s;
}

std::vector<CVector> support_basis(const CMatrix &m, double rel_cutoff) {
    const auto eig = hermitian_eig(m.hermitian_part());
    const double cutoff = rel_cutoff * Tolerances::scale(m.max_abs());
    std::vector<CVector> basis;
    for (std::size_t k = eig.eigenvalues.size(); k-- > 0;) {
        if (eig.eigenvalues[k] > cutoff) basis.push_back(eig.vectors.column(k));
    }
    return basis;
}

std::size_t numerical_rank(const CMatrix &m, double rel_cutoff) {
    const auto s = singular_values(m);
    if (s.empty()) return 0;
    const double cutoff = rel_cutoff * Tolerances::scale(s.front());
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double x) { return x > cutoff; }));
}

std::vector<CVector> support_intersection_basis(const DensityMatrix &r1, const DensityMatrix &r2) {
    if (r1.dim() != r2.dim()) throw Error(ErrorCode::DimMismatch, "support intersection");
    const auto b1 = support_basis(r1.matrix());
    const auto b2 = support_basis(r2.matrix());
    const std::size_t d = r1.dim();
    if (b1.empty() || b2.empty()) return {};
    // Null space of [B₁, −B₂] gives coefficient pairs (a, b) with B₁a = B₂b.
    CMatrix stacked(d, b1.size() + b2.size());
    for (std::size_t c = 0; c < b1.size(); ++c) stacked.set_column(c, b1[c]);
    for (std::size_t c = 0; c < b2.size(); ++c) {
        CVector v = b2[c];
        for (auto &z : v) z = -z;
        stacked.set_column(b1.size() + c, v);
    }
    const auto eig = hermitian_eig((stacked.adjoint() * stacked).hermitian_part());
    std::vector<CVector> out;
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
        if (eig.eigenvalues[k] > 1e-9) break;
        CVector x(d);
        for (std::size_t c = 0; c < b1.size(); ++c) {
            const cplx a = eig.vectors(c, k);
            for (std::size_t i = 0; i < d; ++i) x[i] += a * b1[c][i];
        }
        for (const auto &prev : out) {
            const cplx proj = inner(prev, x);
            for (std::size_t i = 0; i < d; ++i) x[i] -= proj * prev[i];
        }
        const double nx = norm(x);
        if (nx < 1e-9) continue;
        for (auto &z : x) z /= nx;
        out.push_back(std::move(x));
    }
    return out;
}

std::size_t support_intersection_dim(const DensityMatrix &r1, const DensityMatrix &r2) {
    if (r1.dim() != r2.dim()) throw Error(ErrorCode::DimMismatch, "support intersection");
    const auto b1 = support_basis(r1.matrix());
    const auto b2 = support_basis(r2.matrix());
    std::vector<CVector> all(b1);
    all.insert(all.end(), b2.begin(), b2.end());
    if (all.empty()) return 0;
    const std::size_t combined = numerical_rank(CMatrix::from_columns(all, r1.dim()));
    return b1.size() + b2.size() - combined;
}

} // namespace qtf
