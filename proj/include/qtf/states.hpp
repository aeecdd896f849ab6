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

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qtf/linalg.hpp"

namespace qtf {

/// Unit-norm state vector.
class PureState {
  public:
    /// Throws InvalidState unless ‖v‖ = 1 within `tol`.
    explicit PureState(CVector amplitudes, double tol = 1e-9);
    /// Rescales any non-zero vector to unit norm.
    static PureState normalized(CVector amplitudes);

    const CVector &amplitudes() const noexcept { return amplitudes_; }
    std::size_t dim() const noexcept { return amplitudes_.size(); }

  private:
    CVector amplitudes_;
};

/// Hermitian, PSD, unit-trace matrix.
class DensityMatrix {
  public:
    explicit DensityMatrix(CMatrix m, double tol = 1e-9);
    static DensityMatrix from_pure(const PureState &psi);

    const CMatrix &matrix() const noexcept { return matrix_; }
    std::size_t dim() const noexcept { return matrix_.rows(); }

  private:
    CMatrix matrix_;
};

/// One term r·|φ⟩⟨φ| of an ensemble. The non-normalized vector is √r·|φ⟩.
struct EnsembleMember {
    double weight;
    PureState vector;

    CVector scaled() const;
};

/// Decomposition ρ = Σ_k r_k |φ_k⟩⟨φ_k|; members need not be orthogonal.
class StateEnsemble {
  public:
    /// Validates Σ r_k|φ_k⟩⟨φ_k| = source within `tol` and r_k > 0.
    StateEnsemble(std::vector<EnsembleMember> members, DensityMatrix source, double tol = 1e-9);
    /// Builds the source from the members (weights must sum to 1).
    static StateEnsemble from_members(std::vector<EnsembleMember> members);
    static StateEnsemble singleton(const PureState &psi);

    const std::vector<EnsembleMember> &members() const noexcept { return members_; }
    const DensityMatrix &source() const noexcept { return source_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t dim() const noexcept { return source_.dim(); }

  private:
    std::vector<EnsembleMember> members_;
    DensityMatrix source_;
};

class PriorDistribution {
  public:
    explicit PriorDistribution(std::vector<double> probabilities);
    static PriorDistribution uniform(std::size_t n);

    const std::vector<double> &probabilities() const noexcept { return p_; }
    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }

  private:
    std::vector<double> p_;
};

/// Gram matrix of a state set. For ensembles, block_row_sizes gives the
/// number of members per state; pure sets use all-ones.
struct GramMatrix {
    CMatrix matrix;
    std::vector<std::size_t> block_row_sizes;

    std::size_t size() const noexcept { return matrix.rows(); }
    std::size_t block_count() const noexcept { return block_row_sizes.size(); }
    /// Row offset of block i.
    std::size_t block_offset(std::size_t i) const;
};

GramMatrix gram_matrix(std::span<const PureState> states);

/// Orthogonal members ordered by descending weight, ties broken by
/// descending lexicographic order of the eigenvectors.
StateEnsemble spectral_decompose(const DensityMatrix &rho, const Tolerances &tol = kDefaultTolerances);

/// (X̃_ij)_kl = √(r_k r_l)·⟨φ_k^(i)|φ_l^(j)⟩
GramMatrix block_gram(std::span<const StateEnsemble> ensembles);

/// Cross Gram of the normalized members: (X_ij)_kl = ⟨φ_k^(i)|φ_l^(j)⟩.
CMatrix normalized_cross_gram(const StateEnsemble &a, const StateEnsemble &b);

/// Expands a pure-set Gram Y blockwise: (Y_ij)_kl = Y_ij for members k of i, l of j.
CMatrix expand_blockwise(const CMatrix &y, std::span<const std::size_t> block_sizes);

/// Canonical purification Σ_k √r_k |φ_k⟩⊗|k⟩ in C^d ⊗ C^d.
PureState purify(const DensityMatrix &sigma);

/// Purifications of two states in C^d ⊗ C^d whose overlap is real and
/// equal to F(σ₁, σ₂).
std::pair<PureState, PureState> uhlmann_purifications(const DensityMatrix &s1, const DensityMatrix &s2);

/// Tr over the second factor of |ψ⟩⟨ψ| with ψ ∈ C^d1 ⊗ C^d2.
CMatrix partial_trace_second(std::span<const cplx> psi, std::size_t d1, std::size_t d2);
/// Tr over the second factor of an operator on C^d1 ⊗ C^d2.
CMatrix partial_trace_second(const CMatrix &rho, std::size_t d1, std::size_t d2);

/// Tr √(√ρ₁ ρ₂ √ρ₁), clamped to [0, 1].
double fidelity(const DensityMatrix &r1, const DensityMatrix &r2);

double trace_distance(const CMatrix &a, const CMatrix &b);

/// Orthonormal basis of the range of a PSD matrix.
std::vector<CVector> support_basis(const CMatrix &m, double rel_cutoff = 1e-9);

/// Orthonormal basis of supp(ρ₁) ∩ supp(ρ₂).
std::vector<CVector> support_intersection_basis(const DensityMatrix &r1, const DensityMatrix &r2);

std::size_t support_intersection_dim(const DensityMatrix &r1, const DensityMatrix &r2);

/// Numerical rank of a rectangular matrix (singular values above rel_cutoff·max(1, s_max)).
std::size_t numerical_rank(const CMatrix &m, double rel_cutoff = 1e-9);

} // namespace qtf
