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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtf/linalg.hpp"
#include "qtf/states.hpp"

namespace qtf {

/// Per-row success probabilities η ∈ [0, 1]. For ensemble inputs there is one
/// entry per member, grouped by block.
class EfficiencyMatrix {
  public:
    explicit EfficiencyMatrix(std::vector<double> etas);
    static EfficiencyMatrix uniform(std::size_t n, double eta) { return EfficiencyMatrix(std::vector<double>(n, eta)); }

    const std::vector<double> &etas() const noexcept { return etas_; }
    std::size_t size() const noexcept { return etas_.size(); }
    double operator[](std::size_t i) const { return etas_[i]; }
    /// diag(√η)
    CMatrix sqrt_matrix() const;
    CMatrix matrix() const { return CMatrix::diagonal(etas_); }

  private:
    std::vector<double> etas_;
};

/// Unit-diagonal PSD matrix of ancilla overlaps ⟨α_i|α_j⟩.
class AncillaGram {
  public:
    explicit AncillaGram(CMatrix a, double rel_tol = kDefaultTolerances.psd);
    static AncillaGram ones(std::size_t n) { return AncillaGram(CMatrix::ones(n, n)); }
    static AncillaGram identity(std::size_t n) { return AncillaGram(CMatrix::identity(n)); }

    const CMatrix &matrix() const noexcept { return a_; }
    std::size_t size() const noexcept { return a_.rows(); }

  private:
    CMatrix a_;
};

/// Result of evaluating one of the feasibility conditions for fixed (Γ, A).
/// `residual` is B = X − √Γ Y √Γ ∘ A (or X̃ − Ỹ); `verdict` is its PSD test.
struct Certificate {
    EfficiencyMatrix gamma;
    std::optional<AncillaGram> ancilla;
    CMatrix residual;
    PsdVerdict verdict;
    double avg_success = 0.0;

    bool feasible() const noexcept { return verdict.is_psd; }
};

enum class Decision { Feasible, Infeasible, Undetermined };

/// Outcome of a deterministic-transformation check. `ancilla` is set when the
/// constructed A is PSD; `witness` is its minimum eigenvalue (or σ_max for the
/// two-state mixed criterion).
struct DeterministicResult {
    Decision decision = Decision::Undetermined;
    std::optional<AncillaGram> ancilla;
    CMatrix candidate;
    double witness = 0.0;
    std::string reason;
};

/// Composite vectors |φ̃_k^(i)⟩ ∈ C^d_out ⊗ C^d_anc for one input state, and the
/// claimed success probability η_i.
struct CompositeOutputEnsemble {
    std::vector<CVector> vectors;
    double eta = 0.0;
    std::size_t d_out = 0;
    std::size_t d_anc = 0;
};

/// B = X − √Γ Y √Γ ∘ A.
CMatrix pure_residual(const CMatrix &x, const CMatrix &y, const EfficiencyMatrix &gamma, const CMatrix &a);

Certificate check_pure_feasible(const GramMatrix &x, const GramMatrix &y, const EfficiencyMatrix &gamma,
                                const AncillaGram &a, const PriorDistribution &priors,
                                double rel_tol = kDefaultTolerances.psd);

/// A_ij = X_ij / Y_ij; feasible iff that matrix is PSD.
DeterministicResult check_deterministic_pure(const GramMatrix &x, const GramMatrix &y,
                                             double rel_tol = kDefaultTolerances.psd);

PsdVerdict check_unambiguous_pure(const GramMatrix &x, const EfficiencyMatrix &gamma,
                                  double rel_tol = kDefaultTolerances.psd);

/// Purification route: Y is the Gram of `purifications`, A is fixed to all-ones.
/// Each purification must trace down to its target within 1e-8.
Certificate check_pure_to_mixed(const GramMatrix &x, std::span<const PureState> purifications,
                                std::span<const DensityMatrix> targets, const EfficiencyMatrix &gamma,
                                const PriorDistribution &priors, double rel_tol = kDefaultTolerances.psd);

/// Block condition X̃ − √Γ Ŷ √Γ ∘ A ⪰ 0 over ensemble members, where Ŷ is the
/// blockwise expansion of the pure output Gram `y`.
Certificate check_mixed_to_pure(std::span<const StateEnsemble> inputs, const GramMatrix &y,
                                const EfficiencyMatrix &gamma, const AncillaGram &a,
                                const PriorDistribution &priors, double rel_tol = kDefaultTolerances.psd);

DeterministicResult check_deterministic_mixed_to_pure(std::span<const StateEnsemble> inputs, const GramMatrix &y,
                                                      double rel_tol = kDefaultTolerances.psd);

/// Checks X̃ − Ỹ ⪰ 0 for user- or solver-supplied composite output vectors.
Certificate check_mixed_to_mixed(const GramMatrix &x_tilde, std::span<const CompositeOutputEnsemble> candidate,
                                 std::span<const DensityMatrix> targets, const PriorDistribution &priors,
                                 double rel_tol = kDefaultTolerances.psd);

/// X̃ − diag(Ỹ_11, …, Ỹ_nn) ⪰ 0 with PSD diagonal blocks.
Certificate check_unambiguous_mixed(std::span<const StateEnsemble> inputs, std::span<const CMatrix> y_blocks,
                                    const PriorDistribution &priors, double rel_tol = kDefaultTolerances.psd);

/// min(1, (1 − 2√(p₁p₂)·overlap) / (1 − fidelity)); 1 when fidelity = 1.
double two_state_bound(double p1, double p2, double input_overlap, double output_fidelity);

/// Ensembles re-decomposed so that members lying in the common support of two
/// inputs with different outputs come first; `frozen` marks those members
/// (their success probability is necessarily zero).
struct RestrictedEnsembles {
    std::vector<StateEnsemble> ensembles;
    std::vector<bool> frozen;
};

/// `y` is the pure output Gram; outputs i, j count as identical when |Y_ij| ≥ 1 − 1e-9.
RestrictedEnsembles restrict_common_support(std::span<const StateEnsemble> inputs, const GramMatrix &y);

} // namespace qtf
