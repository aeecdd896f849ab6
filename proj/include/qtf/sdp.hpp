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
#include <vector>

#include "qtf/certify.hpp"
#include "qtf/linalg.hpp"
#include "qtf/states.hpp"

namespace qtf {

/// Which entry of Ã (or auxiliary quantity) a real SDP variable stands for.
struct SdpVariable {
    enum class Kind { Diagonal, RealPart, ImagPart, Shift };
    Kind kind;
    std::size_t k = 0;
    std::size_t l = 0;
};

/// maximize Σ b_m y_m  subject to  C − Σ y_m S_m ⪰ 0.
///
/// For the success-probability program, C = [[X, 0], [0, 0]] and the S_m are
/// the block matrices pairing Y∘Ã (upper block) with Ã (lower block), so the
/// single constraint carries both X − Y∘Ã ⪰ 0 and Ã ⪰ 0.
struct StandardSDP {
    std::vector<double> objective;
    CMatrix constant;
    std::vector<CMatrix> constraints;
    std::vector<SdpVariable> variables;

    std::size_t n = 0;                 // size of Ã
    std::vector<std::size_t> active;   // rows of Ã present in the lower block
    CMatrix fixed_a_tilde;             // n×n part of Ã that is not a variable
    double objective_offset = 0.0;
    CMatrix gram_y;                    // Y as given to encode; empty for other programs
};

enum class SdpStatus { Optimal, Infeasible, MaxIterations };

struct SdpSolution {
    CMatrix a_tilde;
    double objective = 0.0;   // Σ b_m y_m (+ offset)
    double dual_bound = 0.0;  // Tr(C·W) for the dual iterate W
    SdpStatus status = SdpStatus::MaxIterations;
    double duality_gap = 0.0;
    int iterations = 0;
    double shift = 0.0;       // value of the Shift variable, if any
    std::vector<double> y;
};

struct SolverOptions {
    double gap_tol = 1e-8;
    int max_iter = 200;
};

/// Output of the generic conic solver.
struct ConicResult {
    std::vector<double> y;
    CMatrix primal;  // W ⪰ 0 with Tr(S_m W) = b_m
    CMatrix slack;   // Z = C − Σ y_m S_m
    SdpStatus status = SdpStatus::MaxIterations;
    int iterations = 0;
    double primal_objective = 0.0; // Tr(C W)
    double dual_objective = 0.0;   // b·y
    double relative_gap = 0.0;
};

/// Infeasible-start primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector). Throws NumericalBreakdown when the Schur complement
/// cannot be factored.
ConicResult solve_standard_form(const CMatrix &c, std::span<const CMatrix> s, std::span<const double> b,
                                const SolverOptions &opts = {});

/// Variables: Ã_kk, Re Ã_kl, Im Ã_kl (k < l) over non-frozen rows. Frozen rows
/// of Ã are fixed to zero. Priors are per block of `x`.
StandardSDP encode(const GramMatrix &x, const GramMatrix &y, const PriorDistribution &priors,
                   std::span<const bool> frozen = {});

SdpSolution solve(const StandardSDP &prob, const SolverOptions &opts = {});

/// Γ = diag(Ã), A = D^{-1/2} Ã D^{-1/2} via unit-normalized factor rows; rows
/// with vanishing η get A_kk = 1 and zero off-diagonals.
std::pair<EfficiencyMatrix, AncillaGram> extract(const SdpSolution &sol);

struct ProbeResult {
    bool feasible = false;
    std::optional<AncillaGram> ancilla;
    double best_min_eigenvalue = 0.0; // max over A of λ_min(diag(B, Ã))
    double tolerance = 0.0;
    SdpSolution solution;
};

/// ε-decision for fixed Γ: maximize t with diag(X − Y∘Ã, Ã) − t·I ⪰ 0 over the
/// off-diagonal entries of Ã (diagonal pinned to η). Feasible iff t* ≥ −eps.
ProbeResult feasibility_probe(const GramMatrix &x, const GramMatrix &y, const EfficiencyMatrix &gamma,
                              const SolverOptions &opts = {}, double eps = 1e-7);

/// Scales Γ by (1 − ε) with the smallest ε that makes X − √Γ Y √Γ ∘ A ⪰ 0,
/// using B(ε) = (1−ε)B + εX. Returns Γ unchanged when B is already PSD or X is singular.
EfficiencyMatrix restore_feasibility(const CMatrix &x, const CMatrix &y, const EfficiencyMatrix &gamma,
                                     const AncillaGram &a);

struct OptimalTransformation {
    SdpSolution solution;
    Certificate certificate;
};

/// encode → solve → extract → restore_feasibility → certificate.
OptimalTransformation optimize(const GramMatrix &x, const GramMatrix &y, const PriorDistribution &priors,
                               const SolverOptions &opts = {}, std::span<const bool> frozen = {},
                               double rel_tol = kDefaultTolerances.psd);

} // namespace qtf
