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

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qtf/certify.hpp"
#include "qtf/linalg.hpp"
#include "qtf/states.hpp"

namespace qtf {

/// Uniform grid with `resolution` points per real parameter. Empty `bounds`
/// means the natural range of each parameter.
struct GridSpec {
    std::size_t resolution = 21;
    std::vector<std::pair<double, double>> bounds;
    std::size_t cap = 10'000'000;

    double step(std::size_t param, double lo, double hi) const;
};

struct FeasibleAResult {
    double best_min_eigenvalue = 0.0;
    CMatrix best_a;
    std::size_t candidates = 0; // PSD grid matrices examined
};

/// Exhaustive search over unit-diagonal PSD A (real grid when X and Y are real,
/// otherwise real and imaginary parts with |A_kl| ≤ 1). n ≤ 3.
FeasibleAResult brute_force_feasible_A(const CMatrix &x, const CMatrix &y, const EfficiencyMatrix &gamma,
                                       const GridSpec &grid = {});

struct OptimalEtaResult {
    bool found = false;
    double p = 0.0;
    std::vector<double> etas;
    CMatrix a;
};

/// Best Σ p_i η_i over gridded Γ ∈ [0,1]^n such that some grid A makes the
/// residual PSD within `tol`. With `ancilla_free`, A is fixed to all-ones.
OptimalEtaResult brute_force_optimal_eta(const CMatrix &x, const CMatrix &y, const PriorDistribution &priors,
                                         const GridSpec &eta_grid, const GridSpec &a_grid, double tol = 1e-12,
                                         bool ancilla_free = false);

/// max |⟨Ψ₁|(I⊗U)|Ψ₂⟩| over unitaries U on the purifying factor, with
/// |Ψ_ρ⟩ = Σ_ij (√ρ)_ij |i⟩|j⟩. Haar samples followed by local refinement.
double purification_overlap_search(const DensityMatrix &r1, const DensityMatrix &r2, std::size_t samples = 2000,
                                   std::uint64_t seed = 0);

/// Haar-random unitary (QR of a complex Gaussian matrix with phase fix).
CMatrix haar_unitary(std::size_t d, std::mt19937_64 &rng);

} // namespace qtf
