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

/// Output ⊗ ancilla ⊗ probe. Basis index of (o, a, p) is (o·d_ancilla + a)·d_probe + p.
struct DilationDims {
    std::size_t d_out = 0;
    std::size_t d_ancilla = 0;
    std::size_t d_probe = 0;

    std::size_t total() const noexcept { return d_out * d_ancilla * d_probe; }
};

/// Unitary U on C^D with U(|in_k⟩ ⊕ 0) = √η_k |out_k⟩|α_k⟩|P₀⟩ + |β̃_k⟩.
/// Inputs occupy the first `input_dim` coordinates of the domain.
struct SynthesizedDilation {
    CMatrix u;
    DilationDims dims;
    std::size_t input_dim = 0;
    std::size_t probe_success_index = 0;

    std::vector<CVector> inputs;  // row vectors in C^input_dim (non-normalized for ensemble members)
    std::vector<CVector> images;  // U applied to the embedded inputs
    std::vector<CVector> alphas;
    std::vector<CVector> betas;   // in C^D, orthogonal to the success probe

    // States the dilation was certified for, used by simulate_certified.
    std::vector<DensityMatrix> input_states;
    std::vector<DensityMatrix> target_states;
};

struct SimulationReport {
    double success_probability = 0.0;
    double failure_probability = 0.0;
    std::optional<DensityMatrix> conditional_output; // unset when success vanishes
    std::optional<double> fidelity_to_target;
};

SynthesizedDilation synthesize_pure(std::span<const PureState> inputs, std::span<const PureState> outputs,
                                    const Certificate &cert);

/// `purifications` live in C^d ⊗ C^d_p with the second factor traced out; the
/// dilation's ancilla is that factor together with the |α⟩ register.
SynthesizedDilation synthesize_pure_to_mixed(std::span<const PureState> inputs,
                                             std::span<const DensityMatrix> targets,
                                             std::span<const PureState> purifications, const Certificate &cert);

/// One row per ensemble member; `cert` comes from check_mixed_to_pure on the same ensembles.
SynthesizedDilation synthesize_mixed_to_pure(std::span<const StateEnsemble> inputs,
                                             std::span<const PureState> outputs, const Certificate &cert);

/// From explicit composite output vectors; `cert` comes from check_mixed_to_mixed.
SynthesizedDilation synthesize_mixed_to_mixed(std::span<const StateEnsemble> inputs,
                                              std::span<const CompositeOutputEnsemble> candidate,
                                              std::span<const DensityMatrix> targets, const Certificate &cert);

/// Exact evaluation of the probe measurement on U(ρ ⊕ 0)U†.
SimulationReport simulate(const SynthesizedDilation &dil, const DensityMatrix &rho_in,
                          const std::optional<DensityMatrix> &target = std::nullopt);

/// simulate() on each certified input against its target.
std::vector<SimulationReport> simulate_certified(const SynthesizedDilation &dil);

struct CloningProblem {
    std::vector<PureState> inputs;
    std::vector<PureState> outputs; // |φ_i⟩^⊗N
};

CloningProblem generalized_cloning(std::span<const PureState> inputs, std::size_t copies);

} // namespace qtf
