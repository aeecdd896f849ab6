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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtf/certify.hpp"
#include "qtf/states.hpp"
#include "qtf/synth.hpp"

namespace qtf {

enum class Mode { PureToPure, PureToMixed, MixedToPure, MixedToMixed, Unambiguous, DeterministicCheck, Cloning };

std::string_view mode_name(Mode m);

/// A state as written in a problem file: a ket or a density matrix.
struct StateSpec {
    std::optional<PureState> ket;
    std::optional<DensityMatrix> rho;

    bool is_pure() const noexcept { return ket.has_value(); }
    std::size_t dim() const;
    DensityMatrix density() const;
};

/// Parsed and validated problem document (format version 1).
struct Problem {
    Mode mode = Mode::PureToPure;
    std::size_t dimension = 0;
    std::vector<StateSpec> inputs;
    std::vector<StateSpec> outputs;
    PriorDistribution priors = PriorDistribution::uniform(1);
    std::optional<std::vector<double>> gamma;
    std::optional<CMatrix> ancilla_gram;
    std::optional<std::vector<StateEnsemble>> input_ensembles;
    std::optional<std::vector<CompositeOutputEnsemble>> composite_ensembles;
    std::size_t copies = 1;
};

/// Throws Error(ParseError) with the offending field in the message.
Problem parse_problem(std::string_view text);
Problem load_problem(const std::filesystem::path &path);

/// Parses a single state document: {"state": ..., "target": ...} or a bare state.
std::pair<DensityMatrix, std::optional<DensityMatrix>> parse_state_document(std::string_view text);

/// Versioned plain-text dump of a dilation (17 significant digits).
std::string write_dilation(const SynthesizedDilation &dil);
SynthesizedDilation read_dilation(std::string_view text);

} // namespace qtf
