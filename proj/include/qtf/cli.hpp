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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtf/io.hpp"
#include "qtf/sdp.hpp"
#include "qtf/synth.hpp"

namespace qtf {

struct CliOptions {
    double psd_tol = kDefaultTolerances.psd;
    SolverOptions solver;
    std::optional<std::uint64_t> seed;
};

struct DilationSummary {
    DilationDims dims;
    double unitarity_defect = 0.0;
    std::string path;
};

/// Everything a command reports. Numbers are taken from certificates that were
/// recomputed from the input states, never from raw solver output.
struct ResultReport {
    std::string command;
    std::string mode;
    std::string status; // solved | feasible | infeasible | undetermined
    int exit_code = 0;

    std::optional<double> p;
    std::vector<double> gamma;
    std::vector<double> state_success; // per input state, for ensemble inputs
    std::optional<CMatrix> a;
    std::optional<CMatrix> a_tilde;
    std::optional<double> residual_min_eigenvalue;
    std::optional<bool> ancilla_required;
    std::optional<double> witness;
    std::vector<std::pair<std::string, double>> bounds;
    std::optional<DilationSummary> dilation;
    std::vector<SimulationReport> simulations;
    std::vector<std::string> notes;
};

ResultReport cmd_solve(const Problem &problem, const CliOptions &opts = {});
ResultReport cmd_check(const Problem &problem, const CliOptions &opts = {});
/// Solves (or checks, when the problem fixes gamma), synthesizes, writes the
/// dilation to `out` (skipped when empty) and simulates every certified input.
ResultReport cmd_synthesize(const Problem &problem, const std::filesystem::path &out, const CliOptions &opts = {});
ResultReport cmd_simulate(const SynthesizedDilation &dil,
                          const std::optional<std::pair<DensityMatrix, std::optional<DensityMatrix>>> &state,
                          const CliOptions &opts = {});
ResultReport cmd_bounds(const Problem &problem, const CliOptions &opts = {});

std::string format_text(const ResultReport &r);
std::string format_structured(const ResultReport &r);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace qtf
