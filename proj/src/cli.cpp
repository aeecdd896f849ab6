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

#include "qtf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtf/error.hpp"
#include "qtf/oracle.hpp"

namespace qtf {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUndetermined = 3;
constexpr double kRoundTripTol = 1e-6;

enum class Route { None, Pure, PureToMixed, MixedToPure, MixedToMixed };

// A report plus whatever synthesis needs to rebuild the dilation.
struct Outcome {
    ResultReport report;
    std::optional<Certificate> cert;
    Route route = Route::None;
    std::vector<PureState> inputs;
    std::vector<PureState> outputs;
    std::vector<PureState> purifications;
    std::vector<DensityMatrix> targets;
    std::vector<StateEnsemble> ensembles;
    std::vector<CompositeOutputEnsemble> composite;
};

std::vector<PureState> require_pure(const std::vector<StateSpec> &states, const char *field) {
    std::vector<PureState> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!states[i].is_pure()) {
            throw Error(ErrorCode::ParseError,
                        std::string(field) + "[" + std::to_string(i) + "]: this mode needs a ket");
        }
        out.push_back(*states[i].ket);
    }
    return out;
}

std::vector<DensityMatrix> densities(const std::vector<StateSpec> &states) {
    std::vector<DensityMatrix> out;
    for (const auto &s : states) out.push_back(s.density());
    return out;
}

bool all_pure(const std::vector<StateSpec> &states) {
    return std::all_of(states.begin(), states.end(), [](const StateSpec &s) { return s.is_pure(); });
}

std::vector<StateEnsemble> ensembles_of(const Problem &p) {
    if (p.input_ensembles) return *p.input_ensembles;
    std::vector<StateEnsemble> out;
    for (const auto &s : p.inputs) {
        out.push_back(s.is_pure() ? StateEnsemble::singleton(*s.ket) : spectral_decompose(*s.rho));
    }
    return out;
}

std::vector<PureState> basis_outputs(std::size_t n) {
    std::vector<PureState> out;
    for (std::size_t i = 0; i < n; ++i) {
        CVector e(n);
        e[i] = 1.0;
        out.emplace_back(std::move(e));
    }
    return out;
}

std::vector<PureState> choose_purifications(const std::vector<DensityMatrix> &targets) {
    if (targets.size() == 2) {
        auto [a, b] = uhlmann_purifications(targets[0], targets[1]);
        return {a, b};
    }
    std::vector<PureState> out;
    for (const auto &t : targets) out.push_back(purify(t));
    return out;
}

std::vector<PureState> attach_ancillas(const std::vector<PureState> &phis, const CMatrix &a) {
    const auto alphas = factor_gram(a);
    std::vector<PureState> out;
    for (std::size_t i = 0; i < phis.size(); ++i) out.push_back(PureState::normalized(kron(phis[i].amplitudes(), alphas[i])));
    return out;
}

std::vector<double> block_sums(const std::vector<double> &g, std::span<const std::size_t> sizes) {
    std::vector<double> out;
    std::size_t row = 0;
    for (std::size_t s : sizes) {
        double acc = 0.0;
        for (std::size_t k = 0; k < s; ++k) acc += g[row++];
        out.push_back(acc);
    }
    return out;
}

void fill_from_certificate(ResultReport &r, const Certificate &c) {
    r.p = c.avg_success;
    r.gamma = c.gamma.etas();
    r.residual_min_eigenvalue = c.verdict.min_eigenvalue;
    if (c.ancilla) {
        r.a = c.ancilla->matrix();
        const CMatrix s = c.gamma.sqrt_matrix();
        r.a_tilde = s * c.ancilla->matrix() * s;
    }
}

void set_solved_status(ResultReport &r, SdpStatus s, bool feasible) {
    if (s == SdpStatus::Infeasible) {
        r.status = "infeasible";
        r.exit_code = kExitInfeasible;
    } else if (s == SdpStatus::Optimal && feasible) {
        r.status = "solved";
        r.exit_code = kExitOk;
    } else {
        r.status = "undetermined";
        r.exit_code = kExitUndetermined;
        r.notes.push_back(s == SdpStatus::MaxIterations ? "solver stopped at the iteration limit"
                                                        : "certificate did not verify");
    }
}

void set_check_status(ResultReport &r, bool feasible) {
    r.status = feasible ? "feasible" : "infeasible";
    r.exit_code = feasible ? kExitOk : kExitInfeasible;
}

std::unique_ptr<bool[]> mask_of(const std::vector<bool> &v) {
    auto m = std::make_unique<bool[]>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m[i] = v[i];
    return m;
}

bool ancilla_needed(const CMatrix &x, const CMatrix &y, const Certificate &c, double tol) {
    return c.feasible() && !is_psd(pure_residual(x, y, c.gamma, CMatrix::ones(x.rows(), x.rows())), tol).is_psd;
}

Outcome solve_pure_rows(const Problem &p, const CliOptions &o, std::vector<PureState> in, std::vector<PureState> out,
                        bool report_ancilla) {
    const GramMatrix x = gram_matrix(in);
    const GramMatrix y = gram_matrix(out);
    OptimalTransformation opt = optimize(x, y, p.priors, o.solver, {}, o.psd_tol);
    Outcome oc;
    fill_from_certificate(oc.report, opt.certificate);
    set_solved_status(oc.report, opt.solution.status, opt.certificate.feasible());
    if (report_ancilla) oc.report.ancilla_required = ancilla_needed(x.matrix, y.matrix, opt.certificate, o.psd_tol);
    oc.cert = std::move(opt.certificate);
    oc.route = Route::Pure;
    oc.inputs = std::move(in);
    oc.outputs = std::move(out);
    return oc;
}

Outcome solve_member_rows(const Problem &p, const CliOptions &o, const std::vector<StateEnsemble> &ensembles,
                          std::vector<PureState> outs) {
    const GramMatrix y = gram_matrix(outs);
    RestrictedEnsembles rest = restrict_common_support(ensembles, y);
    const GramMatrix x = block_gram(rest.ensembles);
    const GramMatrix y_hat{expand_blockwise(y.matrix, x.block_row_sizes), x.block_row_sizes};
    const auto mask = mask_of(rest.frozen);
    OptimalTransformation opt =
        optimize(x, y_hat, p.priors, o.solver, std::span<const bool>(mask.get(), rest.frozen.size()), o.psd_tol);

    Outcome oc;
    Certificate cert = check_mixed_to_pure(rest.ensembles, y, opt.certificate.gamma,
                                           opt.certificate.ancilla.value_or(AncillaGram::identity(x.size())),
                                           p.priors, o.psd_tol);
    fill_from_certificate(oc.report, cert);
    oc.report.state_success = block_sums(cert.gamma.etas(), x.block_row_sizes);
    set_solved_status(oc.report, opt.solution.status, cert.feasible());
    oc.report.ancilla_required = ancilla_needed(x.matrix, y_hat.matrix, cert, o.psd_tol);
    const auto frozen = std::count(rest.frozen.begin(), rest.frozen.end(), true);
    if (frozen > 0) {
        oc.report.notes.push_back(std::to_string(frozen) +
                                  " ensemble member(s) lie in a common support of inputs with different outputs");
    }
    oc.cert = std::move(cert);
    oc.route = Route::MixedToPure;
    oc.ensembles = std::move(rest.ensembles);
    oc.outputs = std::move(outs);
    return oc;
}

// Composite vectors √η_k |ϕ_i⟩|α_k⟩ for every member k of input i.
std::vector<CompositeOutputEnsemble> composite_from(const std::vector<PureState> &purifs, const Certificate &cert,
                                                    std::span<const std::size_t> sizes, std::size_t d_out) {
    const auto alphas = factor_gram(cert.ancilla->matrix());
    std::vector<CompositeOutputEnsemble> out;
    std::size_t row = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        CompositeOutputEnsemble c;
        c.d_out = d_out;
        c.d_anc = purifs[i].dim() / d_out * alphas.front().size();
        for (std::size_t k = 0; k < sizes[i]; ++k, ++row) {
            CVector v = kron(purifs[i].amplitudes(), alphas[row]);
            for (auto &z : v) z *= std::sqrt(cert.gamma[row]);
            c.eta += cert.gamma[row];
            c.vectors.push_back(std::move(v));
        }
        out.push_back(std::move(c));
    }
    return out;
}

bool pairwise_orthogonal(const std::vector<DensityMatrix> &s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (std::abs((s[i].matrix() * s[j].matrix()).trace()) > 1e-12) return false;
        }
    }
    return true;
}

void add_two_state_bounds(ResultReport &r, const Problem &p, const CliOptions &o);

Outcome solve_outcome(const Problem &p, const CliOptions &o) {
    const std::size_t n = p.inputs.size();
    Outcome oc;
    switch (p.mode) {
    case Mode::PureToPure:
        oc = solve_pure_rows(p, o, require_pure(p.inputs, "inputs"), require_pure(p.outputs, "outputs"), true);
        break;
    case Mode::Cloning: {
        auto in = require_pure(p.inputs, "inputs");
        CloningProblem cp = generalized_cloning(in, p.copies);
        oc = solve_pure_rows(p, o, std::move(cp.inputs), std::move(cp.outputs), true);
        break;
    }
    case Mode::Unambiguous:
        if (all_pure(p.inputs) && !p.input_ensembles) {
            oc = solve_pure_rows(p, o, require_pure(p.inputs, "inputs"), basis_outputs(n), false);
        } else {
            oc = solve_member_rows(p, o, ensembles_of(p), basis_outputs(n));
            oc.report.ancilla_required.reset();
            // Independent pass through the quasi-diagonal criterion.
            std::vector<CMatrix> blocks;
            const GramMatrix x = block_gram(oc.ensembles);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t off = x.block_offset(i);
                const std::size_t sz = x.block_row_sizes[i];
                blocks.push_back(oc.report.a_tilde->block(off, off, sz, sz));
            }
            const Certificate u = check_unambiguous_mixed(oc.ensembles, blocks, p.priors, o.psd_tol);
            if (!u.feasible() || std::abs(u.avg_success - *oc.report.p) > 1e-8) {
                oc.report.status = "undetermined";
                oc.report.exit_code = kExitUndetermined;
                oc.report.notes.push_back("quasi-diagonal verification disagrees with the member-level certificate");
            }
        }
        break;
    case Mode::PureToMixed: {
        auto in = require_pure(p.inputs, "inputs");
        auto targets = densities(p.outputs);
        oc = solve_pure_rows(p, o, in, choose_purifications(targets), true);
        if (oc.cert && oc.cert->ancilla) {
            auto purifs = attach_ancillas(oc.outputs, oc.cert->ancilla->matrix());
            Certificate c2 = check_pure_to_mixed(gram_matrix(in), purifs, targets, oc.cert->gamma, p.priors, o.psd_tol);
            oc.report.residual_min_eigenvalue = c2.verdict.min_eigenvalue;
            if (!c2.feasible() && oc.report.exit_code == kExitOk) {
                oc.report.status = "undetermined";
                oc.report.exit_code = kExitUndetermined;
            }
            oc.cert = std::move(c2);
            oc.purifications = std::move(purifs);
        }
        oc.targets = std::move(targets);
        oc.route = Route::PureToMixed;
        break;
    }
    case Mode::MixedToPure:
        oc = solve_member_rows(p, o, ensembles_of(p), require_pure(p.outputs, "outputs"));
        break;
    case Mode::MixedToMixed: {
        auto targets = densities(p.outputs);
        auto purifs = choose_purifications(targets);
        oc = solve_member_rows(p, o, ensembles_of(p), purifs);
        const GramMatrix x = block_gram(oc.ensembles);
        oc.composite = composite_from(purifs, *oc.cert, x.block_row_sizes, targets.front().dim());
        Certificate c2 = check_mixed_to_mixed(x, oc.composite, targets, p.priors, o.psd_tol);
        oc.report.p = c2.avg_success;
        oc.report.state_success = c2.gamma.etas();
        oc.report.residual_min_eigenvalue = c2.verdict.min_eigenvalue;
        if (!c2.feasible() && oc.report.exit_code == kExitOk) {
            oc.report.status = "undetermined";
            oc.report.exit_code = kExitUndetermined;
        }
        if (!pairwise_orthogonal(targets)) {
            oc.report.notes.push_back("optimized over one choice of output purifications; P is a lower bound");
        }
        oc.cert = std::move(c2);
        oc.targets = std::move(targets);
        oc.route = Route::MixedToMixed;
        break;
    }
    case Mode::DeterministicCheck: {
        if (!all_pure(p.outputs)) throw Error(ErrorCode::ParseError, "outputs: deterministic check needs kets");
        const auto outs = require_pure(p.outputs, "outputs");
        const GramMatrix y = gram_matrix(outs);
        DeterministicResult d;
        if (all_pure(p.inputs) && !p.input_ensembles) {
            const auto in = require_pure(p.inputs, "inputs");
            const GramMatrix x = gram_matrix(in);
            d = check_deterministic_pure(x, y, o.psd_tol);
            if (d.ancilla) {
                oc.cert = check_pure_feasible(x, y, EfficiencyMatrix::uniform(n, 1.0), *d.ancilla, p.priors, o.psd_tol);
                oc.route = Route::Pure;
                oc.inputs = in;
            }
        } else {
            const auto ens = ensembles_of(p);
            d = check_deterministic_mixed_to_pure(ens, y, o.psd_tol);
            if (d.ancilla) {
                std::vector<double> weights;
                for (const auto &e : ens) {
                    for (const auto &m : e.members()) weights.push_back(m.weight);
                }
                oc.cert = check_mixed_to_pure(ens, y, EfficiencyMatrix(weights), *d.ancilla, p.priors, o.psd_tol);
                oc.route = Route::MixedToPure;
                oc.ensembles = ens;
            }
        }
        oc.outputs = outs;
        oc.report.witness = d.witness;
        if (d.ancilla) oc.report.a = d.ancilla->matrix();
        if (!d.reason.empty()) oc.report.notes.push_back(d.reason);
        if (oc.cert) {
            oc.report.p = oc.cert->avg_success;
            oc.report.residual_min_eigenvalue = oc.cert->verdict.min_eigenvalue;
        }
        switch (d.decision) {
        case Decision::Feasible: set_check_status(oc.report, true); break;
        case Decision::Infeasible: set_check_status(oc.report, false); break;
        case Decision::Undetermined:
            oc.report.status = "undetermined";
            oc.report.exit_code = kExitUndetermined;
            break;
        }
        break;
    }
    }
    oc.report.mode = std::string(mode_name(p.mode));
    if (n == 2 && p.mode != Mode::DeterministicCheck) add_two_state_bounds(oc.report, p, o);
    return oc;
}

struct FixedAncilla {
    std::optional<AncillaGram> a;
    std::optional<double> probe_value;
};

// The user's A if given, otherwise an ε-decision over all A.
FixedAncilla resolve_ancilla(const Problem &p, const CliOptions &o, const GramMatrix &x, const GramMatrix &y,
                             const EfficiencyMatrix &gamma) {
    FixedAncilla f;
    if (p.ancilla_gram) {
        if (p.ancilla_gram->rows() != x.size()) {
            throw Error(ErrorCode::ParseError, "ancilla_gram: expected one row per input row");
        }
        f.a.emplace(*p.ancilla_gram, std::max(o.psd_tol, 1e-9));
        return f;
    }
    const ProbeResult pr = feasibility_probe(x, y, gamma, o.solver);
    f.probe_value = pr.best_min_eigenvalue;
    if (pr.feasible) f.a = pr.ancilla;
    return f;
}

EfficiencyMatrix required_gamma(const Problem &p, std::size_t rows) {
    if (!p.gamma) throw Error(ErrorCode::ParseError, "gamma: required by check");
    if (p.gamma->size() != rows) {
        throw Error(ErrorCode::ParseError, "gamma: expected " + std::to_string(rows) + " entries");
    }
    try {
        return EfficiencyMatrix(*p.gamma);
    } catch (const Error &e) {
        throw Error(ErrorCode::ParseError, std::string("gamma: ") + e.what());
    }
}

Outcome check_rows(const Problem &p, const CliOptions &o, const GramMatrix &x, const GramMatrix &y,
                   const EfficiencyMatrix &gamma, bool members, const std::vector<StateEnsemble> &ens,
                   const GramMatrix &y_states) {
    Outcome oc;
    const FixedAncilla f = resolve_ancilla(p, o, x, y, gamma);
    if (f.probe_value) {
        oc.report.witness = *f.probe_value;
        oc.report.notes.push_back("no ancilla_gram given: decided by maximizing the smallest eigenvalue over A");
    }
    if (f.a) {
        // A probe-feasible point may sit up to the probe tolerance outside the cone.
        const double tol = f.probe_value ? std::max(o.psd_tol, 1e-7) : o.psd_tol;
        Certificate c = members ? check_mixed_to_pure(ens, y_states, gamma, *f.a, p.priors, tol)
                                : check_pure_feasible(x, y, gamma, *f.a, p.priors, tol);
        fill_from_certificate(oc.report, c);
        set_check_status(oc.report, c.feasible());
        if (members) oc.report.state_success = block_sums(gamma.etas(), x.block_row_sizes);
        if (c.feasible()) oc.report.ancilla_required = ancilla_needed(x.matrix, y.matrix, c, o.psd_tol);
        oc.cert = std::move(c);
    } else {
        oc.report.gamma = gamma.etas();
        set_check_status(oc.report, false);
    }
    return oc;
}

Outcome check_outcome(const Problem &p, const CliOptions &o) {
    const std::size_t n = p.inputs.size();
    Outcome oc;
    switch (p.mode) {
    case Mode::DeterministicCheck: return solve_outcome(p, o);
    case Mode::PureToPure:
    case Mode::Cloning:
    case Mode::Unambiguous:
        if (all_pure(p.inputs) && !p.input_ensembles) {
            auto in = require_pure(p.inputs, "inputs");
            std::vector<PureState> out;
            if (p.mode == Mode::PureToPure) out = require_pure(p.outputs, "outputs");
            if (p.mode == Mode::Cloning) out = generalized_cloning(in, p.copies).outputs;
            if (p.mode == Mode::Unambiguous) out = basis_outputs(n);
            const GramMatrix x = gram_matrix(in);
            const GramMatrix y = gram_matrix(out);
            const EfficiencyMatrix gamma = required_gamma(p, n);
            if (p.mode == Mode::Unambiguous) {
                const PsdVerdict v = check_unambiguous_pure(x, gamma, o.psd_tol);
                oc.cert = check_pure_feasible(x, y, gamma, AncillaGram::identity(n), p.priors, o.psd_tol);
                fill_from_certificate(oc.report, *oc.cert);
                oc.report.a.reset();
                oc.report.a_tilde.reset();
                oc.report.residual_min_eigenvalue = v.min_eigenvalue;
                set_check_status(oc.report, v.is_psd);
            } else {
                oc = check_rows(p, o, x, y, gamma, false, {}, y);
            }
            oc.route = Route::Pure;
            oc.inputs = std::move(in);
            oc.outputs = std::move(out);
            break;
        }
        if (p.mode != Mode::Unambiguous) throw Error(ErrorCode::ParseError, "inputs: this mode needs kets");
        [[fallthrough]];
    case Mode::MixedToPure: {
        const auto ens = ensembles_of(p);
        const auto outs = p.mode == Mode::Unambiguous ? basis_outputs(n) : require_pure(p.outputs, "outputs");
        const GramMatrix x = block_gram(ens);
        const GramMatrix ys = gram_matrix(outs);
        const GramMatrix y{expand_blockwise(ys.matrix, x.block_row_sizes), x.block_row_sizes};
        oc = check_rows(p, o, x, y, required_gamma(p, x.size()), true, ens, ys);
        if (p.mode == Mode::Unambiguous) oc.report.ancilla_required.reset();
        oc.route = Route::MixedToPure;
        oc.ensembles = ens;
        oc.outputs = outs;
        break;
    }
    case Mode::PureToMixed: {
        auto in = require_pure(p.inputs, "inputs");
        auto targets = densities(p.outputs);
        const auto purifs = choose_purifications(targets);
        const GramMatrix x = gram_matrix(in);
        const EfficiencyMatrix gamma = required_gamma(p, n);
        oc = check_rows(p, o, x, gram_matrix(purifs), gamma, false, {}, x);
        if (oc.cert && oc.cert->feasible()) {
            auto full = attach_ancillas(purifs, oc.cert->ancilla->matrix());
            const double tol = oc.report.witness ? std::max(o.psd_tol, 1e-7) : o.psd_tol;
            oc.cert = check_pure_to_mixed(x, full, targets, gamma, p.priors, tol);
            set_check_status(oc.report, oc.cert->feasible());
            oc.purifications = std::move(full);
        }
        oc.route = Route::PureToMixed;
        oc.inputs = std::move(in);
        oc.targets = std::move(targets);
        break;
    }
    case Mode::MixedToMixed: {
        if (!p.composite_ensembles) throw Error(ErrorCode::ParseError, "composite_ensembles: required by check");
        const auto ens = ensembles_of(p);
        auto targets = densities(p.outputs);
        Certificate c = check_mixed_to_mixed(block_gram(ens), *p.composite_ensembles, targets, p.priors, o.psd_tol);
        fill_from_certificate(oc.report, c);
        oc.report.state_success = c.gamma.etas();
        set_check_status(oc.report, c.feasible());
        oc.cert = std::move(c);
        oc.route = Route::MixedToMixed;
        oc.ensembles = ens;
        oc.composite = *p.composite_ensembles;
        oc.targets = std::move(targets);
        break;
    }
    }
    oc.report.mode = std::string(mode_name(p.mode));
    if (n == 2 && p.mode != Mode::DeterministicCheck) add_two_state_bounds(oc.report, p, o);
    return oc;
}

void add_two_state_bounds(ResultReport &r, const Problem &p, const CliOptions &o) {
    const auto in = densities(p.inputs);
    const double p1 = p.priors[0];
    const double p2 = p.priors[1];
    const double f_in = fidelity(in[0], in[1]);
    double f_out = 0.0;
    std::optional<std::pair<DensityMatrix, DensityMatrix>> outs;
    if (p.mode == Mode::Cloning) {
        f_out = std::pow(f_in, static_cast<double>(p.copies));
    } else if (p.mode != Mode::Unambiguous) {
        const auto o2 = densities(p.outputs);
        f_out = fidelity(o2[0], o2[1]);
        outs.emplace(o2[0], o2[1]);
    }
    r.bounds.emplace_back("two-state bound", two_state_bound(p1, p2, f_in, f_out));
    r.bounds.emplace_back("orthogonal-output bound", std::max(0.0, 1.0 - 2.0 * std::sqrt(p1 * p2) * f_in));
    if (o.seed && outs) {
        r.bounds.emplace_back("purification search overlap",
                              purification_overlap_search(outs->first, outs->second, 2000, *o.seed));
    }
}

SynthesizedDilation build_dilation(const Outcome &oc) {
    switch (oc.route) {
    case Route::Pure: {
        std::vector<PureState> outs = oc.outputs;
        return synthesize_pure(oc.inputs, outs, *oc.cert);
    }
    case Route::PureToMixed: return synthesize_pure_to_mixed(oc.inputs, oc.targets, oc.purifications, *oc.cert);
    case Route::MixedToPure: return synthesize_mixed_to_pure(oc.ensembles, oc.outputs, *oc.cert);
    case Route::MixedToMixed: return synthesize_mixed_to_mixed(oc.ensembles, oc.composite, oc.targets, *oc.cert);
    case Route::None: break;
    }
    throw Error(ErrorCode::CertificateNotFeasible, "nothing to synthesize");
}

double unitarity_defect(const CMatrix &u) { return max_abs_diff(u.adjoint() * u, CMatrix::identity(u.rows())); }

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string fmt(cplx z) {
    if (std::abs(z.imag()) < 5e-11) return fmt(z.real());
    std::ostringstream os;
    os << std::setprecision(10) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

void write_matrix(std::ostringstream &os, const char *name, const CMatrix &m) {
    os << name << ":\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << " ";
        for (std::size_t c = 0; c < m.cols(); ++c) os << ' ' << std::setw(14) << fmt(m(r, c));
        os << '\n';
    }
}

nlohmann::json matrix_json(const CMatrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

ResultReport cmd_solve(const Problem &problem, const CliOptions &opts) {
    ResultReport r = solve_outcome(problem, opts).report;
    r.command = "solve";
    return r;
}

ResultReport cmd_check(const Problem &problem, const CliOptions &opts) {
    ResultReport r = check_outcome(problem, opts).report;
    r.command = "check";
    return r;
}

ResultReport cmd_synthesize(const Problem &problem, const std::filesystem::path &out, const CliOptions &opts) {
    Outcome oc = problem.gamma ? check_outcome(problem, opts) : solve_outcome(problem, opts);
    ResultReport &r = oc.report;
    r.command = "synthesize";
    if (!oc.cert || !oc.cert->feasible() || oc.route == Route::None) {
        r.notes.push_back("no feasible certificate; nothing synthesized");
        if (r.exit_code == kExitOk) {
            r.status = "undetermined";
            r.exit_code = kExitUndetermined;
        }
        return r;
    }
    const SynthesizedDilation dil = build_dilation(oc);
    DilationSummary s{dil.dims, unitarity_defect(dil.u), out.string()};
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw Error(ErrorCode::ParseError, "cannot write " + out.string());
        f << write_dilation(dil);
    }
    r.dilation = s;
    r.simulations = simulate_certified(dil);

    // Round trip: simulated success must match the certified efficiencies.
    const std::vector<double> expected = r.state_success.empty() ? r.gamma : r.state_success;
    for (std::size_t i = 0; i < r.simulations.size() && i < expected.size(); ++i) {
        if (std::abs(r.simulations[i].success_probability - expected[i]) > kRoundTripTol) {
            r.notes.push_back("simulation of input " + std::to_string(i) + " deviates from the certificate");
            r.status = "undetermined";
            r.exit_code = kExitUndetermined;
        }
    }
    return r;
}

ResultReport cmd_simulate(const SynthesizedDilation &dil,
                          const std::optional<std::pair<DensityMatrix, std::optional<DensityMatrix>>> &state,
                          const CliOptions &) {
    ResultReport r;
    r.command = "simulate";
    r.status = "solved";
    r.dilation = DilationSummary{dil.dims, unitarity_defect(dil.u), {}};
    if (state) {
        r.simulations.push_back(simulate(dil, state->first, state->second));
    } else {
        r.simulations = simulate_certified(dil);
    }
    return r;
}

ResultReport cmd_bounds(const Problem &problem, const CliOptions &opts) {
    if (problem.inputs.size() != 2) throw Error(ErrorCode::ParseError, "inputs: bounds need exactly two states");
    ResultReport r;
    r.command = "bounds";
    r.mode = std::string(mode_name(problem.mode));
    r.status = "solved";
    add_two_state_bounds(r, problem, opts);
    return r;
}

std::string format_text(const ResultReport &r) {
    std::ostringstream os;
    os << "command: " << r.command << '\n';
    if (!r.mode.empty()) os << "mode: " << r.mode << '\n';
    os << "status: " << r.status << '\n';
    if (r.p) os << "P: " << fmt(*r.p) << '\n';
    if (!r.gamma.empty()) {
        os << "gamma:";
        for (double g : r.gamma) os << ' ' << fmt(g);
        os << '\n';
    }
    if (!r.state_success.empty()) {
        os << "state success:";
        for (double g : r.state_success) os << ' ' << fmt(g);
        os << '\n';
    }
    if (r.a) write_matrix(os, "A", *r.a);
    if (r.a_tilde) write_matrix(os, "A_tilde", *r.a_tilde);
    if (r.residual_min_eigenvalue) os << "residual min eigenvalue: " << fmt(*r.residual_min_eigenvalue) << '\n';
    if (r.ancilla_required) os << "ancilla required: " << (*r.ancilla_required ? "yes" : "no") << '\n';
    if (r.witness) os << "witness: " << fmt(*r.witness) << '\n';
    for (const auto &[name, v] : r.bounds) os << name << ": " << fmt(v) << '\n';
    if (r.dilation) {
        os << "dilation: " << r.dilation->dims.d_out << " x " << r.dilation->dims.d_ancilla << " x "
           << r.dilation->dims.d_probe << " (output x ancilla x probe), unitarity defect "
           << fmt(r.dilation->unitarity_defect) << '\n';
        if (!r.dilation->path.empty()) os << "dilation file: " << r.dilation->path << '\n';
    }
    for (std::size_t i = 0; i < r.simulations.size(); ++i) {
        const auto &s = r.simulations[i];
        os << "simulation " << i << ": success " << fmt(s.success_probability) << ", failure "
           << fmt(s.failure_probability);
        if (s.fidelity_to_target) os << ", fidelity " << fmt(*s.fidelity_to_target);
        os << '\n';
    }
    for (const auto &n : r.notes) os << "note: " << n << '\n';
    return os.str();
}

std::string format_structured(const ResultReport &r) {
    nlohmann::json j;
    j["command"] = r.command;
    if (!r.mode.empty()) j["mode"] = r.mode;
    j["status"] = r.status;
    j["exit_code"] = r.exit_code;
    if (r.p) j["P"] = *r.p;
    if (!r.gamma.empty()) j["gamma"] = r.gamma;
    if (!r.state_success.empty()) j["state_success"] = r.state_success;
    if (r.a) j["A"] = matrix_json(*r.a);
    if (r.a_tilde) j["A_tilde"] = matrix_json(*r.a_tilde);
    if (r.residual_min_eigenvalue) j["residual_min_eigenvalue"] = *r.residual_min_eigenvalue;
    if (r.ancilla_required) j["ancilla_required"] = *r.ancilla_required;
    if (r.witness) j["witness"] = *r.witness;
    for (const auto &[name, v] : r.bounds) j["bounds"][name] = v;
    if (r.dilation) {
        j["dilation"] = {{"d_out", r.dilation->dims.d_out},
                         {"d_ancilla", r.dilation->dims.d_ancilla},
                         {"d_probe", r.dilation->dims.d_probe},
                         {"unitarity_defect", r.dilation->unitarity_defect}};
        if (!r.dilation->path.empty()) j["dilation"]["path"] = r.dilation->path;
    }
    for (const auto &s : r.simulations) {
        nlohmann::json e{{"success_probability", s.success_probability},
                         {"failure_probability", s.failure_probability}};
        if (s.fidelity_to_target) e["fidelity_to_target"] = *s.fidelity_to_target;
        if (s.conditional_output) e["conditional_output"] = matrix_json(s.conditional_output->matrix());
        j["simulations"].push_back(std::move(e));
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j.dump(2) + "\n";
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Feasibility, optimal success probability and unitary dilations for probabilistic "
                 "transformations of quantum state sets"};
    std::string command;
    std::string file;
    std::string output;
    std::string format = "text";
    std::string batch;
    std::string state;
    CliOptions opts;
    std::uint64_t seed = 0;

    app.add_option("command", command, "solve | check | synthesize | simulate | bounds")
        ->required()
        ->check(CLI::IsMember({"solve", "check", "synthesize", "simulate", "bounds"}));
    app.add_option("file", file, "Problem file (or dilation file for simulate)");
    app.add_option("--tol", opts.psd_tol, "Relative PSD tolerance")->check(CLI::PositiveNumber);
    app.add_option("--gap-tol", opts.solver.gap_tol, "Solver stopping tolerance")->check(CLI::PositiveNumber);
    auto *seed_opt = app.add_option("--seed", seed, "Seed for the purification-overlap cross-check");
    app.add_option("--output", output, "Report file (dilation file for synthesize)");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}));
    app.add_option("--batch", batch, "Process every .problem/.json file in a directory");
    app.add_option("--state", state, "State document for simulate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }
    if (*seed_opt) opts.seed = seed;
    const bool structured = format == "structured";

    auto run_one = [&](const std::filesystem::path &path, const std::filesystem::path &dilation_out) {
        if (command == "simulate") {
            const SynthesizedDilation dil = read_dilation(read_file(path));
            std::optional<std::pair<DensityMatrix, std::optional<DensityMatrix>>> st;
            if (!state.empty()) st = parse_state_document(read_file(state));
            return cmd_simulate(dil, st, opts);
        }
        const Problem p = load_problem(path);
        if (command == "solve") return cmd_solve(p, opts);
        if (command == "check") return cmd_check(p, opts);
        if (command == "bounds") return cmd_bounds(p, opts);
        return cmd_synthesize(p, dilation_out, opts);
    };
    auto render = [&](const ResultReport &r) { return structured ? format_structured(r) : format_text(r); };
    auto default_dilation = [](std::filesystem::path p) { return p.replace_extension(".dilation"); };

    if (!batch.empty()) {
        if (command == "simulate") {
            err << "error: ParseError: --batch does not apply to simulate\n";
            return kExitInputError;
        }
        std::vector<std::filesystem::path> files;
        std::error_code ec;
        for (const auto &e : std::filesystem::directory_iterator(batch, ec)) {
            const auto ext = e.path().extension();
            if (e.is_regular_file() && (ext == ".problem" || ext == ".json")) files.push_back(e.path());
        }
        if (ec) {
            err << "error: ParseError: cannot list " << batch << '\n';
            return kExitInputError;
        }
        std::sort(files.begin(), files.end());
        std::vector<std::future<std::pair<int, std::string>>> jobs;
        for (const auto &f : files) {
            jobs.push_back(std::async(std::launch::async, [&, f] {
                try {
                    const ResultReport r = run_one(f, default_dilation(f));
                    return std::make_pair(r.exit_code, render(r));
                } catch (const Error &e) {
                    return std::make_pair(kExitInputError, std::string("error: ") + e.what() + "\n");
                }
            }));
        }
        int worst = kExitOk;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            auto [code, text] = jobs[i].get();
            out << "== " << files[i].filename().string() << " ==\n" << text;
            worst = std::max(worst, code);
        }
        return worst;
    }

    if (file.empty()) {
        err << "error: ParseError: a file argument or --batch is required\n";
        return kExitInputError;
    }
    try {
        const std::filesystem::path dil_path =
            command == "synthesize" ? (output.empty() ? default_dilation(file) : std::filesystem::path(output))
                                    : std::filesystem::path();
        const ResultReport r = run_one(file, dil_path);
        const std::string text = render(r);
        out << text;
        if (!output.empty() && command != "synthesize") {
            std::ofstream f(output);
            if (!f) throw Error(ErrorCode::ParseError, "cannot write " + output);
            f << text;
        }
        return r.exit_code;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace qtf
