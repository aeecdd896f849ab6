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

#include "qtf/synth.hpp"

#include <algorithm>
#include <cmath>

#include "qtf/error.hpp"

namespace qtf {

namespace {

constexpr double kResidualMatch = 1e-8;
constexpr double kDropTol = 1e-10;
constexpr double kIsometryTol = 1e-6;

// Everything the generic construction needs, one entry per row of the Gram system.
struct RowSystem {
    std::vector<CVector> inputs;
    std::size_t d_in = 0;
    std::vector<CVector> success; // √η |out⟩|α⟩ in C^(d_out·d_anc)
    std::size_t d_out = 0;
    std::size_t d_anc = 0;
    CMatrix residual;
};

CVector embed(const CVector &v, std::size_t dim) {
    CVector out(dim);
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

void axpy(CVector &y, cplx a, const CVector &x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

CVector combination(const std::vector<CVector> &vs, const CVector &c) {
    CVector out(vs.front().size());
    for (std::size_t i = 0; i < vs.size(); ++i) axpy(out, c[i], vs[i]);
    return out;
}

void project_out(CVector &r, CVector &rc, const std::vector<CVector> &q, const std::vector<CVector> &qc) {
    for (std::size_t j = 0; j < q.size(); ++j) {
        const cplx p = inner(q[j], r);
        axpy(r, -p, q[j]);
        axpy(rc, -p, qc[j]);
    }
}

SynthesizedDilation build(const RowSystem &rs) {
    const std::size_t n = rs.inputs.size();
    const std::size_t base = rs.d_out * rs.d_anc;

    const EigResult e = hermitian_eig(rs.residual.hermitian_part());
    const double cutoff = kDropTol * Tolerances::scale(rs.residual.max_abs());
    std::vector<std::size_t> kept;
    for (std::size_t c = n; c-- > 0;) {
        if (e.eigenvalues[c] > cutoff) kept.push_back(c);
    }

    SynthesizedDilation dil;
    dil.input_dim = rs.d_in;
    dil.dims.d_out = rs.d_out;
    dil.dims.d_ancilla = rs.d_anc;
    dil.dims.d_probe = std::max(1 + kept.size(), (rs.d_in + base - 1) / base);
    const std::size_t dp = dil.dims.d_probe;
    const std::size_t dim = dil.dims.total();

    // Failure branch: reference output⊗ancilla state |0⟩ with probe states |1⟩, |2⟩, …
    std::vector<CVector> images(n, CVector(dim));
    for (std::size_t i = 0; i < n; ++i) {
        CVector beta(dim);
        for (std::size_t c = 0; c < kept.size(); ++c) {
            beta[c + 1] = std::sqrt(e.eigenvalues[kept[c]]) * std::conj(e.vectors(i, kept[c]));
        }
        for (std::size_t oa = 0; oa < base; ++oa) images[i][oa * dp] = rs.success[i][oa];
        axpy(images[i], 1.0, beta);
        dil.betas.push_back(std::move(beta));
    }

    // Pivoted Gram-Schmidt on the embedded inputs, tracking q_j = Σ_i qc_j[i] |in_i⟩.
    std::vector<CVector> embedded(n);
    std::vector<CVector> resid(n);
    std::vector<CVector> rcoef(n, CVector(n));
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        embedded[i] = embed(rs.inputs[i], dim);
        resid[i] = embedded[i];
        rcoef[i][i] = 1.0;
        scale = std::max(scale, norm(resid[i]));
    }
    std::vector<bool> used(n, false);
    std::vector<CVector> q;
    std::vector<CVector> qc;
    for (;;) {
        std::size_t pivot = n;
        double best = kDropTol * scale;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double r = norm(resid[i]);
            if (r > best) {
                best = r;
                pivot = i;
            }
        }
        if (pivot == n) break;
        used[pivot] = true;
        project_out(resid[pivot], rcoef[pivot], q, qc);
        const double r = norm(resid[pivot]);
        if (r <= kDropTol * scale) continue;
        CVector qn = resid[pivot];
        CVector cn = rcoef[pivot];
        for (auto &v : qn) v /= r;
        for (auto &v : cn) v /= r;
        q.push_back(qn);
        qc.push_back(cn);
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            const cplx p = inner(qn, resid[i]);
            axpy(resid[i], -p, qn);
            axpy(rcoef[i], -p, cn);
        }
    }
    if (q.empty()) throw Error(ErrorCode::OrthonormalizationFailure, "input states span nothing");

    CMatrix w_raw(dim, q.size());
    for (std::size_t j = 0; j < q.size(); ++j) w_raw.set_column(j, combination(images, qc[j]));
    const CMatrix w_gram = w_raw.adjoint() * w_raw;
    if (max_abs_diff(w_gram, CMatrix::identity(q.size())) > kIsometryTol) {
        throw Error(ErrorCode::OrthonormalizationFailure, "images of the input basis are not orthonormal");
    }
    const CMatrix w_iso = nearest_isometry(w_raw);
    std::vector<CVector> w_cols;
    for (std::size_t j = 0; j < q.size(); ++j) w_cols.push_back(w_iso.column(j));

    const CMatrix q_full = complete_to_unitary(q, dim);
    const CMatrix w_full = complete_to_unitary(w_cols, dim);
    dil.u = w_full * q_full.adjoint();

    for (std::size_t i = 0; i < n; ++i) {
        CVector img = dil.u * embedded[i];
        CVector diff = img;
        axpy(diff, -1.0, images[i]);
        if (norm(diff) > kIsometryTol * std::max(1.0, norm(images[i]))) {
            throw Error(ErrorCode::OrthonormalizationFailure, "dependent inputs are not mapped consistently");
        }
        dil.images.push_back(std::move(img));
    }
    dil.inputs = rs.inputs;
    return dil;
}

void require_feasible(const Certificate &cert) {
    if (!cert.feasible()) throw Error(ErrorCode::CertificateNotFeasible, "certificate is not feasible");
}

void require_residual(const CMatrix &recomputed, const Certificate &cert) {
    if (recomputed.rows() != cert.residual.rows() ||
        max_abs_diff(recomputed, cert.residual) > kResidualMatch * Tolerances::scale(recomputed.max_abs())) {
        throw Error(ErrorCode::GramMismatch, "states do not reproduce the certificate's residual");
    }
}

std::size_t common_dim(std::span<const PureState> states) {
    if (states.empty()) throw Error(ErrorCode::EmptySet, "empty state set");
    for (const auto &s : states) {
        if (s.dim() != states.front().dim()) throw Error(ErrorCode::DimMismatch, "states differ in dimension");
    }
    return states.front().dim();
}

const CMatrix &ancilla_matrix(const Certificate &cert, CMatrix &storage, std::size_t n) {
    if (cert.ancilla) return cert.ancilla->matrix();
    storage = CMatrix::ones(n, n);
    return storage;
}

// Success vectors √η_k |out_k⟩|α_k⟩ with |α_k⟩ from the factorization of A.
std::vector<CVector> success_vectors(const std::vector<CVector> &outs, const EfficiencyMatrix &gamma,
                                     const CMatrix &a, std::vector<CVector> &alphas) {
    alphas = factor_gram(a);
    std::vector<CVector> s;
    for (std::size_t k = 0; k < outs.size(); ++k) {
        CVector v = kron(outs[k], alphas[k]);
        for (auto &x : v) x *= std::sqrt(gamma[k]);
        s.push_back(std::move(v));
    }
    return s;
}

std::vector<CVector> amplitudes(std::span<const PureState> states) {
    std::vector<CVector> out;
    for (const auto &s : states) out.push_back(s.amplitudes());
    return out;
}

} // namespace

SynthesizedDilation synthesize_pure(std::span<const PureState> inputs, std::span<const PureState> outputs,
                                    const Certificate &cert) {
    require_feasible(cert);
    const std::size_t n = inputs.size();
    if (outputs.size() != n || cert.gamma.size() != n) throw Error(ErrorCode::ShapeMismatch, "one row per input");
    RowSystem rs;
    rs.d_in = common_dim(inputs);
    rs.d_out = common_dim(outputs);
    CMatrix storage;
    const CMatrix &a = ancilla_matrix(cert, storage, n);
    rs.residual = pure_residual(gram_matrix(inputs).matrix, gram_matrix(outputs).matrix, cert.gamma, a);
    require_residual(rs.residual, cert);
    std::vector<CVector> alphas;
    rs.success = success_vectors(amplitudes(outputs), cert.gamma, a, alphas);
    rs.d_anc = alphas.front().size();
    rs.inputs = amplitudes(inputs);

    SynthesizedDilation dil = build(rs);
    dil.alphas = std::move(alphas);
    for (std::size_t i = 0; i < n; ++i) {
        dil.input_states.push_back(DensityMatrix::from_pure(inputs[i]));
        dil.target_states.push_back(DensityMatrix::from_pure(outputs[i]));
    }
    return dil;
}

SynthesizedDilation synthesize_pure_to_mixed(std::span<const PureState> inputs,
                                             std::span<const DensityMatrix> targets,
                                             std::span<const PureState> purifications, const Certificate &cert) {
    require_feasible(cert);
    const std::size_t n = inputs.size();
    if (targets.size() != n || purifications.size() != n || cert.gamma.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "one target and purification per input");
    }
    const std::size_t d = targets.front().dim();
    const std::size_t dp = common_dim(purifications);
    if (dp % d != 0) throw Error(ErrorCode::DimMismatch, "purification dimension is not a multiple of the target's");

    RowSystem rs;
    rs.d_in = common_dim(inputs);
    rs.d_out = d;
    CMatrix storage;
    const CMatrix &a = ancilla_matrix(cert, storage, n);
    rs.residual = pure_residual(gram_matrix(inputs).matrix, gram_matrix(purifications).matrix, cert.gamma, a);
    require_residual(rs.residual, cert);
    std::vector<CVector> alphas;
    rs.success = success_vectors(amplitudes(purifications), cert.gamma, a, alphas);
    rs.d_anc = (dp / d) * alphas.front().size();
    rs.inputs = amplitudes(inputs);

    SynthesizedDilation dil = build(rs);
    dil.alphas = std::move(alphas);
    for (std::size_t i = 0; i < n; ++i) {
        dil.input_states.push_back(DensityMatrix::from_pure(inputs[i]));
        dil.target_states.push_back(targets[i]);
    }
    return dil;
}

SynthesizedDilation synthesize_mixed_to_pure(std::span<const StateEnsemble> inputs,
                                             std::span<const PureState> outputs, const Certificate &cert) {
    require_feasible(cert);
    if (outputs.size() != inputs.size()) throw Error(ErrorCode::ShapeMismatch, "one output per input ensemble");
    const GramMatrix x = block_gram(inputs);
    if (cert.gamma.size() != x.size()) throw Error(ErrorCode::InvalidBlockStructure, "one efficiency per member");

    RowSystem rs;
    rs.d_in = inputs.front().dim();
    rs.d_out = common_dim(outputs);
    std::vector<CVector> outs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].dim() != rs.d_in) throw Error(ErrorCode::DimMismatch, "inputs differ in dimension");
        for (const auto &m : inputs[i].members()) {
            rs.inputs.push_back(m.scaled());
            outs.push_back(outputs[i].amplitudes());
        }
    }
    CMatrix storage;
    const CMatrix &a = ancilla_matrix(cert, storage, x.size());
    const CMatrix y_hat = expand_blockwise(gram_matrix(outputs).matrix, x.block_row_sizes);
    rs.residual = pure_residual(x.matrix, y_hat, cert.gamma, a);
    require_residual(rs.residual, cert);
    std::vector<CVector> alphas;
    rs.success = success_vectors(outs, cert.gamma, a, alphas);
    rs.d_anc = alphas.front().size();

    SynthesizedDilation dil = build(rs);
    dil.alphas = std::move(alphas);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        dil.input_states.push_back(inputs[i].source());
        dil.target_states.push_back(DensityMatrix::from_pure(outputs[i]));
    }
    return dil;
}

SynthesizedDilation synthesize_mixed_to_mixed(std::span<const StateEnsemble> inputs,
                                              std::span<const CompositeOutputEnsemble> candidate,
                                              std::span<const DensityMatrix> targets, const Certificate &cert) {
    require_feasible(cert);
    if (candidate.size() != inputs.size() || targets.size() != inputs.size()) {
        throw Error(ErrorCode::ShapeMismatch, "one candidate and target per input ensemble");
    }
    const GramMatrix x = block_gram(inputs);
    RowSystem rs;
    rs.d_in = inputs.front().dim();
    rs.d_out = candidate.front().d_out;
    rs.d_anc = candidate.front().d_anc;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (candidate[i].vectors.size() != inputs[i].size()) {
            throw Error(ErrorCode::InvalidBlockStructure, "one composite vector per ensemble member");
        }
        if (candidate[i].d_out != rs.d_out || candidate[i].d_anc != rs.d_anc) {
            throw Error(ErrorCode::DimMismatch, "composite vectors differ in dimension");
        }
        for (std::size_t k = 0; k < inputs[i].size(); ++k) {
            rs.inputs.push_back(inputs[i].members()[k].scaled());
            rs.success.push_back(candidate[i].vectors[k]);
        }
    }
    const std::size_t total = rs.success.size();
    CMatrix y_tilde(total, total);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) y_tilde(r, c) = inner(rs.success[r], rs.success[c]);
    }
    rs.residual = x.matrix - y_tilde;
    require_residual(rs.residual, cert);

    SynthesizedDilation dil = build(rs);
    dil.alphas = {CVector{1.0}};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        dil.input_states.push_back(inputs[i].source());
        dil.target_states.push_back(targets[i]);
    }
    return dil;
}

SimulationReport simulate(const SynthesizedDilation &dil, const DensityMatrix &rho_in,
                          const std::optional<DensityMatrix> &target) {
    if (rho_in.dim() != dil.input_dim) throw Error(ErrorCode::DimMismatch, "input dimension mismatch");
    const std::size_t dim = dil.dims.total();
    CMatrix rho(dim, dim);
    rho.set_block(0, 0, rho_in.matrix());
    const CMatrix out = dil.u * rho * dil.u.adjoint();

    const std::size_t d_out = dil.dims.d_out;
    const std::size_t d_anc = dil.dims.d_ancilla;
    const std::size_t dp = dil.dims.d_probe;
    const std::size_t p0 = dil.probe_success_index;
    auto idx = [&](std::size_t o, std::size_t a, std::size_t p) { return (o * d_anc + a) * dp + p; };

    SimulationReport rep;
    CMatrix cond(d_out, d_out);
    for (std::size_t o = 0; o < d_out; ++o) {
        for (std::size_t o2 = 0; o2 < d_out; ++o2) {
            for (std::size_t a = 0; a < d_anc; ++a) cond(o, o2) += out(idx(o, a, p0), idx(o2, a, p0));
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (i % dp == p0) {
            rep.success_probability += out(i, i).real();
        } else {
            rep.failure_probability += out(i, i).real();
        }
    }
    rep.success_probability = std::clamp(rep.success_probability, 0.0, 1.0);
    if (rep.success_probability > 1e-12) {
        cond = (cond * cplx(1.0 / cond.trace().real())).hermitian_part();
        rep.conditional_output.emplace(std::move(cond), 1e-6);
        if (target) {
            if (target->dim() != d_out) throw Error(ErrorCode::DimMismatch, "target dimension mismatch");
            rep.fidelity_to_target = fidelity(*rep.conditional_output, *target);
        }
    }
    return rep;
}

std::vector<SimulationReport> simulate_certified(const SynthesizedDilation &dil) {
    std::vector<SimulationReport> out;
    for (std::size_t i = 0; i < dil.input_states.size(); ++i) {
        out.push_back(simulate(dil, dil.input_states[i], dil.target_states[i]));
    }
    return out;
}

CloningProblem generalized_cloning(std::span<const PureState> inputs, std::size_t copies) {
    if (copies == 0) throw Error(ErrorCode::OutOfRange, "at least one copy is required");
    CloningProblem p;
    for (const auto &s : inputs) {
        CVector v = s.amplitudes();
        for (std::size_t c = 1; c < copies; ++c) v = kron(v, s.amplitudes());
        p.inputs.push_back(s);
        p.outputs.push_back(PureState::normalized(std::move(v)));
    }
    return p;
}

} // namespace qtf
