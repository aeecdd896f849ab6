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

#include "qtf/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtf/error.hpp"

namespace qtf {

namespace {

constexpr double kZeroOverlap = 1e-12;

void require_same_size(const CMatrix &a, const CMatrix &b, const char *what) {
    if (!a.is_square() || !b.is_square() || a.rows() != b.rows()) {
        throw Error(ErrorCode::ShapeMismatch, what);
    }
}

double weighted_success(const PriorDistribution &priors, std::span<const std::size_t> block_sizes,
                        const EfficiencyMatrix &gamma) {
    if (priors.size() != block_sizes.size()) {
        throw Error(ErrorCode::ShapeMismatch, "prior count does not match the number of states");
    }
    double p = 0.0;
    std::size_t row = 0;
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        for (std::size_t k = 0; k < block_sizes[i]; ++k) p += priors[i] * gamma[row++];
    }
    return p;
}

std::vector<std::size_t> sizes_of(std::span<const StateEnsemble> ensembles) {
    std::vector<std::size_t> s;
    for (const auto &e : ensembles) s.push_back(e.size());
    return s;
}

// A_ij = X_ij / Y_ij with the zero-overlap convention. Returns false when some
// Y_ij vanishes while X_ij does not; `completed` is set when a 0/0 entry occurs.
bool ratio_matrix(const CMatrix &x, const CMatrix &y, CMatrix &out, bool &completed) {
    out = CMatrix(x.rows(), x.cols());
    completed = false;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (std::abs(y(i, j)) > kZeroOverlap) {
                out(i, j) = x(i, j) / y(i, j);
            } else if (std::abs(x(i, j)) > kZeroOverlap) {
                return false;
            } else {
                out(i, j) = 0.0;
                completed = true;
            }
        }
    }
    return true;
}

DeterministicResult decide_ratio(const CMatrix &x, const CMatrix &y, double rel_tol) {
    DeterministicResult r;
    bool completed = false;
    if (!ratio_matrix(x, y, r.candidate, completed)) {
        r.decision = Decision::Infeasible;
        r.reason = "ZeroOutputOverlapWithNonzeroInput: an output overlap vanishes where the input overlap does not";
        return r;
    }
    const auto v = is_psd(r.candidate, rel_tol);
    r.witness = v.min_eigenvalue;
    if (v.is_psd) {
        r.decision = Decision::Feasible;
        r.ancilla = AncillaGram(r.candidate, rel_tol);
        r.reason = completed ? "PSD with zero-overlap entries completed by 0" : "A = X/Y is PSD";
    } else if (completed) {
        r.decision = Decision::Undetermined;
        r.reason = "undetermined: PSD completion not attempted";
    } else {
        r.decision = Decision::Infeasible;
        r.reason = "A = X/Y is not PSD";
    }
    return r;
}

} // namespace

EfficiencyMatrix::EfficiencyMatrix(std::vector<double> etas) : etas_(std::move(etas)) {
    for (double &e : etas_) {
        if (!std::isfinite(e) || e < -1e-12 || e > 1.0 + 1e-12) {
            std::ostringstream os;
            os << "efficiency " << e << " outside [0, 1]";
            throw Error(ErrorCode::InvalidGamma, os.str());
        }
        e = std::clamp(e, 0.0, 1.0);
    }
}

CMatrix EfficiencyMatrix::sqrt_matrix() const {
    std::vector<double> roots(etas_.size());
    std::transform(etas_.begin(), etas_.end(), roots.begin(), [](double e) { return std::sqrt(e); });
    return CMatrix::diagonal(roots);
}

AncillaGram::AncillaGram(CMatrix a, double rel_tol) : a_(std::move(a)) {
    if (!a_.is_square()) throw Error(ErrorCode::InvalidAncillaGram, "ancilla Gram must be square");
    if (!a_.all_finite() || a_.hermitian_defect() > 1e-9) {
        throw Error(ErrorCode::InvalidAncillaGram, "ancilla Gram must be Hermitian");
    }
    a_ = a_.hermitian_part();
    for (std::size_t i = 0; i < a_.rows(); ++i) {
        if (std::abs(a_(i, i) - 1.0) > 1e-9) throw Error(ErrorCode::InvalidAncillaGram, "diagonal entries must be 1");
        a_(i, i) = 1.0;
        for (std::size_t j = 0; j < a_.cols(); ++j) {
            if (std::abs(a_(i, j)) > 1.0 + 1e-9) {
                throw Error(ErrorCode::InvalidAncillaGram, "entries must satisfy |A_ij| <= 1");
            }
        }
    }
    const auto v = is_psd(a_, rel_tol);
    if (!v.is_psd) {
        std::ostringstream os;
        os << "ancilla Gram is not PSD (min eigenvalue " << v.min_eigenvalue << ")";
        throw Error(ErrorCode::InvalidAncillaGram, os.str());
    }
}

CMatrix pure_residual(const CMatrix &x, const CMatrix &y, const EfficiencyMatrix &gamma, const CMatrix &a) {
    require_same_size(x, y, "X and Y must have the same size");
    require_same_size(x, a, "A must match X");
    if (gamma.size() != x.rows()) throw Error(ErrorCode::ShapeMismatch, "gamma must match X");
    const CMatrix s = gamma.sqrt_matrix();
    return (x - hadamard(s * y * s, a)).hermitian_part();
}

Certificate check_pure_feasible(const GramMatrix &x, const GramMatrix &y, const EfficiencyMatrix &gamma,
                                const AncillaGram &a, const PriorDistribution &priors, double rel_tol) {
    CMatrix b = pure_residual(x.matrix, y.matrix, gamma, a.matrix());
    const auto verdict = is_psd(b, rel_tol);
    const double p = weighted_success(priors, x.block_row_sizes, gamma);
    return Certificate{gamma, a, std::move(b), verdict, p};
}

DeterministicResult check_deterministic_pure(const GramMatrix &x, const GramMatrix &y, double rel_tol) {
    require_same_size(x.matrix, y.matrix, "X and Y must have the same size");
    return decide_ratio(x.matrix, y.matrix, rel_tol);
}

PsdVerdict check_unambiguous_pure(const GramMatrix &x, const EfficiencyMatrix &gamma, double rel_tol) {
    if (gamma.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "gamma must match X");
    return is_psd((x.matrix - gamma.matrix()).hermitian_part(), rel_tol);
}

Certificate check_pure_to_mixed(const GramMatrix &x, std::span<const PureState> purifications,
                                std::span<const DensityMatrix> targets, const EfficiencyMatrix &gamma,
                                const PriorDistribution &priors, double rel_tol) {
    if (purifications.size() != x.size() || targets.size() != x.size()) {
        throw Error(ErrorCode::ShapeMismatch, "one purification and one target per input state");
    }
    for (std::size_t i = 0; i < purifications.size(); ++i) {
        const std::size_t d = targets[i].dim();
        if (purifications[i].dim() % d != 0) {
            throw Error(ErrorCode::NotAPurification, "purification dimension is not a multiple of the target's");
        }
        const CMatrix reduced = partial_trace_second(purifications[i].amplitudes(), d, purifications[i].dim() / d);
        if (max_abs_diff(reduced, targets[i].matrix()) > 1e-8) {
            std::ostringstream os;
            os << "purification " << i << " does not reduce to its target";
            throw Error(ErrorCode::NotAPurification, os.str());
        }
    }
    const GramMatrix y = gram_matrix(purifications);
    return check_pure_feasible(x, y, gamma, AncillaGram::ones(x.size()), priors, rel_tol);
}

Certificate check_mixed_to_pure(std::span<const StateEnsemble> inputs, const GramMatrix &y,
                                const EfficiencyMatrix &gamma, const AncillaGram &a,
                                const PriorDistribution &priors, double rel_tol) {
    if (inputs.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "one output per input ensemble");
    const GramMatrix x = block_gram(inputs);
    if (gamma.size() != x.size() || a.size() != x.size()) {
        throw Error(ErrorCode::InvalidBlockStructure, "gamma and A must have one row per ensemble member");
    }
    const CMatrix y_hat = expand_blockwise(y.matrix, x.block_row_sizes);
    CMatrix b = pure_residual(x.matrix, y_hat, gamma, a.matrix());
    const auto verdict = is_psd(b, rel_tol);
    const double p = weighted_success(priors, x.block_row_sizes, gamma);
    return Certificate{gamma, a, std::move(b), verdict, p};
}

DeterministicResult check_deterministic_mixed_to_pure(std::span<const StateEnsemble> inputs, const GramMatrix &y,
                                                      double rel_tol) {
    if (inputs.size() < 2) throw Error(ErrorCode::ShapeMismatch, "need at least two input ensembles");
    if (inputs.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "one output per input ensemble");
    const auto sizes = sizes_of(inputs);
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});

    // Normalized-member Gram assembled blockwise.
    CMatrix xn(total, total);
    std::size_t r0 = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::size_t c0 = 0;
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            xn.set_block(r0, c0, normalized_cross_gram(inputs[i], inputs[j]));
            c0 += sizes[j];
        }
        r0 += sizes[i];
    }
    const CMatrix y_hat = expand_blockwise(y.matrix, sizes);

    const bool orthonormal_members =
        max_abs_diff(normalized_cross_gram(inputs[0], inputs[0]), CMatrix::identity(sizes[0])) < 1e-9 &&
        max_abs_diff(normalized_cross_gram(inputs[1], inputs[1]), CMatrix::identity(sizes[1])) < 1e-9;
    if (inputs.size() == 2 && orthonormal_members) {
        DeterministicResult r;
        const CMatrix x12 = normalized_cross_gram(inputs[0], inputs[1]);
        const auto s = singular_values(x12);
        r.witness = s.empty() ? 0.0 : s.front();
        const double y12 = std::abs(y.matrix(0, 1));
        bool completed = false;
        const bool defined = ratio_matrix(xn, y_hat, r.candidate, completed);
        if (r.witness <= y12 + 1e-9) {
            r.decision = Decision::Feasible;
            if (defined) r.ancilla = AncillaGram(r.candidate, std::max(rel_tol, 1e-9));
            r.reason = "max singular value of X12 does not exceed |<phi1|phi2>|";
        } else {
            r.decision = Decision::Infeasible;
            r.reason = y12 <= kZeroOverlap
                           ? "ZeroOutputOverlapWithNonzeroInput: orthogonal outputs but overlapping inputs"
                           : "max singular value of X12 exceeds |<phi1|phi2>|";
        }
        return r;
    }
    return decide_ratio(xn, y_hat, rel_tol);
}

Certificate check_mixed_to_mixed(const GramMatrix &x_tilde, std::span<const CompositeOutputEnsemble> candidate,
                                 std::span<const DensityMatrix> targets, const PriorDistribution &priors,
                                 double rel_tol) {
    const std::size_t n = candidate.size();
    if (targets.size() != n || x_tilde.block_count() != n || priors.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "one candidate, target and prior per input state");
    }
    std::vector<CVector> all;
    std::vector<double> etas;
    for (std::size_t i = 0; i < n; ++i) {
        const auto &c = candidate[i];
        if (c.vectors.size() != x_tilde.block_row_sizes[i]) {
            throw Error(ErrorCode::ShapeMismatch, "candidate needs one composite vector per input member");
        }
        if (c.d_out != targets[i].dim()) throw Error(ErrorCode::ShapeMismatch, "candidate output dimension");
        CMatrix reduced(c.d_out, c.d_out);
        double eta = 0.0;
        for (const auto &v : c.vectors) {
            if (v.size() != c.d_out * c.d_anc) throw Error(ErrorCode::ShapeMismatch, "composite vector dimension");
            reduced += partial_trace_second(v, c.d_out, c.d_anc);
            eta += std::norm(norm(v));
        }
        if (std::abs(eta - c.eta) > 1e-8) {
            throw Error(ErrorCode::CandidateNotConsistent, "claimed eta does not match the composite norms");
        }
        if (max_abs_diff(reduced, targets[i].matrix() * c.eta) > 1e-8) {
            std::ostringstream os;
            os << "composite vectors of state " << i << " do not reduce to eta*sigma";
            throw Error(ErrorCode::CandidateNotConsistent, os.str());
        }
        if (!all.empty() && all.front().size() != c.d_out * c.d_anc) {
            throw Error(ErrorCode::ShapeMismatch, "composite vectors must share one space");
        }
        all.insert(all.end(), c.vectors.begin(), c.vectors.end());
        etas.push_back(std::clamp(c.eta, 0.0, 1.0));
    }
    const std::size_t m = all.size();
    if (m != x_tilde.size()) throw Error(ErrorCode::ShapeMismatch, "candidate size does not match X~");
    CMatrix y_tilde(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) y_tilde(a, b) = inner(all[a], all[b]);
    CMatrix residual = (x_tilde.matrix - y_tilde).hermitian_part();
    const auto verdict = is_psd(residual, rel_tol);
    EfficiencyMatrix gamma(etas);
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) p += priors[i] * gamma[i];
    return Certificate{std::move(gamma), std::nullopt, std::move(residual), verdict, p};
}

Certificate check_unambiguous_mixed(std::span<const StateEnsemble> inputs, std::span<const CMatrix> y_blocks,
                                    const PriorDistribution &priors, double rel_tol) {
    if (y_blocks.size() != inputs.size() || priors.size() != inputs.size()) {
        throw Error(ErrorCode::ShapeMismatch, "one block and one prior per input state");
    }
    const GramMatrix x = block_gram(inputs);
    CMatrix quasi(x.size(), x.size());
    std::vector<double> etas;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const CMatrix &blk = y_blocks[i];
        if (!blk.is_square() || blk.rows() != inputs[i].size()) {
            throw Error(ErrorCode::ShapeMismatch, "diagonal block size must equal the ensemble size");
        }
        if (blk.hermitian_defect() > 1e-9 || !is_psd(blk, rel_tol).is_psd) {
            std::ostringstream os;
            os << "block " << i << " is not Hermitian PSD";
            throw Error(ErrorCode::BlockNotPsd, os.str());
        }
        quasi.set_block(offset, offset, blk.hermitian_part());
        etas.push_back(std::clamp(blk.trace().real(), 0.0, 1.0));
        offset += blk.rows();
    }
    CMatrix residual = (x.matrix - quasi).hermitian_part();
    const auto verdict = is_psd(residual, rel_tol);
    EfficiencyMatrix gamma(etas);
    double p = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) p += priors[i] * gamma[i];
    return Certificate{std::move(gamma), std::nullopt, std::move(residual), verdict, p};
}

double two_state_bound(double p1, double p2, double input_overlap, double output_fidelity) {
    if (!(p1 >= 0.0) || !(p2 >= 0.0) || std::abs(p1 + p2 - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidProbability, "priors must be non-negative and sum to 1");
    }
    auto check_unit = [](double v, const char *what) {
        if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + 1e-12) throw Error(ErrorCode::OutOfRange, what);
        return std::clamp(v, 0.0, 1.0);
    };
    const double s = check_unit(input_overlap, "input overlap outside [0, 1]");
    const double f = check_unit(output_fidelity, "output fidelity outside [0, 1]");
    if (f >= 1.0) return 1.0;
    const double bound = (1.0 - 2.0 * std::sqrt(p1 * p2) * s) / (1.0 - f);
    return std::clamp(bound, 0.0, 1.0);
}

RestrictedEnsembles restrict_common_support(std::span<const StateEnsemble> inputs, const GramMatrix &y) {
    const std::size_t n = inputs.size();
    if (y.size() != n) throw Error(ErrorCode::ShapeMismatch, "one output per input ensemble");
    RestrictedEnsembles out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto &rho = inputs[i].source();
        const std::size_t d = rho.dim();
        std::vector<CVector> shared;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || std::abs(y.matrix(i, j)) >= 1.0 - 1e-9) continue;
            const auto w = support_intersection_basis(rho, inputs[j].source());
            shared.insert(shared.end(), w.begin(), w.end());
        }
        if (shared.empty()) {
            out.ensembles.push_back(inputs[i]);
            out.frozen.insert(out.frozen.end(), inputs[i].size(), false);
            continue;
        }
        // Projector onto span(shared).
        std::vector<CVector> w_basis;
        for (auto v : shared) {
            for (const auto &b : w_basis) {
                const cplx c = inner(b, v);
                for (std::size_t t = 0; t < d; ++t) v[t] -= c * b[t];
            }
            const double nv = norm(v);
            if (nv < 1e-9) continue;
            for (auto &z : v) z /= nv;
            w_basis.push_back(std::move(v));
        }
        CMatrix proj(d, d);
        for (const auto &b : w_basis) proj += CMatrix::outer(b, b);

        // ρ = V V† with V = B·diag(√λ); members are columns of V·U.
        const auto spectral = spectral_decompose(rho);
        const std::size_t r = spectral.size();
        CMatrix v(d, r);
        for (std::size_t k = 0; k < r; ++k) v.set_column(k, spectral.members()[k].scaled());
        const CMatrix off = (CMatrix::identity(d) - proj) * v;
        const auto eig = hermitian_eig((off.adjoint() * off).hermitian_part());
        std::vector<CVector> null_cols;
        for (std::size_t k = 0; k < r && null_cols.size() < w_basis.size(); ++k) {
            if (eig.eigenvalues[k] > 1e-10) break;
            null_cols.push_back(eig.vectors.column(k));
        }
        const CMatrix u = complete_to_unitary(null_cols, r);
        std::vector<EnsembleMember> members;
        for (std::size_t k = 0; k < r; ++k) {
            CVector col = v * u.column(k);
            const double w = std::norm(norm(col));
            members.push_back({w, PureState::normalized(std::move(col))});
        }
        out.ensembles.emplace_back(std::move(members), rho, 1e-8);
        for (std::size_t k = 0; k < r; ++k) out.frozen.push_back(k < null_cols.size());
    }
    return out;
}

} // namespace qtf
