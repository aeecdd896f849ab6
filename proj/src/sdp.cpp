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

#include "qtf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qtf/error.hpp"

namespace qtf {

namespace {

constexpr double kStepFactor = 0.95;
constexpr double kDivergence = 1e10;
constexpr double kVanishingEta = 1e-18;

// Re Tr(A B)
double re_trace_prod(const CMatrix &a, const CMatrix &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) s += (a(i, j) * b(j, i)).real();
    }
    return s;
}

double frobenius(const CMatrix &m) {
    double s = 0.0;
    for (const auto &v : m.entries()) s += std::norm(v);
    return std::sqrt(s);
}

double euclid(std::span<const double> v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

CMatrix lower_inverse(const CMatrix &l) {
    const std::size_t n = l.rows();
    CMatrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= l(i, k) * inv(k, j);
            inv(i, j) = s / l(i, i);
        }
    }
    return inv;
}

// Largest α with X + α dX ⪰ 0 (infinity when unbounded).
double max_step(const CMatrix &x, const CMatrix &dx) {
    const auto l = cholesky(x);
    if (!l) return 0.0;
    const CMatrix li = lower_inverse(*l);
    const CMatrix m = (li * dx * li.adjoint()).hermitian_part();
    const double lam = hermitian_eig(m).eigenvalues.front();
    return lam >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lam;
}

CMatrix combine(std::span<const CMatrix> s, std::span<const double> coef, std::size_t n) {
    CMatrix out(n, n);
    for (std::size_t m = 0; m < s.size(); ++m) {
        if (coef[m] != 0.0) out += s[m] * cplx(coef[m]);
    }
    return out;
}

std::vector<double> apply_op(std::span<const CMatrix> s, const CMatrix &x) {
    std::vector<double> out(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) out[m] = re_trace_prod(s[m], x);
    return out;
}

std::vector<double> solve_real(const CMatrix &l, std::span<const double> rhs) {
    CVector b(rhs.begin(), rhs.end());
    const CVector x = cholesky_solve(l, b);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].real();
    return out;
}

// Unit-diagonal PSD matrix and η from a (nearly) PSD Ã: factor the PSD part
// and normalize each row vector. Rows whose vector vanishes get fresh,
// mutually orthogonal directions, i.e. A_kk = 1 and zero off-diagonals.
std::pair<std::vector<double>, CMatrix> normalize_a_tilde(const CMatrix &a_tilde) {
    const std::size_t n = a_tilde.rows();
    const EigResult e = hermitian_eig(a_tilde.hermitian_part());
    std::vector<CVector> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < n; ++c) {
            if (e.eigenvalues[c] > 0.0) g[k].push_back(std::sqrt(e.eigenvalues[c]) * std::conj(e.vectors(k, c)));
        }
    }
    std::vector<double> eta(n);
    std::vector<double> len(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = norm(g[k]);
        eta[k] = std::clamp(s * s, 0.0, 1.0);
        len[k] = s;
        if (eta[k] <= kVanishingEta) eta[k] = 0.0;
    }
    CMatrix a(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        a(k, k) = 1.0;
        if (eta[k] == 0.0) continue;
        for (std::size_t l = k + 1; l < n; ++l) {
            if (eta[l] == 0.0) continue;
            a(k, l) = inner(g[k], g[l]) / (len[k] * len[l]);
            a(l, k) = std::conj(a(k, l));
        }
    }
    return {std::move(eta), std::move(a)};
}

double row_prior(const GramMatrix &x, const PriorDistribution &priors, std::size_t row) {
    std::size_t acc = 0;
    for (std::size_t i = 0; i < x.block_count(); ++i) {
        acc += x.block_row_sizes[i];
        if (row < acc) return priors[i];
    }
    throw Error(ErrorCode::InvalidBlockStructure, "row outside the block structure");
}

void add_offdiagonal_variables(StandardSDP &p, const CMatrix &y, std::size_t big) {
    const std::size_t n = p.n;
    const std::size_t na = p.active.size();
    const cplx i1(0.0, 1.0);
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = a + 1; b < na; ++b) {
            const std::size_t k = p.active[a];
            const std::size_t l = p.active[b];
            CMatrix re(big, big);
            re(k, l) = y(k, l);
            re(l, k) = y(l, k);
            re(n + a, n + b) = -1.0;
            re(n + b, n + a) = -1.0;
            p.constraints.push_back(std::move(re));
            p.variables.push_back({SdpVariable::Kind::RealPart, k, l});
            p.objective.push_back(0.0);

            CMatrix im(big, big);
            im(k, l) = i1 * y(k, l);
            im(l, k) = -i1 * y(l, k);
            im(n + a, n + b) = -i1;
            im(n + b, n + a) = i1;
            p.constraints.push_back(std::move(im));
            p.variables.push_back({SdpVariable::Kind::ImagPart, k, l});
            p.objective.push_back(0.0);
        }
    }
}

void check_grams(const GramMatrix &x, const GramMatrix &y) {
    if (!x.matrix.is_square() || !y.matrix.is_square() || x.size() != y.size()) {
        throw Error(ErrorCode::ShapeMismatch, "X and Y must be square and of equal size");
    }
    if (x.size() == 0) throw Error(ErrorCode::EmptySet, "empty state set");
    const std::size_t total = std::accumulate(x.block_row_sizes.begin(), x.block_row_sizes.end(), std::size_t{0});
    if (total != x.size()) throw Error(ErrorCode::InvalidBlockStructure, "block sizes do not cover X");
}

} // namespace

ConicResult solve_standard_form(const CMatrix &c, std::span<const CMatrix> s, std::span<const double> b,
                                const SolverOptions &opts) {
    if (!c.is_square()) throw Error(ErrorCode::NonSquare, "constant matrix");
    const std::size_t n = c.rows();
    const std::size_t m = s.size();
    if (b.size() != m) throw Error(ErrorCode::ShapeMismatch, "one objective coefficient per constraint matrix");
    for (const auto &sm : s) {
        if (sm.rows() != n || sm.cols() != n) throw Error(ErrorCode::ShapeMismatch, "constraint matrix size");
    }

    ConicResult out;
    out.y.assign(m, 0.0);
    if (m == 0) {
        out.slack = c;
        out.primal = CMatrix(n, n);
        out.status = is_psd(c).is_psd ? SdpStatus::Optimal : SdpStatus::Infeasible;
        return out;
    }

    const double norm_c = frobenius(c);
    const double norm_b = euclid(b);
    double max_s = 0.0;
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    for (std::size_t k = 0; k < m; ++k) {
        const double fs = frobenius(s[k]);
        max_s = std::max(max_s, fs);
        xi = std::max(xi, static_cast<double>(n) * (1.0 + std::abs(b[k])) / (1.0 + fs));
    }
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), norm_c, max_s});

    CMatrix x = CMatrix::identity(n) * cplx(xi);
    CMatrix z = CMatrix::identity(n) * cplx(eta);
    std::vector<double> y(m, 0.0);

    std::vector<CMatrix> t(m);
    CMatrix schur(m, m);

    for (int it = 0;; ++it) {
        const CMatrix rd = c - combine(s, y, n) - z;
        std::vector<double> rp = apply_op(s, x);
        for (std::size_t k = 0; k < m; ++k) rp[k] = b[k] - rp[k];
        const double pobj = re_trace_prod(c, x);
        const double dobj = std::inner_product(b.begin(), b.end(), y.begin(), 0.0);
        const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
        const double pinf = euclid(rp) / (1.0 + norm_b);
        const double dinf = frobenius(rd) / (1.0 + norm_c);
        const double rel_gap = std::max(std::abs(pobj - dobj), re_trace_prod(x, z)) / denom;

        out.y = y;
        out.primal = x;
        out.slack = z;
        out.iterations = it;
        out.primal_objective = pobj;
        out.dual_objective = dobj;
        out.relative_gap = rel_gap;

        if (std::max({pinf, dinf, rel_gap}) <= opts.gap_tol) {
            out.status = SdpStatus::Optimal;
            return out;
        }
        if (x.trace().real() > kDivergence || euclid(y) > kDivergence) {
            out.status = SdpStatus::Infeasible;
            return out;
        }
        if (it >= opts.max_iter) {
            out.status = SdpStatus::MaxIterations;
            return out;
        }

        const auto lz = cholesky(z);
        if (!lz) throw Error(ErrorCode::NumericalBreakdown, "dual slack lost definiteness");
        const CMatrix zinv = cholesky_inverse(*lz).hermitian_part();

        for (std::size_t j = 0; j < m; ++j) t[j] = x * s[j] * zinv;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                const double v = re_trace_prod(s[i], t[j]);
                schur(i, j) = v;
                schur(j, i) = v;
            }
        }
        auto lm = cholesky(schur);
        if (!lm) {
            double dmax = 0.0;
            for (std::size_t i = 0; i < m; ++i) dmax = std::max(dmax, schur(i, i).real());
            CMatrix reg = schur;
            for (std::size_t i = 0; i < m; ++i) reg(i, i) += 1e-13 * std::max(1.0, dmax);
            lm = cholesky(reg);
            if (!lm) throw Error(ErrorCode::NumericalBreakdown, "Schur complement is not positive definite");
        }

        const std::vector<double> base_op = apply_op(s, x * rd * zinv);
        const std::vector<double> zinv_op = apply_op(s, zinv);
        const double mu = re_trace_prod(x, z) / static_cast<double>(n);

        // Predictor (σ = 0).
        std::vector<double> rhs(m);
        for (std::size_t k = 0; k < m; ++k) rhs[k] = b[k] + base_op[k];
        const std::vector<double> dy_p = solve_real(*lm, rhs);
        const CMatrix dz_p = rd - combine(s, dy_p, n);
        const CMatrix dx_p = (CMatrix(n, n) - x - x * dz_p * zinv).hermitian_part();
        const double ap = std::min(1.0, max_step(x, dx_p));
        const double ad = std::min(1.0, max_step(z, dz_p));
        const double mu_aff = re_trace_prod(x + dx_p * cplx(ap), z + dz_p * cplx(ad)) / static_cast<double>(n);
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

        // Corrector.
        const CMatrix second = dx_p * dz_p * zinv;
        const std::vector<double> second_op = apply_op(s, second);
        for (std::size_t k = 0; k < m; ++k) rhs[k] = b[k] + base_op[k] - sigma * mu * zinv_op[k] + second_op[k];
        const std::vector<double> dy = solve_real(*lm, rhs);
        const CMatrix dz = rd - combine(s, dy, n);
        const CMatrix dx = (zinv * cplx(sigma * mu) - x - x * dz * zinv - second).hermitian_part();

        const double step_p = std::min(1.0, kStepFactor * max_step(x, dx));
        const double step_d = std::min(1.0, kStepFactor * max_step(z, dz));
        if (step_p <= 0.0 && step_d <= 0.0) throw Error(ErrorCode::NumericalBreakdown, "zero step length");
        x += dx * cplx(step_p);
        z += dz * cplx(step_d);
        for (std::size_t k = 0; k < m; ++k) y[k] += step_d * dy[k];
        x = x.hermitian_part();
        z = z.hermitian_part();
    }
}

StandardSDP encode(const GramMatrix &x, const GramMatrix &y, const PriorDistribution &priors,
                   std::span<const bool> frozen) {
    check_grams(x, y);
    if (priors.size() != x.block_count()) throw Error(ErrorCode::ShapeMismatch, "one prior per state");
    if (!frozen.empty() && frozen.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "frozen mask size");

    StandardSDP p;
    p.n = x.size();
    for (std::size_t k = 0; k < p.n; ++k) {
        if (frozen.empty() || !frozen[k]) p.active.push_back(k);
    }
    const std::size_t big = p.n + p.active.size();
    p.constant = CMatrix(big, big);
    p.constant.set_block(0, 0, x.matrix);
    p.fixed_a_tilde = CMatrix(p.n, p.n);

    for (std::size_t a = 0; a < p.active.size(); ++a) {
        const std::size_t k = p.active[a];
        CMatrix d(big, big);
        d(k, k) = y.matrix(k, k);
        d(p.n + a, p.n + a) = -1.0;
        p.constraints.push_back(std::move(d));
        p.variables.push_back({SdpVariable::Kind::Diagonal, k, k});
        p.objective.push_back(row_prior(x, priors, k));
    }
    add_offdiagonal_variables(p, y.matrix, big);
    p.gram_y = y.matrix;
    return p;
}

namespace {

// Hermitian basis element m of an r×r matrix: diagonal entries, then real and imaginary pairs.
std::vector<CMatrix> hermitian_basis(std::size_t r) {
    std::vector<CMatrix> out;
    for (std::size_t j = 0; j < r; ++j) {
        CMatrix e(r, r);
        e(j, j) = 1.0;
        out.push_back(std::move(e));
    }
    const cplx i1(0.0, 1.0);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t l = j + 1; l < r; ++l) {
            CMatrix re(r, r), im(r, r);
            re(j, l) = re(l, j) = 1.0;
            im(j, l) = i1;
            im(l, j) = -i1;
            out.push_back(std::move(re));
            out.push_back(std::move(im));
        }
    }
    return out;
}

std::vector<double> variables_of(const StandardSDP &prob, const CMatrix &a_tilde) {
    std::vector<double> y;
    for (const auto &v : prob.variables) {
        switch (v.kind) {
        case SdpVariable::Kind::Diagonal: y.push_back(a_tilde(v.k, v.k).real()); break;
        case SdpVariable::Kind::RealPart: y.push_back(a_tilde(v.k, v.l).real()); break;
        case SdpVariable::Kind::ImagPart: y.push_back(a_tilde(v.k, v.l).imag()); break;
        case SdpVariable::Kind::Shift: y.push_back(0.0); break;
        }
    }
    return y;
}

// Columns spanning the eigenspaces of a Hermitian matrix above (or at most) `cut`.
CMatrix eigen_columns(const CMatrix &m, double cut, bool above) {
    const auto e = hermitian_eig(m.hermitian_part());
    std::vector<CVector> cols;
    for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
        if ((e.eigenvalues[k] > cut) == above) cols.push_back(e.vectors.column(k));
    }
    return CMatrix::from_columns(cols, m.rows());
}

// When X is singular the LMI of encode has no interior: for v ∈ ker X and Ã ⪰ 0,
// v†(Y∘Ã)v = Σ|⟨α_b, c̄_a∘v⟩|² with Y = Σ c_a c_a†, Ã = Σ α_b α_b†, so every feasible Ã
// has range orthogonal to all c̄_a∘v (and to the frozen rows). Writing Ã = R M R† and
// compressing X − Y∘Ã onto range(X) gives an equivalent program with a strict interior.
struct Reduction {
    CMatrix range_x; // n×q, orthonormal basis of range(X)
    CMatrix range_a; // n×r, orthonormal basis of the admissible range of Ã
};

std::optional<Reduction> facial_reduction(const StandardSDP &prob) {
    const std::size_t n = prob.n;
    if (prob.gram_y.empty() || n == 0) return std::nullopt;
    const CMatrix x = prob.constant.block(0, 0, n, n);
    const double scale = std::max(1.0, x.max_abs());
    const double cut = kDefaultTolerances.psd * scale;
    const auto ex = hermitian_eig(x.hermitian_part());
    if (ex.eigenvalues.front() > cut) return std::nullopt;

    Reduction red;
    red.range_x = eigen_columns(x, cut, true);
    const CMatrix kernel = eigen_columns(x, cut, false);

    CMatrix blocked(n, n);
    std::vector<bool> active(n, false);
    for (std::size_t k : prob.active) active[k] = true;
    for (std::size_t k = 0; k < n; ++k) {
        if (!active[k]) blocked(k, k) = 1.0;
    }
    const auto c = factor_gram(prob.gram_y.hermitian_part());
    // factor_gram returns rows c_i with ⟨c_i|c_j⟩ = Y_ij; column a of that table is c_a.
    const std::size_t rank_y = c.empty() ? 0 : c.front().size();
    for (std::size_t v = 0; v < kernel.cols(); ++v) {
        for (std::size_t a = 0; a < rank_y; ++a) {
            CVector u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = c[i][a] * kernel(i, v);
            blocked += CMatrix::outer(u, u);
        }
    }
    const double bscale = std::max(1.0, blocked.max_abs());
    red.range_a = eigen_columns(blocked, kDefaultTolerances.psd * bscale, false);
    return red;
}

SdpSolution solve_reduced(const StandardSDP &prob, const Reduction &red, const SolverOptions &opts) {
    const std::size_t n = prob.n;
    const std::size_t q = red.range_x.cols();
    const std::size_t r = red.range_a.cols();

    std::vector<double> weight(n, 0.0);
    for (std::size_t m = 0; m < prob.variables.size(); ++m) {
        if (prob.variables[m].kind == SdpVariable::Kind::Diagonal) weight[prob.variables[m].k] = prob.objective[m];
    }

    SdpSolution sol;
    sol.a_tilde = CMatrix(n, n);
    if (r == 0) {
        sol.status = SdpStatus::Optimal;
        sol.objective = sol.dual_bound = prob.objective_offset;
        sol.y = variables_of(prob, sol.a_tilde);
        return sol;
    }

    const CMatrix qa = red.range_x.adjoint();
    const CMatrix x = prob.constant.block(0, 0, n, n);
    CMatrix c(q + r, q + r);
    c.set_block(0, 0, (qa * x * red.range_x).hermitian_part());

    const auto basis = hermitian_basis(r);
    std::vector<CMatrix> s;
    std::vector<double> b;
    for (const auto &e : basis) {
        const CMatrix a = red.range_a * e * red.range_a.adjoint();
        CMatrix sm(q + r, q + r);
        sm.set_block(0, 0, (qa * hadamard(prob.gram_y, a) * red.range_x).hermitian_part());
        sm.set_block(q, q, e * cplx(-1.0));
        s.push_back(std::move(sm));
        double obj = 0.0;
        for (std::size_t k = 0; k < n; ++k) obj += weight[k] * a(k, k).real();
        b.push_back(obj);
    }

    const ConicResult res = solve_standard_form(c, s, b, opts);
    CMatrix m(r, r);
    for (std::size_t k = 0; k < basis.size(); ++k) m += basis[k] * cplx(res.y[k]);
    sol.a_tilde = (red.range_a * m * red.range_a.adjoint()).hermitian_part();
    sol.y = variables_of(prob, sol.a_tilde);
    sol.iterations = res.iterations;
    sol.status = res.status;
    sol.objective = res.dual_objective + prob.objective_offset;
    sol.dual_bound = res.primal_objective + prob.objective_offset;
    sol.duality_gap = res.primal_objective - res.dual_objective;
    return sol;
}

SdpSolution solve_direct(const StandardSDP &prob, const SolverOptions &opts) {
    const ConicResult r = solve_standard_form(prob.constant, prob.constraints, prob.objective, opts);
    SdpSolution sol;
    sol.y = r.y;
    sol.iterations = r.iterations;
    sol.status = r.status;
    sol.objective = r.dual_objective + prob.objective_offset;
    sol.dual_bound = r.primal_objective + prob.objective_offset;
    sol.duality_gap = r.primal_objective - r.dual_objective;
    sol.a_tilde = prob.fixed_a_tilde;
    const cplx i1(0.0, 1.0);
    for (std::size_t m = 0; m < prob.variables.size(); ++m) {
        const auto &v = prob.variables[m];
        switch (v.kind) {
        case SdpVariable::Kind::Diagonal: sol.a_tilde(v.k, v.k) += r.y[m]; break;
        case SdpVariable::Kind::RealPart:
            sol.a_tilde(v.k, v.l) += r.y[m];
            sol.a_tilde(v.l, v.k) += r.y[m];
            break;
        case SdpVariable::Kind::ImagPart:
            sol.a_tilde(v.k, v.l) += i1 * r.y[m];
            sol.a_tilde(v.l, v.k) -= i1 * r.y[m];
            break;
        case SdpVariable::Kind::Shift: sol.shift = r.y[m]; break;
        }
    }
    return sol;
}

} // namespace

SdpSolution solve(const StandardSDP &prob, const SolverOptions &opts) {
    const auto red = facial_reduction(prob);
    SdpSolution sol = red ? solve_reduced(prob, *red, opts) : solve_direct(prob, opts);

    if (sol.status == SdpStatus::Optimal) {
        // The constraint must hold for the returned variables themselves.
        const CMatrix z = prob.constant - combine(prob.constraints, sol.y, prob.constant.rows());
        const double slack = 10.0 * opts.gap_tol * std::max(1.0, frobenius(prob.constant));
        if (hermitian_eig(z.hermitian_part()).eigenvalues.front() < -slack) sol.status = SdpStatus::MaxIterations;
    }
    return sol;
}

std::pair<EfficiencyMatrix, AncillaGram> extract(const SdpSolution &sol) {
    auto [eta, a] = normalize_a_tilde(sol.a_tilde);
    if (std::all_of(eta.begin(), eta.end(), [](double e) { return e == 0.0; })) {
        throw Error(ErrorCode::DegenerateEta, "all success probabilities vanish");
    }
    return {EfficiencyMatrix(std::move(eta)), AncillaGram(std::move(a))};
}

ProbeResult feasibility_probe(const GramMatrix &x, const GramMatrix &y, const EfficiencyMatrix &gamma,
                              const SolverOptions &opts, double eps) {
    check_grams(x, y);
    if (gamma.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "one efficiency per row");

    StandardSDP p;
    p.n = x.size();
    for (std::size_t k = 0; k < p.n; ++k) {
        if (gamma[k] > 0.0) p.active.push_back(k);
    }
    const std::size_t big = p.n + p.active.size();
    p.constant = CMatrix(big, big);
    p.constant.set_block(0, 0, x.matrix);
    p.fixed_a_tilde = CMatrix(p.n, p.n);
    for (std::size_t k = 0; k < p.n; ++k) {
        p.constant(k, k) -= y.matrix(k, k) * gamma[k];
        p.fixed_a_tilde(k, k) = gamma[k];
    }
    for (std::size_t a = 0; a < p.active.size(); ++a) p.constant(p.n + a, p.n + a) = gamma[p.active[a]];
    add_offdiagonal_variables(p, y.matrix, big);
    p.constraints.push_back(CMatrix::identity(big));
    p.variables.push_back({SdpVariable::Kind::Shift, 0, 0});
    p.objective.push_back(1.0);

    ProbeResult out;
    out.tolerance = eps;
    out.solution = solve(p, opts);
    out.best_min_eigenvalue = out.solution.shift;
    out.feasible = out.solution.shift >= -eps;
    if (out.feasible) {
        // Only the direction of each row matters; η is pinned by the caller.
        auto [eta, a] = normalize_a_tilde(out.solution.a_tilde);
        for (std::size_t k = 0; k < p.n; ++k) {
            if (gamma[k] == 0.0) {
                for (std::size_t l = 0; l < p.n; ++l) {
                    if (l != k) a(k, l) = a(l, k) = 0.0;
                }
            }
        }
        out.ancilla.emplace(std::move(a));
    }
    return out;
}

EfficiencyMatrix restore_feasibility(const CMatrix &x, const CMatrix &y, const EfficiencyMatrix &gamma,
                                     const AncillaGram &a) {
    const CMatrix b = pure_residual(x, y, gamma, a.matrix());
    const double lb = hermitian_eig(b.hermitian_part()).eigenvalues.front();
    if (lb >= 0.0) return gamma;
    const double lx = hermitian_eig(x.hermitian_part()).eigenvalues.front();
    if (lx <= 1e-12 * Tolerances::scale(x.max_abs())) return gamma;
    const double eps = std::min(1.0, -lb / (lx - lb) * (1.0 + 1e-6) + 1e-15);
    std::vector<double> etas = gamma.etas();
    for (auto &e : etas) e *= 1.0 - eps;
    return EfficiencyMatrix(std::move(etas));
}

OptimalTransformation optimize(const GramMatrix &x, const GramMatrix &y, const PriorDistribution &priors,
                               const SolverOptions &opts, std::span<const bool> frozen, double rel_tol) {
    const StandardSDP prob = encode(x, y, priors, frozen);
    SdpSolution sol = solve(prob, opts);
    const std::size_t n = x.size();

    std::optional<EfficiencyMatrix> gamma;
    std::optional<AncillaGram> a;
    try {
        auto [g, anc] = extract(sol);
        gamma.emplace(restore_feasibility(x.matrix, y.matrix, g, anc));
        a.emplace(std::move(anc));
    } catch (const Error &e) {
        if (e.code() != ErrorCode::DegenerateEta) throw;
        gamma.emplace(std::vector<double>(n, 0.0));
        a.emplace(AncillaGram::identity(n));
    }
    Certificate cert = check_pure_feasible(x, y, *gamma, *a, priors, rel_tol);
    return {std::move(sol), std::move(cert)};
}

} // namespace qtf
