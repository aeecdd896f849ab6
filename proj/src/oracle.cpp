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

#include "qtf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qtf/error.hpp"

namespace qtf {

namespace {

constexpr std::size_t kMaxStates = 3;

bool is_real(const CMatrix &m) {
    return std::all_of(m.entries().begin(), m.entries().end(), [](cplx v) { return std::abs(v.imag()) <= 1e-14; });
}

std::vector<std::pair<double, double>> resolve_bounds(const GridSpec &g, std::size_t params, double lo, double hi) {
    if (g.resolution < 2) throw Error(ErrorCode::OutOfRange, "grid resolution must be at least 2");
    if (g.bounds.empty()) return std::vector<std::pair<double, double>>(params, {lo, hi});
    if (g.bounds.size() != params) throw Error(ErrorCode::ShapeMismatch, "one bound per grid parameter");
    return g.bounds;
}

void check_size(const GridSpec &g, std::size_t params) {
    const double points = std::pow(static_cast<double>(g.resolution), static_cast<double>(params));
    if (points > static_cast<double>(g.cap)) throw Error(ErrorCode::GridTooLarge, "grid exceeds the point cap");
}

double grid_value(const std::pair<double, double> &b, std::size_t i, std::size_t res) {
    return b.first + (b.second - b.first) * static_cast<double>(i) / static_cast<double>(res - 1);
}

// Calls f(values) for every point of the product grid, in odometer order.
template <class F> void for_each_point(const std::vector<std::pair<double, double>> &bounds, std::size_t res, F &&f) {
    const std::size_t params = bounds.size();
    std::vector<std::size_t> idx(params, 0);
    std::vector<double> vals(params);
    for (;;) {
        for (std::size_t k = 0; k < params; ++k) vals[k] = grid_value(bounds[k], idx[k], res);
        f(vals);
        std::size_t k = 0;
        while (k < params && ++idx[k] == res) idx[k++] = 0;
        if (k == params) return;
    }
}

// Unit-diagonal PSD matrices on the grid.
std::vector<CMatrix> candidate_ancillas(std::size_t n, bool real, const GridSpec &grid) {
    const std::size_t pairs = n * (n - 1) / 2;
    const std::size_t params = real ? pairs : 2 * pairs;
    check_size(grid, params);
    const auto bounds = resolve_bounds(grid, params, -1.0, 1.0);
    std::vector<CMatrix> out;
    if (params == 0) {
        out.push_back(CMatrix::identity(n));
        return out;
    }
    for_each_point(bounds, grid.resolution, [&](const std::vector<double> &v) {
        CMatrix a = CMatrix::identity(n);
        std::size_t p = 0;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k + 1; l < n; ++l, ++p) {
                const cplx z = real ? cplx(v[p], 0.0) : cplx(v[2 * p], v[2 * p + 1]);
                if (std::abs(z) > 1.0 + 1e-12) return;
                a(k, l) = z;
                a(l, k) = std::conj(z);
            }
        }
        CMatrix shifted = a;
        for (std::size_t k = 0; k < n; ++k) shifted(k, k) += 1e-12;
        if (cholesky(shifted)) out.push_back(std::move(a));
    });
    return out;
}

CMatrix scaled_outputs(const CMatrix &y, const std::vector<double> &etas) {
    CMatrix s = y;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t j = 0; j < y.cols(); ++j) s(i, j) *= std::sqrt(etas[i] * etas[j]);
    }
    return s;
}

// Necessary for any |A_kl| ≤ 1: every 2×2 principal minor of X − √ΓY√Γ∘A can be PSD.
bool pairwise_admissible(const CMatrix &x, const CMatrix &y, const std::vector<double> &etas, double tol) {
    const std::size_t n = x.rows();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
            const double off = std::abs(x(k, l)) - std::sqrt(etas[k] * etas[l]) * std::abs(y(k, l));
            const double dk = x(k, k).real() - etas[k] * y(k, k).real() + tol;
            const double dl = x(l, l).real() - etas[l] * y(l, l).real() + tol;
            if (dk < 0.0 || dl < 0.0 || off > std::sqrt(dk * dl)) return false;
        }
    }
    return true;
}

void check_instance(const CMatrix &x, const CMatrix &y) {
    if (!x.is_square() || !y.is_square() || x.rows() != y.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "X and Y must be square and of equal size");
    }
    if (x.rows() == 0) throw Error(ErrorCode::EmptySet, "empty instance");
    if (x.rows() > kMaxStates) throw Error(ErrorCode::OutOfRange, "brute force supports at most three states");
}

// ⟨Ψ₁|(I⊗U)|Ψ₂⟩ for Ψ = vec(√ρ).
double overlap(const CMatrix &s1, const CMatrix &s2, const CMatrix &u) {
    const std::size_t d = s1.rows();
    CVector p1(d * d);
    CVector p2(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            p1[i * d + j] = s1(i, j);
            cplx acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += u(j, k) * s2(i, k);
            p2[i * d + j] = acc;
        }
    }
    return std::abs(inner(p1, p2));
}

// √ρ with eigenvalues below the rank cutoff dropped, so roundoff in the kernel
// cannot lift the overlap above the fidelity.
CMatrix truncated_sqrt(const CMatrix &rho) {
    const EigResult e = hermitian_eig(rho);
    const std::size_t d = rho.rows();
    const double cut = kDefaultTolerances.rank * std::max(1.0, e.eigenvalues.back());
    CMatrix s(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        if (e.eigenvalues[k] <= cut) continue;
        const double r = std::sqrt(e.eigenvalues[k]);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) s(i, j) += r * e.vectors(i, k) * std::conj(e.vectors(j, k));
        }
    }
    return s;
}

CMatrix gaussian_hermitian(std::size_t d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    CMatrix h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        h(i, i) = g(rng);
        for (std::size_t j = i + 1; j < d; ++j) {
            h(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

} // namespace

double GridSpec::step(std::size_t param, double lo, double hi) const {
    if (!bounds.empty()) {
        lo = bounds.at(param).first;
        hi = bounds.at(param).second;
    }
    return (hi - lo) / static_cast<double>(resolution - 1);
}

FeasibleAResult brute_force_feasible_A(const CMatrix &x, const CMatrix &y, const EfficiencyMatrix &gamma,
                                       const GridSpec &grid) {
    check_instance(x, y);
    if (gamma.size() != x.rows()) throw Error(ErrorCode::ShapeMismatch, "one efficiency per state");
    const auto ancillas = candidate_ancillas(x.rows(), is_real(x) && is_real(y), grid);
    const CMatrix sy = scaled_outputs(y, gamma.etas());

    FeasibleAResult r;
    r.best_min_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const auto &a : ancillas) {
        const double me = hermitian_eig((x - hadamard(sy, a)).hermitian_part()).eigenvalues.front();
        if (me > r.best_min_eigenvalue) {
            r.best_min_eigenvalue = me;
            r.best_a = a;
        }
    }
    r.candidates = ancillas.size();
    return r;
}

OptimalEtaResult brute_force_optimal_eta(const CMatrix &x, const CMatrix &y, const PriorDistribution &priors,
                                         const GridSpec &eta_grid, const GridSpec &a_grid, double tol,
                                         bool ancilla_free) {
    check_instance(x, y);
    const std::size_t n = x.rows();
    if (priors.size() != n) throw Error(ErrorCode::ShapeMismatch, "one prior per state");
    check_size(eta_grid, n);
    const auto bounds = resolve_bounds(eta_grid, n, 0.0, 1.0);
    const std::vector<CMatrix> ancillas =
        ancilla_free ? std::vector<CMatrix>{CMatrix::ones(n, n)}
                     : candidate_ancillas(n, is_real(x) && is_real(y), a_grid);

    std::vector<std::pair<double, std::vector<double>>> points;
    for_each_point(bounds, eta_grid.resolution, [&](const std::vector<double> &v) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) p += priors[i] * v[i];
        points.emplace_back(p, v);
    });
    std::stable_sort(points.begin(), points.end(), [](const auto &a, const auto &b) { return a.first > b.first; });

    OptimalEtaResult r;
    for (const auto &[p, etas] : points) {
        if (!ancilla_free && !pairwise_admissible(x, y, etas, tol)) continue;
        const CMatrix sy = scaled_outputs(y, etas);
        for (const auto &a : ancillas) {
            CMatrix b = (x - hadamard(sy, a)).hermitian_part();
            for (std::size_t k = 0; k < n; ++k) b(k, k) += tol;
            if (cholesky(b)) {
                r.found = true;
                r.p = p;
                r.etas = etas;
                r.a = a;
                return r;
            }
        }
    }
    return r;
}

CMatrix haar_unitary(std::size_t d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<CVector> cols;
    while (cols.size() < d) {
        CVector v(d);
        for (auto &z : v) z = cplx(g(rng), g(rng));
        for (const auto &c : cols) {
            const cplx p = inner(c, v);
            for (std::size_t i = 0; i < d; ++i) v[i] -= p * c[i];
        }
        const double nv = norm(v);
        if (nv < 1e-8) continue;
        for (auto &z : v) z /= nv;
        cols.push_back(std::move(v));
    }
    return CMatrix::from_columns(cols, d);
}

double purification_overlap_search(const DensityMatrix &r1, const DensityMatrix &r2, std::size_t samples,
                                   std::uint64_t seed) {
    if (r1.dim() != r2.dim()) throw Error(ErrorCode::DimMismatch, "states differ in dimension");
    const std::size_t d = r1.dim();
    const CMatrix s1 = truncated_sqrt(r1.matrix());
    const CMatrix s2 = truncated_sqrt(r2.matrix());
    std::mt19937_64 rng(seed);

    CMatrix best_u = CMatrix::identity(d);
    double best = overlap(s1, s2, best_u);
    for (std::size_t s = 0; s < samples; ++s) {
        CMatrix u = haar_unitary(d, rng);
        const double v = overlap(s1, s2, u);
        if (v > best) {
            best = v;
            best_u = std::move(u);
        }
    }

    // Random-direction hill climbing on U(d), shrinking the step on failure.
    double step = 0.3;
    for (std::size_t it = 0; it < 4 * samples && step > 1e-7; ++it) {
        CMatrix u = unitary_exp(gaussian_hermitian(d, rng), step) * best_u;
        const double v = overlap(s1, s2, u);
        if (v > best) {
            best = v;
            best_u = std::move(u);
        } else if (it % 8 == 7) {
            step *= 0.7;
        }
    }
    return best;
}

} // namespace qtf
