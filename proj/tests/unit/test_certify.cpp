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

#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "qtf/certify.hpp"
#include "qtf/error.hpp"
#include "qtf/sdp.hpp"
#include "test_helpers.hpp"

using namespace qtf;
using Catch::Matchers::WithinAbs;

namespace {

GramMatrix gram2(cplx off) { return GramMatrix{CMatrix{{1, off}, {std::conj(off), 1}}, {1, 1}}; }

GramMatrix gram_of(const CMatrix &m) { return GramMatrix{m, std::vector<std::size_t>(m.rows(), 1)}; }

DensityMatrix diag_rho(std::vector<double> d) { return DensityMatrix(CMatrix::diagonal(d)); }

std::vector<PureState> separation_inputs() {
    return {PureState::normalized({2, 1, 1}), PureState::normalized({1, 3, 1}), PureState::normalized({1, 1, 4})};
}

std::vector<PureState> separation_outputs() {
    return {PureState::normalized({10, 1, 1}), PureState::normalized({1, 10, 1}), PureState::normalized({1, 1, 10})};
}

const CMatrix kPrintedATilde{{0.1570, 0.2329, 0.2643}, {0.2329, 0.4342, 0.2977}, {0.2643, 0.2977, 0.5452}};

ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected qtf::Error");
    return ErrorCode::ParseError;
}

/// Rank-r density matrix on C^d drawn from a random PSD matrix.
std::vector<StateEnsemble> random_pair(std::size_t d, std::size_t r, std::mt19937_64 &rng) {
    return {spectral_decompose(testing::random_density(d, r, rng)), spectral_decompose(testing::random_density(d, r, rng))};
}

} // namespace

TEST_CASE("EfficiencyMatrix and AncillaGram validation", "[certify]") {
    CHECK(code_of([] { EfficiencyMatrix({0.5, 1.2}); }) == ErrorCode::InvalidGamma);
    CHECK(code_of([] { EfficiencyMatrix({-0.1}); }) == ErrorCode::InvalidGamma);
    CHECK(code_of([] { AncillaGram(CMatrix{{1, 2}, {2, 1}}); }) == ErrorCode::InvalidAncillaGram);
    CHECK(code_of([] { AncillaGram(CMatrix{{0.5, 0}, {0, 1}}); }) == ErrorCode::InvalidAncillaGram);
}

TEST_CASE("check_pure_feasible: identity transformation", "[certify][pure]") {
    auto x = gram_matrix(separation_inputs());
    auto c = check_pure_feasible(x, x, EfficiencyMatrix::uniform(3, 1.0), AncillaGram::ones(3), PriorDistribution::uniform(3));
    CHECK(c.feasible());
    CHECK(c.residual.max_abs() <= 1e-15);
    CHECK_THAT(c.avg_success, WithinAbs(1.0, 1e-15));
}

TEST_CASE("check_pure_feasible: orthogonal outputs ignore A", "[certify][pure]") {
    auto x = gram2(0.5);
    auto y = gram2(0.0);
    for (double a12 : {0.0, 0.3, -0.9}) {
        auto c = check_pure_feasible(x, y, EfficiencyMatrix::uniform(2, 0.5), AncillaGram(CMatrix{{1, a12}, {a12, 1}}),
                                     PriorDistribution::uniform(2));
        CHECK(c.feasible());
        CHECK(max_abs_diff(c.residual, CMatrix{{0.5, 0.5}, {0.5, 0.5}}) <= 1e-15);
    }
}

TEST_CASE("check_pure_feasible: printed three-state optimum", "[certify][pure]") {
    std::vector<double> eta{0.1570, 0.4342, 0.5453};
    CMatrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = kPrintedATilde(i, j) / std::sqrt(eta[i] * eta[j]);
    for (std::size_t i = 0; i < 3; ++i) a(i, i) = 1.0;
    // The printed entries carry four digits; admit that rounding when building A.
    auto c = check_pure_feasible(gram_matrix(separation_inputs()), gram_matrix(separation_outputs()), EfficiencyMatrix(eta),
                                 AncillaGram(a, 2e-3), PriorDistribution::uniform(3));
    CHECK(c.verdict.min_eigenvalue >= -2e-3);
    CHECK_THAT(c.avg_success, WithinAbs(0.3788, 2e-3));
}

TEST_CASE("check_pure_feasible: shape errors", "[certify][pure]") {
    CHECK(code_of([] {
              check_pure_feasible(gram2(0.5), gram_of(CMatrix::identity(3)), EfficiencyMatrix::uniform(2, 0.1),
                                  AncillaGram::ones(2), PriorDistribution::uniform(2));
          }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("check_deterministic_pure examples", "[certify][deterministic]") {
    auto ok = check_deterministic_pure(gram2(0.5), gram2(0.8));
    CHECK(ok.decision == Decision::Feasible);
    REQUIRE(ok.ancilla.has_value());
    CHECK_THAT(ok.ancilla->matrix()(0, 1).real(), WithinAbs(0.625, 1e-15));

    auto bad = check_deterministic_pure(gram2(0.8), gram2(0.5));
    CHECK(bad.decision == Decision::Infeasible);
    CHECK_THAT(bad.candidate(0, 1).real(), WithinAbs(1.6, 1e-15));
    CHECK(bad.witness < 0.0);

    auto x = gram_matrix(separation_inputs());
    auto same = check_deterministic_pure(x, x);
    CHECK(same.decision == Decision::Feasible);
    CHECK(max_abs_diff(same.ancilla->matrix(), CMatrix::ones(3, 3)) <= 1e-12);

    auto zero_out = check_deterministic_pure(gram2(0.3), gram2(0.0));
    CHECK(zero_out.decision == Decision::Infeasible);
}

TEST_CASE("check_deterministic_pure zero-overlap convention", "[certify][deterministic]") {
    // Y₁₃ = X₁₃ = 0: A₁₃ is set to 0 and the completion is tested.
    CMatrix x{{1, 0.3, 0}, {0.3, 1, 0.3}, {0, 0.3, 1}};
    CMatrix y{{1, 0.5, 0}, {0.5, 1, 0.5}, {0, 0.5, 1}};
    auto r = check_deterministic_pure(gram_of(x), gram_of(y));
    CHECK(r.decision == Decision::Feasible);
    CHECK(r.ancilla->matrix()(0, 2) == cplx(0));

    // With A₁₂ = A₂₃ = 0.9 the zero completion is not PSD and no other completion is tried.
    CMatrix x2{{1, 0.45, 0}, {0.45, 1, 0.45}, {0, 0.45, 1}};
    auto u = check_deterministic_pure(gram_of(x2), gram_of(y));
    CHECK(u.decision == Decision::Undetermined);
}

TEST_CASE("check_deterministic_pure implies |X_ij| <= |Y_ij|", "[certify][deterministic][property]") {
    std::mt19937_64 rng(53);
    int feasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PureState> in, out;
        for (int i = 0; i < 3; ++i) {
            in.push_back(testing::random_pure(3, rng));
            out.push_back(testing::random_pure(2, rng));
        }
        auto x = gram_matrix(in), y = gram_matrix(out);
        auto r = check_deterministic_pure(x, y);
        if (r.decision != Decision::Feasible) continue;
        ++feasible;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(x.matrix(i, j)) <= std::abs(y.matrix(i, j)) + 1e-9);
    }
    // Reversing the roles guarantees feasible cases: inputs with smaller overlaps.
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PureState> out{testing::random_pure(2, rng), testing::random_pure(2, rng)};
        auto y = gram_matrix(out);
        auto x = gram2(y.matrix(0, 1) * 0.5);
        auto r = check_deterministic_pure(x, y);
        CHECK(r.decision == Decision::Feasible);
        feasible += r.decision == Decision::Feasible;
    }
    CHECK(feasible >= 20);
}

TEST_CASE("check_unambiguous_pure examples", "[certify][unambiguous]") {
    auto yes = check_unambiguous_pure(gram2(0.5), EfficiencyMatrix::uniform(2, 0.5));
    CHECK(yes.is_psd);
    CHECK_THAT(yes.min_eigenvalue, WithinAbs(0.0, 1e-15));
    auto no = check_unambiguous_pure(gram2(0.5), EfficiencyMatrix::uniform(2, 0.6));
    CHECK_FALSE(no.is_psd);
    CHECK_THAT(no.min_eigenvalue, WithinAbs(-0.1, 1e-12));
    auto orth = check_unambiguous_pure(gram2(0.0), EfficiencyMatrix::uniform(2, 1.0));
    CHECK(orth.is_psd);
}

TEST_CASE("check_pure_feasible with Y = I reduces to the unambiguous check", "[certify][property]") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<PureState> in{testing::random_pure(3, rng), testing::random_pure(3, rng), testing::random_pure(3, rng)};
        auto x = gram_matrix(in);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        EfficiencyMatrix g({u(rng), u(rng), u(rng)});
        auto a = AncillaGram(gram_matrix(std::vector<PureState>{testing::random_pure(2, rng), testing::random_pure(2, rng),
                                                               testing::random_pure(2, rng)})
                                 .matrix);
        auto c = check_pure_feasible(x, gram_of(CMatrix::identity(3)), g, a, PriorDistribution::uniform(3));
        auto v = check_unambiguous_pure(x, g);
        CHECK(c.feasible() == v.is_psd);
        CHECK_THAT(c.verdict.min_eigenvalue, WithinAbs(v.min_eigenvalue, 1e-12));
    }
}

TEST_CASE("verdicts are invariant under permutations and phases", "[certify][property]") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<PureState> in, out;
        for (int i = 0; i < 3; ++i) {
            in.push_back(testing::random_pure(3, rng));
            out.push_back(testing::random_pure(3, rng));
        }
        auto x = gram_matrix(in), y = gram_matrix(out);
        std::vector<double> eta{u(rng), u(rng), u(rng)};
        auto alpha = gram_matrix(std::vector<PureState>{testing::random_pure(2, rng), testing::random_pure(2, rng),
                                                       testing::random_pure(2, rng)})
                         .matrix;
        PriorDistribution pri({0.2, 0.3, 0.5});
        auto base = check_pure_feasible(x, y, EfficiencyMatrix(eta), AncillaGram(alpha), pri);

        const std::size_t perm[3] = {2, 0, 1};
        CMatrix xp(3, 3), yp(3, 3), ap(3, 3);
        std::vector<double> ep(3), pp(3);
        for (std::size_t i = 0; i < 3; ++i) {
            ep[i] = eta[perm[i]];
            pp[i] = pri[perm[i]];
            for (std::size_t j = 0; j < 3; ++j) {
                xp(i, j) = x.matrix(perm[i], perm[j]);
                yp(i, j) = y.matrix(perm[i], perm[j]);
                ap(i, j) = alpha(perm[i], perm[j]);
            }
        }
        auto permuted = check_pure_feasible(gram_of(xp), gram_of(yp), EfficiencyMatrix(ep), AncillaGram(ap), PriorDistribution(pp));
        CHECK(permuted.feasible() == base.feasible());
        CHECK_THAT(permuted.verdict.min_eigenvalue, WithinAbs(base.verdict.min_eigenvalue, 1e-10));
        CHECK_THAT(permuted.avg_success, WithinAbs(base.avg_success, 1e-12));

        CMatrix d(3, 3);
        for (std::size_t i = 0; i < 3; ++i) d(i, i) = std::polar(1.0, 6.283 * u(rng));
        auto phased = check_pure_feasible(gram_of(d * x.matrix * d.adjoint()), y, EfficiencyMatrix(eta),
                                          AncillaGram((d * alpha * d.adjoint()).hermitian_part()), pri);
        CHECK_THAT(phased.verdict.min_eigenvalue, WithinAbs(base.verdict.min_eigenvalue, 1e-10));
    }
}

TEST_CASE("check_pure_to_mixed examples", "[certify][pure-to-mixed]") {
    // Inputs with overlap 0.6; purifications |00⟩ and 0.9|00⟩ + √0.19|11⟩.
    std::vector<PureState> purifs{PureState({1, 0, 0, 0}), PureState({0.9, 0, 0, std::sqrt(0.19)})};
    std::vector<DensityMatrix> targets{diag_rho({1, 0}), diag_rho({0.81, 0.19})};
    auto x = gram2(0.6);
    // 2×2 determinant condition 1 − η ≥ |0.6 − 0.9η| holds exactly for η ≤ 16/19.
    const double eta_max = 16.0 / 19.0;
    for (double eta : {0.0, 0.3, 2.0 / 3.0, 0.8, eta_max - 1e-6}) {
        auto c = check_pure_to_mixed(x, purifs, targets, EfficiencyMatrix::uniform(2, eta), PriorDistribution::uniform(2));
        CHECK(c.feasible());
        CHECK(max_abs_diff(c.ancilla->matrix(), CMatrix::ones(2, 2)) == 0.0);
    }
    for (double eta : {eta_max + 1e-6, 0.9, 1.0}) {
        auto c = check_pure_to_mixed(x, purifs, targets, EfficiencyMatrix::uniform(2, eta), PriorDistribution::uniform(2));
        CHECK_FALSE(c.feasible());
    }
    auto zero = check_pure_to_mixed(x, purifs, targets, EfficiencyMatrix::uniform(2, 0.0), PriorDistribution::uniform(2));
    CHECK(zero.avg_success == 0.0);

    std::vector<DensityMatrix> wrong{diag_rho({1, 0}), diag_rho({0.5, 0.5})};
    CHECK(code_of([&] {
              check_pure_to_mixed(x, purifs, wrong, EfficiencyMatrix::uniform(2, 0.1), PriorDistribution::uniform(2));
          }) == ErrorCode::NotAPurification);
}

TEST_CASE("check_pure_to_mixed with pure targets matches check_pure_feasible", "[certify][pure-to-mixed]") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PureState> in{testing::random_pure(3, rng), testing::random_pure(3, rng)};
        std::vector<PureState> out{testing::random_pure(2, rng), testing::random_pure(2, rng)};
        std::vector<PureState> purifs;
        std::vector<DensityMatrix> targets;
        for (const auto &o : out) {
            purifs.push_back(PureState(kron(o.amplitudes(), CVector{1, 0})));
            targets.push_back(DensityMatrix::from_pure(o));
        }
        EfficiencyMatrix g({0.3 + 0.02 * trial, 0.5});
        auto a = check_pure_to_mixed(gram_matrix(in), purifs, targets, g, PriorDistribution::uniform(2));
        auto b = check_pure_feasible(gram_matrix(in), gram_matrix(out), g, AncillaGram::ones(2), PriorDistribution::uniform(2));
        CHECK(a.feasible() == b.feasible());
        CHECK_THAT(a.verdict.min_eigenvalue, WithinAbs(b.verdict.min_eigenvalue, 1e-12));
    }
}

TEST_CASE("check_mixed_to_pure with singleton ensembles matches the pure check", "[certify][mixed-to-pure]") {
    std::mt19937_64 rng(71);
    std::vector<PureState> in{testing::random_pure(3, rng), testing::random_pure(3, rng)};
    std::vector<PureState> out{testing::random_pure(3, rng), testing::random_pure(3, rng)};
    std::vector<StateEnsemble> ens{StateEnsemble::singleton(in[0]), StateEnsemble::singleton(in[1])};
    EfficiencyMatrix g({0.4, 0.2});
    AncillaGram a(CMatrix{{1, 0.3}, {0.3, 1}});
    auto m = check_mixed_to_pure(ens, gram_matrix(out), g, a, PriorDistribution::uniform(2));
    auto p = check_pure_feasible(gram_matrix(in), gram_matrix(out), g, a, PriorDistribution::uniform(2));
    CHECK(m.feasible() == p.feasible());
    CHECK_THAT(m.verdict.min_eigenvalue, WithinAbs(p.verdict.min_eigenvalue, 1e-12));
    CHECK_THAT(m.avg_success, WithinAbs(p.avg_success, 1e-15));
}

TEST_CASE("check_mixed_to_pure: identical mixed inputs only admit zero success", "[certify][mixed-to-pure]") {
    std::vector<StateEnsemble> ens{spectral_decompose(diag_rho({0.5, 0.5})), spectral_decompose(diag_rho({0.5, 0.5}))};
    auto y = gram2(0.3);
    // Exhaustive grid over per-member masses with A = ones blocks and A = I.
    std::size_t feasible_nonzero = 0;
    const int steps = 6;
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= steps; ++b)
            for (int c = 0; c <= steps; ++c)
                for (int d = 0; d <= steps; ++d) {
                    std::vector<double> eta{0.5 * a / steps, 0.5 * b / steps, 0.5 * c / steps, 0.5 * d / steps};
                    for (const CMatrix &am : {CMatrix::identity(4), CMatrix::ones(4, 4)}) {
                        auto cert = check_mixed_to_pure(ens, y, EfficiencyMatrix(eta), AncillaGram(am), PriorDistribution::uniform(2));
                        if (cert.feasible() && cert.avg_success > 0.0) ++feasible_nonzero;
                    }
                }
    CHECK(feasible_nonzero == 0);
    auto zero = check_mixed_to_pure(ens, y, EfficiencyMatrix::uniform(4, 0.0), AncillaGram::identity(4), PriorDistribution::uniform(2));
    CHECK(zero.feasible());
}

TEST_CASE("deterministic mixed-to-pure follows the singular-value criterion", "[certify][mixed-to-pure][property]") {
    std::mt19937_64 rng(73);
    int agree = 0, feasible = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto ens = random_pair(4, 2, rng);
        std::vector<PureState> out{testing::random_pure(2, rng), testing::random_pure(2, rng)};
        if (trial % 2 == 0) out[1] = PureState::normalized({out[0].amplitudes()[0] + 0.05, out[0].amplitudes()[1]});
        auto y = gram_matrix(out);
        const double smax = singular_values(normalized_cross_gram(ens[0], ens[1]))[0];
        const bool expected = smax <= std::abs(y.matrix(0, 1)) + 1e-9;
        auto r = check_deterministic_mixed_to_pure(ens, y);
        agree += (r.decision == Decision::Feasible) == expected;
        if (r.decision == Decision::Feasible) {
            ++feasible;
            std::vector<double> mass;
            for (const auto &e : ens)
                for (const auto &m : e.members()) mass.push_back(m.weight);
            auto cert = check_mixed_to_pure(ens, y, EfficiencyMatrix(mass), *r.ancilla, PriorDistribution::uniform(2));
            CHECK(cert.feasible());
            CHECK_THAT(cert.avg_success, WithinAbs(1.0, 1e-9));
        }
    }
    CHECK(agree == 60);
    CHECK(feasible > 0);
}

TEST_CASE("deterministic mixed-to-pure special cases", "[certify][mixed-to-pure]") {
    std::vector<StateEnsemble> orth{spectral_decompose(diag_rho({0.5, 0.5, 0, 0})), spectral_decompose(diag_rho({0, 0, 0.7, 0.3}))};
    std::mt19937_64 rng(79);
    auto y = gram_matrix(std::vector<PureState>{testing::random_pure(2, rng), testing::random_pure(2, rng)});
    CHECK(check_deterministic_mixed_to_pure(orth, y).decision == Decision::Feasible);

    auto rho = testing::random_density(3, 2, rng);
    std::vector<StateEnsemble> same{spectral_decompose(rho), spectral_decompose(rho)};
    CHECK(check_deterministic_mixed_to_pure(same, gram2(0.99)).decision == Decision::Infeasible);
    CHECK(check_deterministic_mixed_to_pure(same, gram2(1.0)).decision == Decision::Feasible);
}

TEST_CASE("check_mixed_to_mixed: identity map", "[certify][mixed-to-mixed]") {
    std::mt19937_64 rng(83);
    auto rho1 = testing::random_density(3, 2, rng);
    auto rho2 = testing::random_density(3, 3, rng);
    std::vector<StateEnsemble> ens{spectral_decompose(rho1), spectral_decompose(rho2)};
    std::vector<CompositeOutputEnsemble> cand;
    for (const auto &e : ens) {
        CompositeOutputEnsemble c{{}, 1.0, 3, 1};
        for (const auto &m : e.members()) c.vectors.push_back(m.scaled());
        cand.push_back(c);
    }
    std::vector<DensityMatrix> targets{rho1, rho2};
    auto cert = check_mixed_to_mixed(block_gram(ens), cand, targets, PriorDistribution::uniform(2));
    CHECK(cert.feasible());
    CHECK(cert.residual.max_abs() <= 1e-12);
    CHECK_THAT(cert.avg_success, WithinAbs(1.0, 1e-12));
}

TEST_CASE("check_mixed_to_mixed: orthogonal targets", "[certify][mixed-to-mixed]") {
    std::vector<StateEnsemble> ens{spectral_decompose(diag_rho({0.6, 0.4, 0})),
                                   StateEnsemble::singleton(PureState::normalized({1, 1, 1}))};
    auto xt = block_gram(ens);
    std::vector<DensityMatrix> targets{diag_rho({1, 0, 0}), diag_rho({0, 0.5, 0.5})};
    const double s = std::sqrt(0.5);
    // θ₂ carries a component along |0⟩, which the target excludes.
    std::vector<CompositeOutputEnsemble> bad{{{{0.5, 0, 0}, {0.2, 0, 0}}, 0.29, 3, 1}, {{{0.3, 0.3, 0.3}}, 0.27, 3, 1}};
    CHECK(code_of([&] { check_mixed_to_mixed(xt, bad, targets, PriorDistribution::uniform(2)); }) ==
          ErrorCode::CandidateNotConsistent);

    // Consistent candidate with small weights: Ỹ must be quasi-diagonal.
    const double t = 0.2;
    std::vector<CompositeOutputEnsemble> good{
        {{{t * std::sqrt(0.6), 0, 0, 0, 0, 0}, {0, t * std::sqrt(0.4), 0, 0, 0, 0}}, t * t, 3, 2},
        {{{0, 0, t * s, 0, 0, t * s}}, t * t, 3, 2}};
    auto cert = check_mixed_to_mixed(xt, good, targets, PriorDistribution::uniform(2));
    CMatrix ytilde = xt.matrix - cert.residual;
    for (std::size_t r = 0; r < 2; ++r) CHECK(std::abs(ytilde(r, 2)) <= 1e-12);
    CHECK(cert.feasible());
    CHECK_THAT(cert.avg_success, WithinAbs(t * t, 1e-12));
}

TEST_CASE("check_unambiguous_mixed examples", "[certify][unambiguous]") {
    std::mt19937_64 rng(89);
    std::vector<PureState> in{testing::random_pure(3, rng), testing::random_pure(3, rng)};
    std::vector<StateEnsemble> singles{StateEnsemble::singleton(in[0]), StateEnsemble::singleton(in[1])};
    for (double eta : {0.1, 0.4, 0.9}) {
        std::vector<CMatrix> blocks{CMatrix{{eta}}, CMatrix{{eta}}};
        auto m = check_unambiguous_mixed(singles, blocks, PriorDistribution::uniform(2));
        auto p = check_unambiguous_pure(gram_matrix(in), EfficiencyMatrix::uniform(2, eta));
        CHECK(m.feasible() == p.is_psd);
        CHECK_THAT(m.verdict.min_eigenvalue, WithinAbs(p.min_eigenvalue, 1e-12));
    }

    std::vector<StateEnsemble> orth{spectral_decompose(diag_rho({0.7, 0.3, 0, 0})), spectral_decompose(diag_rho({0, 0, 0.2, 0.8}))};
    std::vector<CMatrix> blocks{CMatrix::diagonal(std::vector<double>{0.7, 0.3}), CMatrix::diagonal(std::vector<double>{0.8, 0.2})};
    auto c = check_unambiguous_mixed(orth, blocks, PriorDistribution::uniform(2));
    CHECK(c.feasible());
    CHECK(c.residual.max_abs() <= 1e-12);
    CHECK_THAT(c.avg_success, WithinAbs(1.0, 1e-12));

    std::vector<CMatrix> not_psd{CMatrix{{1, 0}, {0, -0.5}}, CMatrix::identity(2)};
    CHECK(code_of([&] { check_unambiguous_mixed(orth, not_psd, PriorDistribution::uniform(2)); }) == ErrorCode::BlockNotPsd);
}

TEST_CASE("optimal mixed unambiguous discrimination obeys the fidelity bound", "[certify][unambiguous][property]") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 10; ++trial) {
        auto ens = random_pair(3, 2, rng);
        auto y = gram_of(CMatrix::identity(2));
        auto rest = restrict_common_support(ens, y);
        auto x = block_gram(rest.ensembles);
        GramMatrix yh{expand_blockwise(y.matrix, x.block_row_sizes), x.block_row_sizes};
        std::vector<char> frozen(rest.frozen.begin(), rest.frozen.end());
        std::unique_ptr<bool[]> mask(new bool[frozen.size()]);
        for (std::size_t i = 0; i < frozen.size(); ++i) mask[i] = frozen[i];
        auto opt = optimize(x, yh, PriorDistribution::uniform(2), {}, std::span<const bool>(mask.get(), frozen.size()));
        REQUIRE(opt.certificate.feasible());
        const double bound = 1.0 - 2.0 * 0.5 * testing::oracle_fidelity(ens[0].source().matrix(), ens[1].source().matrix());
        CHECK(opt.certificate.avg_success <= bound + 1e-6);
    }
}

TEST_CASE("two_state_bound examples", "[certify][bounds]") {
    CHECK_THAT(two_state_bound(0.5, 0.5, 0.5, 0.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(two_state_bound(0.3, 0.7, 0.0, 0.2), WithinAbs(1.0, 1e-15));
    CHECK_THAT(two_state_bound(0.5, 0.5, 0.5, 0.5), WithinAbs(1.0, 1e-15));
    CHECK_THAT(two_state_bound(0.5, 0.5, 0.9, 1.0), WithinAbs(1.0, 1e-15));
    CHECK(code_of([] { two_state_bound(0.5, 0.6, 0.5, 0.0); }) == ErrorCode::InvalidProbability);
    CHECK(code_of([] { two_state_bound(0.5, 0.5, 1.5, 0.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("restrict_common_support freezes the shared direction", "[certify][mixed-to-pure]") {
    std::vector<StateEnsemble> ens{spectral_decompose(diag_rho({0.5, 0.5, 0})), spectral_decompose(diag_rho({0, 0.5, 0.5}))};
    auto rest = restrict_common_support(ens, gram2(0.2));
    REQUIRE(rest.ensembles.size() == 2);
    CHECK(std::count(rest.frozen.begin(), rest.frozen.end(), true) == 2);
    auto same_out = restrict_common_support(ens, gram2(1.0));
    CHECK(std::count(same_out.frozen.begin(), same_out.frozen.end(), true) == 0);
}
