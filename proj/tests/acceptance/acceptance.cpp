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

// Acceptance suite: one PASS/FAIL line per criterion. Reference values come
// from closed forms or from Eigen, never from the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtf/certify.hpp"
#include "qtf/cli.hpp"
#include "qtf/oracle.hpp"
#include "qtf/sdp.hpp"
#include "qtf/synth.hpp"
#include "test_helpers.hpp"

using namespace qtf;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

GramMatrix gram_of(const CMatrix &m) { return GramMatrix{m, std::vector<std::size_t>(m.rows(), 1)}; }

double eigen_unitarity_defect(const CMatrix &u) {
    const Eigen::MatrixXcd e = testing::to_eigen(u);
    return (e.adjoint() * e - Eigen::MatrixXcd::Identity(e.cols(), e.cols())).cwiseAbs().maxCoeff();
}

std::vector<PureState> separation_inputs() {
    return {PureState::normalized({2, 1, 1}), PureState::normalized({1, 3, 1}), PureState::normalized({1, 1, 4})};
}

std::vector<PureState> separation_outputs() {
    return {PureState::normalized({10, 1, 1}), PureState::normalized({1, 10, 1}), PureState::normalized({1, 1, 10})};
}

PriorDistribution random_priors(std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto &v : p) s += (v = u(rng));
    for (auto &v : p) v /= s;
    return PriorDistribution(p);
}

Outcome golden() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto in = separation_inputs();
    const auto out = separation_outputs();
    const OptimalTransformation opt = optimize(gram_matrix(in), gram_matrix(out), PriorDistribution::uniform(3));
    const double elapsed = seconds_since(t0);

    const Certificate &c = opt.certificate;
    o.require(c.feasible(), "certificate not feasible");
    o.require(c.ancilla.has_value(), "no ancilla Gram");
    if (!o.pass) return o;
    const double gamma[3] = {0.1570, 0.4342, 0.5453};
    const double a_tilde[3][3] = {{0.1570, 0.2329, 0.2643}, {0.2329, 0.4342, 0.2977}, {0.2643, 0.2977, 0.5452}};
    const double eigs[3] = {0.0, 0.1874, 0.9491};
    const CMatrix s = c.gamma.sqrt_matrix();
    const CMatrix at = s * c.ancilla->matrix() * s;
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, std::abs(c.gamma[i] - gamma[i]));
        for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(at(i, j) - a_tilde[i][j]));
    }
    const auto ev = testing::oracle_eigenvalues(at);
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(ev[i] - eigs[i]));
    worst = std::max(worst, std::abs(c.avg_success - 0.3788));
    o.require(worst <= 2e-3, "max deviation " + num(worst));
    o.require(elapsed < 1.0, "runtime " + num(elapsed) + " s");
    o.detail = o.pass ? "P=" + num(c.avg_success) + " max deviation " + num(worst) + " in " + num(elapsed) + " s" : o.detail;
    return o;
}

Outcome ancilla_necessity() {
    Outcome o;
    const auto in = separation_inputs();
    const auto out = separation_outputs();
    const OptimalTransformation opt = optimize(gram_matrix(in), gram_matrix(out), PriorDistribution::uniform(3));
    const auto t0 = Clock::now();
    const CMatrix x = gram_matrix(in).matrix;
    const CMatrix y = gram_matrix(out).matrix;
    const Certificate &c = opt.certificate;
    const CMatrix no_ancilla = pure_residual(x, y, c.gamma, CMatrix::ones(3, 3));
    const PsdVerdict v = is_psd(no_ancilla);
    const Certificate full = check_pure_feasible(gram_of(x), gram_of(y), c.gamma, *c.ancilla, PriorDistribution::uniform(3));
    const double elapsed = seconds_since(t0);
    const double oracle_min = testing::oracle_min_eigenvalue(no_ancilla);
    o.require(!v.is_psd, "X − √ΓY√Γ reported PSD");
    o.require(oracle_min < -1e-4, "min eigenvalue " + num(oracle_min));
    o.require(full.feasible(), "full certificate infeasible");
    o.require(elapsed < 0.1, "runtime " + num(elapsed) + " s");
    if (o.pass) o.detail = "min eigenvalue without ancilla " + num(oracle_min) + ", with ancilla " + num(full.verdict.min_eigenvalue);
    return o;
}

Outcome unambiguous_suite() {
    Outcome o;
    std::mt19937_64 rng(20261);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const PureState a = testing::random_pure(d, rng);
        const PureState b = testing::random_pure(d, rng);
        const CMatrix x = gram_matrix(std::vector<PureState>{a, b}).matrix;
        const double expected = 1.0 - std::abs(inner(a.amplitudes(), b.amplitudes()));
        const auto opt = optimize(gram_of(x), gram_of(CMatrix::identity(2)), PriorDistribution::uniform(2));
        o.require(opt.certificate.feasible(), "trial " + std::to_string(trial) + " certificate infeasible");
        worst = std::max(worst, std::abs(opt.certificate.avg_success - expected));
    }
    const double elapsed = seconds_since(t0);
    o.require(worst <= 1e-6, "max |P − (1 − s)| = " + num(worst));
    o.require(elapsed < 5.0, "runtime " + num(elapsed) + " s");
    if (o.pass) o.detail = "max |P − (1 − s)| = " + num(worst) + " in " + num(elapsed) + " s";
    return o;
}

Outcome synthesis_suite() {
    Outcome o;
    std::mt19937_64 rng(20262);
    std::uniform_int_distribution<std::size_t> pick(2, 4);
    std::uniform_real_distribution<double> scale(0.1, 0.95);
    const auto t0 = Clock::now();
    double worst_unitary = 0.0;
    double worst_eta = 0.0;
    double worst_fid = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = pick(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(n, 4)(rng);
        const std::size_t d_out = pick(rng);
        std::vector<PureState> in;
        std::vector<PureState> out;
        for (std::size_t i = 0; i < n; ++i) {
            in.push_back(testing::random_pure(d, rng));
            out.push_back(testing::random_pure(d_out, rng));
        }
        const GramMatrix x = gram_matrix(in);
        const GramMatrix y = gram_matrix(out);
        const PriorDistribution priors = random_priors(n, rng);
        Certificate cert = optimize(x, y, priors).certificate;
        const std::string tag = "trial " + std::to_string(trial);
        o.require(cert.feasible() && cert.ancilla.has_value(), tag + ": optimal certificate infeasible");
        if (!cert.feasible() || !cert.ancilla) continue;
        if (trial % 2 == 1) {
            // B = (1 − t)X + t·B_opt stays PSD for a common factor t.
            const double t = scale(rng);
            std::vector<double> etas = cert.gamma.etas();
            for (auto &e : etas) e *= t;
            cert = check_pure_feasible(x, y, EfficiencyMatrix(etas), *cert.ancilla, priors);
            o.require(cert.feasible(), tag + ": scaled certificate infeasible");
            if (!cert.feasible()) continue;
        }
        const SynthesizedDilation dil = synthesize_pure(in, out, cert);
        worst_unitary = std::max(worst_unitary, eigen_unitarity_defect(dil.u));
        const auto reps = simulate_certified(dil);
        o.require(reps.size() == n, tag + ": wrong number of simulations");
        for (std::size_t i = 0; i < reps.size() && i < n; ++i) {
            worst_eta = std::max(worst_eta, std::abs(reps[i].success_probability - cert.gamma[i]));
            if (cert.gamma[i] > 0.0 && reps[i].conditional_output) {
                const double f = testing::oracle_fidelity(reps[i].conditional_output->matrix(),
                                                          DensityMatrix::from_pure(out[i]).matrix());
                worst_fid = std::max(worst_fid, 1.0 - f * f);
            }
        }
    }
    const double elapsed = seconds_since(t0);
    o.require(worst_unitary <= 1e-9, "unitarity defect " + num(worst_unitary));
    o.require(worst_eta <= 1e-8, "success deviation " + num(worst_eta));
    o.require(worst_fid <= 1e-8, "fidelity deficit " + num(worst_fid));
    o.require(elapsed < 30.0, "runtime " + num(elapsed) + " s");
    if (o.pass) {
        o.detail = "unitarity " + num(worst_unitary) + ", success deviation " + num(worst_eta) + ", fidelity deficit " +
                   num(worst_fid) + " in " + num(elapsed) + " s";
    }
    return o;
}

/// Random n×n Gram matrix of unit vectors, real or complex.
CMatrix random_gram(std::size_t n, std::size_t d, bool complex_entries, std::mt19937_64 &rng) {
    std::vector<PureState> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(testing::random_pure(d, rng, complex_entries));
    return gram_matrix(v).matrix;
}

Outcome oracle_suite() {
    Outcome o;
    std::mt19937_64 rng(20263);
    const auto t0 = Clock::now();

    GridSpec eta_grid;
    eta_grid.resolution = 101;
    GridSpec fine_a;
    fine_a.resolution = 101;
    double worst_gap = 0.0;
    double worst_excess = -1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix x = random_gram(2, 2, true, rng);
        const CMatrix y = random_gram(2, 2, true, rng);
        const PriorDistribution priors = random_priors(2, rng);
        const double sdp = optimize(gram_of(x), gram_of(y), priors).certificate.avg_success;
        const auto grid = brute_force_optimal_eta(x, y, priors, eta_grid, fine_a);
        o.require(grid.found, "trial " + std::to_string(trial) + ": no feasible grid point");
        worst_gap = std::max(worst_gap, sdp - grid.p);
        worst_excess = std::max(worst_excess, grid.p - sdp);
    }
    o.require(worst_gap <= 2e-2, "SDP exceeds grid optimum by " + num(worst_gap));
    o.require(worst_excess <= 1e-6, "grid optimum exceeds SDP by " + num(worst_excess));

    // Deterministic verdicts, half n = 2 complex and half n = 3 real. Grid A is
    // within δ of X/Y entrywise, so the oracle verdict uses slack (n−1)·δ·max|Y_kl|;
    // instances whose λmin(X/Y) falls inside the resulting ambiguity band are redrawn.
    GridSpec a_grid;
    a_grid.resolution = 41;
    std::size_t agree = 0;
    std::size_t redrawn = 0;
    std::size_t feasible = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const bool complex_case = trial < 50;
        const std::size_t n = complex_case ? 2 : 3;
        const double step = 2.0 / static_cast<double>(a_grid.resolution - 1);
        const double delta = complex_case ? step / std::sqrt(2.0) : step / 2.0;
        CMatrix x;
        CMatrix y;
        double slack = 0.0;
        for (;;) {
            x = random_gram(n, n, complex_case, rng);
            y = random_gram(n, n, complex_case, rng);
            double y_max = 0.0;
            double y_min = 1.0;
            CMatrix ratio = CMatrix::identity(n);
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t l = 0; l < n; ++l) {
                    if (k == l) continue;
                    y_max = std::max(y_max, std::abs(y(k, l)));
                    y_min = std::min(y_min, std::abs(y(k, l)));
                    ratio(k, l) = x(k, l) / y(k, l);
                }
            }
            slack = static_cast<double>(n - 1) * delta * y_max;
            const double lmin = testing::oracle_min_eigenvalue(ratio);
            const double lower = -static_cast<double>(n - 1) * slack / y_min;
            const double upper = static_cast<double>(n - 1) * delta;
            if (y_min > 0.2 && (lmin < lower - 1e-9 || lmin > upper + 1e-9)) break;
            ++redrawn;
        }
        const DeterministicResult det = check_deterministic_pure(gram_of(x), gram_of(y));
        const auto brute = brute_force_feasible_A(x, y, EfficiencyMatrix::uniform(n, 1.0), a_grid);
        const bool oracle_ok = brute.best_min_eigenvalue >= -slack;
        feasible += oracle_ok ? 1 : 0;
        if ((det.decision == Decision::Feasible) == oracle_ok && det.decision != Decision::Undetermined) ++agree;
    }
    const double elapsed = seconds_since(t0);
    o.require(agree == 100, "deterministic verdicts agree on " + std::to_string(agree) + "/100");
    o.require(elapsed < 120.0, "runtime " + num(elapsed) + " s");
    if (o.pass) {
        o.detail = "bracket gap " + num(worst_gap) + ", verdicts 100/100 (" + std::to_string(feasible) + " feasible, " +
                   std::to_string(redrawn) + " boundary draws redrawn) in " + num(elapsed) + " s";
    }
    return o;
}

StateSpec ket_spec(const PureState &k) {
    StateSpec s;
    s.ket = k;
    return s;
}

StateSpec rho_spec(const DensityMatrix &r) {
    StateSpec s;
    s.rho = r;
    return s;
}

Outcome bound_suite() {
    Outcome o;
    std::mt19937_64 rng(20264);
    const auto t0 = Clock::now();
    double worst = -1.0;
    double worst_orth = -1.0;
    std::size_t solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int kind = trial % 4;
        const std::size_t d = 2 + (trial / 4) % 2;
        Problem p;
        p.priors = random_priors(2, rng);
        const bool orthogonal = (trial / 8) % 2 == 1;
        for (int i = 0; i < 2; ++i) {
            if (kind == 0 || kind == 1) {
                p.inputs.push_back(ket_spec(testing::random_pure(d, rng)));
            } else {
                p.inputs.push_back(rho_spec(testing::random_density(d, 1 + (trial + i) % 2, rng)));
            }
        }
        const bool pure_out = kind == 0 || kind == 2;
        if (orthogonal) {
            // Orthogonal outputs: basis kets, or mixed states on disjoint supports.
            p.outputs.push_back(pure_out ? ket_spec(PureState({1, 0, 0})) : rho_spec(DensityMatrix(CMatrix::diagonal(std::vector<double>{0.7, 0.3, 0}))));
            p.outputs.push_back(pure_out ? ket_spec(PureState({0, 0, 1})) : rho_spec(DensityMatrix(CMatrix::diagonal(std::vector<double>{0, 0, 1}))));
        } else {
            for (int i = 0; i < 2; ++i) {
                p.outputs.push_back(pure_out ? ket_spec(testing::random_pure(2, rng)) : rho_spec(testing::random_density(2, 2, rng)));
            }
        }
        p.mode = kind == 0 ? Mode::PureToPure : kind == 1 ? Mode::PureToMixed : kind == 2 ? Mode::MixedToPure : Mode::MixedToMixed;
        p.dimension = d;

        const ResultReport r = cmd_solve(p);
        const std::string tag = "trial " + std::to_string(trial) + " (" + std::string(mode_name(p.mode)) + ")";
        o.require(r.p.has_value() && r.exit_code == 0, tag + ": no solver output");
        if (!r.p) continue;
        ++solved;
        const double f_in = testing::oracle_fidelity(p.inputs[0].density().matrix(), p.inputs[1].density().matrix());
        const double f_out = testing::oracle_fidelity(p.outputs[0].density().matrix(), p.outputs[1].density().matrix());
        const double c = 2.0 * std::sqrt(p.priors[0] * p.priors[1]);
        const double bound = f_out >= 1.0 - 1e-12 ? 1.0 : std::min(1.0, (1.0 - c * f_in) / (1.0 - f_out));
        worst = std::max(worst, *r.p - bound);
        o.require(std::abs(bound - two_state_bound(p.priors[0], p.priors[1], f_in, f_out)) <= 1e-9,
                  tag + ": two_state_bound disagrees with the direct formula");
        if (orthogonal) worst_orth = std::max(worst_orth, *r.p - (1.0 - c * f_in));
    }
    const double elapsed = seconds_since(t0);
    o.require(worst <= 1e-6, "P exceeds the fidelity bound by " + num(worst));
    o.require(worst_orth <= 1e-6, "P exceeds the orthogonal-output bound by " + num(worst_orth));
    o.require(elapsed < 10.0, "runtime " + num(elapsed) + " s");
    if (o.pass) {
        o.detail = std::to_string(solved) + " problems, max P − bound " + num(worst) + ", orthogonal " + num(worst_orth) +
                   " in " + num(elapsed) + " s";
    }
    return o;
}

Outcome uhlmann_suite() {
    Outcome o;
    std::mt19937_64 rng(20265);
    const auto t0 = Clock::now();
    double worst_excess = -1.0;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix a = testing::random_density(2, 1 + trial % 2, rng);
        const DensityMatrix b = testing::random_density(2, 1 + (trial / 2) % 2, rng);
        const double found = purification_overlap_search(a, b, 2000, static_cast<std::uint64_t>(trial));
        const double f_lib = fidelity(a, b);
        const double f_ref = testing::oracle_fidelity(a.matrix(), b.matrix());
        worst_excess = std::max({worst_excess, found - f_lib, found - f_ref});
        worst_gap = std::max(worst_gap, f_ref - found);
    }
    const double elapsed = seconds_since(t0);
    o.require(worst_excess <= 1e-9, "search exceeds fidelity by " + num(worst_excess));
    o.require(worst_gap <= 1e-3, "search falls short by " + num(worst_gap));
    o.require(elapsed < 10.0, "runtime " + num(elapsed) + " s");
    if (o.pass) o.detail = "max shortfall " + num(worst_gap) + ", max excess " + num(worst_excess) + " in " + num(elapsed) + " s";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"golden three-state optimum", golden},
        {"ancilla necessity", ancilla_necessity},
        {"unambiguous discrimination closed form", unambiguous_suite},
        {"synthesis soundness", synthesis_suite},
        {"oracle equivalence", oracle_suite},
        {"two-state bounds", bound_suite},
        {"purification overlap versus fidelity", uhlmann_suite},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception &e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.detail.c_str());
        failures += r.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
