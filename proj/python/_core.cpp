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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qtf/certify.hpp"
#include "qtf/cli.hpp"
#include "qtf/error.hpp"
#include "qtf/io.hpp"
#include "qtf/oracle.hpp"
#include "qtf/sdp.hpp"
#include "qtf/synth.hpp"

namespace py = pybind11;
using namespace qtf;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const ComplexArray &a) {
    if (a.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "expected a two-dimensional array");
    const auto r = static_cast<std::size_t>(a.shape(0));
    const auto c = static_cast<std::size_t>(a.shape(1));
    return CMatrix(r, c, std::vector<cplx>(a.data(), a.data() + r * c));
}

CVector to_vector(const ComplexArray &a) {
    if (a.ndim() != 1) throw Error(ErrorCode::ShapeMismatch, "expected a one-dimensional array");
    return CVector(a.data(), a.data() + a.shape(0));
}

ComplexArray to_array(const CMatrix &m) {
    ComplexArray out({m.rows(), m.cols()});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) v(i, j) = m(i, j);
    }
    return out;
}

ComplexArray to_array(const CVector &v) {
    ComplexArray out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<PureState> to_states(const std::vector<ComplexArray> &kets) {
    std::vector<PureState> out;
    for (const auto &k : kets) out.push_back(PureState::normalized(to_vector(k)));
    return out;
}

PriorDistribution to_priors(const std::optional<std::vector<double>> &p, std::size_t n) {
    return p ? PriorDistribution(*p) : PriorDistribution::uniform(n);
}

GramMatrix to_gram(const ComplexArray &m) {
    CMatrix g = to_matrix(m);
    return GramMatrix{g, std::vector<std::size_t>(g.rows(), 1)};
}

py::dict certificate_dict(const Certificate &c) {
    py::dict d;
    d["feasible"] = c.feasible();
    d["p"] = c.avg_success;
    d["gamma"] = c.gamma.etas();
    d["min_eigenvalue"] = c.verdict.min_eigenvalue;
    d["residual"] = to_array(c.residual);
    if (c.ancilla) {
        d["a"] = to_array(c.ancilla->matrix());
        const CMatrix s = c.gamma.sqrt_matrix();
        d["a_tilde"] = to_array(s * c.ancilla->matrix() * s);
    } else {
        d["a"] = py::none();
        d["a_tilde"] = py::none();
    }
    return d;
}

py::dict simulation_dict(const SimulationReport &r) {
    py::dict d;
    d["success_probability"] = r.success_probability;
    d["failure_probability"] = r.failure_probability;
    d["conditional_output"] = r.conditional_output ? py::object(to_array(r.conditional_output->matrix())) : py::none();
    d["fidelity_to_target"] = r.fidelity_to_target ? py::object(py::float_(*r.fidelity_to_target)) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Feasibility, optimal success probability and unitary dilations for probabilistic "
              "transformations of quantum state sets.";

    py::register_exception<Error>(m, "QtfError", PyExc_ValueError);

    m.def(
        "gram", [](const std::vector<ComplexArray> &kets) { return to_array(gram_matrix(to_states(kets)).matrix); },
        py::arg("kets"), "Gram matrix ⟨ψ_i|ψ_j⟩ of the normalized kets.");

    m.def(
        "fidelity",
        [](const ComplexArray &r1, const ComplexArray &r2) {
            return fidelity(DensityMatrix(to_matrix(r1)), DensityMatrix(to_matrix(r2)));
        },
        py::arg("rho1"), py::arg("rho2"), "Uhlmann fidelity Tr√(√ρ₁ ρ₂ √ρ₁).");

    m.def(
        "optimize",
        [](const std::vector<ComplexArray> &inputs, const std::vector<ComplexArray> &outputs,
           const std::optional<std::vector<double>> &priors, double gap_tol) {
            SolverOptions opts;
            opts.gap_tol = gap_tol;
            const auto in = to_states(inputs);
            const auto out = to_states(outputs);
            py::gil_scoped_release release;
            const auto opt = optimize(gram_matrix(in), gram_matrix(out), to_priors(priors, in.size()), opts);
            py::gil_scoped_acquire acquire;
            py::dict d = certificate_dict(opt.certificate);
            d["iterations"] = opt.solution.iterations;
            return d;
        },
        py::arg("inputs"), py::arg("outputs"), py::arg("priors") = py::none(), py::arg("gap_tol") = 1e-8,
        "Optimal average success probability for pure inputs and pure outputs.");

    m.def(
        "check_pure_feasible",
        [](const ComplexArray &x, const ComplexArray &y, const std::vector<double> &gamma, const ComplexArray &a,
           const std::optional<std::vector<double>> &priors) {
            const GramMatrix gx = to_gram(x);
            return certificate_dict(check_pure_feasible(gx, to_gram(y), EfficiencyMatrix(gamma),
                                                        AncillaGram(to_matrix(a)), to_priors(priors, gx.size())));
        },
        py::arg("x"), py::arg("y"), py::arg("gamma"), py::arg("a"), py::arg("priors") = py::none(),
        "Checks X − √Γ Y √Γ ∘ A ⪰ 0 for given Gram matrices, efficiencies and ancilla Gram.");

    m.def(
        "check_deterministic",
        [](const ComplexArray &x, const ComplexArray &y) {
            const DeterministicResult r = check_deterministic_pure(to_gram(x), to_gram(y));
            py::dict d;
            d["feasible"] = r.decision == Decision::Feasible;
            d["undetermined"] = r.decision == Decision::Undetermined;
            d["witness"] = r.witness;
            d["candidate"] = to_array(r.candidate);
            d["reason"] = r.reason;
            return d;
        },
        py::arg("x"), py::arg("y"), "Deterministic transformation test via A = X/Y.");

    m.def("two_state_bound", &two_state_bound, py::arg("p1"), py::arg("p2"), py::arg("input_overlap"),
          py::arg("output_fidelity"), "min(1, (1 − 2√(p₁p₂)·overlap) / (1 − fidelity)).");

    m.def(
        "synthesize",
        [](const std::vector<ComplexArray> &inputs, const std::vector<ComplexArray> &outputs,
           const std::vector<double> &gamma, const ComplexArray &a, const std::optional<std::vector<double>> &priors) {
            const auto in = to_states(inputs);
            const auto out = to_states(outputs);
            const Certificate cert = check_pure_feasible(gram_matrix(in), gram_matrix(out), EfficiencyMatrix(gamma),
                                                         AncillaGram(to_matrix(a)), to_priors(priors, in.size()));
            if (!cert.feasible()) throw Error(ErrorCode::CertificateNotFeasible, "certificate is not feasible");
            const SynthesizedDilation dil = synthesize_pure(in, out, cert);
            py::dict d;
            d["unitary"] = to_array(dil.u);
            d["dims"] = py::make_tuple(dil.dims.d_out, dil.dims.d_ancilla, dil.dims.d_probe);
            d["input_dim"] = dil.input_dim;
            d["probe_success_index"] = dil.probe_success_index;
            py::list sims;
            for (const auto &r : simulate_certified(dil)) sims.append(simulation_dict(r));
            d["simulations"] = sims;
            d["text"] = write_dilation(dil);
            return d;
        },
        py::arg("inputs"), py::arg("outputs"), py::arg("gamma"), py::arg("a"), py::arg("priors") = py::none(),
        "Builds and simulates the unitary dilation of a feasible pure certificate.");

    m.def(
        "simulate",
        [](const std::string &dilation_text, const ComplexArray &rho, const std::optional<ComplexArray> &target) {
            const SynthesizedDilation dil = read_dilation(dilation_text);
            std::optional<DensityMatrix> t;
            if (target) t = DensityMatrix(to_matrix(*target));
            return simulation_dict(simulate(dil, DensityMatrix(to_matrix(rho)), t));
        },
        py::arg("dilation"), py::arg("rho"), py::arg("target") = py::none(),
        "Applies a dilation (in its text form) to ρ and measures the probe.");

    m.def(
        "purification_overlap_search",
        [](const ComplexArray &r1, const ComplexArray &r2, std::size_t samples, std::uint64_t seed) {
            return purification_overlap_search(DensityMatrix(to_matrix(r1)), DensityMatrix(to_matrix(r2)), samples, seed);
        },
        py::arg("rho1"), py::arg("rho2"), py::arg("samples") = 2000, py::arg("seed") = 0,
        "Largest purification overlap found by search over unitaries.");

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::vector<std::string> full{"qtf"};
            full.insert(full.end(), args.begin(), args.end());
            std::vector<const char *> argv;
            for (const auto &a : full) argv.push_back(a.c_str());
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
