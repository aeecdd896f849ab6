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

#include "qtf/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "qtf/error.hpp"

namespace qtf {

namespace {

using nlohmann::json;

constexpr double kFileTol = 1e-6;

[[noreturn]] void fail(const std::string &field, const std::string &what) {
    throw Error(ErrorCode::ParseError, field + ": " + what);
}

cplx parse_complex(const json &j, const std::string &field) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    fail(field, "expected a number or an [re, im] pair");
}

CVector parse_vector(const json &j, const std::string &field) {
    if (!j.is_array() || j.empty()) fail(field, "expected a non-empty list of amplitudes");
    CVector v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_complex(j[i], field + "[" + std::to_string(i) + "]"));
    return v;
}

CMatrix parse_matrix(const json &j, const std::string &field) {
    if (!j.is_array() || j.empty()) fail(field, "expected a non-empty list of rows");
    const std::size_t n = j.size();
    CMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::string rf = field + "[" + std::to_string(r) + "]";
        const CVector row = parse_vector(j[r], rf);
        if (row.size() != n) fail(rf, "matrix must be square");
        for (std::size_t c = 0; c < n; ++c) m(r, c) = row[c];
    }
    return m;
}

PureState make_ket(CVector v, bool normalize, const std::string &field) {
    const double n = norm(v);
    if (!(n > 0.0)) fail(field, "zero vector");
    if (!normalize && std::abs(n - 1.0) > kFileTol) {
        std::ostringstream os;
        os << "ket norm " << n << " differs from 1";
        fail(field, os.str());
    }
    return PureState::normalized(std::move(v));
}

DensityMatrix make_rho(const CMatrix &m, bool normalize, const std::string &field) {
    if (m.hermitian_defect() > kFileTol) fail(field, "density matrix is not Hermitian");
    CMatrix h = m.hermitian_part();
    const double tr = h.trace().real();
    if (!(tr > 0.0)) fail(field, "density matrix has non-positive trace");
    if (!normalize && std::abs(tr - 1.0) > kFileTol) {
        std::ostringstream os;
        os << "density matrix trace " << tr << " differs from 1";
        fail(field, os.str());
    }
    h *= 1.0 / tr;
    try {
        return DensityMatrix(std::move(h), kFileTol);
    } catch (const Error &e) {
        fail(field, e.what());
    }
}

int nesting_depth(const json &j) {
    int d = 0;
    const json *p = &j;
    while (p->is_array() && !p->empty()) {
        ++d;
        p = &(*p)[0];
    }
    return d;
}

StateSpec parse_state(const json &j, bool normalize, const std::string &field) {
    StateSpec s;
    if (j.is_object()) {
        if (j.contains("ket")) {
            s.ket = make_ket(parse_vector(j["ket"], field + ".ket"), normalize, field + ".ket");
        } else if (j.contains("rho")) {
            s.rho = make_rho(parse_matrix(j["rho"], field + ".rho"), normalize, field + ".rho");
        } else {
            fail(field, "state object needs a \"ket\" or \"rho\" entry");
        }
        return s;
    }
    const int depth = nesting_depth(j);
    if (depth == 1 || depth == 2) {
        s.ket = make_ket(parse_vector(j, field), normalize, field);
    } else if (depth == 3) {
        s.rho = make_rho(parse_matrix(j, field), normalize, field);
    } else {
        fail(field, "unrecognized state layout");
    }
    return s;
}

std::vector<StateSpec> parse_states(const json &root, const char *key, bool normalize) {
    const json &arr = root[key];
    if (!arr.is_array() || arr.empty()) fail(key, "expected a non-empty list of states");
    std::vector<StateSpec> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back(parse_state(arr[i], normalize, std::string(key) + "[" + std::to_string(i) + "]"));
    }
    const std::size_t d = out.front().dim();
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].dim() != d) fail(std::string(key) + "[" + std::to_string(i) + "]", "dimension differs from the first state");
    }
    return out;
}

Mode parse_mode(const json &j) {
    if (!j.is_string()) fail("mode", "expected a string");
    const std::string m = j.get<std::string>();
    for (Mode cand : {Mode::PureToPure, Mode::PureToMixed, Mode::MixedToPure, Mode::MixedToMixed, Mode::Unambiguous,
                      Mode::DeterministicCheck, Mode::Cloning}) {
        if (mode_name(cand) == m) return cand;
    }
    fail("mode", "unknown mode \"" + m + "\"");
}

std::size_t parse_count(const json &j, const char *field) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) {
        fail(field, "expected a positive integer");
    }
    return j.get<std::size_t>();
}

std::vector<double> parse_reals(const json &j, const char *field) {
    if (!j.is_array()) fail(field, "expected a list of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(std::string(field) + "[" + std::to_string(i) + "]", "expected a number");
        v.push_back(j[i].get<double>());
    }
    return v;
}

void write_matrix(std::ostringstream &os, const CMatrix &m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << m(r, c).real() << ' ' << m(r, c).imag();
        }
        os << '\n';
    }
}

class TokenReader {
  public:
    explicit TokenReader(std::string_view text) : in_(std::string(text)) {}

    void expect(const std::string &word) {
        std::string w;
        if (!(in_ >> w) || w != word) fail("dilation", "expected \"" + word + "\"");
    }
    std::size_t count(const char *what) {
        std::size_t v = 0;
        if (!(in_ >> v)) fail("dilation", std::string("bad ") + what);
        return v;
    }
    CMatrix matrix(std::size_t n, const char *what) {
        CMatrix m(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                double re = 0.0;
                double im = 0.0;
                if (!(in_ >> re >> im)) fail("dilation", std::string("truncated ") + what);
                m(r, c) = {re, im};
            }
        }
        return m;
    }

  private:
    std::istringstream in_;
};

} // namespace

std::string_view mode_name(Mode m) {
    switch (m) {
    case Mode::PureToPure: return "pure_to_pure";
    case Mode::PureToMixed: return "pure_to_mixed";
    case Mode::MixedToPure: return "mixed_to_pure";
    case Mode::MixedToMixed: return "mixed_to_mixed";
    case Mode::Unambiguous: return "unambiguous";
    case Mode::DeterministicCheck: return "deterministic_check";
    case Mode::Cloning: return "cloning";
    }
    return "unknown";
}

std::size_t StateSpec::dim() const { return ket ? ket->dim() : rho->dim(); }

DensityMatrix StateSpec::density() const { return ket ? DensityMatrix::from_pure(*ket) : *rho; }

Problem parse_problem(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ParseError, std::string("document: ") + e.what());
    }
    if (!root.is_object()) fail("document", "expected an object");
    if (!root.contains("version")) fail("version", "missing (this reader understands version 1)");
    if (!root["version"].is_number_integer() || root["version"].get<int>() != 1) fail("version", "unsupported version");
    if (!root.contains("mode")) fail("mode", "missing");

    Problem p;
    p.mode = parse_mode(root["mode"]);
    const bool normalize = root.value("normalize", false);
    if (!root.contains("inputs")) fail("inputs", "missing");
    p.inputs = parse_states(root, "inputs", normalize);
    if (root.contains("dimension")) {
        p.dimension = parse_count(root["dimension"], "dimension");
        if (p.inputs.front().dim() != p.dimension) fail("inputs", "state dimension does not match \"dimension\"");
    } else {
        p.dimension = p.inputs.front().dim();
    }
    const std::size_t n = p.inputs.size();

    if (p.mode == Mode::Cloning) {
        p.copies = root.contains("copies") ? parse_count(root["copies"], "copies") : 1;
    } else if (p.mode != Mode::Unambiguous) {
        if (!root.contains("outputs")) fail("outputs", "missing");
        p.outputs = parse_states(root, "outputs", normalize);
        if (p.outputs.size() != n) fail("outputs", "expected one output per input");
    }

    if (root.contains("priors")) {
        const auto pr = parse_reals(root["priors"], "priors");
        if (pr.size() != n) fail("priors", "expected one prior per input");
        try {
            p.priors = PriorDistribution(pr);
        } catch (const Error &e) {
            fail("priors", e.what());
        }
    } else {
        p.priors = PriorDistribution::uniform(n);
    }
    if (root.contains("gamma")) p.gamma = parse_reals(root["gamma"], "gamma");
    if (root.contains("ancilla_gram")) p.ancilla_gram = parse_matrix(root["ancilla_gram"], "ancilla_gram");

    if (root.contains("input_ensembles")) {
        const json &arr = root["input_ensembles"];
        if (!arr.is_array() || arr.size() != n) fail("input_ensembles", "expected one ensemble per input");
        std::vector<StateEnsemble> ens;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string f = "input_ensembles[" + std::to_string(i) + "]";
            if (!arr[i].is_array() || arr[i].empty()) fail(f, "expected a list of members");
            std::vector<EnsembleMember> members;
            for (std::size_t k = 0; k < arr[i].size(); ++k) {
                const std::string mf = f + "[" + std::to_string(k) + "]";
                const json &m = arr[i][k];
                if (!m.is_object() || !m.contains("weight") || !m["weight"].is_number() || !m.contains("ket")) {
                    fail(mf, "expected {\"weight\": r, \"ket\": [...]}");
                }
                members.push_back({m["weight"].get<double>(), make_ket(parse_vector(m["ket"], mf + ".ket"), true, mf)});
            }
            try {
                ens.emplace_back(std::move(members), p.inputs[i].density(), kFileTol);
            } catch (const Error &e) {
                fail(f, e.what());
            }
        }
        p.input_ensembles = std::move(ens);
    }

    if (root.contains("composite_ensembles")) {
        const json &arr = root["composite_ensembles"];
        if (!arr.is_array() || arr.size() != n) fail("composite_ensembles", "expected one entry per input");
        std::vector<CompositeOutputEnsemble> comp;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string f = "composite_ensembles[" + std::to_string(i) + "]";
            const json &c = arr[i];
            if (!c.is_object() || !c.contains("vectors") || !c.contains("d_out") || !c.contains("d_anc")) {
                fail(f, "expected {\"eta\", \"d_out\", \"d_anc\", \"vectors\"}");
            }
            CompositeOutputEnsemble e;
            e.eta = c.value("eta", 0.0);
            e.d_out = parse_count(c["d_out"], "d_out");
            e.d_anc = parse_count(c["d_anc"], "d_anc");
            for (std::size_t k = 0; k < c["vectors"].size(); ++k) {
                const std::string vf = f + ".vectors[" + std::to_string(k) + "]";
                CVector v = parse_vector(c["vectors"][k], vf);
                if (v.size() != e.d_out * e.d_anc) fail(vf, "length must be d_out·d_anc");
                e.vectors.push_back(std::move(v));
            }
            comp.push_back(std::move(e));
        }
        p.composite_ensembles = std::move(comp);
    }
    return p;
}

Problem load_problem(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

std::pair<DensityMatrix, std::optional<DensityMatrix>> parse_state_document(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ParseError, std::string("document: ") + e.what());
    }
    const bool normalize = root.is_object() && root.value("normalize", false);
    if (root.is_object() && root.contains("state")) {
        DensityMatrix s = parse_state(root["state"], normalize, "state").density();
        std::optional<DensityMatrix> t;
        if (root.contains("target")) t = parse_state(root["target"], normalize, "target").density();
        return {std::move(s), std::move(t)};
    }
    return {parse_state(root, false, "state").density(), std::nullopt};
}

std::string write_dilation(const SynthesizedDilation &dil) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "qtf-dilation 1\n";
    os << "dims " << dil.dims.d_out << ' ' << dil.dims.d_ancilla << ' ' << dil.dims.d_probe << '\n';
    os << "input_dim " << dil.input_dim << '\n';
    os << "probe_success_index " << dil.probe_success_index << '\n';
    os << "unitary " << dil.u.rows() << '\n';
    write_matrix(os, dil.u);
    os << "states " << dil.input_states.size() << '\n';
    for (std::size_t i = 0; i < dil.input_states.size(); ++i) {
        os << "input " << dil.input_states[i].dim() << '\n';
        write_matrix(os, dil.input_states[i].matrix());
        os << "target " << dil.target_states[i].dim() << '\n';
        write_matrix(os, dil.target_states[i].matrix());
    }
    return os.str();
}

SynthesizedDilation read_dilation(std::string_view text) {
    TokenReader r(text);
    r.expect("qtf-dilation");
    if (r.count("version") != 1) fail("dilation", "unsupported version");
    SynthesizedDilation dil;
    r.expect("dims");
    dil.dims.d_out = r.count("d_out");
    dil.dims.d_ancilla = r.count("d_ancilla");
    dil.dims.d_probe = r.count("d_probe");
    r.expect("input_dim");
    dil.input_dim = r.count("input_dim");
    r.expect("probe_success_index");
    dil.probe_success_index = r.count("probe_success_index");
    r.expect("unitary");
    const std::size_t dim = r.count("unitary size");
    if (dim != dil.dims.total() || dil.input_dim > dim || dil.probe_success_index >= dil.dims.d_probe) {
        fail("dilation", "inconsistent dimensions");
    }
    dil.u = r.matrix(dim, "unitary");
    r.expect("states");
    const std::size_t n = r.count("state count");
    for (std::size_t i = 0; i < n; ++i) {
        r.expect("input");
        const std::size_t di = r.count("input dimension");
        dil.input_states.emplace_back(r.matrix(di, "input state"), 1e-9);
        r.expect("target");
        const std::size_t dt = r.count("target dimension");
        dil.target_states.emplace_back(r.matrix(dt, "target state"), 1e-9);
    }
    return dil;
}

} // namespace qtf
