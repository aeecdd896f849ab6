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

// Shared fixtures for the test binaries: random instances and Eigen-backed oracles.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qtf/linalg.hpp"
#include "qtf/states.hpp"

namespace qtf::testing {

inline Eigen::MatrixXcd to_eigen(const CMatrix &m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
    return e;
}

inline CMatrix from_eigen(const Eigen::MatrixXcd &e) {
    CMatrix m(e.rows(), e.cols());
    for (Eigen::Index r = 0; r < e.rows(); ++r)
        for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
    return m;
}

/// Ascending eigenvalues from Eigen's self-adjoint solver.
inline std::vector<double> oracle_eigenvalues(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m.hermitian_part()), Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

inline double oracle_min_eigenvalue(const CMatrix &m) { return oracle_eigenvalues(m).front(); }

inline Eigen::MatrixXcd oracle_sqrt(const Eigen::MatrixXcd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

/// Tr√(√ρ σ √ρ) computed with Eigen.
inline double oracle_fidelity(const CMatrix &r1, const CMatrix &r2) {
    Eigen::MatrixXcd s1 = oracle_sqrt(to_eigen(r1));
    Eigen::MatrixXcd inner = s1 * to_eigen(r2) * s1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

inline CVector random_vector(std::size_t d, std::mt19937_64 &rng, bool complex_entries = true) {
    std::normal_distribution<double> g;
    CVector v(d);
    for (auto &z : v) z = complex_entries ? cplx(g(rng), g(rng)) : cplx(g(rng), 0.0);
    return v;
}

inline PureState random_pure(std::size_t d, std::mt19937_64 &rng, bool complex_entries = true) {
    return PureState::normalized(random_vector(d, rng, complex_entries));
}

inline CMatrix random_hermitian(std::size_t d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    CMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        m(r, r) = g(rng);
        for (std::size_t c = r + 1; c < d; ++c) {
            m(r, c) = cplx(g(rng), g(rng));
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

/// Random PSD matrix of the given rank, G = Σ v v†.
inline CMatrix random_psd(std::size_t d, std::size_t rank, std::mt19937_64 &rng) {
    CMatrix m(d, d);
    for (std::size_t k = 0; k < rank; ++k) {
        CVector v = random_vector(d, rng);
        m += CMatrix::outer(v, v);
    }
    return m;
}

inline DensityMatrix random_density(std::size_t d, std::size_t rank, std::mt19937_64 &rng) {
    CMatrix m = random_psd(d, rank, rng);
    m *= cplx(1.0 / m.trace().real(), 0.0);
    return DensityMatrix(m.hermitian_part());
}

inline CMatrix random_unitary(std::size_t d, std::mt19937_64 &rng) {
    Eigen::MatrixXcd g = to_eigen(CMatrix(d, d, random_vector(d * d, rng)));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    return from_eigen(qr.householderQ() * Eigen::MatrixXcd::Identity(d, d));
}

inline double unitarity_defect(const CMatrix &u) {
    return max_abs_diff(u.adjoint() * u, CMatrix::identity(u.cols()));
}

} // namespace qtf::testing
