# Copyright 2026 The qtf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import pathlib

import numpy as np
import pytest
import scipy.linalg

import qtf

ROOT = pathlib.Path(__file__).resolve().parents[2]

INPUTS = [np.array([2, 1, 1]), np.array([1, 3, 1]), np.array([1, 1, 4])]
OUTPUTS = [np.array([10, 1, 1]), np.array([1, 10, 1]), np.array([1, 1, 10])]


def unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def test_gram_matches_numpy():
    g = qtf.gram(INPUTS)
    kets = np.array([unit(v) for v in INPUTS])
    np.testing.assert_allclose(g, kets.conj() @ kets.T, atol=1e-14)


def test_three_state_optimum():
    r = qtf.optimize(INPUTS, OUTPUTS)
    assert r["feasible"]
    assert r["p"] == pytest.approx(0.3788, abs=2e-3)
    np.testing.assert_allclose(r["gamma"], [0.1570, 0.4342, 0.5453], atol=2e-3)
    eig = np.linalg.eigvalsh(r["a_tilde"])
    np.testing.assert_allclose(eig, [0.0, 0.1874, 0.9491], atol=2e-3)


def test_unambiguous_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = unit(rng.normal(size=3) + 1j * rng.normal(size=3))
        b = unit(rng.normal(size=3) + 1j * rng.normal(size=3))
        r = qtf.optimize([a, b], [np.array([1, 0]), np.array([0, 1])])
        assert r["p"] == pytest.approx(1 - abs(np.vdot(a, b)), abs=1e-6)


def test_synthesis_round_trip():
    r = qtf.optimize(INPUTS, OUTPUTS)
    dil = qtf.synthesize(INPUTS, OUTPUTS, r["gamma"], r["a"])
    u = dil["unitary"]
    np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-9)
    for sim, eta in zip(dil["simulations"], r["gamma"]):
        assert sim["success_probability"] == pytest.approx(eta, abs=1e-8)
        assert sim["fidelity_to_target"] == pytest.approx(1.0, abs=1e-8)
    rho = np.outer(unit(INPUTS[1]), unit(INPUTS[1]).conj())
    target = np.outer(unit(OUTPUTS[1]), unit(OUTPUTS[1]).conj())
    again = qtf.simulate(dil["text"], rho, target)
    assert again["success_probability"] == pytest.approx(r["gamma"][1], abs=1e-8)


def test_checks_and_bounds():
    x = np.array([[1, 0.5], [0.5, 1]])
    y = np.array([[1, 0.8], [0.8, 1]])
    det = qtf.check_deterministic(x, y)
    assert det["feasible"]
    assert det["candidate"][0, 1].real == pytest.approx(0.625)
    assert not qtf.check_deterministic(y, x)["feasible"]
    c = qtf.check_pure_feasible(x, np.eye(2), [0.5, 0.5], np.eye(2))
    assert c["feasible"]
    assert not qtf.check_pure_feasible(x, np.eye(2), [0.6, 0.6], np.eye(2))["feasible"]
    assert qtf.two_state_bound(0.5, 0.5, 0.5, 0.0) == pytest.approx(0.5)


def test_fidelity_against_scipy():
    rng = np.random.default_rng(11)
    for _ in range(5):
        m1 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        m2 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        r1 = m1 @ m1.conj().T
        r2 = m2 @ m2.conj().T
        r1 /= np.trace(r1).real
        r2 /= np.trace(r2).real
        s = scipy.linalg.sqrtm(r1)
        expected = np.trace(scipy.linalg.sqrtm(s @ r2 @ s)).real
        assert qtf.fidelity(r1, r2) == pytest.approx(expected, abs=1e-8)
        found = qtf.purification_overlap_search(r1, r2, 2000, 3)
        assert found <= expected + 1e-8
        assert found >= expected - 1e-3


def test_errors_raise_qtf_error():
    with pytest.raises(qtf.QtfError, match="InvalidGamma|OutOfRange"):
        qtf.check_pure_feasible(np.eye(2), np.eye(2), [1.5, 0.5], np.eye(2))
    with pytest.raises(qtf.QtfError):
        qtf.fidelity(np.eye(2), np.eye(3) / 3)


def test_cli_entry_point():
    code, out, err = qtf.run_cli(["solve", str(ROOT / "data" / "three_state_separation.problem"), "--format", "structured"])
    assert code == 0, err
    report = json.loads(out)
    assert report["P"] == pytest.approx(0.3788, abs=2e-3)
    code, _, err = qtf.run_cli(["solve", str(ROOT / "tests" / "data" / "bad_priors.problem")])
    assert code == 1
    assert "priors" in err
