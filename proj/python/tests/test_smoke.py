"""Smoke tests for the _qchain extension module."""

import json
import math

import numpy as np
import pytest

import _qchain as qc


W3 = 1.0 / math.sqrt(3.0)


def small_config(n_steps=500):
    return json.dumps(
        {
            "model": {"n_qubits": 3, "preset": "heisenberg", "j": 0.5},
            "fields": [
                {
                    "qubit": 1,
                    "terms": [
                        {
                            "type": "sine_sum",
                            "amplitude": 0.6,
                            "signs": [1, -1, 1, -1],
                            "omegas": [1, 3, 5, 7],
                        }
                    ],
                }
            ],
            "initial_state": [
                {"label": "011", "amplitude": W3},
                {"label": "101", "amplitude": W3},
                {"label": "110", "amplitude": W3},
            ],
            "grid": {"t_end": 1.5, "n_steps": n_steps},
        }
    )


def test_simulate_conserves_totals():
    traj = qc.simulate(small_config())
    sigma = traj["sigma_z"]
    assert sigma.shape == (501, 3)
    np.testing.assert_allclose(sigma[0], [-1 / 3, -1 / 3, -1 / 3], atol=1e-12)
    totals = sigma.sum(axis=1)
    assert np.max(np.abs(totals - totals[0])) <= 1e-9


def test_vl_map_reproduces_sigma():
    cfg = json.loads(small_config(n_steps=2000))
    cfg["fields"].append(
        {
            "qubit": 3,
            "terms": [
                {"type": "sine_sum", "amplitude": 0.6, "signs": [1, 1, 1, 1], "omegas": [2, 4, 6, 8]}
            ],
        }
    )
    cfg["vl"] = {
        "aux_model": {"n_qubits": 3, "preset": "xy", "j_perp": [1.2, -1.0]},
        "gauge_qubit": 2,
    }
    res = qc.vl_map(json.dumps(cfg))
    assert res["max_sigma_deviation"] <= 5e-3
    assert res["max_state_coefficient_deviation"] > 0.1
    ref = res["reference"]["sigma_z"]
    aux = res["auxiliary"]["sigma_z"]
    assert np.max(np.abs(ref - aux)) == res["max_sigma_deviation"]


def test_pauli_and_polarizations():
    state = np.zeros(4, dtype=complex)
    state[0] = 1.0
    flipped = qc.apply_pauli(state, 1, "x")
    assert flipped[1] == 1.0
    np.testing.assert_allclose(qc.local_polarizations(flipped), [-1.0, 1.0])


def test_concurrence_anchors():
    bell = np.zeros(4, dtype=complex)
    bell[1] = bell[2] = 1.0 / math.sqrt(2.0)
    c, lam = qc.concurrence(bell, 1, 2)
    assert abs(c - 1.0) < 1e-12
    assert abs(lam[0] - 1.0) < 1e-12

    w = np.zeros(8, dtype=complex)
    for b in (1, 2, 4):
        w[b] = W3
    c, _ = qc.concurrence(w, 1, 3)
    assert abs(c - 2.0 / 3.0) < 1e-12
    assert abs(qc.entanglement_functional([1 / 3, 1 / 3, 1 / 3], 1, 3) - c) < 1e-12


def test_two_excitation_spectrum_matches_concurrence():
    rng = np.random.default_rng(7)
    n = 5
    state = np.zeros(2**n, dtype=complex)
    for b in range(2**n):
        if bin(b).count("1") == 2:
            state[b] = rng.normal() + 1j * rng.normal()
    state /= np.linalg.norm(state)
    lam = qc.two_excitation_spectrum(state, 2, 4)
    _, lam_eig = qc.concurrence(state, 2, 4)
    np.testing.assert_allclose(lam, lam_eig, atol=1e-10)


def test_validation_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        qc.simulate("{}")
    with pytest.raises(ValueError):
        qc.entanglement_functional([0.0, 0.0, 0.0], 1, 2)


def test_verify_default_suite_passes():
    for report in qc.verify_default_suite():
        assert report["pass"], report


def test_embedded_presets():
    assert json.loads(qc.embedded_config("paper_fig3"))["grid"]["n_steps"] == 10000
    assert qc.embedded_config("unknown") == ""
