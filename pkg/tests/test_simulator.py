import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdocut.circuit import Circuit, make_gate
from sdocut.errors import WidthError
from sdocut.generators import gen_qaoa, path_graph
from sdocut.simulator import (
    CutOp,
    Distribution,
    NoiseModel,
    depolarize,
    expectation,
    fidelity,
    measure_branches,
    output_distribution,
    readout_flip,
    simulate_density,
    simulate_state,
)
from sdocut.states import EIGENSTATES, PAULIS, STATES

from conftest import random_circuit, random_state_labels

S2 = 1 / np.sqrt(2)
BELL = Circuit(2, (make_gate("h", (), (0,)), make_gate("cx", (), (0, 1))))


def test_hadamard_and_bell():
    assert np.allclose(simulate_state(Circuit(1, (make_gate("h", (), (0,)),))), [S2, S2])
    assert np.allclose(simulate_state(BELL), [S2, 0, 0, S2])


def test_rzz_little_endian():
    theta = 0.7
    c = Circuit(2, (make_gate("rzz", [theta], (0, 1)),))
    psi = simulate_state(c, {0: "+", 1: "0"})
    a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    # index 1 is wire 0 set: parity 1
    assert np.allclose(psi, [S2 * a, S2 * b, 0, 0])


def test_width_cap():
    with pytest.raises(WidthError):
        simulate_state(Circuit(3), max_width=2)
    with pytest.raises(WidthError):
        simulate_density(Circuit(11))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_noiseless_density_matches_state(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, 12)
    labels = random_state_labels(rng, range(n))
    psi = simulate_state(c, labels)
    rho = simulate_density(c, labels)
    assert np.abs(rho - np.outer(psi, psi.conj())).max() <= 1e-10
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 1), st.floats(0, 1))
def test_noise_preserves_trace(seed, p1, p2):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, 3, 10)
    rho = simulate_density(c, None, NoiseModel(p1, p2, 0.0))
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)


def test_full_depolarization():
    rho = simulate_density(Circuit(1, (make_gate("x", (), (0,)),)), None, NoiseModel(p1=1.0))
    assert np.allclose(rho, np.eye(2) / 2)


def test_bell_depolarized_overlap():
    p = 0.01
    rho = simulate_density(BELL, None, NoiseModel(p2=p))
    psi = simulate_state(BELL)
    # H is noiseless (p1 = 0); the CX channel mixes in I/4 with weight p
    assert np.vdot(psi, rho @ psi).real == pytest.approx((1 - p) + p / 4, abs=1e-12)


def test_depolarize_single_wire_of_product():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1
    out = depolarize(rho, [1], 0.5, 2)
    # wire 1 mixed halfway, wire 0 untouched
    assert np.allclose(np.diag(out).real, [0.75, 0, 0.25, 0])


def test_noise_model_validates():
    with pytest.raises(ValueError):
        NoiseModel(p1=1.5)
    assert NoiseModel().noiseless and not NoiseModel(p_meas=0.1).noiseless


def test_output_distributions():
    psi = simulate_state(BELL)
    d = output_distribution(psi, [0, 1])
    assert d.masses == pytest.approx({"00": 0.5, "01": 0.0, "10": 0.0, "11": 0.5})
    noisy = output_distribution(psi, [0, 1], NoiseModel(p_meas=0.1))
    assert noisy.masses == pytest.approx({"00": 0.41, "01": 0.09, "10": 0.09, "11": 0.41})
    assert output_distribution(psi, [1]).masses == pytest.approx({"0": 0.5, "1": 0.5})


def test_bit_order_follows_measured_list():
    c = Circuit(3, (make_gate("x", (), (2,)),))
    psi = simulate_state(c)
    assert output_distribution(psi, [0, 1, 2])["100"] == pytest.approx(1)
    assert output_distribution(psi, [2, 0])["01"] == pytest.approx(1)


def test_readout_flip_convolves():
    probs = np.array([1.0, 0.0])
    assert np.allclose(readout_flip(probs, 0.2), [0.8, 0.2])


def test_measure_branches_examples():
    h = Circuit(1, (make_gate("h", (), (0,)),))
    ((w, psi),) = measure_branches(h, [CutOp(0, 0, "+", "+")])
    assert w == pytest.approx(1.0)
    ((w, psi),) = measure_branches(h, [CutOp(0, 0, "1", "0")])
    assert w == pytest.approx(0.5)
    assert np.allclose(psi, [1, 0])
    with pytest.raises(ValueError):
        measure_branches(h, [CutOp(3, 0, "0", "0")])


def test_two_cuts_weights_multiply_and_sum_to_one():
    c = gen_qaoa(path_graph(3))
    total = 0.0
    for a in "01":
        for b in "01":
            ops = [CutOp(3, 1, a, a), CutOp(4, 1, b, b)]
            ((w, _),) = measure_branches(c, ops)
            ((w1, _),) = measure_branches(c, ops[:1])
            assert w <= w1 + 1e-12
            total += w
    assert total == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from("ZXY"))
def test_branch_completeness(seed, basis):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, 10)
    pos = int(rng.integers(-1, len(c.gates)))
    wire = int(rng.integers(n))
    weights = []
    for lab in EIGENSTATES[basis]:
        ((w, _),) = measure_branches(c, [CutOp(pos, wire, lab, lab)])
        weights.append(w)
    assert sum(weights) == pytest.approx(1.0, abs=1e-10)


def _dense_expectation(psi, pauli, wire, n):
    ops = [np.eye(2)] * n
    ops[wire] = PAULIS[pauli]
    M = np.array([[1.0]])
    for op in reversed(ops):  # wire n-1 is the most significant factor
        M = np.kron(M, op)
    return np.vdot(psi, M @ psi).real


def test_expectation_examples():
    assert expectation(STATES["0"], "Z", 0) == pytest.approx(1)
    assert expectation(STATES["+"], "X", 0) == pytest.approx(1)
    assert expectation(STATES["+"], "Z", 0) == pytest.approx(0)
    c = Circuit(1, (make_gate("h", (), (0,)), make_gate("t", (), (0,)), make_gate("h", (), (0,))))
    psi = simulate_state(c)
    assert expectation(psi, "Y", 0) == pytest.approx(_dense_expectation(psi, "Y", 0, 1), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from("XYZ"))
def test_expectation_matches_postselection(seed, pauli):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, 8)
    psi = simulate_state(c)
    wire = int(rng.integers(n))
    dense = _dense_expectation(psi, pauli, wire, n)
    assert expectation(psi, pauli, wire) == pytest.approx(dense, abs=1e-10)
    assert expectation(np.outer(psi, psi.conj()), pauli, wire) == pytest.approx(dense, abs=1e-10)
    e0, e1 = EIGENSTATES[pauli]
    end = len(c.gates) - 1
    ((r, _),) = measure_branches(c, [CutOp(end, wire, e0, e0)])
    ((s, _),) = measure_branches(c, [CutOp(end, wire, e1, e1)])
    assert r - s == pytest.approx(dense, abs=1e-10)


def test_fidelity_examples():
    p = Distribution({"0": 1.0, "1": 0.0})
    q = Distribution({"0": 0.5, "1": 0.5})
    assert fidelity(q, q) == pytest.approx(1.0)
    assert fidelity(p, Distribution({"0": 0.0, "1": 1.0})) == pytest.approx(0.0)
    assert fidelity(p, q) == pytest.approx(0.5)
    # negatives are clipped and the rest renormalized
    assert fidelity(Distribution({"0": 1.1, "1": -0.1}), p) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fidelity(Distribution({"0": 0.0}), Distribution({"0": 0.0}))


def test_distribution_json_round_trip():
    d = Distribution({"01": 0.1, "00": 0.9})
    text = d.to_json()
    assert text.index('"00"') < text.index('"01"')
    assert Distribution.from_json(text) == d
    assert d.l1(Distribution({"01": 0.1, "00": 0.8})) == pytest.approx(0.1)
