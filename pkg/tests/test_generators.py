import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdocut.circuit import GateKind, is_two_qubit
from sdocut.generators import controlled_phase, gen_bv, gen_qaoa, gen_qft, path_graph, random_graph
from sdocut.circuit import Circuit
from sdocut.simulator import output_distribution, simulate_state


def circuit_unitary(c):
    n = c.n_qubits
    cols = []
    for j in range(2**n):
        labels = {q: "01"[(j >> q) & 1] for q in range(n)}
        cols.append(simulate_state(c, labels))
    return np.array(cols).T


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.floats(0, 1), st.integers(0, 10**6), st.integers(1, 3))
def test_qaoa_gate_count_and_wires(n, density, seed, p):
    g = random_graph(n, density, seed)
    c = gen_qaoa(g, p)
    assert len(c) == n + p * (len(g.edges) + n)
    assert c.two_qubit_count() == p * len(g.edges)
    assert all(max(gate.qubits) < n for gate in c.gates)


def test_random_graph_is_seeded():
    assert random_graph(8, 0.3, 5) == random_graph(8, 0.3, 5)
    assert random_graph(6, 0.0, 1).edges == frozenset()
    assert len(random_graph(6, 1.0, 1).edges) == 15
    # lexicographic pair order drives the draws
    rng = np.random.default_rng(3)
    expect = {(i, j) for i in range(5) for j in range(i + 1, 5) if rng.random() < 0.5}
    assert random_graph(5, 0.5, 3).edges == expect


def test_qaoa_explicit_angles():
    c = gen_qaoa(path_graph(3), 2, gammas=[0.1, 0.2], betas=[0.3, 0.4])
    assert [g.params[0] for g in c.gates if g.kind == GateKind.RZZ] == [0.1, 0.1, 0.2, 0.2]
    with pytest.raises(ValueError):
        gen_qaoa(path_graph(3), 2, gammas=[0.1])


@pytest.mark.parametrize("secret,n_cx", [("000", 0), ("101", 2), ("1", 1), ("1010", 2)])
def test_bv_secret(secret, n_cx):
    c = gen_bv(secret)
    assert c.count(is_two_qubit) == n_cx
    d = output_distribution(simulate_state(c), c.measured_wires)
    assert d[secret] == pytest.approx(1.0, abs=1e-12)


def test_bv_rejects_bad_secret():
    with pytest.raises(ValueError):
        gen_bv("12")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_qft_matches_dft(n):
    U = circuit_unitary(gen_qft(n))
    N = 2**n
    F = np.exp(2j * np.pi * np.outer(np.arange(N), np.arange(N)) / N) / np.sqrt(N)
    # equal up to a global phase
    k = np.unravel_index(np.argmax(np.abs(F)), F.shape)
    assert np.allclose(U, F * (U[k] / F[k]), atol=1e-10)


@pytest.mark.parametrize("theta", [0.3, np.pi / 2, -1.1])
def test_controlled_phase_decomposition(theta):
    U = circuit_unitary(Circuit(2, tuple(controlled_phase(theta, 0, 1))))
    target = np.diag([1, 1, 1, np.exp(1j * theta)])
    assert np.allclose(U, target * U[0, 0], atol=1e-12)
