import numpy as np
import pytest

from sdocut.circuit import Circuit, GateKind, make_gate
from sdocut.wirecut import CutPoint, CutSpec

ALL_KINDS = list(GateKind)
ONE_Q = [k for k in ALL_KINDS if k.n_qubits == 1]
TWO_Q = [k for k in ALL_KINDS if k.n_qubits == 2]


def random_gate(rng, wires, two_qubit_bias=0.5):
    wires = list(wires)
    if len(wires) >= 2 and rng.random() < two_qubit_bias:
        kind = TWO_Q[rng.integers(len(TWO_Q))]
        qs = rng.choice(wires, size=2, replace=False)
    else:
        kind = ONE_Q[rng.integers(len(ONE_Q))]
        qs = [wires[rng.integers(len(wires))]]
    params = rng.uniform(-np.pi, np.pi, size=kind.n_params)
    return make_gate(kind, params, qs)


def random_circuit(rng, n, n_gates, measured=None):
    gates = [random_gate(rng, range(n)) for _ in range(n_gates)]
    return Circuit(n, tuple(gates), measured)


def random_cut_circuit(rng, n_cuts=None, n_qubits=None):
    """
    A random circuit built as a chain of wire blocks joined by bridge wires,
    with one separating cut per bridge. Returns (circuit, CutSpec).
    """
    n_cuts = int(rng.integers(1, 3)) if n_cuts is None else n_cuts
    n = int(rng.integers(max(3, n_cuts + 2), 9)) if n_qubits is None else n_qubits
    perm = [int(x) for x in rng.permutation(n)]
    bridges = perm[:n_cuts]
    rest = perm[n_cuts:]
    # split the remaining wires into n_cuts + 1 non-empty-ish groups
    splits = sorted(rng.choice(np.arange(1, len(rest)), size=min(n_cuts, len(rest) - 1), replace=False)) \
        if len(rest) > 1 else []
    groups = [list(g) for g in np.split(np.array(rest), splits)]
    while len(groups) < n_cuts + 1:
        groups.append([])
    gates, cuts = [], []
    for b in range(n_cuts + 1):
        block = [int(w) for w in groups[b]]
        if b > 0:
            block.append(bridges[b - 1])
        if b < n_cuts:
            block.append(bridges[b])
        count = int(rng.integers(3, 9))
        for _ in range(count):
            gates.append(random_gate(rng, block, 0.6))
        if b < n_cuts:
            # make sure the bridge wire is touched in this block before its cut
            if not any(bridges[b] in g.qubits for g in gates):
                gates.append(make_gate(GateKind.RY, [rng.uniform(-3, 3)], [bridges[b]]))
            cuts.append(CutPoint(bridges[b], len(gates) - 1))
    return Circuit(n, tuple(gates)), CutSpec(tuple(cuts))


def random_state_labels(rng, wires):
    labels = ["0", "1", "+", "-", "+i", "-i"]
    return {int(w): labels[rng.integers(6)] for w in wires}


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
