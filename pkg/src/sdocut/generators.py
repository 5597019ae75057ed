"""Benchmark circuits: QAOA MaxCut on Erdos-Renyi graphs, QFT and Bernstein-Vazirani."""
from __future__ import annotations

import itertools
from math import pi

import numpy as np

from .circuit import Circuit, Graph, GateKind, make_gate

DEFAULT_GAMMA = 0.8
DEFAULT_BETA = 0.4


def random_graph(n: int, density: float, seed=None) -> Graph:
    """G(n, density): every pair (i < j), visited in lexicographic order, is kept w.p. ``density``."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < density]
    return Graph(n, frozenset(edges))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def gen_qaoa(graph: Graph, layers: int = 1, gammas=None, betas=None) -> Circuit:
    gammas = [DEFAULT_GAMMA] * layers if gammas is None else list(gammas)
    betas = [DEFAULT_BETA] * layers if betas is None else list(betas)
    if len(gammas) != layers or len(betas) != layers:
        raise ValueError(f"need {layers} gammas and betas, got {len(gammas)} and {len(betas)}")
    n = graph.n_nodes
    gates = [make_gate(GateKind.H, (), (q,)) for q in range(n)]
    for gamma, beta in zip(gammas, betas):
        gates += [make_gate(GateKind.RZZ, (gamma,), e) for e in graph.sorted_edges()]
        gates += [make_gate(GateKind.RX, (beta,), (q,)) for q in range(n)]
    return Circuit(n, tuple(gates))


def controlled_phase(theta: float, control: int, target: int) -> list:
    """CP(theta) up to global phase, using only RZ and CX."""
    return [
        make_gate(GateKind.RZ, (theta / 2,), (control,)),
        make_gate(GateKind.RZ, (theta / 2,), (target,)),
        make_gate(GateKind.CX, (), (control, target)),
        make_gate(GateKind.RZ, (-theta / 2,), (target,)),
        make_gate(GateKind.CX, (), (control, target)),
    ]


def gen_qft(n: int) -> Circuit:
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    gates = []
    for j in reversed(range(n)):
        gates.append(make_gate(GateKind.H, (), (j,)))
        for k in reversed(range(j)):
            gates += controlled_phase(pi / 2 ** (j - k), k, j)
    for q in range(n // 2):
        gates.append(make_gate(GateKind.SWAP, (), (q, n - 1 - q)))
    return Circuit(n, tuple(gates))


def gen_bv(secret: str) -> Circuit:
    """
    Bernstein-Vazirani with a |-> ancilla on the last wire.

    The secret is written like a measured bitstring: its last character is
    wire 0, so a noiseless run returns ``secret`` itself.
    """
    if not secret or set(secret) - {"0", "1"}:
        raise ValueError(f"secret must be a non-empty bitstring, got {secret!r}")
    n = len(secret)
    anc = n
    bits = [secret[n - 1 - q] == "1" for q in range(n)]
    gates = [make_gate(GateKind.X, (), (anc,)), make_gate(GateKind.H, (), (anc,))]
    gates += [make_gate(GateKind.H, (), (q,)) for q in range(n)]
    gates += [make_gate(GateKind.CX, (), (q, anc)) for q in range(n) if bits[q]]
    gates += [make_gate(GateKind.H, (), (q,)) for q in range(n)]
    return Circuit(n + 1, tuple(gates), frozenset(range(n)))
