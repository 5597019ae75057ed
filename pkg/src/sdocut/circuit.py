"""
Circuit IR: gates with explicit unitaries, circuits, and interaction graphs.

Qubit ordering is little-endian everywhere: wire 0 is the least-significant
bit of a state index, and for a multi-qubit gate ``qubits[0]`` is the
least-significant bit of the gate matrix index.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from math import cos, sin

import numpy as np

from .errors import CircuitError


class GateKind(Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    RZZ = "rzz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"

    @property
    def n_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def n_params(self) -> int:
        return 1 if self in _PARAMETRIC else 0


_TWO_QUBIT = frozenset({GateKind.RZZ, GateKind.CX, GateKind.CZ, GateKind.SWAP})
_PARAMETRIC = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.RZZ})

_SQ = 1 / np.sqrt(2)
_FIXED = {
    GateKind.H: np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    # control = qubits[0] (low bit), target = qubits[1]
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def _rx(t):
    return np.array([[cos(t / 2), -1j * sin(t / 2)], [-1j * sin(t / 2), cos(t / 2)]], dtype=complex)


def _ry(t):
    return np.array([[cos(t / 2), -sin(t / 2)], [sin(t / 2), cos(t / 2)]], dtype=complex)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _rzz(t):
    a, b = np.exp(-0.5j * t), np.exp(0.5j * t)
    return np.diag([a, b, b, a])


_PARAM = {GateKind.RX: _rx, GateKind.RY: _ry, GateKind.RZ: _rz, GateKind.RZZ: _rzz}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    params: tuple[float, ...]
    qubits: tuple[int, ...]

    @cached_property
    def unitary(self) -> np.ndarray:
        if self.kind in _PARAM:
            return _PARAM[self.kind](self.params[0])
        return _FIXED[self.kind]

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def on(self, *qubits: int) -> Gate:
        """Same operation on different wires."""
        return make_gate(self.kind, self.params, qubits)

    def __str__(self):
        p = f"({', '.join(repr(x) for x in self.params)})" if self.params else ""
        return f"{self.kind.value}{p} {','.join(map(str, self.qubits))}"


def make_gate(kind, params=(), qubits=()) -> Gate:
    if isinstance(kind, str):
        try:
            kind = GateKind(kind.lower())
        except ValueError:
            raise CircuitError(f"unsupported gate {kind!r}") from None
    params = tuple(float(p) for p in params)
    qubits = tuple(int(q) for q in qubits)
    if len(qubits) != kind.n_qubits:
        raise CircuitError(f"{kind.value} acts on {kind.n_qubits} qubit(s), got {len(qubits)}")
    if len(params) != kind.n_params:
        raise CircuitError(f"{kind.value} takes {kind.n_params} parameter(s), got {len(params)}")
    if len(set(qubits)) != len(qubits):
        raise CircuitError(f"duplicate qubit in {kind.value} {qubits}")
    if any(q < 0 for q in qubits):
        raise CircuitError("negative qubit index")
    return Gate(kind, params, qubits)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured: frozenset[int] | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise CircuitError(f"gate {g} exceeds {self.n_qubits} qubits")
        m = frozenset(range(self.n_qubits)) if self.measured is None else frozenset(self.measured)
        if any(not 0 <= q < self.n_qubits for q in m):
            raise CircuitError("measured wire out of range")
        object.__setattr__(self, "measured", m)

    def __len__(self):
        return len(self.gates)

    def with_gates(self, gates) -> Circuit:
        return Circuit(self.n_qubits, tuple(gates), self.measured)

    def count(self, gate_filter=None) -> int:
        if gate_filter is None:
            return len(self.gates)
        return sum(1 for g in self.gates if gate_filter(g))

    def two_qubit_count(self) -> int:
        return self.count(is_two_qubit)

    def wire_gates(self, wire: int) -> list[int]:
        """Indices of the gates touching ``wire``, in program order."""
        return [i for i, g in enumerate(self.gates) if wire in g.qubits]

    @property
    def measured_wires(self) -> tuple[int, ...]:
        return tuple(sorted(self.measured))

    def __str__(self):
        return "\n".join([f"Circuit({self.n_qubits} qubits)"] + [f"  {g}" for g in self.gates])


def is_two_qubit(gate: Gate) -> bool:
    return gate.n_qubits == 2


GATE_FILTERS = {"two_qubit": is_two_qubit, "all": lambda g: True}


@dataclass(frozen=True)
class Graph:
    n_nodes: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError("self-loop")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError("edge endpoint out of range")
            e = (min(i, j), max(i, j))
            if e in norm:
                raise ValueError(f"duplicate edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", frozenset(norm))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json(self) -> str:
        return json.dumps({"n": self.n_nodes, "edges": [list(e) for e in self.sorted_edges()]})

    @classmethod
    def from_json(cls, text: str) -> Graph:
        d = json.loads(text)
        return cls(int(d["n"]), frozenset(tuple(e) for e in d["edges"]))
