"""
Exact dense simulation: statevectors, density matrices with depolarizing
noise, postselected mid-circuit measure-and-prepare branches, and output
distributions.

States are plain numpy arrays: a statevector has shape (2**n,), a density
matrix (2**n, 2**n). Index bit q corresponds to wire q (little-endian).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .circuit import Circuit
from .errors import WidthError
from .states import PAULIS, projector, state_vector

MAX_STATEVECTOR_WIDTH = 14
MAX_DENSITY_WIDTH = 10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1, -1j])
# unitaries taking the +1/-1 eigenstates of each basis to |0>/|1>
BASIS_ROTATIONS = {"Z": np.eye(2, dtype=complex), "X": _H, "Y": _H @ _SDG}


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    p_meas: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "p_meas"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def noiseless(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.p_meas == 0


class CutOp(NamedTuple):
    """Postselect ``wire`` onto ``projector`` after gate ``position``, then prepare ``prepare``."""

    position: int
    wire: int
    projector: str
    prepare: str


@dataclass(frozen=True)
class Distribution:
    """
    Bitstring -> mass. Character j counted from the right is the j-th
    measured wire, so ``int(key, 2)`` is the little-endian outcome index.
    Reconstructed distributions may carry negative masses.
    """

    masses: dict

    @classmethod
    def from_array(cls, probs) -> Distribution:
        probs = np.asarray(probs, dtype=float).reshape(-1)
        m = int(round(np.log2(len(probs))))
        if 2**m != len(probs):
            raise ValueError("distribution length must be a power of two")
        if m == 0:
            return cls({"": float(probs[0])})
        return cls({format(i, f"0{m}b"): float(p) for i, p in enumerate(probs)})

    @property
    def n_bits(self) -> int:
        return len(next(iter(self.masses))) if self.masses else 0

    def to_array(self) -> np.ndarray:
        out = np.zeros(2**self.n_bits)
        for k, v in self.masses.items():
            out[int(k, 2) if k else 0] += v
        return out

    def total(self) -> float:
        return float(sum(self.masses.values()))

    def __getitem__(self, key: str) -> float:
        return self.masses.get(key, 0.0)

    def l1(self, other: Distribution) -> float:
        keys = set(self.masses) | set(other.masses)
        return float(sum(abs(self[k] - other[k]) for k in keys))

    def clipped(self) -> Distribution:
        """Negative masses set to zero, then renormalized."""
        pos = {k: max(v, 0.0) for k, v in self.masses.items()}
        z = sum(pos.values())
        if z <= 0:
            raise ValueError("distribution has no positive mass")
        return Distribution({k: v / z for k, v in pos.items()})

    def scaled(self, c: float) -> Distribution:
        return Distribution({k: c * v for k, v in self.masses.items()})

    def to_json(self) -> str:
        return json.dumps({k: float(f"{v:.17g}") for k, v in sorted(self.masses.items())}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> Distribution:
        return cls({k: float(v) for k, v in json.loads(text).items()})


def _check_width(n: int, cap: int, what: str):
    if n > cap:
        raise WidthError(f"{n}-qubit {what} exceeds the configured cap of {cap}")


def apply_matrix(psi: np.ndarray, U: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a 2**k x 2**k matrix to ``qubits`` of an n-wire state vector."""
    k = len(qubits)
    t = psi.reshape((2,) * n)
    # gate row bits run qubits[k-1] (most significant) .. qubits[0]
    axes = [n - 1 - q for q in reversed(qubits)]
    t = np.tensordot(U.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(t, list(range(k)), axes).reshape(-1)


def apply_channel_unitary(rho: np.ndarray, U: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    flat = rho.reshape(-1)
    # a density matrix is a 2n-wire vector: rows are wires n..2n-1, columns wires 0..n-1
    flat = apply_matrix(flat, U, [q + n for q in qubits], 2 * n)
    flat = apply_matrix(flat, U.conj(), list(qubits), 2 * n)
    return flat.reshape(rho.shape)


def depolarize(rho: np.ndarray, wires: Sequence[int], p: float, n: int) -> np.ndarray:
    """rho -> (1-p) rho + p Tr_wires(rho) (x) I/2^k."""
    if p == 0:
        return rho
    k = len(wires)
    d = 2**k
    src = [n - 1 - q for q in wires] + [2 * n - 1 - q for q in wires]
    dst = list(range(2 * n - 2 * k, 2 * n))
    t = np.moveaxis(rho.reshape((2,) * (2 * n)), src, dst)
    lead = t.shape[: 2 * n - 2 * k]
    red = np.trace(t.reshape(lead + (d, d)), axis1=-2, axis2=-1)
    mixed = (red[..., None, None] * (np.eye(d) / d)).reshape(lead + (2,) * (2 * k))
    mixed = np.moveaxis(mixed, dst, src).reshape(rho.shape)
    return (1 - p) * rho + p * mixed


def initial_state(n: int, init_labels=None) -> np.ndarray:
    labels = _label_list(n, init_labels)
    psi = np.ones(1, dtype=complex)
    for q in reversed(range(n)):
        psi = np.kron(psi, state_vector(labels[q]))
    return psi


def _label_list(n: int, init_labels) -> list:
    if init_labels is None:
        return ["0"] * n
    if isinstance(init_labels, Mapping):
        out = ["0"] * n
        for q, lab in init_labels.items():
            if not 0 <= q < n:
                raise ValueError(f"init label for wire {q} outside circuit")
            out[q] = lab
        return out
    labels = list(init_labels)
    if len(labels) != n:
        raise ValueError(f"expected {n} init labels, got {len(labels)}")
    return labels


def _cut_schedule(circuit: Circuit, cut_ops) -> dict[int, list[CutOp]]:
    sched: dict[int, list[CutOp]] = {}
    for op in cut_ops:
        op = CutOp(*op)
        if not -1 <= op.position < len(circuit.gates):
            raise ValueError(f"cut position {op.position} outside [-1, {len(circuit.gates) - 1}]")
        if not 0 <= op.wire < circuit.n_qubits:
            raise ValueError(f"cut wire {op.wire} outside circuit")
        sched.setdefault(op.position, []).append(op)
    return sched


def simulate_state(circuit: Circuit, init_labels=None, max_width: int = MAX_STATEVECTOR_WIDTH) -> np.ndarray:
    n = circuit.n_qubits
    _check_width(n, max_width, "statevector simulation")
    psi = initial_state(n, init_labels)
    for g in circuit.gates:
        psi = apply_matrix(psi, g.unitary, g.qubits, n)
    return psi


def _project_and_prepare(psi: np.ndarray, op: CutOp, n: int) -> np.ndarray:
    t = np.moveaxis(psi.reshape((2,) * n), n - 1 - op.wire, 0)
    rest = np.tensordot(state_vector(op.projector).conj(), t, axes=(0, 0))
    t = np.multiply.outer(state_vector(op.prepare), rest)
    return np.moveaxis(t, 0, n - 1 - op.wire).reshape(-1)


def measure_branches(circuit: Circuit, cut_ops, init_labels=None,
                     max_width: int = MAX_STATEVECTOR_WIDTH) -> list[tuple[float, np.ndarray]]:
    """
    Run ``circuit`` with postselected measure-and-prepare operations.

    Each op projects its wire onto ``projector`` (the branch weight picks up
    the norm squared), renormalizes, and re-prepares the wire in ``prepare``.
    Returns the single surviving branch as ``[(weight, normalized state)]``;
    a zero-weight branch carries an all-zero state.
    """
    n = circuit.n_qubits
    _check_width(n, max_width, "statevector simulation")
    sched = _cut_schedule(circuit, cut_ops)
    psi = initial_state(n, init_labels)
    weight = 1.0

    def cut(psi, weight, ops):
        for op in ops:
            psi = _project_and_prepare(psi, op, n)
            nrm = float(np.vdot(psi, psi).real)
            weight *= nrm
            psi = psi / np.sqrt(nrm) if nrm > 0 else np.zeros_like(psi)
        return psi, weight

    psi, weight = cut(psi, weight, sched.get(-1, ()))
    for i, g in enumerate(circuit.gates):
        psi = apply_matrix(psi, g.unitary, g.qubits, n)
        psi, weight = cut(psi, weight, sched.get(i, ()))
    return [(weight, psi)]


def _cut_density(rho: np.ndarray, op: CutOp, n: int, p_meas: float) -> np.ndarray:
    def branch(proj_label):
        P = projector(proj_label)
        r = apply_channel_unitary(rho, P, [op.wire], n)  # P rho P (P is Hermitian)
        # trace out the wire, then prepare the new state on it
        t = r.reshape((2,) * (2 * n))
        red = np.trace(t, axis1=n - 1 - op.wire, axis2=2 * n - 1 - op.wire)
        v = state_vector(op.prepare)
        new = np.multiply.outer(red, np.outer(v, v.conj()))
        # axes of ``new``: remaining rows, remaining cols, row_w, col_w
        m = 2 * n - 2
        new = np.moveaxis(new, [m, m + 1], [n - 1 - op.wire, 2 * n - 1 - op.wire])
        return new.reshape(rho.shape)

    out = branch(op.projector)
    if p_meas > 0:
        # the recorded bit flips with prob p_meas: the orthogonal outcome leaks in
        flipped = _orthogonal_label(op.projector)
        out = (1 - p_meas) * out + p_meas * branch(flipped)
    return out


def _orthogonal_label(label):
    v = state_vector(label)
    return np.array([-np.conj(v[1]), np.conj(v[0])])


def simulate_density(circuit: Circuit, init_labels=None, noise: NoiseModel | None = None,
                     max_width: int = MAX_DENSITY_WIDTH, cut_ops=()) -> np.ndarray:
    """
    Density-matrix evolution; each gate is followed by depolarizing noise on
    its qubits. With ``cut_ops`` the result is the unnormalized postselected
    branch (trace = branch weight). Readout error is applied at measurement
    extraction (see ``output_distribution``) and on mid-circuit cuts here.
    """
    n = circuit.n_qubits
    _check_width(n, max_width, "density-matrix simulation")
    noise = noise or NoiseModel()
    sched = _cut_schedule(circuit, cut_ops)
    psi = initial_state(n, init_labels)
    rho = np.outer(psi, psi.conj())
    for op in sched.get(-1, ()):
        rho = _cut_density(rho, op, n, noise.p_meas)
    for i, g in enumerate(circuit.gates):
        rho = apply_channel_unitary(rho, g.unitary, g.qubits, n)
        p = noise.p2 if g.n_qubits == 2 else noise.p1
        rho = depolarize(rho, g.qubits, p, n)
        for op in sched.get(i, ()):
            rho = _cut_density(rho, op, n, noise.p_meas)
    return rho


def readout_flip(probs: np.ndarray, p: float) -> np.ndarray:
    """Independent bit-flip channel on every bit of a flat little-endian distribution."""
    if p == 0:
        return probs
    m = int(round(np.log2(len(probs))))
    conf = np.array([[1 - p, p], [p, 1 - p]])
    t = probs.reshape((2,) * m)
    for ax in range(m):
        t = np.moveaxis(np.tensordot(conf, t, axes=(1, ax)), 0, ax)
    return t.reshape(-1)


def outcome_probabilities(state: np.ndarray, measured_wires: Sequence[int], n: int | None = None,
                          bases: Mapping[int, str] | None = None) -> np.ndarray:
    """Flat marginal over ``measured_wires`` (bit j = measured_wires[j]), noiseless."""
    dm = state.ndim == 2
    n = n if n is not None else int(round(np.log2(state.shape[0])))
    for q, b in (bases or {}).items():
        if b != "Z":
            R = BASIS_ROTATIONS[b]
            state = apply_channel_unitary(state, R, [q], n) if dm else apply_matrix(state, R, [q], n)
    diag = np.real(np.diag(state)) if dm else np.abs(state) ** 2
    t = diag.reshape((2,) * n)
    mw = list(measured_wires)
    keep = {n - 1 - q for q in mw}
    t = t.sum(axis=tuple(ax for ax in range(n) if ax not in keep))
    # remaining axes are in descending wire order; we want mw[-1] .. mw[0]
    remaining = sorted(mw, reverse=True)
    order = [remaining.index(q) for q in reversed(mw)]
    return np.transpose(t, order).reshape(-1) if mw else np.array([t.sum()])


def output_distribution(state: np.ndarray, measured_wires: Sequence[int], noise: NoiseModel | None = None,
                        bases: Mapping[int, str] | None = None) -> Distribution:
    probs = outcome_probabilities(state, measured_wires, bases=bases)
    if noise is not None and measured_wires:
        probs = readout_flip(probs, noise.p_meas)
    return Distribution.from_array(probs)


def reduced_density(state: np.ndarray, wire: int) -> np.ndarray:
    n = int(round(np.log2(state.shape[0])))
    if state.ndim == 1:
        t = np.moveaxis(state.reshape((2,) * n), n - 1 - wire, 0).reshape(2, -1)
        return t @ t.conj().T
    t = np.moveaxis(state.reshape((2,) * (2 * n)), [n - 1 - wire, 2 * n - 1 - wire], [0, 1])
    return np.trace(t.reshape(2, 2, 2 ** (n - 1), 2 ** (n - 1)), axis1=2, axis2=3)


def expectation(state: np.ndarray, pauli: str, wire: int) -> float:
    return float(np.real(np.trace(PAULIS[pauli] @ reduced_density(state, wire))))


def fidelity(p: Distribution, q: Distribution) -> float:
    """Hellinger fidelity (sum_i sqrt(p_i q_i))^2 after clipping negatives and renormalizing."""
    p, q = p.clipped(), q.clipped()
    bc = sum(np.sqrt(v * q[k]) for k, v in p.masses.items() if v > 0)
    return float(min(1.0, bc**2))
