"""
State-dependent optimization passes.

Forward (initial-state) optimization walks the circuit from known pure
input states; backward (measure-state) optimization walks from postselected
projectors toward the inputs. A gate touching a known wire is either
eliminated (the known state is an eigenvector, any eigenphase), rewritten as
a smaller gate acting on the remaining wires (the gate factors through the
known state), or it ends the wire's known-state frontier.

Both passes accept mid-circuit measure-and-prepare operations (``CutOp``):
the forward frontier restarts at a cut's prepared state, the backward
frontier restarts at a cut's projector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, GateKind, make_gate
from .simulator import CutOp
from .states import STATE_LABELS, canonical_label, parallel, state_vector

TOL = 1e-10

INITIAL = "initial"
MEASURE = "measure"


# -- dense checks -------------------------------------------------------------

def _isometry(k: int, states: Mapping[int, np.ndarray]) -> np.ndarray:
    """The 2**k x 2**(k-m) map |x> -> (known states on ``states`` positions) (x) |x> on the rest."""
    pos = sorted(states)
    rest = [i for i in range(k) if i not in states]
    V = np.zeros((2**k, 2 ** len(rest)), dtype=complex)
    for r in range(2 ** len(rest)):
        base = 0
        for j, q in enumerate(rest):
            base |= ((r >> j) & 1) << q
        for a in range(2 ** len(pos)):
            idx, amp = base, 1.0 + 0j
            for j, p in enumerate(pos):
                bit = (a >> j) & 1
                idx |= bit << p
                amp *= states[p][bit]
            V[idx, r] += amp
    return V


def _states_for(phi_label, positions) -> dict[int, np.ndarray]:
    if isinstance(phi_label, Mapping):
        return {int(p): state_vector(v) for p, v in phi_label.items()}
    v = state_vector(phi_label)
    return {int(p): v for p in positions}


def _is_unitary(M: np.ndarray, tol: float = TOL) -> bool:
    return np.abs(M @ M.conj().T - np.eye(M.shape[0])).max() <= tol


def try_factor_initial(U: np.ndarray, phi_label, acting_positions=()) -> np.ndarray | None:
    """
    U_B with U (|phi> (x) I) = |phi> (x) U_B, or None.

    ``acting_positions`` index into the gate's qubit tuple (position 0 is
    the least-significant bit of U). ``phi_label`` may also be a mapping
    position -> label/vector for different known states per position.
    """
    k = int(round(np.log2(U.shape[0])))
    V = _isometry(k, _states_for(phi_label, acting_positions))
    A = U @ V
    UB = V.conj().T @ A
    if np.abs(A - V @ UB).max() > TOL or not _is_unitary(UB):
        return None
    return UB


def try_factor_measure(U: np.ndarray, u_label, acting_positions=()) -> np.ndarray | None:
    """U_B with (<u| (x) I) U = <u| (x) U_B, or None."""
    k = int(round(np.log2(U.shape[0])))
    V = _isometry(k, _states_for(u_label, acting_positions))
    W = V.conj().T
    B = W @ U
    UB = B @ V
    if np.abs(B - UB @ W).max() > TOL or not _is_unitary(UB):
        return None
    return UB


def _commutes(U: np.ndarray, states: Mapping[int, np.ndarray], tol: float) -> bool:
    k = int(round(np.log2(U.shape[0])))
    V = _isometry(k, states)
    P = V @ V.conj().T
    return np.abs(U @ P - P @ U).max() <= tol


def commutes_with_state(U: np.ndarray, phi_label, positions=(), tol: float = TOL) -> bool:
    """U (I (x) |phi><phi|) == (I (x) |phi><phi|) U on the given positions."""
    return _commutes(U, _states_for(phi_label, positions), tol)


def commutes_with_projector(U: np.ndarray, proj_label, positions=(), tol: float = TOL) -> bool:
    return _commutes(U, _states_for(proj_label, positions), tol)


# -- templates ----------------------------------------------------------------

def _identity(params):
    return []


def _x(params):
    return [(GateKind.X, ())]


def _z(params):
    return [(GateKind.Z, ())]


def _rz(params):
    return [(GateKind.RZ, (params[0],))]


def _rz_neg(params):
    return [(GateKind.RZ, (-params[0],))]


_RULES = {
    (GateKind.CX, 0, "0"): _identity,
    (GateKind.CX, 0, "1"): _x,
    (GateKind.CX, 1, "+"): _identity,
    (GateKind.CX, 1, "-"): _z,
}
for _p in (0, 1):
    _RULES[(GateKind.CZ, _p, "0")] = _identity
    _RULES[(GateKind.CZ, _p, "1")] = _z
    _RULES[(GateKind.RZZ, _p, "0")] = _rz
    _RULES[(GateKind.RZZ, _p, "1")] = _rz_neg

TEMPLATE_GATES = (GateKind.CX, GateKind.CZ, GateKind.RZZ, GateKind.SWAP)
_SAMPLE_ANGLES = (0.37, -1.3, 2.9)


def _template_unitary(entries, params) -> np.ndarray:
    M = np.eye(2, dtype=complex)
    for kind, p in entries:
        M = make_gate(kind, p, (0,)).unitary @ M
    return M


def equal_up_to_phase(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    i = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    if abs(B[i]) < tol:
        return np.abs(A).max() <= tol
    ph = A[i] / B[i]
    return abs(abs(ph) - 1) <= tol and np.abs(A - ph * B).max() <= tol


def _build_templates():
    """(kind, role, position, label) -> rewrite rule or None, checked against the dense factorization."""
    table = {}
    for kind in TEMPLATE_GATES:
        samples = _SAMPLE_ANGLES if kind.n_params else ((),)
        for role, factor in ((INITIAL, try_factor_initial), (MEASURE, try_factor_measure)):
            for pos in (0, 1):
                for lab in STATE_LABELS:
                    rule = _RULES.get((kind, pos, lab))
                    for s in samples:
                        params = (s,) if kind.n_params else ()
                        UB = factor(make_gate(kind, params, (0, 1)).unitary, lab, [pos])
                        if rule is None:
                            if UB is not None:
                                raise AssertionError(f"missing template for {kind} {role} {pos} {lab}")
                        elif UB is None or not equal_up_to_phase(UB, _template_unitary(rule(params), params), 1e-12):
                            raise AssertionError(f"bad template for {kind} {role} {pos} {lab}")
                    table[(kind, role, pos, lab)] = rule
    return table


TEMPLATES = _build_templates()


def synthesize_1q(UB: np.ndarray) -> list[tuple[GateKind, tuple]] | None:
    """At most one IR gate equal to UB up to phase, or None."""
    if equal_up_to_phase(UB, np.eye(2), TOL):
        return []
    if abs(UB[0, 1]) <= TOL and abs(UB[1, 0]) <= TOL:
        return [(GateKind.RZ, (float(np.angle(UB[1, 1] / UB[0, 0])),))]
    for kind in (GateKind.X, GateKind.Y, GateKind.H):
        if equal_up_to_phase(UB, make_gate(kind, (), (0,)).unitary, TOL):
            return [(kind, ())]
    return None


# -- passes -------------------------------------------------------------------

@dataclass
class PassReport:
    gates_before: int
    gates_after: int = 0
    two_qubit_before: int = 0
    two_qubit_after: int = 0
    removed: list = field(default_factory=list)  # (original gate index, reason)

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["removed"] = [{"index": i, "reason": r} for i, r in self.removed]
        return json.dumps(d)


class _Sweep:
    """One directional pass over a list of (gate, origin index) and CutOp items."""

    def __init__(self, role: str, frontier: dict[int, np.ndarray], log: list):
        self.role = role
        self.frontier = {q: state_vector(v) for q, v in frontier.items()}
        self.log = log
        self.out: list = []

    def _image(self, U, v):
        # forward: the state moves through U; backward: the bra <v|U corresponds to ket U^dag v
        return U @ v if self.role == INITIAL else U.conj().T @ v

    def _factor(self, U, states):
        fn = try_factor_initial if self.role == INITIAL else try_factor_measure
        return fn(U, states)

    def cut(self, op: CutOp):
        self.frontier[op.wire] = state_vector(op.prepare if self.role == INITIAL else op.projector)
        self.out.append(op)

    def gate(self, g: Gate, origin: int):
        front = [p for p, q in enumerate(g.qubits) if q in self.frontier]
        if not front:
            self.out.append((g, origin))
            return
        U = g.unitary
        if g.n_qubits == 1:
            q = g.qubits[0]
            img = self._image(U, self.frontier[q])
            if parallel(img, self.frontier[q]):
                self.log.append((origin, "eigenvector-elim"))
                return
            self.frontier[q] = img / np.linalg.norm(img)
            self.out.append((g, origin))
            return

        if len(front) == g.n_qubits:
            prod = np.ones(1, dtype=complex)
            for q in reversed(g.qubits):
                prod = np.kron(prod, self.frontier[q])
            if parallel(self._image(U, prod), prod):
                self.log.append((origin, "eigenvector-elim"))
                return

        keeps = set()
        for p in front:
            q = g.qubits[p]
            vec = self.frontier[q]
            lab = canonical_label(vec)
            repl, reason = None, None
            rule = TEMPLATES.get((g.kind, self.role, p, lab)) if lab else None
            if rule is not None:
                repl, reason = rule(g.params), "template"
            else:
                UB = self._factor(U, {p: vec})
                if UB is not None:
                    keeps.add(p)
                    repl, reason = synthesize_1q(UB), "factorization"
            if repl is None:
                continue
            (other,) = [x for x in g.qubits if x != q]
            self.log.append((origin, reason))
            new = [make_gate(k, prm, (other,)) for k, prm in repl]
            if self.role == MEASURE:
                new.reverse()
            for ng in new:
                self.gate(ng, origin)
            return
        for p in front:
            if p not in keeps:
                del self.frontier[g.qubits[p]]
        self.out.append((g, origin))


def _items(circuit: Circuit, cut_ops) -> list:
    by_pos: dict[int, list] = {}
    for op in cut_ops:
        op = CutOp(*op)
        if not -1 <= op.position < len(circuit.gates):
            raise ValueError(f"cut position {op.position} out of range")
        by_pos.setdefault(op.position, []).append(op)
    items = list(by_pos.get(-1, []))
    for i, g in enumerate(circuit.gates):
        items.append((g, i))
        items.extend(by_pos.get(i, []))
    return items


def _forward(items, inits, log):
    sw = _Sweep(INITIAL, dict(inits or {}), log)
    for it in items:
        sw.cut(it) if isinstance(it, CutOp) else sw.gate(*it)
    return sw.out


def _backward(items, projectors, log):
    sw = _Sweep(MEASURE, dict(projectors or {}), log)
    for it in reversed(items):
        sw.cut(it) if isinstance(it, CutOp) else sw.gate(*it)
    return sw.out[::-1]


def _rebuild(circuit: Circuit, items) -> tuple[Circuit, tuple[CutOp, ...]]:
    gates, ops = [], []
    for it in items:
        if isinstance(it, CutOp):
            ops.append(it._replace(position=len(gates) - 1))
        else:
            gates.append(it[0])
    return circuit.with_gates(gates), tuple(ops)


def optimize(circuit: Circuit, inits=None, projectors=None, cut_ops=()):
    """
    Forward pass from ``inits`` (wire -> label at circuit start) and cut
    preparations, then backward pass from ``projectors`` (wire -> label
    postselected at circuit end) and cut projectors.

    Returns (optimized circuit, re-indexed cut ops, PassReport).
    """
    log: list = []
    items = _items(circuit, cut_ops)
    items = _forward(items, inits, log)
    items = _backward(items, projectors, log)
    out, ops = _rebuild(circuit, items)
    report = PassReport(len(circuit), len(out), circuit.two_qubit_count(), out.two_qubit_count(), log)
    return out, ops, report


def isdo_pass(circuit: Circuit, init_labels: Mapping[int, str] | None = None) -> Circuit:
    out, _ = _rebuild(circuit, _forward(_items(circuit, ()), init_labels, []))
    return out


def msdo_pass(circuit: Circuit, projector_labels: Mapping[int, str] | None = None) -> Circuit:
    out, _ = _rebuild(circuit, _backward(_items(circuit, ()), projector_labels, []))
    return out


# -- measurement splitting ----------------------------------------------------

@dataclass(frozen=True)
class Measurement:
    """A measurement of ``basis`` on one wire; ``postselect`` is None (both outcomes) or 0/1."""

    basis: str
    postselect: int | None = None
    # reconstruction weight per outcome bit (0 -> eigenvalue +1)
    weights: tuple[float, float] = (1.0, -1.0)


def msdo_split(m: Measurement) -> tuple[Measurement, Measurement]:
    """Replace one measurement by two postselected runs carrying the eigenvalues r=+1 and s=-1."""
    if m.postselect is not None:
        raise ValueError("measurement is already split")
    return (Measurement(m.basis, 0, (m.weights[0], 0.0)), Measurement(m.basis, 1, (0.0, m.weights[1])))


# -- effectiveness estimation --------------------------------------------------

@dataclass(frozen=True)
class GateReductionEstimate:
    two_qubit: int = 0
    one_qubit: int = 0

    def __add__(self, other):
        return GateReductionEstimate(self.two_qubit + other.two_qubit, self.one_qubit + other.one_qubit)

    def key(self):
        return (self.two_qubit, self.one_qubit)


def _estimate_sweep(items, frontier, role, hits2: set, hits1: set):
    frontier = {q: state_vector(v) for q, v in frontier.items()}
    seq = items if role == INITIAL else reversed(items)
    for it in seq:
        if isinstance(it, CutOp):
            frontier[it.wire] = state_vector(it.prepare if role == INITIAL else it.projector)
            continue
        g, idx = it
        front = [p for p, q in enumerate(g.qubits) if q in frontier]
        if not front:
            continue
        U = g.unitary
        if g.n_qubits == 1:
            q = g.qubits[0]
            if _commutes(U, {0: frontier[q]}, TOL):
                hits1.add(idx)
            else:
                v = U @ frontier[q] if role == INITIAL else U.conj().T @ frontier[q]
                frontier[q] = v / np.linalg.norm(v)
            continue
        states = {p: frontier[g.qubits[p]] for p in front}
        if len(front) == g.n_qubits and _commutes(U, states, TOL):
            hits2.add(idx)
            continue
        ok = [p for p in front if _commutes(U, {p: states[p]}, TOL)]
        if ok:
            hits2.add(idx)
        for p in front:
            if p not in ok:
                del frontier[g.qubits[p]]


def estimate_reduction(circuit: Circuit, inits=None, projectors=None, cut_ops=(),
                       backward: bool = True) -> GateReductionEstimate:
    """
    Count gates the passes could remove (one-qubit) or demote/remove
    (two-qubit), using commutation checks only. ``backward=False`` counts
    the forward sweep alone.
    """
    items = _items(circuit, cut_ops)
    hits2: set = set()
    hits1: set = set()
    _estimate_sweep(items, inits or {}, INITIAL, hits2, hits1)
    if backward:
        _estimate_sweep(items, projectors or {}, MEASURE, hits2, hits1)
    return GateReductionEstimate(len(hits2), len(hits1))


def frontier_labels(labels: Mapping[int, str] | Sequence[tuple[int, str]]) -> dict[int, str]:
    return dict(labels.items() if isinstance(labels, Mapping) else labels)
