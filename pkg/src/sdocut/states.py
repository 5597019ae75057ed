"""Single-qubit pure states, Pauli operators and their eigenbases."""
from __future__ import annotations

import numpy as np

_S = 1 / np.sqrt(2)

STATE_LABELS = ("0", "1", "+", "-", "+i", "-i")

STATES: dict[str, np.ndarray] = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_S, _S], dtype=complex),
    "-": np.array([_S, -_S], dtype=complex),
    "+i": np.array([_S, 1j * _S], dtype=complex),
    "-i": np.array([_S, -1j * _S], dtype=complex),
}

PAULIS: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (eigenvalue +1 state, eigenvalue -1 state)
EIGENSTATES: dict[str, tuple[str, str]] = {
    "Z": ("0", "1"),
    "X": ("+", "-"),
    "Y": ("+i", "-i"),
}

BASIS_OF = {lab: basis for basis, pair in EIGENSTATES.items() for lab in pair}


def state_vector(label) -> np.ndarray:
    """Return the ket for a label, or pass an explicit 2-vector through."""
    if isinstance(label, str):
        try:
            return STATES[label]
        except KeyError:
            raise ValueError(f"unknown state label {label!r}") from None
    v = np.asarray(label, dtype=complex)
    if v.shape != (2,):
        raise ValueError("explicit states must be 2-vectors")
    return v


def projector(label) -> np.ndarray:
    v = state_vector(label)
    return np.outer(v, v.conj())


def canonical_label(vec: np.ndarray, atol: float = 1e-10) -> str | None:
    """Name of the tracked label equal to ``vec`` up to global phase, if any."""
    for lab, ref in STATES.items():
        if abs(abs(np.vdot(ref, vec)) - 1.0) <= atol:
            return lab
    return None


def parallel(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    """True when two unit vectors agree up to a global phase."""
    return abs(abs(np.vdot(a, b)) - 1.0) <= atol


def other_plus_states(biased: str) -> list[tuple[str, str]]:
    """(basis, +1 eigenstate) for the two Paulis other than ``biased``, in Z, X, Y order."""
    return [(b, EIGENSTATES[b][0]) for b in ("Z", "X", "Y") if b != biased]
