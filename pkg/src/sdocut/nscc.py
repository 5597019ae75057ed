"""
Non-separate circuit cutting.

A cut that leaves the circuit connected is realized as six single-branch
measure-and-prepare variants, each run on the whole circuit:

    rho = 1/2 * [ 2 P(+)rho P(+) + 2 P(-)rho P(-) + 2 P(+i)rho P(+i) + 2 P(-i)rho P(-i)
                  - 2 |0><1|rho|1><0| - 2 |1><0|rho|0><1| ]

where the last two terms postselect one Z outcome and prepare the other.
Matched measure-and-prepare over all six eigenstates sums to rho + Tr(rho) I,
and Tr(rho) I is the matched Z pair plus the crossed Z pair; subtracting it
leaves the six terms above. K cuts give 6**K variants.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from .circuit import Circuit, is_two_qubit
from .errors import CircuitError
from .sdo import estimate_reduction, optimize
from .simulator import (
    CutOp,
    Distribution,
    NoiseModel,
    measure_branches,
    output_distribution,
    simulate_density,
)
from .wirecut import CutPoint, CutSpec, validate_cuts

# (postselected projector, prepared state, coefficient) with identity basis Z
_BASE_VARIANTS = (
    ("+", "+", Fraction(2)),
    ("-", "-", Fraction(2)),
    ("+i", "+i", Fraction(2)),
    ("-i", "-i", Fraction(2)),
    ("1", "0", Fraction(-2)),
    ("0", "1", Fraction(-2)),
)
# Clifford relabeling Z -> X -> Y -> Z applied to eigenstates
_CYCLE = {"0": "+", "1": "-", "+": "+i", "-": "-i", "+i": "0", "-i": "1"}
_SHIFTS = {"Z": 0, "X": 1, "Y": 2}


def cut_variants(identity_basis: str = "Z") -> tuple[tuple[str, str, Fraction], ...]:
    """The six (projector, prepare, coefficient) entries of one cut; ``identity_basis`` carries the crossed pair."""
    if identity_basis not in _SHIFTS:
        raise ValueError(f"identity basis must be Z, X or Y, got {identity_basis!r}")
    out = []
    for u, v, c in _BASE_VARIANTS:
        for _ in range(_SHIFTS[identity_basis]):
            u, v = _CYCLE[u], _CYCLE[v]
        out.append((u, v, c))
    return tuple(out)


@dataclass(frozen=True)
class NsccVariant:
    choices: tuple[int, ...]          # index into cut_variants per cut
    coefficient: Fraction             # includes the 1/2 per cut
    circuit: Circuit
    cut_ops: tuple[CutOp, ...]

    def two_qubit_count(self) -> int:
        return self.circuit.count(is_two_qubit)


@dataclass
class NsccPlan:
    circuit: Circuit
    cut_spec: CutSpec
    identity_basis: str = "Z"
    sdo: bool = True

    def __post_init__(self):
        validate_cuts(self.circuit, self.cut_spec)
        self.table = cut_variants(self.identity_basis)

    @property
    def n_cuts(self) -> int:
        return len(self.cut_spec)

    def subcircuit_count(self) -> int:
        return 6 ** self.n_cuts

    def to_json(self) -> str:
        return json.dumps({
            "identity_basis": self.identity_basis,
            "sdo": self.sdo,
            "scale": "1/2",
            "cuts": [{"wire": c.wire, "after_gate": c.after_gate} for c in self.cut_spec],
            "variants": [{"projector": u, "prepare": v, "coef": str(c)} for u, v, c in self.table],
            "subcircuits": self.subcircuit_count(),
        }, sort_keys=True)


def nscc_variants(plan: NsccPlan) -> list[NsccVariant]:
    inits = {w: "0" for w in range(plan.circuit.n_qubits)}
    out = []
    for choices in itertools.product(range(6), repeat=plan.n_cuts):
        coef = Fraction(1)
        ops = []
        for c, j in zip(plan.cut_spec, choices):
            u, v, w = plan.table[j]
            coef *= w / 2
            ops.append(CutOp(c.after_gate, c.wire, u, v))
        circ, ops = plan.circuit, tuple(ops)
        if plan.sdo:
            circ, ops, _ = optimize(circ, inits, None, ops)
        out.append(NsccVariant(choices, coef, circ, ops))
    return out


def nscc_run(variant: NsccVariant, measured, noise: NoiseModel | None = None) -> Distribution:
    """Unnormalized output distribution of one variant (total mass = branch probability)."""
    if noise is None or noise.noiseless:
        ((weight, psi),) = measure_branches(variant.circuit, variant.cut_ops)
        return output_distribution(psi, measured).scaled(weight)
    rho = simulate_density(variant.circuit, None, noise, cut_ops=variant.cut_ops)
    return output_distribution(rho, measured, noise)


def nscc_reconstruct(plan: NsccPlan, noise: NoiseModel | None = None, variants=None) -> Distribution:
    variants = nscc_variants(plan) if variants is None else variants
    measured = plan.circuit.measured_wires
    total = None
    for v in variants:
        arr = nscc_run(v, measured, noise).to_array() * float(v.coefficient)
        total = arr if total is None else total + arr
    return Distribution.from_array(total)


# -- cut search ---------------------------------------------------------------

def nscc_candidates(circuit: Circuit) -> list[CutPoint]:
    """Every wire edge between two consecutive gates."""
    out = []
    for w in range(circuit.n_qubits):
        idx = circuit.wire_gates(w)
        out.extend(CutPoint(w, i) for i in idx[:-1])
    return sorted(out)


def mean_reduction(circuit: Circuit, cuts, identity_basis: str = "Z",
                   backward: bool = True) -> tuple[float, float]:
    """Estimated (two-qubit, one-qubit) reduction averaged over all variant combinations."""
    table = cut_variants(identity_basis)
    inits = {w: "0" for w in range(circuit.n_qubits)}
    tot2 = tot1 = 0
    combos = list(itertools.product(range(6), repeat=len(cuts)))
    for choices in combos:
        ops = [CutOp(c.after_gate, c.wire, table[j][0], table[j][1]) for c, j in zip(cuts, choices)]
        est = estimate_reduction(circuit, inits, None, ops, backward=backward)
        tot2 += est.two_qubit
        tot1 += est.one_qubit
    return tot2 / len(combos), tot1 / len(combos)


def nscc_find_cuts(circuit: Circuit, max_cuts: int, strict: bool = True,
                   identity_basis: str = "Z") -> CutSpec:
    """
    Greedily add the cut with the largest mean estimated two-qubit reduction
    over its variants, rescoring after every pick. Ties go to more one-qubit
    reduction, then to more two-qubit reduction on the preparation side,
    then to the smallest (wire, position). In strict mode the search stops
    once no cut adds two-qubit gain.
    """
    if max_cuts < 0:
        raise CircuitError("max_cuts must be non-negative")
    chosen: list[CutPoint] = []
    base = mean_reduction(circuit, [], identity_basis)[0]
    for _ in range(max_cuts):
        best, best_key = None, None
        for c in nscc_candidates(circuit):
            if c in chosen:
                continue
            r2, r1 = mean_reduction(circuit, chosen + [c], identity_basis)
            f2, _ = mean_reduction(circuit, chosen + [c], identity_basis, backward=False)
            key = (r2, r1, f2, -c.wire, -c.after_gate)
            if best_key is None or key > best_key:
                best, best_key = c, key
        if best is None or (strict and best_key[0] <= base):
            break
        chosen.append(best)
        base = best_key[0]
    return CutSpec(tuple(sorted(chosen)))
