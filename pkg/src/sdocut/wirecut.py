"""
Wire cutting with state-dependent optimization of the subcircuits.

A cut on a wire replaces the identity channel by a measure-upstream /
prepare-downstream expansion over four Pauli terms with a 1/2 scalar:

    rho = 1/2 * sum_P Tr(P rho) P

For the chosen (biased) Pauli b with eigenstates e0, e1 the terms are
realized as

    I  : upstream b outcomes weighted (+1, +1), downstream e0 + e1
    b  : upstream b outcomes weighted (+1, -1), downstream e0 - e1
    P  : upstream P outcomes weighted (+1, -1), downstream 2 p+ - e0 - e1

so every downstream fragment needs only four preparations {e0, e1, p+, q+}.
With measurement splitting the biased measurement runs as two postselected
subcircuits, which is what lets backward optimization act on them.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, is_two_qubit
from .errors import CircuitError, InfeasibleCutError, NonSeparatingCutError, WidthError
from .sdo import GateReductionEstimate, estimate_reduction, optimize
from .simulator import (
    Distribution,
    MAX_DENSITY_WIDTH,
    MAX_STATEVECTOR_WIDTH,
    NoiseModel,
    output_distribution,
    simulate_density,
    simulate_state,
)
from .states import EIGENSTATES, other_plus_states

BASES = ("Z", "X", "Y")
EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True, order=True)
class CutPoint:
    """Cut on ``wire`` right after global gate index ``after_gate`` (-1: before every gate)."""

    wire: int
    after_gate: int


@dataclass(frozen=True)
class CutSpec:
    cuts: tuple[CutPoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(CutPoint(*c) if not isinstance(c, CutPoint) else c
                                               for c in self.cuts))

    def __len__(self):
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    def to_json(self) -> str:
        return json.dumps({"cuts": [{"wire": c.wire, "after_gate": c.after_gate} for c in self.cuts]})

    @classmethod
    def from_json(cls, text: str) -> CutSpec:
        d = json.loads(text)
        return cls(tuple(CutPoint(int(c["wire"]), int(c["after_gate"])) for c in d["cuts"]))


def validate_cuts(circuit: Circuit, cut_spec: CutSpec):
    seen = set()
    for c in cut_spec:
        if not 0 <= c.wire < circuit.n_qubits:
            raise CircuitError(f"cut wire {c.wire} outside circuit")
        if not -1 <= c.after_gate < len(circuit.gates):
            raise CircuitError(f"cut position {c.after_gate} outside [-1, {len(circuit.gates) - 1}]")
        if c in seen:
            raise CircuitError(f"duplicate cut {c}")
        seen.add(c)


# -- partition ----------------------------------------------------------------

@dataclass(frozen=True)
class Fragment:
    circuit: Circuit
    host_map: tuple[tuple[int, int], ...]    # local wire -> (host wire, segment)
    out_cuts: tuple[tuple[int, int], ...]    # (cut index, local wire) measured at the cut
    in_cuts: tuple[tuple[int, int], ...]     # (cut index, local wire) prepared at the cut
    outputs: tuple[tuple[int, int], ...]     # (host wire, local wire), sorted by host wire
    gate_indices: tuple[int, ...]

    @property
    def width(self) -> int:
        return self.circuit.n_qubits

    def base_inits(self) -> dict[int, str]:
        """|0> on wires that start at the circuit input."""
        cut_in = {w for _, w in self.in_cuts}
        return {w: "0" for w, (_, seg) in enumerate(self.host_map) if seg == 0 and w not in cut_in}


def _segments(circuit: Circuit, cut_spec: CutSpec):
    per_wire: dict[int, list[int]] = {}
    for c in cut_spec:
        per_wire.setdefault(c.wire, []).append(c.after_gate)
    for v in per_wire.values():
        v.sort()

    def seg(wire, gate_index):
        return sum(1 for a in per_wire.get(wire, ()) if a < gate_index)

    return per_wire, seg


def partition(circuit: Circuit, cut_spec: CutSpec) -> list[Fragment]:
    """Split into fragments: connected components of wire segments joined by gates."""
    validate_cuts(circuit, cut_spec)
    per_wire, seg = _segments(circuit, cut_spec)
    nodes = [(w, s) for w in range(circuit.n_qubits) for s in range(len(per_wire.get(w, ())) + 1)]
    parent = {x: x for x in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, g in enumerate(circuit.gates):
        segs = [(q, seg(q, i)) for q in g.qubits]
        for s in segs[1:]:
            ra, rb = find(segs[0]), find(s)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    cut_sides = []
    for k, c in enumerate(cut_spec):
        r = per_wire[c.wire].index(c.after_gate)
        up, down = (c.wire, r), (c.wire, r + 1)
        if find(up) == find(down):
            raise NonSeparatingCutError(f"cut {k} at wire {c.wire} after gate {c.after_gate} does not separate")
        cut_sides.append((up, down))

    comps: dict = {}
    for x in nodes:
        comps.setdefault(find(x), []).append(x)
    frags = []
    for root in sorted(comps):
        members = sorted(comps[root])
        local = {x: i for i, x in enumerate(members)}
        gidx = [i for i, g in enumerate(circuit.gates) if find((g.qubits[0], seg(g.qubits[0], i))) == root]
        gates = [Gate(circuit.gates[i].kind, circuit.gates[i].params,
                      tuple(local[(q, seg(q, i))] for q in circuit.gates[i].qubits)) for i in gidx]
        outs = tuple((k, local[up]) for k, (up, _) in enumerate(cut_sides) if up in local)
        ins = tuple((k, local[down]) for k, (_, down) in enumerate(cut_sides) if down in local)
        outputs = tuple((w, local[(w, s)]) for (w, s) in members
                        if s == len(per_wire.get(w, ())) and w in circuit.measured)
        measured = frozenset(w for _, w in outputs)
        frags.append(Fragment(Circuit(len(members), tuple(gates), measured), tuple(members),
                              outs, ins, outputs, tuple(gidx)))
    return frags


# -- per-cut expansion rules -----------------------------------------------------

@dataclass(frozen=True)
class CutTerm:
    pauli: str
    # (basis, postselected bit or None, weights for outcome bits 0 and 1)
    upstream: tuple[tuple[str, int | None, tuple[Fraction, Fraction]], ...]
    # (prepared state, coefficient)
    downstream: tuple[tuple[str, Fraction], ...]


def cut_terms(biased: str = "Z", msdo: bool = False) -> tuple[CutTerm, ...]:
    """The four expansion terms of one cut, in the order I, biased, then the other two Paulis."""
    if biased not in BASES:
        raise ValueError(f"biased observable must be one of {BASES}, got {biased!r}")
    one = Fraction(1)
    e0, e1 = EIGENSTATES[biased]

    def biased_up(w1):
        if msdo:
            return ((biased, 0, (one, Fraction(0))), (biased, 1, (Fraction(0), w1)))
        return ((biased, None, (one, w1)),)

    terms = [
        CutTerm("I", biased_up(one), ((e0, one), (e1, one))),
        CutTerm(biased, biased_up(-one), ((e0, one), (e1, -one))),
    ]
    for basis, plus in other_plus_states(biased):
        terms.append(CutTerm(basis, ((basis, None, (one, -one)),), ((plus, 2 * one), (e0, -one), (e1, -one))))
    return tuple(terms)


def upstream_settings(biased: str = "Z", msdo: bool = False) -> list[tuple[str, int | None]]:
    seen = []
    for t in cut_terms(biased, msdo):
        for b, ps, _ in t.upstream:
            if (b, ps) not in seen:
                seen.append((b, ps))
    return seen


def downstream_inits(biased: str = "Z") -> list[str]:
    seen = []
    for t in cut_terms(biased):
        for lab, _ in t.downstream:
            if lab not in seen:
                seen.append(lab)
    return seen


def dense_channel(biased: str = "Z", msdo: bool = False) -> np.ndarray:
    """The expansion as a 4x4 superoperator acting on vec(rho); equals the identity."""
    from .states import projector, STATES
    from .simulator import BASIS_ROTATIONS

    S = np.zeros((4, 4), dtype=complex)
    for t in cut_terms(biased, msdo):
        # upstream functional: rho -> sum_bits w(bit) <bit| R rho R^dag |bit> (restricted to a postselected bit)
        for b, ps, w in t.upstream:
            R = BASIS_ROTATIONS[b]
            for bit in (0, 1):
                if ps is not None and bit != ps:
                    continue
                v = R.conj().T @ STATES["01"[bit]]
                functional = np.outer(v, v.conj()).reshape(-1)  # Tr(E rho) = sum E^T * rho
                for lab, c in t.downstream:
                    S += 0.5 * float(w[bit]) * float(c) * np.outer(projector(lab).reshape(-1), functional.conj())
    return S


# -- plan and variants ----------------------------------------------------------

@dataclass(frozen=True)
class SubcircuitVariant:
    fragment: int
    settings: tuple[tuple[str, int | None], ...]   # per out-cut: (basis, postselected bit)
    inits: tuple[str, ...]                          # per in-cut prepared state
    circuit: Circuit                                # executable, possibly optimized
    init_labels: tuple[tuple[int, str], ...]
    measured: tuple[int, ...]                       # out-cut wires then output wires
    bases: tuple[tuple[int, str], ...]

    @property
    def key(self):
        return (self.fragment, self.settings, self.inits)

    def two_qubit_count(self) -> int:
        return self.circuit.count(is_two_qubit)


@dataclass
class ReconstructionPlan:
    circuit: Circuit
    cut_spec: CutSpec
    biased: tuple[str, ...]
    fragments: list[Fragment]
    isdo: bool = False
    msdo: bool = False
    terms: tuple = field(init=False)

    def __post_init__(self):
        if len(self.biased) != len(self.cut_spec):
            raise ValueError("need one biased observable per cut")
        self.terms = tuple(cut_terms(b, self.msdo) for b in self.biased)

    @property
    def sdo(self) -> bool:
        return self.isdo or self.msdo

    @property
    def n_cuts(self) -> int:
        return len(self.cut_spec)

    def fragment_settings(self, f: int):
        frag = self.fragments[f]
        ups = [upstream_settings(self.biased[k], self.msdo) for k, _ in frag.out_cuts]
        downs = [downstream_inits(self.biased[k]) for k, _ in frag.in_cuts]
        return ups, downs

    def fragment_variant_count(self, f: int) -> int:
        ups, downs = self.fragment_settings(f)
        return math.prod(len(x) for x in ups + downs)

    def subcircuit_count(self) -> int:
        return sum(self.fragment_variant_count(f) for f in range(len(self.fragments)))

    def to_json(self) -> str:
        def frac(x):
            return str(Fraction(x))

        cuts = []
        for c, b, terms in zip(self.cut_spec, self.biased, self.terms):
            cuts.append({
                "wire": c.wire, "after_gate": c.after_gate, "biased": b, "scale": "1/2",
                "terms": [{
                    "pauli": t.pauli,
                    "upstream": [{"basis": bb, "postselect": ps, "weights": [frac(w) for w in ws]}
                                 for bb, ps, ws in t.upstream],
                    "downstream": [{"init": lab, "coef": frac(cf)} for lab, cf in t.downstream],
                } for t in terms],
            })
        frags = [{"width": fr.width, "host_map": [list(h) for h in fr.host_map],
                  "out_cuts": [list(x) for x in fr.out_cuts], "in_cuts": [list(x) for x in fr.in_cuts],
                  "outputs": [list(x) for x in fr.outputs], "gate_indices": list(fr.gate_indices)}
                 for fr in self.fragments]
        return json.dumps({"isdo": self.isdo, "msdo": self.msdo, "cuts": cuts, "fragments": frags,
                           "subcircuits": self.subcircuit_count()}, sort_keys=True)


def build_plan(circuit: Circuit, cut_spec: CutSpec, sdo: bool = True, biased=None,
               max_width: int | None = None) -> ReconstructionPlan:
    """
    Partition and attach expansion rules. ``biased`` may be one label for all
    cuts, a sequence with one per cut, or None (chosen by estimated gate
    reduction when ``sdo`` is on, Z otherwise).
    """
    frags = partition(circuit, cut_spec)
    if max_width is not None:
        widest = max(f.width for f in frags)
        if widest > max_width:
            raise WidthError(f"fragment width {widest} exceeds cap {max_width}")
    if biased is None:
        biased = tuple(select_biased_observable(circuit, cut_spec, k, frags) if sdo else "Z"
                       for k in range(len(cut_spec)))
    elif isinstance(biased, str):
        biased = (biased,) * len(cut_spec)
    return ReconstructionPlan(circuit, cut_spec, tuple(biased), frags, isdo=sdo, msdo=sdo)


def build_variant(plan: ReconstructionPlan, f: int, settings, inits) -> SubcircuitVariant:
    frag = plan.fragments[f]
    init_labels = frag.base_inits()
    init_labels.update({w: lab for (_, w), lab in zip(frag.in_cuts, inits)})
    projectors = {w: EIGENSTATES[b][ps] for (_, w), (b, ps) in zip(frag.out_cuts, settings) if ps is not None}
    circ = frag.circuit
    if plan.sdo:
        circ, _, _ = optimize(circ, init_labels if plan.isdo else None, projectors if plan.msdo else None)
    measured = tuple(w for _, w in frag.out_cuts) + tuple(w for _, w in frag.outputs)
    bases = tuple((w, b) for (_, w), (b, _) in zip(frag.out_cuts, settings))
    return SubcircuitVariant(f, tuple(settings), tuple(inits), circ, tuple(sorted(init_labels.items())),
                             measured, bases)


def fragment_variants(plan: ReconstructionPlan, f: int) -> list[SubcircuitVariant]:
    ups, downs = plan.fragment_settings(f)
    return [build_variant(plan, f, settings, inits)
            for settings in itertools.product(*ups) for inits in itertools.product(*downs)]


def enumerate_variants(plan: ReconstructionPlan) -> list[SubcircuitVariant]:
    return [v for f in range(len(plan.fragments)) for v in fragment_variants(plan, f)]


def run_variant(v: SubcircuitVariant, noise: NoiseModel | None = None) -> np.ndarray:
    """
    Joint distribution of one variant as a tensor: one axis per out-cut bit,
    then one per output bit. Postselected cut bits keep only the selected
    slice, whose mass is the branch probability.
    """
    inits = dict(v.init_labels)
    if noise is None or noise.noiseless:
        state = simulate_state(v.circuit, inits, max_width=MAX_STATEVECTOR_WIDTH)
    else:
        state = simulate_density(v.circuit, inits, noise, max_width=MAX_DENSITY_WIDTH)
    meas = list(v.measured)
    # flat index bit j = measured[j]; reversing puts measured[0] on tensor axis 0
    dist = output_distribution(state, meas[::-1], noise, dict(v.bases))
    t = dist.to_array().reshape((2,) * len(meas)) if meas else dist.to_array().reshape(())
    for ax, (_, ps) in enumerate(v.settings):
        if ps is not None:
            idx = [slice(None)] * t.ndim
            idx[ax] = 1 - ps
            t = t.copy()
            t[tuple(idx)] = 0.0
    return t


def run_variants(plan: ReconstructionPlan, noise: NoiseModel | None = None, variants=None) -> dict:
    variants = enumerate_variants(plan) if variants is None else variants
    return {v.key: run_variant(v, noise) for v in variants}


def fragment_tensor(plan: ReconstructionPlan, f: int, results: Mapping) -> np.ndarray:
    """Axes: one size-4 term axis per out-cut, per in-cut, then size-2 output axes."""
    frag = plan.fragments[f]
    a, b, o = len(frag.out_cuts), len(frag.in_cuts), len(frag.outputs)
    T = np.zeros((4,) * (a + b) + (2,) * o)
    out_rules = [plan.terms[k] for k, _ in frag.out_cuts]
    in_rules = [plan.terms[k] for k, _ in frag.in_cuts]
    for out_t in itertools.product(range(4), repeat=a):
        for in_t in itertools.product(range(4), repeat=b):
            acc = np.zeros((2,) * o)
            ups = [out_rules[i][t].upstream for i, t in enumerate(out_t)]
            downs = [in_rules[i][t].downstream for i, t in enumerate(in_t)]
            for up in itertools.product(*ups):
                settings = tuple((bb, ps) for bb, ps, _ in up)
                for down in itertools.product(*downs):
                    coef = float(np.prod([float(c) for _, c in down])) if down else 1.0
                    X = results[(f, settings, tuple(lab for lab, _ in down))]
                    for _, _, w in up:
                        X = np.tensordot(np.array([float(w[0]), float(w[1])]), X, axes=(0, 0))
                    acc = acc + coef * X
            T[out_t + in_t] = acc
    return T


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def reconstruct(plan: ReconstructionPlan, results: Mapping) -> Distribution:
    """Contract the fragment tensors over the cut terms; returns the distribution over measured wires."""
    k = plan.n_cuts
    measured = plan.circuit.measured_wires
    if k + len(measured) > len(_LETTERS):
        raise ValueError("too many cuts and outputs to contract")
    cut_l = _LETTERS[:k]
    out_l = {w: _LETTERS[k + i] for i, w in enumerate(measured)}
    operands, subs = [], []
    for f, frag in enumerate(plan.fragments):
        operands.append(fragment_tensor(plan, f, results))
        subs.append("".join([cut_l[c] for c, _ in frag.out_cuts] + [cut_l[c] for c, _ in frag.in_cuts]
                            + [out_l[w] for w, _ in frag.outputs]))
    target = "".join(out_l[w] for w in reversed(measured))
    full = np.einsum(",".join(subs) + "->" + target, *operands, optimize=True) * 0.5**k
    return Distribution.from_array(np.asarray(full).reshape(-1))


def cut_distribution(circuit: Circuit, cut_spec: CutSpec, sdo: bool = True, biased=None,
                     noise: NoiseModel | None = None) -> Distribution:
    plan = build_plan(circuit, cut_spec, sdo=sdo, biased=biased)
    return reconstruct(plan, run_variants(plan, noise))


# -- biased observable --------------------------------------------------------

def _locate(frags: Sequence[Fragment], k: int):
    up = next((f, w) for f, fr in enumerate(frags) for c, w in fr.out_cuts if c == k)
    down = next((f, w) for f, fr in enumerate(frags) for c, w in fr.in_cuts if c == k)
    return up, down


def biased_scores(circuit: Circuit, cut_spec: CutSpec, k: int, frags=None) -> dict[str, GateReductionEstimate]:
    """Estimated reduction per basis: both postselected upstream runs plus both eigenstate preparations."""
    frags = partition(circuit, cut_spec) if frags is None else frags
    (fu, wu), (fd, wd) = _locate(frags, k)
    scores = {}
    for b in BASES:
        total = GateReductionEstimate()
        for e in EIGENSTATES[b]:
            total = total + estimate_reduction(frags[fu].circuit, projectors={wu: e})
            total = total + estimate_reduction(frags[fd].circuit, inits={wd: e})
        scores[b] = total
    return scores


def select_biased_observable(circuit: Circuit, cut_spec: CutSpec, k: int = 0, frags=None) -> str:
    scores = biased_scores(circuit, cut_spec, k, frags)
    # max() keeps the first maximum, so ties resolve Z, X, Y
    return max(BASES, key=lambda b: scores[b].key())


# -- cut search -----------------------------------------------------------------

def cut_candidates(circuit: Circuit) -> list[CutPoint]:
    """Wire edges between consecutive gates where at least one is a two-qubit gate."""
    out = []
    for w in range(circuit.n_qubits):
        idx = circuit.wire_gates(w)
        for i, j in zip(idx, idx[1:]):
            if circuit.gates[i].n_qubits == 2 or circuit.gates[j].n_qubits == 2:
                out.append(CutPoint(w, i))
    return sorted(out)


def _feasible(circuit, spec, max_width):
    try:
        frags = partition(circuit, spec)
    except NonSeparatingCutError:
        return None
    return frags if max(f.width for f in frags) <= max_width else None


def spec_reduction(circuit: Circuit, spec: CutSpec, frags=None) -> GateReductionEstimate:
    frags = partition(circuit, spec) if frags is None else frags
    total = GateReductionEstimate()
    for k in range(len(spec)):
        total = total + max(biased_scores(circuit, spec, k, frags).values(), key=lambda s: s.key())
    return total


def find_cuts(circuit: Circuit, max_width: int, max_cuts: int | None = None, seed: int = 0) -> CutSpec:
    """
    Fewest separating cuts keeping every fragment within ``max_width``;
    ties go to the larger estimated gate reduction, then to the
    lexicographically smallest cut list.
    """
    if max_width < 1:
        raise WidthError("width cap must be positive")
    if any(g.n_qubits > max_width for g in circuit.gates):
        raise WidthError(f"a gate is wider than the cap {max_width}")
    if circuit.n_qubits <= max_width or _feasible(circuit, CutSpec(), max_width):
        return CutSpec()
    cands = cut_candidates(circuit)
    limit = len(cands) if max_cuts is None else min(max_cuts, len(cands))
    if len(cands) <= EXHAUSTIVE_LIMIT:
        for size in range(1, limit + 1):
            found = []
            for combo in itertools.combinations(cands, size):
                spec = CutSpec(combo)
                frags = _feasible(circuit, spec, max_width)
                if frags is not None:
                    found.append((spec, frags))
            if found:
                best = max(found, key=lambda sf: (spec_reduction(circuit, *sf).key(),
                                                  [(-c.wire, -c.after_gate) for c in sf[0].cuts]))
                return best[0]
        raise InfeasibleCutError(f"no cut set of size <= {limit} meets width {max_width}")
    spec = _greedy_cuts(circuit, max_width, seed)
    if spec is None or (max_cuts is not None and len(spec) > max_cuts):
        raise InfeasibleCutError(f"greedy search found no cut set within {max_cuts} cuts at width {max_width}")
    return spec


def _group_cuts(circuit: Circuit, groups: Sequence[int]) -> tuple[list[CutPoint], dict[int, int]]:
    """Cuts implied by a gate -> group assignment, and each group's width in wire segments."""
    cuts, width = [], {}
    for w in range(circuit.n_qubits):
        prev = None
        for i in circuit.wire_gates(w):
            g = groups[i]
            if prev is None or groups[prev] != g:
                width[g] = width.get(g, 0) + 1
                if prev is not None:
                    cuts.append(CutPoint(w, prev))
            prev = i
    return cuts, width


def _greedy_cuts(circuit: Circuit, max_width: int, seed: int, starts: int = 8) -> CutSpec | None:
    """Multi-start greedy grouping of gates into width-capped blocks, then single-gate moves."""
    rng = np.random.default_rng(seed)
    n_g = len(circuit.gates)
    best = None
    for start in range(starts):
        groups = [-1] * n_g
        next_group = 0
        for i, g in enumerate(circuit.gates):
            # candidate groups: those of the previous gate on each of this gate's wires
            prevs = []
            for q in g.qubits:
                before = [j for j in circuit.wire_gates(q) if j < i]
                if before:
                    prevs.append(groups[before[-1]])
            options = sorted(set(prevs), key=lambda x: (-prevs.count(x), x))
            if start and len(options) > 1:
                rng.shuffle(options)
            placed = False
            for grp in options:
                groups[i] = grp
                _, width = _group_cuts(circuit, groups[: i + 1] + [-2 - j for j in range(n_g - i - 1)])
                if width[grp] <= max_width:
                    placed = True
                    break
            if not placed:
                groups[i] = next_group
                next_group += 1
            else:
                next_group = max(next_group, groups[i] + 1)
        groups = _refine(circuit, groups, max_width)
        cuts, width = _group_cuts(circuit, groups)
        spec = CutSpec(tuple(sorted(cuts)))
        if _feasible(circuit, spec, max_width) is None:
            continue
        if best is None or len(spec) < len(best):
            best = spec
    return best


def _refine(circuit: Circuit, groups: list[int], max_width: int) -> list[int]:
    groups = list(groups)
    improved = True
    while improved:
        improved = False
        cuts, _ = _group_cuts(circuit, groups)
        for i, g in enumerate(circuit.gates):
            neighbours = set()
            for q in g.qubits:
                idx = circuit.wire_gates(q)
                p = idx.index(i)
                for j in (p - 1, p + 1):
                    if 0 <= j < len(idx):
                        neighbours.add(groups[idx[j]])
            for grp in sorted(neighbours - {groups[i]}):
                old = groups[i]
                groups[i] = grp
                new_cuts, width = _group_cuts(circuit, groups)
                if len(new_cuts) < len(cuts) and max(width.values()) <= max_width:
                    cuts = new_cuts
                    improved = True
                    break
                groups[i] = old
    return groups
