"""
Gate-cost metrics and experiment records.

AGT (average gate per term) averages, over the reconstruction terms, the
filtered gate count a term needs. Within one term a fragment contributes
its upstream count (averaged over the two postselected runs when a
measurement is split) plus sum_i |c_i| g_i / 2 over the term's downstream
preparations. Fragment contributions add up; the mean over terms is taken
within each fragment.

Because terms and expansion entries factor per cut, the mean over all 4**k
term tuples equals sum over variants of g(variant) * prod_c w_c(entry), with
a per-cut weight w_c computed once. Fragments with at most
EXACT_VARIANT_LIMIT variants are summed exactly; larger ones use a seeded
sample mean under the same product weights, which is unbiased.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate, is_two_qubit
from .nscc import NsccPlan, nscc_variants
from .wirecut import (ReconstructionPlan, SubcircuitVariant, build_variant, cut_terms, enumerate_variants,
                      fragment_variants)

DOWNSTREAM_NORM = Fraction(2)
EXACT_VARIANT_LIMIT = 4096
AGT_SAMPLES = 512

MODES = ("uncut", "cut", "cut+SDO", "nscc+SDO")
CSV_FIELDS = ("benchmark", "qubits", "mode", "agt", "subcircuits", "fidelity_mean", "fidelity_stderr", "seed_count")


@dataclass(frozen=True)
class AgtReport:
    agt: float
    subcircuits: int
    terms: int
    exact: bool = True

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def agt_uncut(circuit: Circuit, gate_filter: Callable[[Gate], bool] = is_two_qubit) -> AgtReport:
    return AgtReport(float(circuit.count(gate_filter)), 1, 1)


def upstream_weights(biased: str, msdo: bool) -> dict[tuple, Fraction]:
    """Weight of each upstream setting in the per-term average of one cut."""
    out: dict[tuple, Fraction] = {}
    terms = cut_terms(biased, msdo)
    for t in terms:
        mags = [max(abs(w[0]), abs(w[1])) for _, _, w in t.upstream]
        norm = sum(mags)
        for (b, ps, _), m in zip(t.upstream, mags):
            out[(b, ps)] = out.get((b, ps), Fraction(0)) + m / norm / len(terms)
    return out


def downstream_weights(biased: str) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    terms = cut_terms(biased)
    for t in terms:
        for lab, c in t.downstream:
            out[lab] = out.get(lab, Fraction(0)) + abs(c) / DOWNSTREAM_NORM / len(terms)
    return out


def variant_weight(plan: ReconstructionPlan, v: SubcircuitVariant) -> Fraction:
    frag = plan.fragments[v.fragment]
    w = Fraction(1)
    for (k, _), s in zip(frag.out_cuts, v.settings):
        w *= upstream_weights(plan.biased[k], plan.msdo)[s]
    for (k, _), lab in zip(frag.in_cuts, v.inits):
        w *= downstream_weights(plan.biased[k])[lab]
    return w


def _sampled_fragment_agt(plan: ReconstructionPlan, f: int, gate_filter, samples: int,
                          rng: np.random.Generator) -> float:
    """D**b * E[g] with settings drawn from the normalized per-cut weights."""
    frag = plan.fragments[f]
    ups = [list(upstream_weights(plan.biased[k], plan.msdo).items()) for k, _ in frag.out_cuts]
    downs = [list(downstream_weights(plan.biased[k]).items()) for k, _ in frag.in_cuts]
    scale = 1.0
    for table in downs:
        scale *= float(sum(w for _, w in table))

    def draw(table):
        p = np.array([float(w) for _, w in table])
        return table[rng.choice(len(table), p=p / p.sum())][0]

    total = 0
    for _ in range(samples):
        v = build_variant(plan, f, tuple(draw(t) for t in ups), tuple(draw(t) for t in downs))
        total += v.circuit.count(gate_filter)
    return scale * total / samples


def agt(plan: ReconstructionPlan, variants: Sequence[SubcircuitVariant] | None = None,
        gate_filter: Callable[[Gate], bool] = is_two_qubit, samples: int = AGT_SAMPLES, seed: int = 0) -> AgtReport:
    """
    Exact when ``variants`` is given or every fragment has at most
    EXACT_VARIANT_LIMIT variants; otherwise large fragments are sampled.
    """
    if variants is not None:
        total = sum(variant_weight(plan, v) * v.circuit.count(gate_filter) for v in variants)
        return AgtReport(float(total), plan.subcircuit_count(), 4 ** plan.n_cuts)
    rng = np.random.default_rng(seed)
    total, exact = 0.0, True
    for f in range(len(plan.fragments)):
        if plan.fragment_variant_count(f) <= EXACT_VARIANT_LIMIT:
            total += float(sum(variant_weight(plan, v) * v.circuit.count(gate_filter)
                               for v in fragment_variants(plan, f)))
        else:
            exact = False
            total += _sampled_fragment_agt(plan, f, gate_filter, samples, rng)
    return AgtReport(total, plan.subcircuit_count(), 4 ** plan.n_cuts, exact)


def agt_by_terms(plan: ReconstructionPlan, variants=None,
                 gate_filter: Callable[[Gate], bool] = is_two_qubit) -> list[float]:
    """Contribution of every term tuple, enumerated directly (exponential; for checks and small plans)."""
    import itertools

    variants = enumerate_variants(plan) if variants is None else variants
    g = {v.key: v.circuit.count(gate_filter) for v in variants}
    terms = [cut_terms(b, plan.msdo) for b in plan.biased]
    out = []
    for tt in itertools.product(range(4), repeat=plan.n_cuts):
        total = Fraction(0)
        for f, frag in enumerate(plan.fragments):
            ups = [terms[k][tt[k]].upstream for k, _ in frag.out_cuts]
            downs = [terms[k][tt[k]].downstream for k, _ in frag.in_cuts]
            for up in itertools.product(*ups):
                uw = Fraction(1)
                for k_up, (_, _, w) in zip(ups, up):
                    norm = sum(max(abs(x[2][0]), abs(x[2][1])) for x in k_up)
                    uw *= max(abs(w[0]), abs(w[1])) / norm
                for down in itertools.product(*downs):
                    dw = Fraction(1)
                    for _, c in down:
                        dw *= abs(c) / DOWNSTREAM_NORM
                    key = (f, tuple((b, ps) for b, ps, _ in up), tuple(lab for lab, _ in down))
                    total += uw * dw * g[key]
        out.append(float(total))
    return out


def nscc_agt(plan: NsccPlan, variants=None, gate_filter: Callable[[Gate], bool] = is_two_qubit) -> AgtReport:
    variants = nscc_variants(plan) if variants is None else variants
    counts = [v.circuit.count(gate_filter) for v in variants]
    return AgtReport(float(np.mean(counts)), plan.subcircuit_count(), len(counts))


# -- subcircuit counts -----------------------------------------------------------

def upstream_variant_count(k: int, msdo: bool = True) -> int:
    """Upstream runs for a fragment measured at k cuts."""
    return (4 if msdo else 3) ** k


def downstream_variant_count(k: int) -> int:
    return 4**k


def nscc_variant_count(k: int) -> int:
    return 6**k


# -- records --------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    benchmark: str
    qubits: int
    mode: str
    agt: float
    subcircuits: int
    fidelities: list[float] = field(default_factory=list)
    wall_time: float | None = None

    @property
    def seed_count(self) -> int:
        return len(self.fidelities)

    @property
    def fidelity_mean(self) -> float | None:
        return float(np.mean(self.fidelities)) if self.fidelities else None

    @property
    def fidelity_stderr(self) -> float | None:
        if len(self.fidelities) < 2:
            return None
        return float(np.std(self.fidelities, ddof=1) / np.sqrt(len(self.fidelities)))

    def row(self) -> dict:
        return {
            "benchmark": self.benchmark, "qubits": self.qubits, "mode": self.mode,
            "agt": self.agt, "subcircuits": self.subcircuits,
            "fidelity_mean": self.fidelity_mean, "fidelity_stderr": self.fidelity_stderr,
            "seed_count": self.seed_count,
        }

    def to_dict(self, include_time: bool = False) -> dict:
        d = self.row()
        d["fidelities"] = list(self.fidelities)
        if include_time:
            d["wall_time"] = self.wall_time
        return d


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r[k]) for k in CSV_FIELDS})
    return buf.getvalue()


def rows_to_json(rows: Iterable[dict]) -> str:
    return json.dumps([{k: r.get(k) for k in CSV_FIELDS} for r in rows], indent=2)
