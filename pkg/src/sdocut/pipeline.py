"""End-to-end evaluation of one circuit under one cutting mode."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .errors import ConfigError
from .metrics import MODES, AgtReport, agt, agt_uncut, nscc_agt
from .nscc import NsccPlan, nscc_find_cuts, nscc_reconstruct, nscc_run, nscc_variants
from .simulator import (
    Distribution,
    MAX_DENSITY_WIDTH,
    NoiseModel,
    fidelity,
    output_distribution,
    simulate_density,
    simulate_state,
)
from .wirecut import build_plan, enumerate_variants, find_cuts, reconstruct, run_variant

DEFAULT_NSCC_CUTS = 2


def normalize_mode(mode: str) -> str:
    for m in MODES:
        if m.lower() == str(mode).strip().lower():
            return m
    raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")


def default_width(circuit: Circuit) -> int:
    return max(2, math.ceil(circuit.n_qubits / 2))


@dataclass
class ModePlan:
    mode: str
    plan: object | None          # ReconstructionPlan, NsccPlan or None for uncut
    _variants: list | None = None

    @property
    def variants(self) -> list:
        """Executable variants, built on first use."""
        if self._variants is None and self.plan is not None:
            if isinstance(self.plan, NsccPlan):
                self._variants = nscc_variants(self.plan)
            else:
                self._variants = enumerate_variants(self.plan)
        return self._variants

    def agt(self, circuit: Circuit) -> AgtReport:
        if self.plan is None:
            return agt_uncut(circuit)
        if isinstance(self.plan, NsccPlan):
            return nscc_agt(self.plan, self.variants)
        # reuse built variants; otherwise let agt() pick exact or sampled per fragment
        return agt(self.plan, self._variants)


def plan_mode(circuit: Circuit, mode: str, max_width: int | None = None,
              max_cuts: int | None = None) -> ModePlan:
    mode = normalize_mode(mode)
    if mode == "uncut":
        return ModePlan(mode, None)
    if mode == "nscc+SDO":
        spec = nscc_find_cuts(circuit, DEFAULT_NSCC_CUTS if max_cuts is None else max_cuts)
        plan = NsccPlan(circuit, spec, sdo=True)
        return ModePlan(mode, plan)
    width = default_width(circuit) if max_width is None else max_width
    spec = find_cuts(circuit, width, max_cuts)
    plan = build_plan(circuit, spec, sdo=(mode == "cut+SDO"), max_width=width)
    return ModePlan(mode, plan)


def _sample(arr: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Shot estimate of a (possibly sub-normalized) probability tensor; missing mass is a reject bucket."""
    p = np.clip(arr.reshape(-1), 0, None)
    rest = max(0.0, 1.0 - p.sum())
    probs = np.append(p, rest)
    counts = rng.multinomial(shots, probs / probs.sum())
    return (counts[:-1] / shots).reshape(arr.shape)


def execute(circuit: Circuit, mp: ModePlan, noise: NoiseModel | None = None,
            shots: int | None = None, rng: np.random.Generator | None = None) -> Distribution:
    """Reconstructed (or direct) output distribution of ``circuit`` under the mode plan."""
    rng = rng or np.random.default_rng(0)
    noisy = noise is not None and not noise.noiseless
    measured = circuit.measured_wires
    if mp.plan is None:
        if noisy:
            state = simulate_density(circuit, None, noise, max_width=MAX_DENSITY_WIDTH)
        else:
            state = simulate_state(circuit)
        arr = output_distribution(state, measured, noise if noisy else None).to_array()
        return Distribution.from_array(_sample(arr, shots, rng) if shots else arr)
    if isinstance(mp.plan, NsccPlan):
        if not shots:
            return nscc_reconstruct(mp.plan, noise, mp.variants)
        total = 0
        for v in mp.variants:
            total = total + float(v.coefficient) * _sample(nscc_run(v, measured, noise).to_array(), shots, rng)
        return Distribution.from_array(total)
    results = {}
    for v in mp.variants:
        t = run_variant(v, noise)
        results[v.key] = _sample(t, shots, rng) if shots else t
    return reconstruct(mp.plan, results)


def ideal_distribution(circuit: Circuit) -> Distribution:
    return output_distribution(simulate_state(circuit), circuit.measured_wires)


def evaluate(circuit: Circuit, mode: str, noise: NoiseModel | None = None, max_width: int | None = None,
             max_cuts: int | None = None, shots: int | None = None, seed: int = 0) -> tuple[float, AgtReport]:
    """(fidelity against the ideal uncut distribution, AGT report)."""
    mp = plan_mode(circuit, mode, max_width, max_cuts)
    dist = execute(circuit, mp, noise, shots, np.random.default_rng(seed))
    return fidelity(dist, ideal_distribution(circuit)), mp.agt(circuit)


def scaling_table(benchmarks: Sequence[tuple[str, Circuit]], modes: Sequence[str] = ("uncut", "cut+SDO", "nscc+SDO"),
                  max_width: int | None = None, max_cuts: int | None = None) -> list[dict]:
    """AGT and subcircuit counts per (benchmark, mode); no simulation."""
    rows = []
    for name, circ in benchmarks:
        for mode in modes:
            mp = plan_mode(circ, mode, max_width, max_cuts)
            rep = mp.agt(circ)
            rows.append({"benchmark": name, "qubits": circ.n_qubits, "mode": mp.mode, "agt": rep.agt,
                         "subcircuits": rep.subcircuits, "fidelity_mean": None, "fidelity_stderr": None,
                         "seed_count": 0})
    return rows
