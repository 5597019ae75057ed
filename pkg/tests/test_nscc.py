import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdocut.circuit import Circuit, Graph, make_gate
from sdocut.generators import gen_qaoa, gen_qft, path_graph
from sdocut.nscc import (
    NsccPlan,
    cut_variants,
    mean_reduction,
    nscc_find_cuts,
    nscc_reconstruct,
    nscc_variants,
)
from sdocut.simulator import output_distribution, simulate_state
from sdocut.states import BASIS_OF, projector
from sdocut.wirecut import CutPoint, CutSpec, cut_distribution

from conftest import random_circuit, random_cut_circuit

STAR = gen_qaoa(Graph(3, frozenset({(0, 1), (0, 2)})), layers=2)


def _ideal(c):
    return output_distribution(simulate_state(c), c.measured_wires)


def _random_rho(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


@pytest.mark.parametrize("basis", ["Z", "X", "Y"])
def test_single_qubit_operator_identity(basis):
    rng = np.random.default_rng(11)
    for _ in range(5):
        rho = _random_rho(rng)
        out = np.zeros((2, 2), dtype=complex)
        for u, v, c in cut_variants(basis):
            weight = np.trace(projector(u) @ rho)
            out += 0.5 * float(c) * weight * projector(v)
        assert np.abs(out - rho).max() <= 1e-12


def test_variant_table():
    table = cut_variants("Z")
    assert len(table) == 6
    assert {u for u, _, _ in table} == {"0", "1", "+", "-", "+i", "-i"}
    # matched except for the identity basis, where the prepared state is the opposite eigenstate
    for u, v, _ in table:
        assert BASIS_OF[u] == BASIS_OF[v]
        assert (u == v) == (BASIS_OF[u] != "Z")
    with pytest.raises(ValueError):
        cut_variants("W")


def test_variant_counts():
    assert len(nscc_variants(NsccPlan(STAR, CutSpec((CutPoint(0, 5),))))) == 6
    plan = NsccPlan(STAR, CutSpec((CutPoint(0, 5), CutPoint(1, 6))))
    assert plan.subcircuit_count() == 36 == len(nscc_variants(plan))


def test_idle_wire_cut():
    rng = np.random.default_rng(5)
    for _ in range(5):
        theta, phi = rng.uniform(-3, 3, size=2)
        c = Circuit(1, (make_gate("ry", [theta], (0,)), make_gate("rz", [phi], (0,))))
        d = nscc_reconstruct(NsccPlan(c, CutSpec((CutPoint(0, 1),)), sdo=False))
        assert d.l1(_ideal(c)) <= 1e-12


def test_star_qaoa_reconstruction():
    plan = NsccPlan(STAR, CutSpec((CutPoint(0, 5),)))
    assert nscc_reconstruct(plan).l1(_ideal(STAR)) <= 1e-9


def test_qft_two_cuts():
    c = gen_qft(4)
    spec = nscc_find_cuts(c, 2, strict=False)
    assert len(spec) == 2
    for sdo in (False, True):
        assert nscc_reconstruct(NsccPlan(c, spec, sdo=sdo)).l1(_ideal(c)) <= 1e-9


def test_agrees_with_separating_cut():
    c = gen_qaoa(path_graph(3))
    spec = CutSpec((CutPoint(1, 3),))
    a = nscc_reconstruct(NsccPlan(c, spec))
    b = cut_distribution(c, spec)
    assert a.l1(b) <= 1e-9


def test_find_cuts_star_example():
    spec = nscc_find_cuts(STAR, 1)
    assert spec == CutSpec((CutPoint(0, 5),))
    variants = nscc_variants(NsccPlan(STAR, spec))
    by_proj = {NsccPlan(STAR, spec).table[v.choices[0]][0]: v for v in variants}
    # X projector: the upstream RX on the cut wire disappears
    assert len(by_proj["+"].circuit) == len(STAR) - 1
    # Z preparations: both later RZZ gates on the cut wire are demoted
    assert by_proj["0"].two_qubit_count() == by_proj["1"].two_qubit_count() == 2
    assert STAR.two_qubit_count() == 4


def test_find_cuts_strict_mode():
    one_q = Circuit(2, (make_gate("h", (), (0,)), make_gate("rx", [0.2], (0,)), make_gate("ry", [0.2], (1,))))
    assert nscc_find_cuts(one_q, 2) == CutSpec()
    assert nscc_find_cuts(STAR, 0) == CutSpec()


def test_mean_reduction_no_cuts():
    assert mean_reduction(STAR, []) == (0.0, 0.0)


def test_plan_json():
    plan = NsccPlan(STAR, CutSpec((CutPoint(0, 5),)))
    d = json.loads(plan.to_json())
    assert d["subcircuits"] == 6 and d["scale"] == "1/2"
    assert sorted(v["coef"] for v in d["variants"]) == ["-2", "-2", "2", "2", "2", "2"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**7), st.sampled_from(["Z", "X", "Y"]), st.booleans())
def test_reconstruction_identity(seed, basis, sdo):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 7))
    c = random_circuit(rng, n, int(rng.integers(4, 14)))
    k = int(rng.integers(1, 3))
    cuts = set()
    while len(cuts) < k:
        cuts.add(CutPoint(int(rng.integers(n)), int(rng.integers(-1, len(c.gates)))))
    plan = NsccPlan(c, CutSpec(tuple(sorted(cuts))), identity_basis=basis, sdo=sdo)
    assert nscc_reconstruct(plan).l1(_ideal(c)) <= 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**7))
def test_separating_cuts_agree(seed):
    rng = np.random.default_rng(seed)
    c, spec = random_cut_circuit(rng, n_qubits=5)
    assert nscc_reconstruct(NsccPlan(c, spec)).l1(cut_distribution(c, spec)) <= 1e-9
