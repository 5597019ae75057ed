"""Circuit cutting with state-dependent gate optimization of the subcircuits."""
from .circuit import Circuit, Gate, GateKind, Graph, make_gate
from .errors import (
    CircuitError,
    ConfigError,
    InfeasibleCutError,
    NonSeparatingCutError,
    QasmError,
    WidthError,
)
from .generators import gen_bv, gen_qaoa, gen_qft, path_graph, random_graph
from .metrics import AgtReport, ExperimentRecord, agt, agt_uncut, nscc_agt
from .nscc import NsccPlan, nscc_find_cuts, nscc_reconstruct, nscc_variants
from .pipeline import evaluate, scaling_table
from .qasm import emit_qasm, parse_qasm
from .sdo import (
    GateReductionEstimate,
    commutes_with_projector,
    commutes_with_state,
    estimate_reduction,
    isdo_pass,
    msdo_pass,
    msdo_split,
    optimize,
    try_factor_initial,
    try_factor_measure,
)
from .simulator import (
    CutOp,
    Distribution,
    NoiseModel,
    expectation,
    fidelity,
    measure_branches,
    output_distribution,
    simulate_density,
    simulate_state,
)
from .wirecut import (
    CutPoint,
    CutSpec,
    Fragment,
    ReconstructionPlan,
    build_plan,
    enumerate_variants,
    find_cuts,
    partition,
    reconstruct,
    run_variants,
    select_biased_observable,
)

__version__ = "0.1.0"
