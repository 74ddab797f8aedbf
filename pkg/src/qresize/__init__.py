"""qresize: quantum circuit width reduction via mid-circuit measurement
and reset, with gate-dependency search and instantiation-based resynthesis."""

from .benchmarks import generate_benchmark
from .circuit import (
    Circuit,
    CircuitStats,
    DepDag,
    Gate,
    GateKind,
    Partition,
    barrier,
    block,
    build_dag,
    cnot,
    cz,
    h,
    measure,
    metrics,
    partition_at_mmr,
    remap_qubits,
    reset,
    rx,
    rz,
    u3,
    x,
)
from .dependency import (
    CostMode,
    CostSpec,
    ResizePair,
    ResizePlan,
    apply_reuse,
    cost,
    find_resizable_pairs,
    resize_pipeline,
    search_resize,
    unresized_equivalent,
)
from .estimators import DependencyResizer, NativeSynthesizer, UnitaryResizer
from .instantiate import (
    InstantiationConfig,
    InstantiationResult,
    apply_params,
    delete_gates,
    extract_params,
    instantiate_blocks,
    instantiate_params,
    objective_gradient,
    polar_unitary,
)
from .qasm import QasmError, emit_qasm, parse_qasm, strip_terminal_measurements
from .report import RunReport, render_report, write_report
from .synthesis import (
    CouplingGraph,
    SynthesisError,
    coupling_violations,
    fragment_topology,
    qsearch,
    qsearch_two_region,
)
from .unitary import (
    circuit_unitary,
    embed_gate,
    hs_distance,
    is_unitary,
    random_unitary,
)
from .unitary_resize import (
    CheckOutcome,
    NotResizableError,
    build_check_template,
    check_all_pairs,
    downsize_blocks,
    resize_via_synthesis,
)

__version__ = "0.1.0"
