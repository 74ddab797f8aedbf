"""Input validation helpers shared by the estimator classes and the CLI."""

from __future__ import annotations

import numpy as np

from .circuit import Circuit
from .synthesis import CouplingGraph
from .unitary import MAX_QUBITS, is_unitary


def check_circuit(value) -> Circuit:
    if not isinstance(value, Circuit):
        raise TypeError(f"expected a Circuit, got {type(value).__name__}")
    return value


def check_unitary(value, tol: float = 1e-10) -> np.ndarray:
    """Coerce to a complex square matrix of qubit dimension and verify
    unitarity to ``tol`` max-entry deviation."""
    m = np.ascontiguousarray(np.asarray(value, dtype=complex))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = int(m.shape[0]).bit_length() - 1
    if 1 << n != m.shape[0]:
        raise ValueError(f"dimension {m.shape[0]} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    if not is_unitary(m, tol):
        raise ValueError("matrix is not unitary within tolerance")
    return m


def resolve_coupling(spec, n_wires: int) -> CouplingGraph:
    """Resolve a coupling spec (graph, name, or edge list) to ``n_wires``."""
    if isinstance(spec, CouplingGraph):
        if spec.n_wires < n_wires:
            raise ValueError(
                f"coupling graph has {spec.n_wires} wires, need at least {n_wires}")
        return spec
    if spec is None or spec == "all":
        return CouplingGraph.complete(n_wires)
    if spec == "linear":
        return CouplingGraph.linear(n_wires)
    if spec == "t":
        return CouplingGraph.t_shaped(n_wires)
    if isinstance(spec, (list, tuple, set, frozenset)):
        return CouplingGraph.from_edges(n_wires, spec)
    raise ValueError(f"cannot interpret coupling spec {spec!r}")
