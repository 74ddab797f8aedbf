"""Circuit IR: gate list over dense wires, dependency DAG, depth metrics,
wire relabeling and segmentation at measure/reset boundaries.

Circuits are immutable values; every operation here is pure. Wire indices
are dense ``0..width-1`` and relabeling after a wire removal always
compacts downward.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence


class GateKind(Enum):
    CNOT = "cx"
    CZ = "cz"
    H = "h"
    X = "x"
    RZ = "rz"
    RX = "rx"
    U3 = "u3"
    VARIABLE_BLOCK = "block"
    MEASURE = "measure"
    RESET = "reset"
    BARRIER = "barrier"

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.MEASURE, GateKind.RESET, GateKind.BARRIER)


# fixed (n_wires, n_params); None means "any number of wires"
_GATE_SHAPE = {
    GateKind.CNOT: (2, 0),
    GateKind.CZ: (2, 0),
    GateKind.H: (1, 0),
    GateKind.X: (1, 0),
    GateKind.RZ: (1, 1),
    GateKind.RX: (1, 1),
    GateKind.U3: (1, 3),
    GateKind.VARIABLE_BLOCK: (None, 0),
    GateKind.MEASURE: (1, 0),
    GateKind.RESET: (1, 0),
    GateKind.BARRIER: (None, 0),
}


@dataclass(frozen=True)
class Gate:
    """One instruction: a fixed or parameterized gate, a variable unitary
    block placeholder, or a measure/reset/barrier marker."""

    kind: GateKind
    wires: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        n_wires, n_params = _GATE_SHAPE[self.kind]
        if n_wires is not None and len(self.wires) != n_wires:
            raise ValueError(f"{self.kind.value} takes {n_wires} wires, got {len(self.wires)}")
        if not self.wires:
            raise ValueError(f"{self.kind.value} needs at least one wire")
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"duplicate wires in {self.kind.value}: {self.wires}")
        if any(w < 0 for w in self.wires):
            raise ValueError(f"negative wire index in {self.kind.value}")
        if len(self.params) != n_params:
            raise ValueError(f"{self.kind.value} takes {n_params} params, got {len(self.params)}")

    @property
    def block_dim(self) -> int:
        """Qubit count of a variable block (== number of wires)."""
        return len(self.wires)

    def remapped(self, mapping: Mapping[int, int]) -> "Gate":
        return Gate(self.kind, tuple(mapping.get(w, w) for w in self.wires), self.params)


# terse constructors; keep circuit-building code readable
def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


def cz(a: int, b: int) -> Gate:
    return Gate(GateKind.CZ, (a, b))


def h(wire: int) -> Gate:
    return Gate(GateKind.H, (wire,))


def x(wire: int) -> Gate:
    return Gate(GateKind.X, (wire,))


def rz(wire: int, theta: float) -> Gate:
    return Gate(GateKind.RZ, (wire,), (theta,))


def rx(wire: int, theta: float) -> Gate:
    return Gate(GateKind.RX, (wire,), (theta,))


def u3(wire: int, theta: float, phi: float, lam: float) -> Gate:
    return Gate(GateKind.U3, (wire,), (theta, phi, lam))


def block(*wires: int) -> Gate:
    return Gate(GateKind.VARIABLE_BLOCK, tuple(wires))


def measure(wire: int) -> Gate:
    return Gate(GateKind.MEASURE, (wire,))


def reset(wire: int) -> Gate:
    return Gate(GateKind.RESET, (wire,))


def barrier(*wires: int) -> Gate:
    return Gate(GateKind.BARRIER, tuple(wires))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence over ``width`` wires.

    The gate order is, by construction, a valid topological order of the
    derived dependency DAG.
    """

    width: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 0:
            raise ValueError("negative width")
        for g in self.gates:
            if any(w >= self.width for w in g.wires):
                raise ValueError(f"gate {g.kind.value} on wires {g.wires} exceeds width {self.width}")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def used_wires(self) -> frozenset[int]:
        return frozenset(w for g in self.gates for w in g.wires)


@dataclass(frozen=True)
class DepDag:
    """Dependency DAG: one node per gate index, an edge ``u -> v`` whenever
    ``v`` is the next gate after ``u`` on some shared wire."""

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    succ: tuple[tuple[int, ...], ...]
    pred: tuple[tuple[int, ...], ...]


def build_dag(circuit: Circuit) -> DepDag:
    """Derive the per-wire dependency DAG of a circuit."""
    n = len(circuit.gates)
    succ: list[list[int]] = [[] for _ in range(n)]
    pred: list[list[int]] = [[] for _ in range(n)]
    edges: list[tuple[int, int]] = []
    last_on_wire: dict[int, int] = {}
    for v, gate in enumerate(circuit.gates):
        seen_pred: set[int] = set()
        for w in gate.wires:
            u = last_on_wire.get(w)
            if u is not None and u not in seen_pred:
                seen_pred.add(u)
                succ[u].append(v)
                pred[v].append(u)
                edges.append((u, v))
            last_on_wire[w] = v
    return DepDag(
        n_nodes=n,
        edges=tuple(edges),
        succ=tuple(tuple(s) for s in succ),
        pred=tuple(tuple(p) for p in pred),
    )


def ancestor_masks(dag: DepDag) -> list[int]:
    """Strict-ancestor sets as bit masks, indexed by gate.

    Edges always point from an earlier to a later gate index, so one forward
    pass suffices.
    """
    anc = [0] * dag.n_nodes
    for v in range(dag.n_nodes):
        m = 0
        for u in dag.pred[v]:
            m |= anc[u] | (1 << u)
        anc[v] = m
    return anc


def is_topological_order(dag: DepDag, order: Sequence[int]) -> bool:
    """True when ``order`` is a permutation of the nodes respecting every edge."""
    if sorted(order) != list(range(dag.n_nodes)):
        return False
    position = {node: i for i, node in enumerate(order)}
    return all(position[u] < position[v] for u, v in dag.edges)


@dataclass(frozen=True)
class CircuitStats:
    width: int
    cx_count: int
    two_qubit_depth: int
    weighted_depth: float
    mmr_count: int


def _is_two_qubit_unitary(gate: Gate) -> bool:
    return gate.kind.is_unitary and len(gate.wires) == 2


def _mmr_measure_indices(circuit: Circuit) -> set[int]:
    """Indices of MEASURE gates whose next gate on the same wire is a RESET."""
    out: set[int] = set()
    next_on_wire: dict[int, int] = {}
    for v in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[v]
        if gate.kind is GateKind.MEASURE:
            nxt = next_on_wire.get(gate.wires[0])
            if nxt is not None and circuit.gates[nxt].kind is GateKind.RESET:
                out.add(v)
        for w in gate.wires:
            next_on_wire[w] = v
    return out


def metrics(circuit: Circuit, mmr_weight: float = 4.0) -> CircuitStats:
    """Depth metrics counting only two-qubit gates on the critical path.

    Single-qubit gates and barriers carry weight zero. ``weighted_depth``
    additionally charges each measure+reset pair ``mmr_weight`` on the path,
    modelling the long duration of a readout relative to a CNOT.
    """
    if mmr_weight < 0:
        raise ValueError("mmr_weight must be >= 0")
    mmr_measures = _mmr_measure_indices(circuit)
    cx_count = 0
    depth_front: dict[int, int] = {}
    weighted_front: dict[int, float] = {}
    two_qubit_depth = 0
    weighted_depth = 0.0
    for v, gate in enumerate(circuit.gates):
        two_q = _is_two_qubit_unitary(gate)
        cx_count += two_q
        w_plain = 1 if two_q else 0
        if two_q:
            w_weighted = 1.0
        elif gate.kind is GateKind.MEASURE:
            # charge the whole pair on the measure node; the paired reset is free
            w_weighted = mmr_weight if v in mmr_measures else 0.0
        else:
            w_weighted = 0.0
        d_in = max((depth_front.get(w, 0) for w in gate.wires), default=0)
        f_in = max((weighted_front.get(w, 0.0) for w in gate.wires), default=0.0)
        d_out = d_in + w_plain
        f_out = f_in + w_weighted
        for w in gate.wires:
            depth_front[w] = d_out
            weighted_front[w] = f_out
        two_qubit_depth = max(two_qubit_depth, d_out)
        weighted_depth = max(weighted_depth, f_out)
    return CircuitStats(
        width=circuit.width,
        cx_count=cx_count,
        two_qubit_depth=two_qubit_depth,
        weighted_depth=weighted_depth,
        mmr_count=len(mmr_measures),
    )


def remap_qubits(circuit: Circuit, mapping: Mapping[int, int]) -> Circuit:
    """Relabel wires through ``mapping``; wires absent from the mapping keep
    their index. New width is one past the largest mapped index.

    Raises ValueError on a wire collision (non-injective mapping over the
    wires in play).
    """
    used = set(circuit.used_wires)
    domain = set(mapping) | used
    if not domain:
        return circuit
    effective = {w: int(mapping.get(w, w)) for w in domain}
    if any(v < 0 for v in effective.values()):
        raise ValueError("negative wire index in mapping")
    if len(set(effective.values())) != len(effective):
        raise ValueError("wire collision: mapping is not injective")
    width = max(effective.values()) + 1
    gates = tuple(g.remapped(effective) for g in circuit.gates)
    return Circuit(width, gates)


@dataclass(frozen=True)
class Partition:
    """A maximal run of unitary gates between measure/reset cut points.

    ``circuit`` keeps the parent width; ``position`` is the index of the
    run's first gate in the parent gate list.
    """

    circuit: Circuit
    wires: tuple[int, ...]
    position: int


def partition_at_mmr(circuit: Circuit) -> list[Partition]:
    """Split at every measure/reset gate. Concatenating the partitions with
    the cut gates restored at their recorded positions reproduces the input.
    """
    parts: list[Partition] = []
    run: list[Gate] = []
    run_start = 0
    saw_cut = False

    def flush():
        if run:
            wires = tuple(sorted({w for g in run for w in g.wires}))
            parts.append(Partition(Circuit(circuit.width, tuple(run)), wires, run_start))

    for v, gate in enumerate(circuit.gates):
        if gate.kind in (GateKind.MEASURE, GateKind.RESET):
            flush()
            run = []
            run_start = v + 1
            saw_cut = True
        else:
            run.append(gate)
    flush()
    if not saw_cut and not parts:
        # no cut points: the whole (possibly empty) circuit is one partition
        parts.append(Partition(circuit, (), 0))
    return parts
