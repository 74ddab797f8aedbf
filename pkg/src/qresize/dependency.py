"""Gate-dependency circuit resizing.

A wire pair ``(host, guest)`` is resizable when every gate touching the
host can complete before any gate touching the guest starts; formally, no
gate on the guest is an ancestor (or the same gate) of any gate on the
host in the dependency DAG. Applying a reuse reorders the circuit so the
host's light cone runs first, inserts a measure+reset on the host wire and
relabels the guest onto it.

``search_resize`` explores reuse sequences exhaustively when the initial
pair count is below the brute-force threshold and greedily otherwise;
``resize_pipeline`` then resynthesizes the measure/reset-separated
partitions of the result.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .circuit import (
    Circuit,
    Gate,
    GateKind,
    Partition,
    ancestor_masks,
    build_dag,
    metrics,
    partition_at_mmr,
)
from .instantiate import InstantiationConfig
from .synthesis import CouplingGraph, SynthesisError, qsearch
from .unitary import circuit_unitary, hs_distance

BRUTE_FORCE_PAIR_LIMIT = 7


class CostMode(Enum):
    MAX_REUSE = "max-reuse"
    MIN_DEPTH = "min-depth"


@dataclass(frozen=True, order=True)
class ResizePair:
    host: int
    guest: int

    def __post_init__(self):
        if self.host == self.guest:
            raise ValueError("host and guest must differ")


@dataclass(frozen=True)
class CostSpec:
    mode: CostMode = CostMode.MAX_REUSE
    mmr_weight: float = 4.0
    depth_slack: float = 0.05

    def __post_init__(self):
        if self.mmr_weight < 0:
            raise ValueError("mmr_weight must be >= 0")
        if self.depth_slack < 0:
            raise ValueError("depth_slack must be >= 0")


@dataclass(frozen=True)
class ResizePlan:
    """Record of an applied reuse sequence.

    ``applied`` holds each pair in the wire labels current at its
    application step; ``original_pairs`` maps them back to input labels
    (each line is represented by the first input wire that owned it).
    ``wire_map`` sends every input wire to its final line, covering
    ``0..final_width-1``; ``provenance`` maps each output gate index to the
    input gate it came from (None for inserted measure/reset).
    """

    applied: tuple[ResizePair, ...] = ()
    original_pairs: tuple[ResizePair, ...] = ()
    wire_map: tuple[int, ...] = ()
    mmr_positions: tuple[tuple[int, int], ...] = ()
    provenance: tuple[Optional[int], ...] = ()


def find_resizable_pairs(circuit: Circuit) -> set[ResizePair]:
    """All ordered pairs ``(host, guest)`` admitting a schedule where the
    host's gates all finish before the guest's start. Wires with no gates
    pair trivially."""
    dag = build_dag(circuit)
    anc = ancestor_masks(dag)
    wire_gates = [0] * circuit.width
    closure = [0] * circuit.width  # ancestors-or-self of each wire's gates
    for v, gate in enumerate(circuit.gates):
        for w in gate.wires:
            wire_gates[w] |= 1 << v
            closure[w] |= anc[v] | (1 << v)
    return {
        ResizePair(i, j)
        for i in range(circuit.width)
        for j in range(circuit.width)
        if i != j and closure[i] & wire_gates[j] == 0
    }


def _apply_reuse(circuit: Circuit, pair: ResizePair):
    """apply_reuse plus bookkeeping: returns (circuit, provenance) where
    provenance[i] is the input gate index behind output gate i (None for
    the inserted measure/reset)."""
    if pair not in find_resizable_pairs(circuit):
        raise ValueError(f"pair ({pair.host}, {pair.guest}) is not resizable")
    host, guest = pair.host, pair.guest
    dag = build_dag(circuit)
    anc = ancestor_masks(dag)
    first_mask = 0
    for v, gate in enumerate(circuit.gates):
        if host in gate.wires:
            first_mask |= anc[v] | (1 << v)
    first = [v for v in range(len(circuit.gates)) if first_mask >> v & 1]
    rest = [v for v in range(len(circuit.gates)) if not first_mask >> v & 1]

    def relabel(w: int) -> int:
        w = host if w == guest else w
        return w - (w > guest)

    new_host = relabel(host)
    gates: list[Gate] = []
    provenance: list[Optional[int]] = []
    for v in first:
        gates.append(circuit.gates[v].remapped({w: relabel(w) for w in circuit.gates[v].wires}))
        provenance.append(v)
    gates.append(Gate(GateKind.MEASURE, (new_host,)))
    gates.append(Gate(GateKind.RESET, (new_host,)))
    provenance.extend([None, None])
    for v in rest:
        gates.append(circuit.gates[v].remapped({w: relabel(w) for w in circuit.gates[v].wires}))
        provenance.append(v)
    return Circuit(circuit.width - 1, tuple(gates)), tuple(provenance)


def apply_reuse(circuit: Circuit, pair: ResizePair) -> Circuit:
    """Reuse the host wire for the guest: host's dependency closure first,
    then measure+reset on the host, then the remainder with the guest
    relabeled onto the host and wires compacted downward."""
    out, _ = _apply_reuse(circuit, pair)
    return out


def cost(circuit: Circuit, spec: CostSpec) -> tuple:
    """Lexicographic cost under the requested mode."""
    stats = metrics(circuit, mmr_weight=spec.mmr_weight)
    if spec.mode is CostMode.MAX_REUSE:
        return (stats.width, stats.weighted_depth, stats.cx_count)
    return (stats.weighted_depth, stats.width, stats.cx_count)


@dataclass
class _SearchState:
    circuit: Circuit
    applied: list[ResizePair]
    original: list[ResizePair]
    provenance: list[Optional[int]]  # output gate -> input gate
    line_rep: list[int]  # current wire -> representative input wire


def _initial_state(circuit: Circuit) -> _SearchState:
    return _SearchState(
        circuit=circuit,
        applied=[],
        original=[],
        provenance=list(range(len(circuit.gates))),
        line_rep=list(range(circuit.width)),
    )


def _step(state: _SearchState, pair: ResizePair) -> _SearchState:
    new_circuit, step_prov = _apply_reuse(state.circuit, pair)
    provenance = [None if p is None else state.provenance[p] for p in step_prov]
    reps = state.line_rep
    new_reps = [reps[w] for w in range(state.circuit.width) if w != pair.guest]
    return _SearchState(
        circuit=new_circuit,
        applied=state.applied + [pair],
        original=state.original + [ResizePair(reps[pair.host], reps[pair.guest])],
        provenance=provenance,
        line_rep=new_reps,
    )


def _finish(circuit: Circuit, state: _SearchState) -> tuple[Circuit, ResizePlan]:
    rep_to_final = {rep: w for w, rep in enumerate(state.line_rep)}
    merged = {p.guest: p.host for p in state.original}
    wire_map = []
    for w in range(circuit.width):
        rep = w
        # follow guest -> host merges until landing on a surviving line
        while rep not in rep_to_final:
            rep = merged[rep]
        wire_map.append(rep_to_final[rep])
    mmrs = tuple(
        (i, g.wires[0])
        for i, g in enumerate(state.circuit.gates)
        if g.kind is GateKind.MEASURE and state.provenance[i] is None
    )
    plan = ResizePlan(
        applied=tuple(state.applied),
        original_pairs=tuple(state.original),
        wire_map=tuple(wire_map),
        mmr_positions=mmrs,
        provenance=tuple(state.provenance),
    )
    return state.circuit, plan


def unresized_equivalent(circuit: Circuit, plan: ResizePlan) -> Circuit:
    """Replay the plan's provenance on the input: the input gates in the
    schedule order chosen by the resize, measure/resets dropped. A
    topological reordering of the input, so unitary-equivalent to it."""
    order = [p for p in plan.provenance if p is not None]
    return Circuit(circuit.width, tuple(circuit.gates[i] for i in order))


def search_resize(circuit: Circuit, spec: CostSpec) -> tuple[Circuit, ResizePlan]:
    """Search over reuse sequences.

    Fewer than ``BRUTE_FORCE_PAIR_LIMIT`` initial pairs: exhaustive DFS over
    all application sequences. Max-reuse returns the cost-minimal state
    visited; min-depth prunes steps that grow the weighted depth past
    ``(1 + tau)`` of their parent and returns the cost-minimal exhausted
    state, so bounded depth growth can buy width.

    Otherwise greedy: in max-reuse mode every reuse lowers the leading cost
    key, so the lowest ``(host, guest)`` pair is applied until none remain;
    in min-depth mode the best-cost candidate within the slack of the
    current circuit is applied, stopping when no candidate is admissible.
    """
    root = _initial_state(circuit)
    pairs0 = find_resizable_pairs(circuit)
    if len(pairs0) < BRUTE_FORCE_PAIR_LIMIT:
        best: tuple | None = None
        best_state = root
        seen: set[tuple] = set()
        stack = [root]
        while stack:
            state = stack.pop()
            key = (state.circuit.width, state.circuit.gates)
            if key in seen:
                continue
            seen.add(key)
            current_depth = metrics(state.circuit, spec.mmr_weight).weighted_depth
            children = []
            for pair in sorted(find_resizable_pairs(state.circuit), reverse=True):
                child = _step(state, pair)
                if spec.mode is CostMode.MIN_DEPTH:
                    child_depth = metrics(child.circuit, spec.mmr_weight).weighted_depth
                    if child_depth > (1 + spec.depth_slack) * current_depth:
                        continue
                children.append(child)
            # max-reuse: every state competes (leaves dominate anyway);
            # min-depth: only exhausted states compete, so the slack can
            # trade bounded depth growth for width
            if spec.mode is CostMode.MAX_REUSE or not children:
                c = cost(state.circuit, spec)
                if best is None or c < best:
                    best, best_state = c, state
            stack.extend(children)
        return _finish(circuit, best_state)

    state = root
    while True:
        pairs = sorted(find_resizable_pairs(state.circuit))
        if not pairs:
            break
        if spec.mode is CostMode.MAX_REUSE:
            # any reuse drops width, the leading key; take the lowest pair
            state = _step(state, pairs[0])
            continue
        current_depth = metrics(state.circuit, spec.mmr_weight).weighted_depth
        admissible = []
        for pair in pairs:
            child = _step(state, pair)
            child_depth = metrics(child.circuit, spec.mmr_weight).weighted_depth
            if child_depth <= (1 + spec.depth_slack) * current_depth:
                admissible.append((cost(child.circuit, spec), pair, child))
        if not admissible:
            break
        state = min(admissible, key=lambda item: (item[0], item[1]))[2]
    return _finish(circuit, state)


def _local_labels(wires: tuple[int, ...]) -> dict[int, int]:
    return {w: j for j, w in enumerate(wires)}


def _resynthesize_partition(
    part: Partition,
    coupling: Optional[CouplingGraph],
    cfg: InstantiationConfig,
) -> Optional[tuple[list[Gate], float, int, int]]:
    """Try to rebuild one partition with strictly fewer two-qubit gates.
    Returns (gates in parent labels, distance, old_cx, new_cx) or None."""
    wires = part.wires
    k = len(wires)
    old_cx = metrics(part.circuit).cx_count
    if k == 0 or k > 4 or old_cx == 0:
        return None
    to_local = _local_labels(wires)
    if coupling is None:
        local_coupling = CouplingGraph.complete(k)
    else:
        edges = {
            (to_local[a], to_local[b])
            for a, b in coupling.edges
            if a in to_local and b in to_local
        }
        local_coupling = CouplingGraph.from_edges(k, edges)
        if not local_coupling.is_connected():
            return None
    local = Circuit(k, tuple(g.remapped(to_local) for g in part.circuit.gates
                             if g.kind is not GateKind.BARRIER))
    target = circuit_unitary(local)
    # beating old_cx is the whole point, so budget one less
    synth_cfg = replace(cfg, restarts=min(cfg.restarts, 3))
    try:
        synth = qsearch(target, local_coupling, synth_cfg, max_cx=old_cx - 1)
    except SynthesisError:
        return None
    new_cx = metrics(synth).cx_count
    dist = hs_distance(circuit_unitary(synth), target)
    if new_cx >= old_cx or dist >= cfg.epsilon:
        return None
    from_local = {j: w for w, j in to_local.items()}
    return [g.remapped(from_local) for g in synth.gates], dist, old_cx, new_cx


def _resize_pipeline_detailed(
    circuit: Circuit,
    spec: CostSpec,
    coupling=None,
    cfg: Optional[InstantiationConfig] = None,
):
    cfg = cfg or InstantiationConfig()
    resized, plan = search_resize(circuit, spec)
    if coupling is not None:
        from .validation import resolve_coupling

        # named topologies are sized to the post-search width
        coupling = resolve_coupling(coupling, resized.width)
    parts = partition_at_mmr(resized)
    replacements: dict[int, list[Gate]] = {}
    details: list[dict] = []
    for part in parts:
        result = _resynthesize_partition(part, coupling, cfg)
        if result is None:
            continue
        gates, dist, old_cx, new_cx = result
        replacements[part.position] = gates
        details.append({
            "position": part.position,
            "wires": list(part.wires),
            "cx_before": old_cx,
            "cx_after": new_cx,
            "distance": dist,
        })
    if replacements:
        lengths = {p.position: len(p.circuit.gates) for p in parts}
        out: list[Gate] = []
        i = 0
        while i < len(resized.gates):
            if i in replacements:
                out.extend(replacements[i])
                i += lengths[i]
            elif i in lengths and lengths[i] > 0:
                out.extend(resized.gates[i:i + lengths[i]])
                i += lengths[i]
            else:
                out.append(resized.gates[i])
                i += 1
        resized = Circuit(resized.width, tuple(out))
    return resized, plan, details


def resize_pipeline(
    circuit: Circuit,
    spec: CostSpec,
    coupling: Optional[CouplingGraph] = None,
    cfg: Optional[InstantiationConfig] = None,
) -> Circuit:
    """Full dependency flow: search for reuses, then resynthesize each
    measure/reset-separated partition of width <= 4 whose wires induce a
    connected coupling subgraph, keeping a replacement only when it
    strictly lowers the two-qubit gate count at matching unitary."""
    out, _, _ = _resize_pipeline_detailed(circuit, spec, coupling, cfg)
    return out
