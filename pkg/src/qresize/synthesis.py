"""Bottom-up structural synthesis into CNOT+U3, coupling-graph aware.

``qsearch`` is a best-first search over circuit structures: the root is a
U3 on every wire and each expansion appends a [CNOT, U3, U3] group on one
coupling edge. Every candidate structure is numerically instantiated and
scored ``distance + 0.3 * cnot_layers``; the first structure below the
tolerance wins and is post-processed by gate deletion.

``qsearch_two_region`` is the variant used before resizing: gates stay
inside two wire regions, region A entirely before region B, so the chosen
(host, guest) pair remains resizable by construction. ``fragment_topology``
derives the pre-resize coupling graph that makes every post-resize gate
land on a real chip edge.
"""

from __future__ import annotations

import hashlib
import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .instantiate import (
    InstantiationConfig,
    apply_params,
    delete_gates,
    instantiate_params,
)

CX_LAYER_WEIGHT = 0.3
DEFAULT_NODE_CAP = 4000
_MAX_SEARCH_WIRES = 4


class SynthesisError(RuntimeError):
    pass


@dataclass(frozen=True)
class CouplingGraph:
    """Undirected edge set over ``n_wires`` dense wire indices."""

    n_wires: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = frozenset((min(a, b), max(a, b)) for a, b in self.edges)
        object.__setattr__(self, "edges", norm)
        for a, b in norm:
            if a == b:
                raise ValueError("self-loop in coupling graph")
            if not (0 <= a < self.n_wires and 0 <= b < self.n_wires):
                raise ValueError(f"edge ({a}, {b}) outside 0..{self.n_wires - 1}")

    @classmethod
    def from_edges(cls, n_wires: int, edges: Iterable[tuple[int, int]]) -> "CouplingGraph":
        return cls(n_wires, frozenset((int(a), int(b)) for a, b in edges))

    @classmethod
    def complete(cls, n_wires: int) -> "CouplingGraph":
        return cls.from_edges(
            n_wires, ((a, b) for a in range(n_wires) for b in range(a + 1, n_wires)))

    @classmethod
    def linear(cls, n_wires: int) -> "CouplingGraph":
        return cls.from_edges(n_wires, ((i, i + 1) for i in range(n_wires - 1)))

    @classmethod
    def t_shaped(cls, n_wires: int) -> "CouplingGraph":
        """Path over 0..n-2 with the last wire attached mid-path."""
        if n_wires < 3:
            return cls.linear(n_wires)
        edges = [(i, i + 1) for i in range(n_wires - 2)]
        edges.append(((n_wires - 2) // 2, n_wires - 1))
        return cls.from_edges(n_wires, edges)

    def neighbors(self, wire: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == wire:
                out.add(b)
            elif b == wire:
                out.add(a)
        return out

    def is_connected(self) -> bool:
        if self.n_wires <= 1:
            return True
        seen = {0}
        frontier = [0]
        while frontier:
            w = frontier.pop()
            for nb in self.neighbors(w):
                if nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
        return len(seen) == self.n_wires


def fragment_topology(target: CouplingGraph, pair, pre_width: int) -> CouplingGraph:
    """Reverse-engineer the pre-resize coupling for a (host, guest) reuse.

    ``target`` is the chip graph of the resized circuit (``pre_width - 1``
    wires, post-resize labels). The guest wire receives a copy of the
    host's neighbor set, the host keeps its own, and host-guest stay
    disconnected, so relabeling guest onto host maps every edge back onto
    ``target``.
    """
    host, guest = pair.host, pair.guest
    if not (0 <= host < pre_width and 0 <= guest < pre_width) or host == guest:
        raise ValueError(f"pair ({host}, {guest}) out of range for width {pre_width}")
    if target.n_wires != pre_width - 1:
        raise ValueError(
            f"target has {target.n_wires} wires, expected {pre_width - 1}")

    def lift(w: int) -> int:
        # post-resize label -> pre-resize label (guest slot reinserted)
        return w if w < guest else w + 1

    host_post = host if host < guest else host - 1
    edges = {(lift(a), lift(b)) for a, b in target.edges}
    edges |= {(guest, lift(nb)) for nb in target.neighbors(host_post)}
    return CouplingGraph.from_edges(pre_width, edges)


def _digest(items) -> str:
    h = hashlib.blake2b(digest_size=16)
    for it in items:
        h.update(repr(it).encode())
    return h.hexdigest()


def _structure_key(gates: tuple[Gate, ...], regions: tuple[int, ...] | None = None) -> str:
    """Canonical hash over gate kinds, wires and region tags; parameters
    excluded so re-instantiations of one shape dedupe."""
    items = [(g.kind.value, g.wires) for g in gates]
    if regions is not None:
        items.append(("regions", regions))
    return _digest(items)


def _seed_for(cfg: InstantiationConfig, key: str) -> int:
    return int.from_bytes(hashlib.blake2b(
        f"{cfg.seed}:{key}".encode(), digest_size=8).digest(), "big")


@dataclass(frozen=True)
class SearchNode:
    gates: tuple[Gate, ...]
    cx_layers: int
    distance: float
    params: np.ndarray
    regions: tuple[int, ...] | None = None  # region tag per gate (two-region mode)

    @property
    def priority(self) -> float:
        return self.distance + CX_LAYER_WEIGHT * self.cx_layers


def _evaluate(gates: tuple[Gate, ...], regions, width: int,
              target: np.ndarray, cfg: InstantiationConfig, cx_layers: int) -> SearchNode:
    key = _structure_key(gates, regions)
    node_cfg = replace(cfg, seed=_seed_for(cfg, key))
    res = instantiate_params(Circuit(width, gates), target, node_cfg)
    return SearchNode(gates, cx_layers, res.distance, res.assignment[0], regions)


def _run_search(
    width: int,
    target: np.ndarray,
    cfg: InstantiationConfig,
    max_cx: int,
    root: SearchNode,
    expand,
    node_cap: int,
) -> Circuit:
    """Shared best-first loop. ``expand(node)`` yields (gates, regions,
    cx_layers) successors; instantiation of siblings runs concurrently and
    results merge deterministically by (priority, structure hash)."""
    if root.distance < cfg.epsilon:
        return _finalize(root, width, target, cfg)
    heap: list[tuple[float, str, SearchNode]] = []
    seen = {_structure_key(root.gates, root.regions)}
    heapq.heappush(heap, (root.priority, _structure_key(root.gates, root.regions), root))
    evaluated = 1
    with ThreadPoolExecutor(max_workers=8) as pool:
        while heap:
            _, _, node = heapq.heappop(heap)
            if node.cx_layers >= max_cx:
                continue
            batch = []
            for gates, regions, cx_layers in expand(node):
                key = _structure_key(gates, regions)
                if key in seen:
                    continue
                seen.add(key)
                batch.append((gates, regions, cx_layers))
            if not batch:
                continue
            evaluated += len(batch)
            if evaluated > node_cap:
                raise SynthesisError(
                    f"synthesis failed at budget: node cap {node_cap} exceeded")
            children = list(pool.map(
                lambda b: _evaluate(b[0], b[1], width, target, cfg, b[2]), batch))
            children.sort(key=lambda c: (c.priority, _structure_key(c.gates, c.regions)))
            for child in children:
                if child.distance < cfg.epsilon:
                    return _finalize(child, width, target, cfg)
                heapq.heappush(
                    heap, (child.priority, _structure_key(child.gates, child.regions), child))
    raise SynthesisError(f"synthesis failed at budget: no solution within {max_cx} CNOTs")


def _finalize(node: SearchNode, width: int, target: np.ndarray,
              cfg: InstantiationConfig) -> Circuit:
    circuit = apply_params(Circuit(width, node.gates), node.params)
    return delete_gates(circuit, target, cfg)


def qsearch(
    target: np.ndarray,
    coupling: CouplingGraph,
    cfg: InstantiationConfig,
    max_cx: int,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Circuit:
    """Synthesize ``target`` over ``coupling`` into CNOT+U3 with at most
    ``max_cx`` CNOTs. Raises SynthesisError when the budget is exhausted."""
    width = coupling.n_wires
    target = np.asarray(target, dtype=complex)
    if target.shape != (1 << width, 1 << width):
        raise ValueError(f"target shape {target.shape} does not match {width} wires")
    if width > _MAX_SEARCH_WIRES:
        raise ValueError(f"synthesis is capped at {_MAX_SEARCH_WIRES} wires")
    if not coupling.is_connected() and width > 1:
        raise ValueError("coupling graph must be connected")
    if max_cx < 0:
        raise SynthesisError("synthesis failed at budget: negative CNOT budget")
    edges = sorted(coupling.edges)

    def expand(node: SearchNode):
        for a, b in edges:
            gates = node.gates + (
                Gate(GateKind.CNOT, (a, b)),
                Gate(GateKind.U3, (a,), (0.0, 0.0, 0.0)),
                Gate(GateKind.U3, (b,), (0.0, 0.0, 0.0)),
            )
            yield gates, None, node.cx_layers + 1

    root_gates = tuple(Gate(GateKind.U3, (w,), (0.0, 0.0, 0.0)) for w in range(width))
    root = _evaluate(root_gates, None, width, target, cfg, 0)
    return _run_search(width, target, cfg, max_cx, root, expand, node_cap)


def _two_region_root(block_a: tuple[int, ...], block_b: tuple[int, ...]):
    gates = tuple(Gate(GateKind.U3, (w,), (0.0, 0.0, 0.0)) for w in block_a) + tuple(
        Gate(GateKind.U3, (w,), (0.0, 0.0, 0.0)) for w in block_b)
    regions = (0,) * len(block_a) + (1,) * len(block_b)
    return gates, regions


def _two_region_successors(
    gates: tuple[Gate, ...],
    regions: tuple[int, ...],
    edges_a: list[tuple[int, int]],
    edges_b: list[tuple[int, int]],
):
    """One successor per coupling edge inside each region; region-A gates
    always stay ahead of region-B gates."""
    boundary = sum(1 for r in regions if r == 0)

    def group(a: int, b: int):
        return (
            Gate(GateKind.CNOT, (a, b)),
            Gate(GateKind.U3, (a,), (0.0, 0.0, 0.0)),
            Gate(GateKind.U3, (b,), (0.0, 0.0, 0.0)),
        )

    for a, b in edges_a:
        yield (gates[:boundary] + group(a, b) + gates[boundary:],
               regions[:boundary] + (0, 0, 0) + regions[boundary:])
    for a, b in edges_b:
        yield gates + group(a, b), regions + (1, 1, 1)


def qsearch_two_region(
    block_a_wires,
    block_b_wires,
    target: np.ndarray,
    coupling: CouplingGraph,
    cfg: InstantiationConfig,
    max_cx: int,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Circuit:
    """Two-region synthesis: expansions stay inside the wire bounds of each
    block while instantiation spans all parameters of both regions. The
    result keeps every region-A gate before every region-B gate."""
    width = coupling.n_wires
    target = np.asarray(target, dtype=complex)
    if target.shape != (1 << width, 1 << width):
        raise ValueError(f"target shape {target.shape} does not match {width} wires")
    block_a = tuple(sorted(block_a_wires))
    block_b = tuple(sorted(block_b_wires))
    if any(w >= width for w in block_a + block_b):
        raise ValueError("block wires exceed coupling width")
    set_a, set_b = set(block_a), set(block_b)
    edges_a = sorted((a, b) for a, b in coupling.edges if a in set_a and b in set_a)
    edges_b = sorted((a, b) for a, b in coupling.edges if a in set_b and b in set_b)

    def expand(node: SearchNode):
        for gates, regions in _two_region_successors(node.gates, node.regions,
                                                     edges_a, edges_b):
            yield gates, regions, node.cx_layers + 1

    gates, regions = _two_region_root(block_a, block_b)
    root = _evaluate(gates, regions, width, target, cfg, 0)
    return _run_search(width, target, cfg, max_cx, root, expand, node_cap)


def coupling_violations(circuit: Circuit, coupling: CouplingGraph) -> list[Gate]:
    """Two-qubit gates whose wire pair is not a coupling edge."""
    bad = []
    for g in circuit.gates:
        if g.kind.is_unitary and len(g.wires) == 2:
            a, b = g.wires
            if (min(a, b), max(a, b)) not in coupling.edges:
                bad.append(g)
    return bad
