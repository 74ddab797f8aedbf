"""Instantiation-based resizing: decide whether the *function* a circuit
computes admits a resizable implementation, then build one.

The check throws the input structure away: for each ordered wire pair
``(host, guest)`` it instantiates a two-block template -- one variable
unitary on every wire but the guest, then one on every wire but the host --
against the circuit's unitary. A successful fit proves some resizable
circuit implements the same unitary. Successful blocks are downsized wire
by wire, the pair with the smallest blocks is synthesized into native
gates inside the block bounds, and the reuse is applied.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .dependency import ResizePair, apply_reuse
from .instantiate import InstantiationConfig, instantiate_blocks
from .synthesis import CouplingGraph, SynthesisError, fragment_topology, qsearch_two_region
from .unitary import circuit_unitary

MAX_CHECK_WIDTH = 5
DEFAULT_SYNTH_EPSILON = 1e-8
DEFAULT_MAX_CX = 12


class NotResizableError(RuntimeError):
    pass


@dataclass(frozen=True)
class CheckOutcome:
    pair: ResizePair
    success: bool
    block_a_wires: tuple[int, ...]
    block_b_wires: tuple[int, ...]
    distance: float


def _template(n: int, block_a: tuple[int, ...], block_b: tuple[int, ...]) -> Circuit:
    return Circuit(n, (
        Gate(GateKind.VARIABLE_BLOCK, block_a),
        Gate(GateKind.VARIABLE_BLOCK, block_b),
    ))


def build_check_template(n: int, pair: ResizePair) -> Circuit:
    """Width-n circuit of two variable blocks: the first on every wire but
    the guest, the second on every wire but the host. This parameterizes
    all circuits where the host can be reused for the guest."""
    if n < 2:
        raise ValueError("template needs at least 2 wires")
    if not (0 <= pair.host < n and 0 <= pair.guest < n):
        raise ValueError(f"pair ({pair.host}, {pair.guest}) out of range for width {n}")
    block_a = tuple(w for w in range(n) if w != pair.guest)
    block_b = tuple(w for w in range(n) if w != pair.host)
    return _template(n, block_a, block_b)


def _check_pair(target: np.ndarray, n: int, pair: ResizePair,
                cfg: InstantiationConfig) -> CheckOutcome:
    template = build_check_template(n, pair)
    res = instantiate_blocks(template, target, cfg)
    return CheckOutcome(
        pair=pair,
        success=res.success,
        block_a_wires=template.gates[0].wires,
        block_b_wires=template.gates[1].wires,
        distance=res.distance,
    )


def check_all_pairs(target: np.ndarray, cfg: InstantiationConfig) -> list[CheckOutcome]:
    """Run the two-block check for every ordered pair, concurrently.
    Results come back in lexicographic pair order."""
    target = np.asarray(target, dtype=complex)
    dim = target.shape[0]
    n = int(dim).bit_length() - 1
    if target.shape != (1 << n, 1 << n):
        raise ValueError(f"target shape {target.shape} is not a qubit unitary")
    if n > MAX_CHECK_WIDTH:
        raise ValueError(f"resizability check is capped at {MAX_CHECK_WIDTH} qubits")
    pairs = [ResizePair(i, j) for i in range(n) for j in range(n) if i != j]
    with ThreadPoolExecutor(max_workers=min(len(pairs), 8)) as pool:
        return list(pool.map(lambda p: _check_pair(target, n, p, cfg), pairs))


def downsize_blocks(outcome: CheckOutcome, target: np.ndarray,
                    cfg: InstantiationConfig) -> CheckOutcome:
    """Shrink the outcome's blocks one wire at a time while the template
    still instantiates below tolerance. Candidate wires go in ascending
    order, blocks alternate A then B per round; the result is minimal under
    single-wire removal."""
    if not outcome.success:
        raise ValueError("cannot downsize a failed outcome")
    target = np.asarray(target, dtype=complex)
    n = int(target.shape[0]).bit_length() - 1
    block_a = list(outcome.block_a_wires)
    block_b = list(outcome.block_b_wires)
    distance = outcome.distance
    improved = True
    while improved:
        improved = False
        for which in (0, 1):
            current = block_a if which == 0 else block_b
            if len(current) <= 1:
                continue
            for w in sorted(current):
                trial = [x for x in current if x != w]
                a = tuple(trial) if which == 0 else tuple(block_a)
                b = tuple(block_b) if which == 0 else tuple(trial)
                res = instantiate_blocks(_template(n, a, b), target, cfg)
                if res.success:
                    if which == 0:
                        block_a = trial
                    else:
                        block_b = trial
                    distance = res.distance
                    improved = True
                    break
    return CheckOutcome(outcome.pair, True, tuple(block_a), tuple(block_b), distance)


@dataclass(frozen=True)
class UnitaryResizeOutcome:
    circuit: Circuit
    pre_resized: Circuit
    pair: ResizePair
    block_a_wires: tuple[int, ...]
    block_b_wires: tuple[int, ...]
    check_distance: float
    synthesis_distance: float


def _resize_via_synthesis_detailed(
    circuit: Circuit,
    target_coupling: CouplingGraph,
    cfg: InstantiationConfig,
    synth_epsilon: float = DEFAULT_SYNTH_EPSILON,
    max_cx: int = DEFAULT_MAX_CX,
) -> UnitaryResizeOutcome:
    from .unitary import hs_distance

    n = circuit.width
    if not 2 <= n <= MAX_CHECK_WIDTH:
        raise ValueError(f"unitary resizing handles 2..{MAX_CHECK_WIDTH} qubits, got {n}")
    for g in circuit.gates:
        if g.kind in (GateKind.MEASURE, GateKind.RESET):
            raise ValueError("input must be measure/reset free")
    if target_coupling.n_wires != n - 1:
        raise ValueError(
            f"target coupling has {target_coupling.n_wires} wires, expected {n - 1}")

    target = circuit_unitary(circuit)
    outcomes = [o for o in check_all_pairs(target, cfg) if o.success]
    if not outcomes:
        raise NotResizableError("not resizable at unitary level")
    with ThreadPoolExecutor(max_workers=min(len(outcomes), 8)) as pool:
        downsized = list(pool.map(lambda o: downsize_blocks(o, target, cfg), outcomes))
    downsized.sort(key=lambda o: (len(o.block_a_wires) + len(o.block_b_wires),
                                  (o.pair.host, o.pair.guest)))
    synth_cfg = replace(cfg, epsilon=synth_epsilon)
    failure: SynthesisError | None = None
    for chosen in downsized:
        # smallest blocks first; a pair whose fragmented topology cannot
        # entangle inside a block exhausts its (tiny) tree quickly, and the
        # next-best outcome is tried instead
        fragmented = fragment_topology(target_coupling, chosen.pair, n)
        try:
            pre_resized = qsearch_two_region(
                chosen.block_a_wires, chosen.block_b_wires, target, fragmented,
                synth_cfg, max_cx=max_cx)
        except SynthesisError as exc:
            failure = exc
            continue
        resized = apply_reuse(pre_resized, chosen.pair)
        return UnitaryResizeOutcome(
            circuit=resized,
            pre_resized=pre_resized,
            pair=chosen.pair,
            block_a_wires=chosen.block_a_wires,
            block_b_wires=chosen.block_b_wires,
            check_distance=chosen.distance,
            synthesis_distance=hs_distance(circuit_unitary(pre_resized), target),
        )
    raise failure


def resize_via_synthesis(
    circuit: Circuit,
    target_coupling: CouplingGraph,
    cfg: InstantiationConfig,
    synth_epsilon: float = DEFAULT_SYNTH_EPSILON,
    max_cx: int = DEFAULT_MAX_CX,
) -> Circuit:
    """Full instantiation flow: check every ordered pair against the
    circuit's unitary, downsize the successful blocks, pick the pair with
    the smallest blocks, synthesize inside the block bounds over the
    fragmented topology, and apply the reuse. Output has ``n - 1`` wires
    with every CNOT on a ``target_coupling`` edge after relabeling."""
    return _resize_via_synthesis_detailed(
        circuit, target_coupling, cfg, synth_epsilon, max_cx).circuit
