"""Numerical instantiation engines.

Two solvers against a target unitary:

  * ``instantiate_blocks`` -- alternating sweeps over variable unitary
    blocks; each block is replaced by the unitary polar factor of its
    environment (the closed-form maximizer of the trace objective).
  * ``instantiate_params`` -- quasi-Newton descent on the angle parameters
    of a fixed gate structure, with analytic per-gate derivatives.

Plus ``delete_gates``, the right-to-left scan that drops two-qubit gates
whenever the remainder still re-instantiates below tolerance.

All calls are pure and seed-passed; callers may run many concurrently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .circuit import Circuit, Gate, GateKind
from .unitary import (
    circuit_unitary,
    embed_local,
    gate_matrix,
    hs_distance,
    partial_trace_complement,
    wire_index_table,
)

_PLATEAU_TOL = 1e-14
_PARAM_KINDS = (GateKind.U3, GateKind.RZ, GateKind.RX)


@dataclass(frozen=True)
class InstantiationConfig:
    epsilon: float = 1e-10
    max_sweeps: int = 1000
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class InstantiationResult:
    success: bool
    distance: float
    assignment: tuple
    iterations: int
    trace_history: tuple[float, ...] = ()


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary polar factor ``W @ V^H`` of ``m = W S V^H``; maximizes
    ``Re Tr(m^H B)`` over unitaries ``B``. Rank-deficient input is fine:
    the SVD factors are always completed to full unitaries."""
    w, _, vh = np.linalg.svd(np.asarray(m, dtype=complex))
    return w @ vh


def _validate_target(circuit: Circuit, target: np.ndarray) -> np.ndarray:
    target = np.asarray(target, dtype=complex)
    dim = 1 << circuit.width
    if target.shape != (dim, dim):
        raise ValueError(f"target shape {target.shape} does not match width {circuit.width}")
    for gate in circuit.gates:
        if gate.kind in (GateKind.MEASURE, GateKind.RESET):
            raise ValueError("non-unitary circuit: contains measure/reset")
    return target


def instantiate_blocks(
    circuit: Circuit, target: np.ndarray, cfg: InstantiationConfig
) -> InstantiationResult:
    """Fit the variable blocks of ``circuit`` to ``target`` by alternating
    polar updates.

    Fixed gates are treated as constants. The first attempt starts from
    identity blocks (biasing toward structured solutions); each restart
    redraws random unitary blocks from the seeded stream. The |trace|
    objective is monotone non-decreasing across sweeps up to the per-sweep
    global-phase alignment.
    """
    target = _validate_target(circuit, target)
    width = circuit.width
    dim = 1 << width
    target_h = target.conj().T

    tables = []
    block_positions = []
    mats: list[np.ndarray | None] = []
    for i, gate in enumerate(circuit.gates):
        if gate.kind is GateKind.BARRIER:
            continue
        table = wire_index_table(gate.wires, width)
        if gate.kind is GateKind.VARIABLE_BLOCK:
            block_positions.append(len(mats))
            tables.append(table)
            mats.append(None)
        else:
            mats.append(embed_local(gate_matrix(gate), table, width))
    block_wires = [g.wires for g in circuit.gates if g.kind is GateKind.VARIABLE_BLOCK]

    if not block_positions:
        u = circuit_unitary(circuit)
        d = hs_distance(target, u)
        return InstantiationResult(d < cfg.epsilon, d, (), 0)

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    def run(initial_blocks: list[np.ndarray]):
        blocks = [np.array(b, dtype=complex) for b in initial_blocks]
        for pos, table, b in zip(block_positions, tables, blocks):
            mats[pos] = embed_local(b, table, width)
        history: list[float] = []
        prev = -np.inf
        sweeps = 0
        for sweeps in range(1, cfg.max_sweeps + 1):
            u = _chain(mats, dim)
            t = np.trace(target_h @ u)
            phase = t / abs(t) if abs(t) > 0 else 1.0
            aligned = np.conj(phase) * target_h
            for k, (pos, table) in enumerate(zip(block_positions, tables)):
                prefix = _chain(mats[:pos], dim)
                suffix = _chain(mats[pos + 1:], dim)
                env = partial_trace_complement(prefix @ aligned @ suffix,
                                               block_wires[k], width, table)
                blocks[k] = polar_unitary(env.conj().T)
                mats[pos] = embed_local(blocks[k], table, width)
            u = _chain(mats, dim)
            overlap = abs(np.trace(target_h @ u))
            history.append(float(overlap))
            distance = max(0.0, 1.0 - overlap / dim)
            if distance < cfg.epsilon:
                break
            if overlap - prev < _PLATEAU_TOL:
                break
            prev = overlap
        distance = max(0.0, 1.0 - history[-1] / dim) if history else 1.0
        return distance, tuple(blocks), sweeps, tuple(history)

    best = None
    for attempt in range(cfg.restarts + 1):
        if attempt == 0:
            init = [np.eye(1 << len(w), dtype=complex) for w in block_wires]
        else:
            rng = np.random.default_rng(seeds[attempt - 1])
            init = [_haar(1 << len(w), rng) for w in block_wires]
        result = run(init)
        if best is None or result[0] < best[0]:
            best = result
        if best[0] < cfg.epsilon:
            break
    distance, blocks, sweeps, history = best
    return InstantiationResult(distance < cfg.epsilon, distance, blocks, sweeps, history)


def _chain(mats, dim: int) -> np.ndarray:
    u = np.eye(dim, dtype=complex)
    for m in mats:
        u = m @ u
    return u


def _haar(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1)), 1.0)


# ---------------------------------------------------------------------------
# parameterized structures


def _u3_derivs(theta: float, phi: float, lam: float):
    ct, st = math.cos(theta / 2), math.sin(theta / 2)
    el, ep = cmath.exp(1j * lam), cmath.exp(1j * phi)
    epl = cmath.exp(1j * (phi + lam))
    d_theta = 0.5 * np.array([[-st, -el * ct], [ep * ct, -epl * st]])
    d_phi = np.array([[0, 0], [1j * ep * st, 1j * epl * ct]])
    d_lam = np.array([[0, -1j * el * st], [0, 1j * epl * ct]])
    return [d_theta, d_phi, d_lam]


def _rz_deriv(theta: float):
    return [np.diag([-0.5j * cmath.exp(-0.5j * theta), 0.5j * cmath.exp(0.5j * theta)])]


def _rx_deriv(theta: float):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return [0.5 * np.array([[-s, -1j * c], [-1j * c, -s]])]


class _ParamStructure:
    """Compiled view of a fixed structure: constant embeddings cached,
    parameter slots mapped to gates."""

    def __init__(self, circuit: Circuit, target: np.ndarray):
        self.width = circuit.width
        self.dim = 1 << circuit.width
        self.target_h = target.conj().T
        self.gates: list[Gate] = []
        self.tables: list[np.ndarray] = []
        self.const: list[np.ndarray | None] = []
        self.param_slices: list[tuple[int, int] | None] = []
        n = 0
        for gate in circuit.gates:
            if gate.kind is GateKind.BARRIER:
                continue
            if gate.kind is GateKind.VARIABLE_BLOCK:
                raise ValueError("parameter instantiation does not take variable blocks")
            table = wire_index_table(gate.wires, circuit.width)
            self.gates.append(gate)
            self.tables.append(table)
            if gate.kind in _PARAM_KINDS:
                k = len(gate.params)
                self.param_slices.append((n, n + k))
                self.const.append(None)
                n += k
            else:
                self.param_slices.append(None)
                self.const.append(embed_local(gate_matrix(gate), table, circuit.width))
        self.n_params = n

    def _locals(self, x: np.ndarray, gate: Gate, sl):
        a, b = sl
        vals = tuple(x[a:b])
        if gate.kind is GateKind.U3:
            return np.array(
                [[math.cos(vals[0] / 2),
                  -cmath.exp(1j * vals[2]) * math.sin(vals[0] / 2)],
                 [cmath.exp(1j * vals[1]) * math.sin(vals[0] / 2),
                  cmath.exp(1j * (vals[1] + vals[2])) * math.cos(vals[0] / 2)]],
            ), _u3_derivs(*vals)
        if gate.kind is GateKind.RZ:
            return np.diag([cmath.exp(-0.5j * vals[0]), cmath.exp(0.5j * vals[0])]), _rz_deriv(vals[0])
        return (np.array([[math.cos(vals[0] / 2), -1j * math.sin(vals[0] / 2)],
                          [-1j * math.sin(vals[0] / 2), math.cos(vals[0] / 2)]]),
                _rx_deriv(vals[0]))

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray, complex]:
        """Smooth surrogate ``1 - |Tr|^2 / dim^2`` with its gradient."""
        m = len(self.gates)
        mats: list[np.ndarray] = []
        local_derivs: list[list[np.ndarray] | None] = []
        for gate, table, const, sl in zip(self.gates, self.tables, self.const, self.param_slices):
            if sl is None:
                mats.append(const)
                local_derivs.append(None)
            else:
                local, derivs = self._locals(x, gate, sl)
                mats.append(embed_local(local, table, self.width))
                local_derivs.append(derivs)
        prefixes = [np.eye(self.dim, dtype=complex)]
        for mat in mats:
            prefixes.append(mat @ prefixes[-1])
        suffixes = [np.eye(self.dim, dtype=complex)] * (m + 1)
        acc = np.eye(self.dim, dtype=complex)
        for i in range(m - 1, -1, -1):
            suffixes[i] = acc
            acc = acc @ mats[i]
        t = np.trace(self.target_h @ prefixes[m])
        grad = np.zeros(self.n_params)
        scale = -2.0 / self.dim**2
        for i, (sl, derivs) in enumerate(zip(self.param_slices, local_derivs)):
            if sl is None:
                continue
            k_mat = prefixes[i] @ self.target_h @ suffixes[i]
            env = partial_trace_complement(k_mat, self.gates[i].wires, self.width, self.tables[i])
            for j, d_local in enumerate(derivs):
                dt = np.einsum("ab,ba->", env, d_local)
                grad[sl[0] + j] = scale * (np.conj(t) * dt).real
        f = 1.0 - (abs(t) / self.dim) ** 2
        return float(f), grad, t

    def distance(self, x: np.ndarray) -> float:
        _, _, t = self.value_and_grad(x)
        return max(0.0, 1.0 - abs(t) / self.dim)


def objective_gradient(circuit: Circuit, target: np.ndarray,
                       params: np.ndarray) -> tuple[float, np.ndarray]:
    """Surrogate objective ``1 - |Tr(target^H U)|^2 / dim^2`` and its analytic
    gradient at ``params``. Exposed for derivative verification."""
    target = _validate_target(circuit, target)
    structure = _ParamStructure(circuit, target)
    x = np.asarray(params, dtype=float)
    if x.shape != (structure.n_params,):
        raise ValueError(f"expected {structure.n_params} parameters, got {x.shape}")
    f, g, _ = structure.value_and_grad(x)
    return f, g


def extract_params(circuit: Circuit) -> np.ndarray:
    """Current angle values of every parameterized gate, in gate order."""
    vals: list[float] = []
    for gate in circuit.gates:
        if gate.kind in _PARAM_KINDS:
            vals.extend(gate.params)
    return np.array(vals, dtype=float)


def apply_params(circuit: Circuit, params: np.ndarray) -> Circuit:
    """Rebind the angle parameters of a structure, in gate order."""
    params = np.asarray(params, dtype=float)
    gates: list[Gate] = []
    i = 0
    for gate in circuit.gates:
        if gate.kind in _PARAM_KINDS:
            k = len(gate.params)
            gates.append(Gate(gate.kind, gate.wires, tuple(params[i:i + k])))
            i += k
        else:
            gates.append(gate)
    if i != len(params):
        raise ValueError(f"expected {i} parameters, got {len(params)}")
    return Circuit(circuit.width, tuple(gates))


def instantiate_params(
    circuit: Circuit,
    target: np.ndarray,
    cfg: InstantiationConfig,
    initial: np.ndarray | None = None,
) -> InstantiationResult:
    """Minimize the distance to ``target`` over the angle parameters of a
    fixed structure.

    The first attempt starts from ``initial`` (or all-zero angles); each of
    ``cfg.restarts`` further attempts redraws angles uniformly in
    ``[-pi, pi)``. Returns the best attempt; ``assignment`` is the parameter
    vector.
    """
    target = _validate_target(circuit, target)
    structure = _ParamStructure(circuit, target)
    if structure.n_params == 0:
        d = hs_distance(target, circuit_unitary(circuit))
        return InstantiationResult(d < cfg.epsilon, d, (np.zeros(0),), 0)

    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    starts: list[np.ndarray] = []
    if initial is not None:
        x0 = np.asarray(initial, dtype=float)
        if x0.shape != (structure.n_params,):
            raise ValueError(f"expected {structure.n_params} initial parameters")
        starts.append(x0)
    else:
        starts.append(np.zeros(structure.n_params))
    for _ in range(cfg.restarts):
        starts.append(rng.uniform(-math.pi, math.pi, size=structure.n_params))

    def fun(x):
        f, g, _ = structure.value_and_grad(x)
        return f, g

    best_x = starts[0]
    best_d = structure.distance(starts[0])
    total_iters = 0
    for x0 in starts:
        res = minimize(
            fun, x0, jac=True, method="L-BFGS-B",
            options={"maxiter": 500, "ftol": 1e-18, "gtol": 1e-12, "maxcor": 20},
        )
        total_iters += int(res.nit)
        d = structure.distance(res.x)
        if d < best_d:
            best_d, best_x = d, res.x
        if best_d < cfg.epsilon:
            break
    return InstantiationResult(best_d < cfg.epsilon, best_d, (np.array(best_x),), total_iters)


# ---------------------------------------------------------------------------
# gate deletion


def _is_two_qubit_unitary(gate: Gate) -> bool:
    return gate.kind.is_unitary and len(gate.wires) == 2


def _remove_two_qubit(circuit: Circuit, idx: int) -> Circuit:
    """Remove the two-qubit gate at ``idx``, merging U3 pairs that become
    adjacent on its wires (the later one is dropped; re-instantiation
    recovers the combined rotation)."""
    removed = circuit.gates[idx]
    drop = {idx}
    for w in removed.wires:
        prev = nxt = None
        for i in range(idx - 1, -1, -1):
            if w in circuit.gates[i].wires:
                prev = i
                break
        for i in range(idx + 1, len(circuit.gates)):
            if w in circuit.gates[i].wires:
                nxt = i
                break
        if (prev is not None and nxt is not None
                and circuit.gates[prev].kind is GateKind.U3
                and circuit.gates[nxt].kind is GateKind.U3):
            drop.add(nxt)
    return Circuit(circuit.width, tuple(g for i, g in enumerate(circuit.gates) if i not in drop))


def delete_gates(circuit: Circuit, target: np.ndarray, cfg: InstantiationConfig) -> Circuit:
    """Scan two-qubit gates right to left, dropping each one whose removal
    still re-instantiates to ``target`` below ``cfg.epsilon``. Passes repeat
    until one deletes nothing.
    """
    target = _validate_target(circuit, target)
    if hs_distance(circuit_unitary(circuit), target) >= cfg.epsilon:
        raise ValueError("input not instantiated to the target")
    work = circuit
    changed = True
    while changed:
        changed = False
        positions = [i for i, g in enumerate(work.gates) if _is_two_qubit_unitary(g)]
        for idx in reversed(positions):
            candidate = _remove_two_qubit(work, idx)
            res = instantiate_params(candidate, target, cfg, initial=extract_params(candidate))
            if res.success:
                work = apply_params(candidate, res.assignment[0])
                changed = True
                # removals happen at >= idx, so smaller positions stay valid
    return work
