"""Dense unitary semantics for small circuits.

Conventions, fixed once for the whole package:
  * wire 0 is the least-significant tensor factor, so a basis index is
    ``sum(bit(w) << w)``;
  * a gate's wire list maps gate-local qubit ``j`` to ``wires[j]``, with
    local qubit 0 least significant in the gate matrix;
  * ``circuit_unitary`` multiplies in application order (leftmost gate in
    the list acts first).

Everything is dense and capped at 6 qubits (64 x 64), which keeps the
instantiation math simple at this scale.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .circuit import Circuit, Gate, GateKind

MAX_QUBITS = 6

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
# local little-endian, control = local qubit 0
_CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]],
    dtype=complex,
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    ct, st = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[ct, -cmath.exp(1j * lam) * st],
         [cmath.exp(1j * phi) * st, cmath.exp(1j * (phi + lam)) * ct]],
    )


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * theta), cmath.exp(0.5j * theta)])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def gate_matrix(gate: Gate, block_value: np.ndarray | None = None) -> np.ndarray:
    """Local (little-endian) matrix of a unitary gate."""
    kind = gate.kind
    if kind is GateKind.H:
        return _H
    if kind is GateKind.X:
        return _X
    if kind is GateKind.CNOT:
        return _CNOT
    if kind is GateKind.CZ:
        return _CZ
    if kind is GateKind.RZ:
        return rz_matrix(gate.params[0])
    if kind is GateKind.RX:
        return rx_matrix(gate.params[0])
    if kind is GateKind.U3:
        return u3_matrix(*gate.params)
    if kind is GateKind.VARIABLE_BLOCK:
        if block_value is None:
            raise ValueError("variable block has no assigned value")
        value = np.asarray(block_value, dtype=complex)
        if value.shape != (1 << gate.block_dim,) * 2:
            raise ValueError(
                f"block value has shape {value.shape}, expected dim {1 << gate.block_dim}")
        return value
    raise ValueError(f"{kind.value} has no unitary matrix")


def wire_index_table(wires: tuple[int, ...], width: int) -> np.ndarray:
    """Basis-index table ``T[a, r]`` for local index ``a`` on ``wires`` and
    index ``r`` over the remaining wires."""
    rest = [w for w in range(width) if w not in wires]
    n_loc, n_rest = 1 << len(wires), 1 << len(rest)
    loc = np.zeros(n_loc, dtype=np.intp)
    for j, w in enumerate(wires):
        loc |= ((np.arange(n_loc) >> j) & 1) << w
    rst = np.zeros(n_rest, dtype=np.intp)
    for j, w in enumerate(rest):
        rst |= ((np.arange(n_rest) >> j) & 1) << w
    return loc[:, None] + rst[None, :]


def embed_local(local: np.ndarray, table: np.ndarray, width: int) -> np.ndarray:
    """Embed a local matrix into the full space using a precomputed table."""
    full = np.zeros((1 << width, 1 << width), dtype=complex)
    full[table[:, None, :], table[None, :, :]] = local[:, :, None]
    return full


def partial_trace_complement(m: np.ndarray, wires: tuple[int, ...], width: int,
                             table: np.ndarray | None = None) -> np.ndarray:
    """Trace out every wire not in ``wires``: the matrix ``E`` with
    ``Tr(m @ embed(B)) == Tr(E @ B)`` for any local ``B``."""
    if table is None:
        table = wire_index_table(wires, width)
    return m[table[:, None, :], table[None, :, :]].sum(axis=2)


def embed_gate(gate: Gate, width: int, block_value: np.ndarray | None = None) -> np.ndarray:
    """Full-width matrix acting as ``gate`` on its wires, identity elsewhere."""
    if not gate.kind.is_unitary:
        raise ValueError(f"cannot embed non-unitary gate {gate.kind.value}")
    if width > MAX_QUBITS:
        raise ValueError(f"width {width} exceeds the {MAX_QUBITS}-qubit cap")
    if any(w >= width for w in gate.wires):
        raise ValueError("gate wires exceed width")
    local = gate_matrix(gate, block_value)
    return embed_local(local, wire_index_table(gate.wires, width), width)


def circuit_unitary(circuit: Circuit, block_values=None) -> np.ndarray:
    """Product of embedded gate matrices in application order.

    ``block_values`` assigns a matrix to each variable block, in gate-list
    order. Barriers are ignored. Measure/reset gates make the circuit
    non-unitary and raise.
    """
    if circuit.width > MAX_QUBITS:
        raise ValueError(f"width {circuit.width} exceeds the {MAX_QUBITS}-qubit cap")
    blocks = list(block_values) if block_values is not None else []
    next_block = 0
    u = np.eye(1 << circuit.width, dtype=complex)
    for gate in circuit.gates:
        if gate.kind is GateKind.BARRIER:
            continue
        if gate.kind in (GateKind.MEASURE, GateKind.RESET):
            raise ValueError("non-unitary circuit: contains measure/reset")
        value = None
        if gate.kind is GateKind.VARIABLE_BLOCK:
            if next_block >= len(blocks):
                raise ValueError("missing value for variable block")
            value = blocks[next_block]
            next_block += 1
        u = embed_gate(gate, circuit.width, value) @ u
    return u


def hs_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Phase-invariant distance ``1 - |Tr(u^H v)| / dim``, in ``[0, 1]``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    dim = u.shape[0]
    overlap = abs(np.trace(u.conj().T @ v))
    return max(0.0, 1.0 - overlap / dim)


def is_unitary(m: np.ndarray, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    delta = m.conj().T @ m - np.eye(m.shape[0])
    return bool(np.max(np.abs(delta)) <= tol)


def random_unitary(n_qubits: int, seed) -> np.ndarray:
    """Haar-style random unitary: QR of a complex Gaussian matrix with the
    R-diagonal phase fix. Deterministic per seed."""
    if n_qubits > MAX_QUBITS:
        raise ValueError(f"n_qubits {n_qubits} exceeds the {MAX_QUBITS}-qubit cap")
    rng = np.random.default_rng(seed)
    dim = 1 << n_qubits
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1)), 1.0)
    return q * phases
