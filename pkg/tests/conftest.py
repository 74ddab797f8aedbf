"""Shared test helpers: random circuit generation and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest

from qresize import Circuit, Gate, GateKind, build_dag

UNITARY_KINDS = (
    GateKind.H, GateKind.X, GateKind.RZ, GateKind.RX, GateKind.U3,
    GateKind.CNOT, GateKind.CZ,
)


def random_circuit(rng: np.random.Generator, width: int, n_gates: int,
                   two_qubit_bias: float = 0.5) -> Circuit:
    gates = []
    for _ in range(n_gates):
        if width >= 2 and rng.random() < two_qubit_bias:
            kind = GateKind.CNOT if rng.random() < 0.8 else GateKind.CZ
            a, b = rng.choice(width, size=2, replace=False)
            gates.append(Gate(kind, (int(a), int(b))))
        else:
            kind = UNITARY_KINDS[rng.integers(0, 5)]
            w = int(rng.integers(0, width))
            n_params = {GateKind.RZ: 1, GateKind.RX: 1, GateKind.U3: 3}.get(kind, 0)
            params = tuple(float(t) for t in rng.uniform(-np.pi, np.pi, n_params))
            gates.append(Gate(kind, (w,), params))
    return Circuit(width, tuple(gates))


def random_topological_order(rng: np.random.Generator, circuit: Circuit) -> list[int]:
    """Sample one topological order of the circuit's DAG uniformly-ish."""
    dag = build_dag(circuit)
    indegree = [len(p) for p in dag.pred]
    ready = [v for v in range(dag.n_nodes) if indegree[v] == 0]
    order = []
    while ready:
        v = ready.pop(int(rng.integers(0, len(ready))))
        order.append(v)
        for s in dag.succ[v]:
            indegree[s] -= 1
            if indegree[s] == 0:
                ready.append(s)
    return order


def longest_path_oracle(circuit: Circuit, weight_fn) -> float:
    """Brute-force longest path: enumerate every path through the DAG."""
    dag = build_dag(circuit)
    weights = [weight_fn(g) for g in circuit.gates]
    best = 0.0
    memo: dict[int, float] = {}

    def from_node(v: int) -> float:
        if v in memo:
            return memo[v]
        extend = max((from_node(s) for s in dag.succ[v]), default=0.0)
        memo[v] = weights[v] + extend
        return memo[v]

    for v in range(dag.n_nodes):
        if not dag.pred[v]:
            best = max(best, from_node(v))
    return best


def schedule_oracle(circuit: Circuit, host: int, guest: int) -> bool:
    """Independent resizability oracle: does any topological schedule place
    every host gate before every guest gate? Realized by adding host->guest
    constraint edges and testing acyclicity with Kahn's algorithm."""
    dag = build_dag(circuit)
    n = dag.n_nodes
    host_gates = [v for v, g in enumerate(circuit.gates) if host in g.wires]
    guest_gates = [v for v, g in enumerate(circuit.gates) if guest in g.wires]
    if set(host_gates) & set(guest_gates):
        return False
    succ = [set(s) for s in dag.succ]
    for u in host_gates:
        for v in guest_gates:
            succ[u].add(v)
    indegree = [0] * n
    for u in range(n):
        for v in succ[u]:
            indegree[v] += 1
    ready = [v for v in range(n) if indegree[v] == 0]
    visited = 0
    while ready:
        u = ready.pop()
        visited += 1
        for v in succ[u]:
            indegree[v] -= 1
            if indegree[v] == 0:
                ready.append(v)
    return visited == n


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
