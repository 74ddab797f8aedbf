"""Benchmark circuit generators, deterministic per (family, n, seed)."""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate, cnot, h, rx, rz, x

FAMILIES = ("bv", "dj", "qaoa-ring", "ghz")


def generate_benchmark(family: str, n: int, secret: str | None = None, seed: int = 0) -> Circuit:
    """Build one of the canonical benchmark circuits.

    bv: hidden-string circuit with an ancilla on the last wire; ``secret``
        is a bit string over the n-1 data wires (default all ones).
    dj: balanced-oracle circuit with the same CNOT-chain oracle shape.
    qaoa-ring: one cost+mixer round on the n-cycle, angles drawn from the
        seeded stream.
    ghz: Hadamard plus CNOT chain.
    """
    if n < 2:
        raise ValueError("benchmarks need n >= 2")
    if family == "bv":
        bits = secret if secret is not None else "1" * (n - 1)
        if len(bits) != n - 1 or any(c not in "01" for c in bits):
            raise ValueError(f"secret must be {n - 1} bits of 0/1")
        gates: list[Gate] = [h(i) for i in range(n - 1)]
        gates += [x(n - 1), h(n - 1)]
        gates += [cnot(i, n - 1) for i in range(n - 1) if bits[i] == "1"]
        gates += [h(i) for i in range(n - 1)]
        return Circuit(n, tuple(gates))
    if family == "dj":
        gates = [h(i) for i in range(n - 1)]
        gates += [x(n - 1), h(n - 1)]
        gates += [cnot(i, n - 1) for i in range(n - 1)]
        gates += [h(i) for i in range(n - 1)]
        return Circuit(n, tuple(gates))
    if family == "qaoa-ring":
        rng = np.random.default_rng(seed)
        gates = []
        for i in range(n):
            j = (i + 1) % n
            angle = float(rng.uniform(0, 2 * np.pi))
            gates += [cnot(i, j), rz(j, angle), cnot(i, j)]
        for i in range(n):
            gates.append(rx(i, float(rng.uniform(0, 2 * np.pi))))
        return Circuit(n, tuple(gates))
    if family == "ghz":
        gates = [h(0)] + [cnot(i, i + 1) for i in range(n - 1)]
        return Circuit(n, tuple(gates))
    raise ValueError(f"unsupported benchmark family: {family!r} (choose from {FAMILIES})")
