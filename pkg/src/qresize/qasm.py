"""OpenQASM 2 subset: parser and emitter.

Supported gates: h, x, cx, cz, rz, rx, u3/u, measure, reset, barrier.
Multiple quantum registers are flattened in declaration order. Angle
expressions cover literals, ``pi`` and ``+ - * /`` with parentheses and
unary minus; anything richer (or a 3-qubit gate such as ccx) is rejected
rather than decomposed, so pre-decomposing is an explicit user step.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .circuit import Circuit, Gate, GateKind


class QasmError(ValueError):
    """Parse or emit failure, carrying the 1-based source line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class QasmDocument:
    """Raw parse result before lowering: version, register sizes and the
    statement list with source lines."""

    version: str = "2.0"
    qregs: dict[str, int] = field(default_factory=dict)
    cregs: dict[str, int] = field(default_factory=dict)
    statements: list[tuple[int, str]] = field(default_factory=list)


_NUMBER = re.compile(r"\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_TOKEN = re.compile(r"\s*(pi|%s|[()+\-*/])" % _NUMBER.pattern)


def _parse_angle(text: str, line: int) -> float:
    """Tiny recursive-descent evaluator for QASM angle expressions."""
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QasmError(f"bad angle expression {text!r}", line)
        tokens.append(m.group(1))
        pos = m.end()
    tokens.reverse()  # pop() from the front

    def peek():
        return tokens[-1] if tokens else None

    def expr() -> float:
        value = term()
        while peek() in ("+", "-"):
            op = tokens.pop()
            rhs = term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term() -> float:
        value = factor()
        while peek() in ("*", "/"):
            op = tokens.pop()
            rhs = factor()
            if op == "/":
                if rhs == 0:
                    raise QasmError(f"division by zero in {text!r}", line)
                value = value / rhs
            else:
                value = value * rhs
        return value

    def factor() -> float:
        sign = 1.0
        while peek() in ("+", "-"):
            if tokens.pop() == "-":
                sign = -sign
        tok = tokens.pop() if tokens else None
        if tok == "(":
            value = expr()
            if not tokens or tokens.pop() != ")":
                raise QasmError(f"unbalanced parentheses in {text!r}", line)
        elif tok == "pi":
            value = math.pi
        elif tok is not None and _NUMBER.fullmatch(tok):
            value = float(tok)
        else:
            raise QasmError(f"bad angle expression {text!r}", line)
        return sign * value

    value = expr()
    if tokens:
        raise QasmError(f"trailing tokens in angle expression {text!r}", line)
    return value


def _statements(text: str):
    """Yield (line, statement) with comments stripped; statements may span lines."""
    buf: list[str] = []
    start_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("//", 1)[0]
        for ch in stripped:
            if ch == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    yield start_line, stmt
                buf = []
            else:
                if not buf or not "".join(buf).strip():
                    start_line = lineno
                buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        raise QasmError("statement missing terminating ';'", start_line)


_NAME = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*")
_OPERAND = re.compile(r"^(?P<reg>[A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(?P<idx>\d+)\s*\])?$")


def _split_statement(stmt: str, line: int):
    """Split into (name, arg-list text or None, operand text), honoring
    nested parentheses in the argument list."""
    m = _NAME.match(stmt)
    if not m:
        raise QasmError(f"cannot parse statement {stmt!r}", line)
    name = m.group(1)
    rest = stmt[m.end():].lstrip()
    args = None
    if rest.startswith("("):
        depth = 0
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    args = rest[1:i]
                    rest = rest[i + 1:].strip()
                    break
        else:
            raise QasmError(f"unbalanced parentheses in {stmt!r}", line)
    return name, args, rest


def _split_args(args: str) -> list[str]:
    """Split an argument list on commas outside parentheses."""
    out, depth, cur = [], 0, []
    for ch in args:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return [a for a in out if a.strip()]

_GATE_NAMES = {
    "h": GateKind.H,
    "x": GateKind.X,
    "cx": GateKind.CNOT,
    "cz": GateKind.CZ,
    "rz": GateKind.RZ,
    "rx": GateKind.RX,
    "u3": GateKind.U3,
    "u": GateKind.U3,
}
_N_ANGLES = {GateKind.RZ: 1, GateKind.RX: 1, GateKind.U3: 3}


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2 program over the supported gate set.

    Unsupported gate names raise ``QasmError`` naming the gate and line;
    malformed syntax raises with the offending line.
    """
    doc = QasmDocument()
    offsets: dict[str, int] = {}
    width = 0
    gates: list[Gate] = []

    def resolve(operand: str, line: int) -> list[int]:
        m = _OPERAND.match(operand.strip())
        if not m or m.group("reg") not in offsets:
            raise QasmError(f"unknown operand {operand.strip()!r}", line)
        reg = m.group("reg")
        if m.group("idx") is None:
            return [offsets[reg] + i for i in range(doc.qregs[reg])]
        idx = int(m.group("idx"))
        if idx >= doc.qregs[reg]:
            raise QasmError(f"index {idx} out of range for qreg {reg}[{doc.qregs[reg]}]", line)
        return [offsets[reg] + idx]

    saw_version = False
    for line, stmt in _statements(text):
        doc.statements.append((line, stmt))
        if stmt.startswith("OPENQASM"):
            doc.version = stmt.split(None, 1)[1] if " " in stmt else ""
            if doc.version.strip() != "2.0":
                raise QasmError(f"unsupported OPENQASM version {doc.version.strip()!r}", line)
            saw_version = True
            continue
        if stmt.startswith("include"):
            continue
        name, raw_args, operand_text = _split_statement(stmt, line)

        if name in ("qreg", "creg"):
            dm = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$", operand_text.strip())
            if not dm:
                raise QasmError(f"malformed register declaration {stmt!r}", line)
            reg, size = dm.group(1), int(dm.group(2))
            if name == "qreg":
                if reg in doc.qregs:
                    raise QasmError(f"duplicate qreg {reg!r}", line)
                doc.qregs[reg] = size
                offsets[reg] = width
                width += size
            else:
                doc.cregs[reg] = size
            continue

        if name == "measure":
            parts = operand_text.split("->")
            if len(parts) != 2:
                raise QasmError(f"malformed measure {stmt!r}", line)
            for w in resolve(parts[0], line):
                gates.append(Gate(GateKind.MEASURE, (w,)))
            continue

        if name == "reset":
            for w in resolve(operand_text, line):
                gates.append(Gate(GateKind.RESET, (w,)))
            continue

        if name == "barrier":
            wires: list[int] = []
            for op in operand_text.split(","):
                wires.extend(resolve(op, line))
            if wires:
                gates.append(Gate(GateKind.BARRIER, tuple(wires)))
            continue

        kind = _GATE_NAMES.get(name)
        if kind is None:
            raise QasmError(f"unsupported gate: {name}", line)
        n_angles = _N_ANGLES.get(kind, 0)
        args = _split_args(raw_args or "")
        if len(args) != n_angles:
            raise QasmError(f"{name} takes {n_angles} angle(s), got {len(args)}", line)
        params = tuple(_parse_angle(a.strip(), line) for a in args)
        operands = [op for op in operand_text.split(",") if op.strip()]
        if kind in (GateKind.CNOT, GateKind.CZ):
            if len(operands) != 2:
                raise QasmError(f"{name} takes 2 operands", line)
            a = resolve(operands[0], line)
            b = resolve(operands[1], line)
            if len(a) != 1 or len(b) != 1:
                raise QasmError(f"register broadcast unsupported for {name}", line)
            gates.append(Gate(kind, (a[0], b[0]), params))
        else:
            if len(operands) != 1:
                raise QasmError(f"{name} takes 1 operand", line)
            for w in resolve(operands[0], line):
                gates.append(Gate(kind, (w,), params))

    if not saw_version:
        raise QasmError("missing OPENQASM 2.0 header", 1)
    return Circuit(width, tuple(gates))


def _fmt(value: float) -> str:
    # repr round-trips float64 exactly
    return repr(float(value))


def emit_qasm(circuit: Circuit, reset_repetitions: int = 1) -> str:
    """Emit OpenQASM 2 with a single q/c register pair.

    Each measure+reset pair's reset line is repeated ``reset_repetitions``
    times (1..3); terminal measurements are appended for every wire.
    """
    if not 1 <= reset_repetitions <= 3:
        raise ValueError("reset_repetitions must be in 1..3")
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.width}];",
        f"creg c[{circuit.width}];",
    ]
    followed_by_reset: set[int] = set()
    next_on_wire: dict[int, int] = {}
    for v in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[v]
        if gate.kind is GateKind.MEASURE:
            nxt = next_on_wire.get(gate.wires[0])
            if nxt is not None and circuit.gates[nxt].kind is GateKind.RESET:
                followed_by_reset.add(v)
        for w in gate.wires:
            next_on_wire[w] = v

    pending_repeat: set[int] = set()
    for v, gate in enumerate(circuit.gates):
        kind = gate.kind
        if kind is GateKind.CNOT:
            lines.append(f"cx q[{gate.wires[0]}],q[{gate.wires[1]}];")
        elif kind is GateKind.CZ:
            lines.append(f"cz q[{gate.wires[0]}],q[{gate.wires[1]}];")
        elif kind is GateKind.H:
            lines.append(f"h q[{gate.wires[0]}];")
        elif kind is GateKind.X:
            lines.append(f"x q[{gate.wires[0]}];")
        elif kind is GateKind.RZ:
            lines.append(f"rz({_fmt(gate.params[0])}) q[{gate.wires[0]}];")
        elif kind is GateKind.RX:
            lines.append(f"rx({_fmt(gate.params[0])}) q[{gate.wires[0]}];")
        elif kind is GateKind.U3:
            a, b, c = (_fmt(p) for p in gate.params)
            lines.append(f"u3({a},{b},{c}) q[{gate.wires[0]}];")
        elif kind is GateKind.MEASURE:
            w = gate.wires[0]
            lines.append(f"measure q[{w}] -> c[{w}];")
            if v in followed_by_reset:
                pending_repeat.add(w)
        elif kind is GateKind.RESET:
            w = gate.wires[0]
            reps = reset_repetitions if w in pending_repeat else 1
            pending_repeat.discard(w)
            lines.extend([f"reset q[{w}];"] * reps)
        elif kind is GateKind.BARRIER:
            lines.append("barrier " + ",".join(f"q[{w}]" for w in gate.wires) + ";")
        else:
            raise ValueError(f"cannot emit {kind.value} to OpenQASM 2")
    for w in range(circuit.width):
        lines.append(f"measure q[{w}] -> c[{w}];")
    return "\n".join(lines) + "\n"


def strip_terminal_measurements(circuit: Circuit) -> Circuit:
    """Drop MEASURE gates with no later gate on their wire (the readout
    layer appended by the emitter). Mid-circuit measure+reset pairs stay."""
    keep = [True] * len(circuit.gates)
    seen_later: set[int] = set()
    for v in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[v]
        if gate.kind is GateKind.MEASURE and gate.wires[0] not in seen_later:
            keep[v] = False
        else:
            seen_later.update(gate.wires)
    return Circuit(circuit.width, tuple(g for v, g in enumerate(circuit.gates) if keep[v]))
