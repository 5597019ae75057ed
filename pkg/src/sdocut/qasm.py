"""Reader and writer for a small OpenQASM 2.0 subset (one qreg, the IR gate set)."""
from __future__ import annotations

import ast
import math
import operator
import re

from .circuit import Circuit, GateKind, make_gate
from .errors import CircuitError, QasmError

_QREG = re.compile(r"^qreg\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_CREG = re.compile(r"^creg\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(r"^measure\s+(\w+)\s*\[\s*(\d+)\s*\]\s*->\s*(\w+)\s*\[\s*(\d+)\s*\]$")
_GATE = re.compile(r"^([a-z]+)\s*(?:\(([^)]*)\))?\s+(.+)$")
_ARG = re.compile(r"^(\w+)\s*\[\s*(\d+)\s*\]$")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(expr: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(expr)

    return ev(ast.parse(expr.strip(), mode="eval"))


def _statements(text: str):
    """Yield (line number, statement) pairs with comments removed."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        parts = line.split(";")
        if parts[-1].strip():
            raise QasmError(f"missing ';' after {parts[-1].strip()!r}", lineno)
        for stmt in parts[:-1]:
            stmt = stmt.strip()
            if stmt:
                yield lineno, stmt


def parse_qasm(text: str) -> Circuit:
    qreg = None
    n = None
    creg = None
    creg_size = 0
    gates = []
    measured: set[int] = set()

    def qubit(arg, lineno):
        m = _ARG.match(arg.strip())
        if not m:
            raise QasmError(f"bad qubit argument {arg.strip()!r}", lineno)
        if qreg is None:
            raise QasmError("gate before qreg declaration", lineno)
        if m.group(1) != qreg:
            raise QasmError(f"unknown register {m.group(1)!r}", lineno)
        idx = int(m.group(2))
        if idx >= n:
            raise QasmError(f"index {idx} overflows {qreg}[{n}]", lineno)
        return idx

    for lineno, stmt in _statements(text):
        if stmt.startswith("OPENQASM"):
            if stmt.split()[1:] != ["2.0"]:
                raise QasmError("only OPENQASM 2.0 is supported", lineno)
            continue
        if stmt.startswith("include"):
            continue
        if m := _QREG.match(stmt):
            if qreg is not None:
                raise QasmError("only one quantum register is supported", lineno)
            qreg, n = m.group(1), int(m.group(2))
            if n < 1:
                raise QasmError("empty quantum register", lineno)
            continue
        if m := _CREG.match(stmt):
            if creg is not None:
                raise QasmError("only one classical register is supported", lineno)
            creg, creg_size = m.group(1), int(m.group(2))
            continue
        if stmt.startswith("measure"):
            m = _MEASURE.match(stmt)
            if not m:
                raise QasmError(f"malformed measure {stmt!r}", lineno)
            q = qubit(f"{m.group(1)}[{m.group(2)}]", lineno)
            if m.group(3) != creg:
                raise QasmError(f"unknown classical register {m.group(3)!r}", lineno)
            if int(m.group(4)) >= creg_size:
                raise QasmError(f"index {m.group(4)} overflows {creg}[{creg_size}]", lineno)
            measured.add(q)
            continue
        m = _GATE.match(stmt)
        if not m:
            raise QasmError(f"cannot parse {stmt!r}", lineno)
        name, pstr, args = m.groups()
        try:
            kind = GateKind(name)
        except ValueError:
            raise QasmError(f"unsupported gate {name!r}", lineno) from None
        try:
            params = [_eval_angle(p) for p in pstr.split(",")] if pstr else []
        except (ValueError, SyntaxError, ZeroDivisionError):
            raise QasmError(f"bad parameter list {pstr!r}", lineno) from None
        qubits = [qubit(a, lineno) for a in args.split(",")]
        try:
            gates.append(make_gate(kind, params, qubits))
        except CircuitError as e:
            raise QasmError(str(e), lineno) from None

    if qreg is None:
        raise QasmError("no qreg declaration")
    return Circuit(n, tuple(gates), measured if creg is not None else None)


def emit_qasm(circuit: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    meas = circuit.measured_wires
    if meas:
        lines.append(f"creg c[{len(meas)}];")
    for g in circuit.gates:
        p = f"({','.join(repr(x) for x in g.params)})" if g.params else ""
        lines.append(f"{g.kind.value}{p} {','.join(f'q[{q}]' for q in g.qubits)};")
    for j, q in enumerate(meas):
        lines.append(f"measure q[{q}] -> c[{j}];")
    return "\n".join(lines) + "\n"
