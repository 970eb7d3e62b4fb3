"""OpenQASM 2.0 subset: parsing and emission.

Supported constructs: the version header, include lines (ignored),
qreg/creg declarations, the built-in gate set (with any number of
leading ``c`` characters adding controls, e.g. ``cx``, ``ccx``, ``cp``),
``barrier``, ``measure``, ``reset``, and ``if (creg==value)`` prefixes
on gates.  Parameter expressions allow numbers, ``pi``, parentheses,
and ``+ - * /``.

Custom gate definitions, ``opaque`` declarations, and other formats are
rejected with a positioned error rather than skipped silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .circuit import GateKind, Operation, PARAM_ARITY, QuantumCircuit

__all__ = ["QasmError", "parse_qasm", "emit_qasm", "load_circuit"]


class QasmError(ValueError):
    """Parse failure with source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_BASE_NAMES = {
    "id": GateKind.I,
    "x": GateKind.X,
    "y": GateKind.Y,
    "z": GateKind.Z,
    "h": GateKind.H,
    "s": GateKind.S,
    "sdg": GateKind.SDG,
    "t": GateKind.T,
    "tdg": GateKind.TDG,
    "p": GateKind.P,
    "u1": GateKind.P,
    "rx": GateKind.RX,
    "ry": GateKind.RY,
    "rz": GateKind.RZ,
    "u2": GateKind.U2,
    "u3": GateKind.U3,
    "u": GateKind.U3,
    "swap": GateKind.SWAP,
}

_EMIT_NAMES = {
    GateKind.I: "id",
    GateKind.X: "x",
    GateKind.Y: "y",
    GateKind.Z: "z",
    GateKind.H: "h",
    GateKind.S: "s",
    GateKind.SDG: "sdg",
    GateKind.T: "t",
    GateKind.TDG: "tdg",
    GateKind.P: "p",
    GateKind.RX: "rx",
    GateKind.RY: "ry",
    GateKind.RZ: "rz",
    GateKind.U2: "u2",
    GateKind.U3: "u3",
    GateKind.SWAP: "swap",
}

_KEYWORDS = {"OPENQASM", "include", "qreg", "creg", "measure", "reset", "barrier", "if", "pi"}


@dataclass
class _Token:
    kind: str  # ident | number | symbol
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(_Token("number", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QasmError("unterminated string", start_line, start_col)
            tokens.append(_Token("string", text[i + 1 : j], start_line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token("symbol", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if text.startswith("==", i):
            tokens.append(_Token("symbol", "==", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in "[](){},;+-*/":
            tokens.append(_Token("symbol", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise QasmError(f"unexpected character {ch!r}", start_line, start_col)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, tuple[int, int]] = {}
        self.num_qubits = 0
        self.num_clbits = 0
        self.ops: list[Operation] = []

    # --- token plumbing

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self, expect: str | None = None) -> _Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("symbol", "", 1, 1)
            raise QasmError("unexpected end of input", last.line, last.col + len(last.text))
        self.pos += 1
        if expect is not None and tok.text != expect:
            raise QasmError(f"expected {expect!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def _expect_ident(self) -> _Token:
        tok = self._next()
        if tok.kind != "ident":
            raise QasmError(f"expected identifier, found {tok.text!r}", tok.line, tok.col)
        return tok

    def _expect_int(self) -> int:
        tok = self._next()
        if tok.kind != "number" or not tok.text.isdigit():
            raise QasmError(f"expected integer, found {tok.text!r}", tok.line, tok.col)
        return int(tok.text)

    # --- grammar

    def parse(self) -> QuantumCircuit:
        tok = self._peek()
        if tok is None:
            raise QasmError("empty program", 1, 1)
        if tok.text != "OPENQASM":
            raise QasmError("expected OPENQASM header", tok.line, tok.col)
        self._next()
        version = self._next()
        if version.text != "2.0":
            raise QasmError(f"unsupported version {version.text!r}", version.line, version.col)
        self._next(";")
        while self._peek() is not None:
            self._statement()
        if self.num_qubits == 0:
            tok = self.tokens[-1]
            raise QasmError("no qubits declared", tok.line, tok.col)
        circuit = QuantumCircuit(
            num_qubits=self.num_qubits,
            num_clbits=self.num_clbits,
            ops=self.ops,
            qreg_layout=tuple((name, size) for name, (_, size) in self.qregs.items()),
            creg_layout=tuple((name, size) for name, (_, size) in self.cregs.items()),
        )
        return circuit

    def _statement(self) -> None:
        tok = self._peek()
        assert tok is not None
        if tok.text == "include":
            self._next()
            self._next()  # the file name string
            self._next(";")
            return
        if tok.text in ("qreg", "creg"):
            self._register(tok.text)
            return
        if tok.text == "if":
            self._conditional()
            return
        if tok.text == "measure":
            self._measure()
            return
        if tok.text == "reset":
            self._reset()
            return
        if tok.text == "barrier":
            self._barrier()
            return
        if tok.kind == "ident":
            self.ops.extend(self._gate_call())
            return
        raise QasmError(f"unexpected token {tok.text!r}", tok.line, tok.col)

    def _register(self, which: str) -> None:
        self._next()
        name_tok = self._expect_ident()
        name = name_tok.text
        if name in self.qregs or name in self.cregs:
            raise QasmError(f"register {name!r} already declared", name_tok.line, name_tok.col)
        self._next("[")
        size = self._expect_int()
        self._next("]")
        self._next(";")
        if size < 1:
            raise QasmError(f"register {name!r} must have positive size", name_tok.line, name_tok.col)
        if which == "qreg":
            self.qregs[name] = (self.num_qubits, size)
            self.num_qubits += size
        else:
            self.cregs[name] = (self.num_clbits, size)
            self.num_clbits += size

    def _qubit_operand(self) -> tuple[str, Optional[int], _Token]:
        tok = self._expect_ident()
        if tok.text not in self.qregs:
            if tok.text in self.cregs:
                raise QasmError(f"{tok.text!r} is a classical register", tok.line, tok.col)
            raise QasmError(f"unknown register {tok.text!r}", tok.line, tok.col)
        index = None
        nxt = self._peek()
        if nxt is not None and nxt.text == "[":
            self._next("[")
            index = self._expect_int()
            self._next("]")
            offset, size = self.qregs[tok.text]
            if index >= size:
                raise QasmError(
                    f"index {index} out of range for {tok.text!r}[{size}]", tok.line, tok.col
                )
        return tok.text, index, tok

    def _qubit(self, reg: str, index: Optional[int], tok: _Token) -> int:
        if index is None:
            raise QasmError(f"operand {reg!r} must be indexed here", tok.line, tok.col)
        offset, _ = self.qregs[reg]
        return offset + index

    def _clbit(self) -> int:
        tok = self._expect_ident()
        if tok.text not in self.cregs:
            raise QasmError(f"unknown classical register {tok.text!r}", tok.line, tok.col)
        self._next("[")
        index = self._expect_int()
        self._next("]")
        offset, size = self.cregs[tok.text]
        if index >= size:
            raise QasmError(
                f"index {index} out of range for {tok.text!r}[{size}]", tok.line, tok.col
            )
        return offset + index

    def _measure(self) -> None:
        self._next()
        reg, index, tok = self._qubit_operand()
        self._next("->")
        if index is None:
            # whole-register broadcast: measure q -> c;
            ctok = self._expect_ident()
            if ctok.text not in self.cregs:
                raise QasmError(f"unknown classical register {ctok.text!r}", ctok.line, ctok.col)
            self._next(";")
            qoff, qsize = self.qregs[reg]
            coff, csize = self.cregs[ctok.text]
            if qsize != csize:
                raise QasmError(
                    f"register sizes differ: {reg}[{qsize}] vs {ctok.text}[{csize}]",
                    ctok.line,
                    ctok.col,
                )
            for i in range(qsize):
                self.ops.append(
                    Operation(GateKind.MEASURE, (qoff + i,), clbit=coff + i)
                )
            return
        qubit = self._qubit(reg, index, tok)
        clbit = self._clbit()
        self._next(";")
        self.ops.append(Operation(GateKind.MEASURE, (qubit,), clbit=clbit))

    def _reset(self) -> None:
        self._next()
        reg, index, tok = self._qubit_operand()
        self._next(";")
        if index is None:
            offset, size = self.qregs[reg]
            for i in range(size):
                self.ops.append(Operation(GateKind.RESET, (offset + i,)))
        else:
            self.ops.append(Operation(GateKind.RESET, (self._qubit(reg, index, tok),)))

    def _barrier(self) -> None:
        self._next()
        qubits: list[int] = []
        while True:
            reg, index, tok = self._qubit_operand()
            if index is None:
                offset, size = self.qregs[reg]
                qubits.extend(range(offset, offset + size))
            else:
                qubits.append(self._qubit(reg, index, tok))
            nxt = self._peek()
            if nxt is not None and nxt.text == ",":
                self._next(",")
                continue
            break
        self._next(";")
        self.ops.append(Operation(GateKind.BARRIER, tuple(qubits)))

    def _conditional(self) -> None:
        self._next()  # if
        self._next("(")
        ctok = self._expect_ident()
        if ctok.text not in self.cregs:
            raise QasmError(f"unknown classical register {ctok.text!r}", ctok.line, ctok.col)
        self._next("==")
        value = self._expect_int()
        self._next(")")
        head = self._peek()
        if head is None:
            raise QasmError("expected gate after condition", ctok.line, ctok.col)
        if head.text in ("measure", "reset", "barrier", "if"):
            raise QasmError(
                f"classical condition cannot apply to {head.text!r}", head.line, head.col
            )
        offset, size = self.cregs[ctok.text]
        for op in self._gate_call():
            self.ops.append(
                Operation(
                    kind=op.kind,
                    targets=op.targets,
                    controls=op.controls,
                    params=op.params,
                    condition=(offset, size, value),
                )
            )

    def _resolve_gate(self, tok: _Token) -> tuple[GateKind, int]:
        name = tok.text
        if name == "CX":
            return GateKind.X, 1
        lowered = name.lower()
        n_controls = 0
        rest = lowered
        while rest and rest not in _BASE_NAMES and rest.startswith("c"):
            rest = rest[1:]
            n_controls += 1
        if rest in _BASE_NAMES:
            return _BASE_NAMES[rest], n_controls
        raise QasmError(f"unknown gate {name!r}", tok.line, tok.col)

    def _gate_call(self) -> list[Operation]:
        tok = self._expect_ident()
        kind, n_controls = self._resolve_gate(tok)
        arity = PARAM_ARITY.get(kind, 0)
        params: tuple[float, ...] = ()
        nxt = self._peek()
        if nxt is not None and nxt.text == "(":
            params = self._param_list()
        if len(params) != arity:
            raise QasmError(
                f"{tok.text} takes {arity} parameter(s), got {len(params)}", tok.line, tok.col
            )
        operands: list[tuple[str, Optional[int], _Token]] = []
        while True:
            operands.append(self._qubit_operand())
            after = self._peek()
            if after is not None and after.text == ",":
                self._next(",")
                continue
            break
        self._next(";")

        n_targets = 2 if kind == GateKind.SWAP else 1
        expected = n_controls + n_targets
        if len(operands) == 1 and expected == 1 and operands[0][1] is None:
            # whole-register broadcast for plain single-qubit gates
            reg, _, _ = operands[0]
            offset, size = self.qregs[reg]
            return [Operation(kind, (offset + i,), params=params) for i in range(size)]
        if len(operands) != expected:
            raise QasmError(
                f"{tok.text} expects {expected} operand(s), got {len(operands)}",
                tok.line,
                tok.col,
            )
        qubits = [self._qubit(reg, idx, t) for reg, idx, t in operands]
        controls = frozenset(qubits[:n_controls])
        targets = tuple(qubits[n_controls:])
        if len(controls) != n_controls or set(targets) & controls or len(set(targets)) != len(targets):
            raise QasmError(f"duplicate qubit operand in {tok.text}", tok.line, tok.col)
        return [Operation(kind, targets, controls, params)]

    # --- parameter expressions

    def _param_list(self) -> tuple[float, ...]:
        self._next("(")
        params = [self._expr()]
        while True:
            tok = self._peek()
            if tok is not None and tok.text == ",":
                self._next(",")
                params.append(self._expr())
                continue
            break
        self._next(")")
        return tuple(params)

    def _expr(self) -> float:
        value = self._term()
        while True:
            tok = self._peek()
            if tok is not None and tok.text in "+-":
                self._next()
                rhs = self._term()
                value = value + rhs if tok.text == "+" else value - rhs
                continue
            return value

    def _term(self) -> float:
        value = self._factor()
        while True:
            tok = self._peek()
            if tok is not None and tok.text in "*/":
                self._next()
                rhs = self._factor()
                if tok.text == "*":
                    value *= rhs
                else:
                    if rhs == 0:
                        raise QasmError("division by zero", tok.line, tok.col)
                    value /= rhs
                continue
            return value

    def _factor(self) -> float:
        tok = self._next()
        if tok.text == "-":
            return -self._factor()
        if tok.text == "+":
            return self._factor()
        if tok.text == "(":
            value = self._expr()
            self._next(")")
            return value
        if tok.text == "pi":
            return math.pi
        if tok.kind == "number":
            try:
                return float(tok.text)
            except ValueError:
                raise QasmError(f"bad number {tok.text!r}", tok.line, tok.col) from None
        raise QasmError(f"unexpected token {tok.text!r} in expression", tok.line, tok.col)


def parse_qasm(text: str, name: str = "") -> QuantumCircuit:
    """Parse an OpenQASM 2.0 program into a circuit (source order kept)."""
    circuit = _Parser(_tokenize(text)).parse()
    circuit.name = name
    return circuit


def load_circuit(path: str) -> QuantumCircuit:
    """Parse a .qasm file; the circuit name is the file stem."""
    import os

    stem, ext = os.path.splitext(os.path.basename(path))
    if ext.lower() != ".qasm":
        raise ValueError(f"unsupported circuit format {ext!r} (expected .qasm)")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_qasm(fh.read(), name=stem)


# ----------------------------------------------------------------------
# emission

def _format_param(value: float) -> str:
    return repr(value)


def _bit_ref(layout: tuple[tuple[str, int], ...], index: int) -> str:
    remaining = index
    for name, size in layout:
        if remaining < size:
            return f"{name}[{remaining}]"
        remaining -= size
    raise ValueError(f"bit index {index} outside declared registers")


def _creg_for_condition(
    layout: tuple[tuple[str, int], ...], offset: int, count: int
) -> str:
    at = 0
    for name, size in layout:
        if at == offset and size == count:
            return name
        at += size
    raise ValueError("classical condition does not align with a declared register")


def emit_qasm(circuit: QuantumCircuit) -> str:
    """Serialize a circuit; parse_qasm(emit_qasm(c)) is structurally c."""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";']
    for name, size in circuit.qreg_layout:
        lines.append(f"qreg {name}[{size}];")
    for name, size in circuit.creg_layout:
        lines.append(f"creg {name}[{size}];")
    qref = lambda q: _bit_ref(circuit.qreg_layout, q)
    for op in circuit.ops:
        if op.kind == GateKind.BARRIER:
            lines.append("barrier " + ", ".join(qref(q) for q in op.targets) + ";")
            continue
        if op.kind == GateKind.MEASURE:
            cref = _bit_ref(circuit.creg_layout, op.clbit)
            lines.append(f"measure {qref(op.targets[0])} -> {cref};")
            continue
        if op.kind == GateKind.RESET:
            lines.append(f"reset {qref(op.targets[0])};")
            continue
        prefix = ""
        if op.condition is not None:
            offset, count, value = op.condition
            cname = _creg_for_condition(circuit.creg_layout, offset, count)
            prefix = f"if ({cname}=={value}) "
        name = "c" * len(op.controls) + _EMIT_NAMES[op.kind]
        params = ""
        if op.params:
            params = "(" + ", ".join(_format_param(p) for p in op.params) + ")"
        operands = [qref(q) for q in sorted(op.controls)] + [qref(q) for q in op.targets]
        lines.append(f"{prefix}{name}{params} " + ", ".join(operands) + ";")
    return "\n".join(lines) + "\n"
