"""Quantum circuit representation, gate semantics, and algorithm generators.

Circuits are ordered operation lists over n qubits and c classical bits.
Bitstrings are written q_{n-1}..q_0 (most significant bit first), and
classical registers follow the OpenQASM convention of c[0] being the
least significant bit of a register value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .engine import Engine, MatrixDD


class GateKind(Enum):
    I = "id"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    P = "p"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    U2 = "u2"
    U3 = "u3"
    SWAP = "swap"
    MEASURE = "measure"
    RESET = "reset"
    BARRIER = "barrier"


UNITARY_KINDS = frozenset(
    k for k in GateKind if k not in (GateKind.MEASURE, GateKind.RESET, GateKind.BARRIER)
)

PARAM_ARITY = {
    GateKind.P: 1,
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.U2: 2,
    GateKind.U3: 3,
}

_ANGLE_TOL = 1e-12


class CircuitError(ValueError):
    """Structural problem in a circuit or operation."""


class NotInvertibleError(CircuitError):
    """Raised when inverting a circuit with non-unitary operations."""


@dataclass(frozen=True)
class Operation:
    """One circuit element: a gate (possibly controlled and classically
    conditioned), a measurement, a reset, or a barrier.

    condition is (clbit offset, clbit count, value): the gate applies only
    when the register slice equals the value.  clbit pairs a measurement
    with its classical target bit.
    """

    kind: GateKind
    targets: tuple[int, ...]
    controls: frozenset[int] = frozenset()
    params: tuple[float, ...] = ()
    clbit: Optional[int] = None
    condition: Optional[tuple[int, int, int]] = None

    def __post_init__(self) -> None:
        arity = PARAM_ARITY.get(self.kind, 0)
        if len(self.params) != arity:
            raise CircuitError(
                f"{self.kind.value} takes {arity} parameter(s), got {len(self.params)}"
            )
        if self.kind == GateKind.SWAP:
            if len(self.targets) != 2:
                raise CircuitError("swap takes exactly two targets")
        elif self.kind == GateKind.BARRIER:
            if self.controls:
                raise CircuitError("barrier takes no controls")
        elif len(self.targets) != 1:
            raise CircuitError(f"{self.kind.value} takes exactly one target")
        if self.kind == GateKind.MEASURE and self.clbit is None:
            raise CircuitError("measure needs a classical bit")
        if self.kind in (GateKind.MEASURE, GateKind.RESET, GateKind.BARRIER):
            if self.controls:
                raise CircuitError(f"{self.kind.value} takes no controls")
            if self.condition is not None:
                raise CircuitError(f"{self.kind.value} cannot be classically conditioned")
        overlap = self.controls.intersection(self.targets)
        if overlap:
            raise CircuitError(f"qubits {sorted(overlap)} are both control and target")
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError("duplicate target qubit")

    @property
    def is_gate(self) -> bool:
        return self.kind in UNITARY_KINDS

    def same_structure(self, other: "Operation") -> bool:
        """Structural equality with angle comparison up to rounding noise."""
        if (
            self.kind != other.kind
            or self.targets != other.targets
            or self.controls != other.controls
            or self.clbit != other.clbit
            or self.condition != other.condition
        ):
            return False
        return len(self.params) == len(other.params) and all(
            abs(a - b) < _ANGLE_TOL for a, b in zip(self.params, other.params)
        )


@dataclass
class QuantumCircuit:
    """Ordered operations over num_qubits qubits and num_clbits classical bits.

    qreg_layout / creg_layout record the declared register names and sizes
    so emission can reproduce the source structure; they do not affect
    circuit semantics or structural equality.
    """

    num_qubits: int
    num_clbits: int = 0
    name: str = ""
    ops: list[Operation] = field(default_factory=list)
    qreg_layout: tuple[tuple[str, int], ...] = ()
    creg_layout: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        if not self.qreg_layout:
            self.qreg_layout = (("q", self.num_qubits),)
        if not self.creg_layout and self.num_clbits:
            self.creg_layout = (("c", self.num_clbits),)
        for op in self.ops:
            self._check(op)

    def _check(self, op: Operation) -> None:
        for q in (*op.targets, *op.controls):
            if not (0 <= q < self.num_qubits):
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits} qubits")
        if op.clbit is not None and not (0 <= op.clbit < self.num_clbits):
            raise CircuitError(f"classical bit {op.clbit} out of range")
        if op.condition is not None:
            offset, count, _ = op.condition
            if offset < 0 or count < 1 or offset + count > self.num_clbits:
                raise CircuitError("classical condition out of range")

    def append(self, op: Operation) -> None:
        self._check(op)
        self.ops.append(op)

    def nops(self) -> int:
        """Gate operations only; barriers are markers, not gates."""
        return sum(1 for op in self.ops if op.kind != GateKind.BARRIER)

    def gates(self) -> list[Operation]:
        return [op for op in self.ops if op.is_gate]

    def is_unitary(self) -> bool:
        return all(
            op.is_gate and op.condition is None or op.kind == GateKind.BARRIER
            for op in self.ops
        )

    def same_structure(self, other: "QuantumCircuit") -> bool:
        return (
            self.num_qubits == other.num_qubits
            and self.num_clbits == other.num_clbits
            and len(self.ops) == len(other.ops)
            and all(a.same_structure(b) for a, b in zip(self.ops, other.ops))
        )


# ----------------------------------------------------------------------
# gate matrices

_SQ2 = 1.0 / math.sqrt(2.0)


def gate_base_matrix(kind: GateKind, params: Sequence[float] = ()) -> np.ndarray:
    """The defining matrix of a gate kind: 2x2, or 4x4 for swap."""
    arity = PARAM_ARITY.get(kind, 0)
    if len(params) != arity:
        raise CircuitError(f"{kind.value} takes {arity} parameter(s), got {len(params)}")
    if kind == GateKind.I:
        return np.eye(2, dtype=complex)
    if kind == GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == GateKind.Y:
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == GateKind.Z:
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind == GateKind.H:
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if kind == GateKind.S:
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if kind == GateKind.SDG:
        return np.array([[1, 0], [0, -1j]], dtype=complex)
    if kind == GateKind.T:
        return np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex)
    if kind == GateKind.TDG:
        return np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex)
    if kind == GateKind.P:
        return np.array([[1, 0], [0, cmath.exp(1j * params[0])]], dtype=complex)
    if kind == GateKind.RX:
        t = params[0] / 2
        return np.array(
            [[math.cos(t), -1j * math.sin(t)], [-1j * math.sin(t), math.cos(t)]],
            dtype=complex,
        )
    if kind == GateKind.RY:
        t = params[0] / 2
        return np.array(
            [[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=complex
        )
    if kind == GateKind.RZ:
        t = params[0] / 2
        return np.array(
            [[cmath.exp(-1j * t), 0], [0, cmath.exp(1j * t)]], dtype=complex
        )
    if kind == GateKind.U2:
        phi, lam = params
        return _SQ2 * np.array(
            [[1, -cmath.exp(1j * lam)], [cmath.exp(1j * phi), cmath.exp(1j * (phi + lam))]],
            dtype=complex,
        )
    if kind == GateKind.U3:
        theta, phi, lam = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [
                [c, -cmath.exp(1j * lam) * s],
                [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
            ],
            dtype=complex,
        )
    if kind == GateKind.SWAP:
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    raise CircuitError(f"{kind.value} has no matrix")


def operation_dd(engine: Engine, op: Operation, num_qubits: int) -> MatrixDD:
    """Full-size operator diagram for one unitary operation.

    Swap (optionally controlled) is realized as its three-CNOT sandwich,
    with any controls attached to the middle CNOT only.
    """
    if not op.is_gate:
        raise CircuitError(f"{op.kind.value} has no unitary operator")
    if op.kind == GateKind.SWAP:
        a, b = op.targets
        x = gate_base_matrix(GateKind.X)
        outer = engine.gate_dd(x, num_qubits, {b}, a)
        inner = engine.gate_dd(x, num_qubits, set(op.controls) | {a}, b)
        return engine.multiply_mm(outer, engine.multiply_mm(inner, outer))
    u = gate_base_matrix(op.kind, op.params)
    return engine.gate_dd(u, num_qubits, op.controls, op.targets[0])


# ----------------------------------------------------------------------
# inversion

_SELF_ADJOINT = {
    GateKind.I,
    GateKind.X,
    GateKind.Y,
    GateKind.Z,
    GateKind.H,
    GateKind.SWAP,
}
_ADJOINT_PAIR = {
    GateKind.S: GateKind.SDG,
    GateKind.SDG: GateKind.S,
    GateKind.T: GateKind.TDG,
    GateKind.TDG: GateKind.T,
}


def adjoint_operation(op: Operation) -> Operation:
    kind, params = op.kind, op.params
    if kind in _SELF_ADJOINT:
        pass
    elif kind in _ADJOINT_PAIR:
        kind = _ADJOINT_PAIR[kind]
    elif kind in (GateKind.P, GateKind.RX, GateKind.RY, GateKind.RZ):
        params = (-params[0],)
    elif kind == GateKind.U2:
        # the adjoint stays in the u2 family: u2(phi,lam)^+ = u2(pi-lam, pi-phi)
        phi, lam = params
        params = (math.pi - lam, math.pi - phi)
    elif kind == GateKind.U3:
        theta, phi, lam = params
        params = (-theta, -lam, -phi)
    else:
        raise NotInvertibleError(f"no adjoint for {kind.value}")
    return Operation(
        kind=kind,
        targets=op.targets,
        controls=op.controls,
        params=params,
        condition=op.condition,
    )


def invert(circuit: QuantumCircuit) -> QuantumCircuit:
    """Reverse the gate order and replace each gate by its adjoint.

    Barriers keep their (mirrored) positions; any non-unitary operation
    makes the circuit non-invertible.
    """
    inverted = []
    for op in reversed(circuit.ops):
        if op.kind == GateKind.BARRIER:
            inverted.append(op)
        elif op.is_gate and op.condition is None:
            inverted.append(adjoint_operation(op))
        else:
            raise NotInvertibleError(
                f"circuit contains non-unitary operation {op.kind.value}"
            )
    return QuantumCircuit(
        num_qubits=circuit.num_qubits,
        num_clbits=circuit.num_clbits,
        name=f"{circuit.name}_inv" if circuit.name else "",
        ops=inverted,
    )


def concatenate(first: QuantumCircuit, second: QuantumCircuit) -> QuantumCircuit:
    if first.num_qubits != second.num_qubits:
        raise CircuitError("qubit count mismatch in concatenation")
    return QuantumCircuit(
        num_qubits=first.num_qubits,
        num_clbits=max(first.num_clbits, second.num_clbits),
        name=first.name,
        ops=[*first.ops, *second.ops],
    )


# ----------------------------------------------------------------------
# generators

def build_qft(n: int, include_final_swaps: bool = True) -> QuantumCircuit:
    """Quantum Fourier transform circuit on n qubits.

    Maps |k> to (1/sqrt(N)) * sum_j exp(2*pi*i*j*k/N) |j> with N = 2**n
    when the final swaps are included.
    """
    if n < 1:
        raise CircuitError("need at least one qubit")
    ops = []
    for i in range(n - 1, -1, -1):
        ops.append(Operation(GateKind.H, (i,)))
        for j in range(i - 1, -1, -1):
            angle = math.pi / (1 << (i - j))
            ops.append(Operation(GateKind.P, (i,), frozenset({j}), (angle,)))
    if include_final_swaps:
        for k in range(n // 2):
            ops.append(Operation(GateKind.SWAP, (k, n - 1 - k)))
    return QuantumCircuit(num_qubits=n, name=f"qft_{n}", ops=ops)


def build_grover(
    n_search: int, target: str, iterations: Optional[int] = None
) -> QuantumCircuit:
    """Grover search over n_search qubits with a flag qubit on top.

    The oracle marks `target` by a phase kickback: X gates select the
    pattern, then an X onto the flag qubit controlled on every search
    qubit.  The flag is prepared in |-> so the kickback flips the sign
    of the marked component while the flag itself stays unentangled,
    leaving its measured bit uniformly random.
    """
    if len(target) != n_search:
        raise CircuitError(
            f"target length {len(target)} != search qubit count {n_search}"
        )
    if any(b not in "01" for b in target):
        raise CircuitError(f"invalid target bitstring {target!r}")
    if iterations is None:
        iterations = max(1, int(math.pi / 4 * math.sqrt(2**n_search)))
    flag = n_search
    search = list(range(n_search))
    ops = [
        Operation(GateKind.X, (flag,)),
        Operation(GateKind.H, (flag,)),
    ]
    ops += [Operation(GateKind.H, (q,)) for q in search]

    # target is written q_{n-1}..q_0: qubit q matches target[n_search-1-q]
    zeros = [q for q in search if target[n_search - 1 - q] == "0"]
    for _ in range(iterations):
        # oracle
        ops += [Operation(GateKind.X, (q,)) for q in zeros]
        ops.append(Operation(GateKind.X, (flag,), frozenset(search)))
        ops += [Operation(GateKind.X, (q,)) for q in zeros]
        # diffusion on the search register
        ops += [Operation(GateKind.H, (q,)) for q in search]
        ops += [Operation(GateKind.X, (q,)) for q in search]
        if n_search == 1:
            ops.append(Operation(GateKind.Z, (0,)))
        else:
            ops.append(Operation(GateKind.Z, (0,), frozenset(search[1:])))
        ops += [Operation(GateKind.X, (q,)) for q in search]
        ops += [Operation(GateKind.H, (q,)) for q in search]
    return QuantumCircuit(num_qubits=n_search + 1, name=f"grover_{n_search}", ops=ops)
