"""Brute-force dense reference implementations used as oracles.

Everything here works on explicit numpy arrays indexed by basis state,
deliberately sharing nothing with the diagram engine except the defining
2x2/4x4 gate matrices.
"""

from __future__ import annotations

import random

import numpy as np

from qcdd.circuit import (
    GateKind,
    Operation,
    PARAM_ARITY,
    QuantumCircuit,
    gate_base_matrix,
)

UNITARY_GATE_KINDS = [
    GateKind.I,
    GateKind.X,
    GateKind.Y,
    GateKind.Z,
    GateKind.H,
    GateKind.S,
    GateKind.SDG,
    GateKind.T,
    GateKind.TDG,
    GateKind.P,
    GateKind.RX,
    GateKind.RY,
    GateKind.RZ,
    GateKind.U2,
    GateKind.U3,
    GateKind.SWAP,
]


def dense_operator(op: Operation, n: int) -> np.ndarray:
    """Full 2**n x 2**n matrix of one operation, built index by index."""
    dim = 1 << n
    M = np.zeros((dim, dim), dtype=complex)
    controls = op.controls
    if op.kind == GateKind.SWAP:
        a, b = op.targets
        for col in range(dim):
            if all((col >> c) & 1 for c in controls):
                ca, cb = (col >> a) & 1, (col >> b) & 1
                row = (col & ~(1 << a) & ~(1 << b)) | (cb << a) | (ca << b)
                M[row, col] = 1
            else:
                M[col, col] = 1
        return M
    u = gate_base_matrix(op.kind, op.params)
    t = op.targets[0]
    for col in range(dim):
        if all((col >> c) & 1 for c in controls):
            in_bit = (col >> t) & 1
            for out_bit in (0, 1):
                row = (col & ~(1 << t)) | (out_bit << t)
                M[row, col] = u[out_bit, in_bit]
        else:
            M[col, col] = 1
    return M


def dense_unitary(circuit: QuantumCircuit) -> np.ndarray:
    """Product of all gate operators in circuit order."""
    dim = 1 << circuit.num_qubits
    U = np.eye(dim, dtype=complex)
    for op in circuit.gates():
        U = dense_operator(op, circuit.num_qubits) @ U
    return U


def dense_run(circuit: QuantumCircuit, start: int = 0) -> np.ndarray:
    """Apply all gates to a basis state given as an integer index."""
    v = np.zeros(1 << circuit.num_qubits, dtype=complex)
    v[start] = 1
    for op in circuit.gates():
        v = dense_operator(op, circuit.num_qubits) @ v
    return v


def dense_marginal_p0(state: np.ndarray, qubit: int, n: int) -> float:
    return float(
        sum(abs(a) ** 2 for i, a in enumerate(state) if not (i >> qubit) & 1)
    )


def bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def equivalence_verdict(U1: np.ndarray, U2: np.ndarray, tol: float = 1e-9) -> str:
    """'equivalent', 'equivalent-up-to-global-phase', or 'not-equivalent'."""
    if np.max(np.abs(U1 - U2)) < tol:
        return "equivalent"
    trace = np.trace(U1 @ U2.conj().T)
    if abs(trace) > tol:
        phase = trace / abs(trace)
        if np.max(np.abs(U1 - phase * U2)) < tol:
            return "equivalent-up-to-global-phase"
    return "not-equivalent"


def random_operation(rng: random.Random, n: int, max_controls: int = 2) -> Operation:
    kinds = UNITARY_GATE_KINDS if n >= 2 else [
        k for k in UNITARY_GATE_KINDS if k != GateKind.SWAP
    ]
    kind = rng.choice(kinds)
    params = tuple(
        rng.uniform(-2 * np.pi, 2 * np.pi) for _ in range(PARAM_ARITY.get(kind, 0))
    )
    n_targets = 2 if kind == GateKind.SWAP else 1
    available = list(range(n))
    rng.shuffle(available)
    targets = tuple(available[:n_targets])
    room = n - n_targets
    n_controls = rng.randint(0, min(max_controls, room)) if room else 0
    controls = frozenset(available[n_targets : n_targets + n_controls])
    return Operation(kind, targets, controls, params)


def random_circuit(
    rng: random.Random, n: int, n_gates: int, max_controls: int = 2
) -> QuantumCircuit:
    ops = [random_operation(rng, n, max_controls) for _ in range(n_gates)]
    return QuantumCircuit(num_qubits=n, name="random", ops=ops)
