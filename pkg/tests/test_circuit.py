"""Circuit IR tests: operations, gate matrices, inversion, generators."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcdd.circuit import (
    CircuitError,
    GateKind,
    NotInvertibleError,
    Operation,
    PARAM_ARITY,
    QuantumCircuit,
    build_grover,
    build_qft,
    concatenate,
    gate_base_matrix,
    invert,
    operation_dd,
)
from qcdd.engine import Engine

from dense_ref import dense_run, dense_unitary, random_circuit


def test_operation_validation():
    with pytest.raises(CircuitError):
        Operation(GateKind.H, (0,), params=(1.0,))
    with pytest.raises(CircuitError):
        Operation(GateKind.SWAP, (0,))
    with pytest.raises(CircuitError):
        Operation(GateKind.X, (0,), controls=frozenset({0}))
    with pytest.raises(CircuitError):
        Operation(GateKind.MEASURE, (0,))
    with pytest.raises(CircuitError):
        Operation(GateKind.MEASURE, (0,), clbit=0, condition=(0, 1, 1))


def test_circuit_validates_indices():
    with pytest.raises(CircuitError):
        QuantumCircuit(num_qubits=1, ops=[Operation(GateKind.X, (3,))])
    with pytest.raises(CircuitError):
        QuantumCircuit(
            num_qubits=2, num_clbits=1,
            ops=[Operation(GateKind.MEASURE, (0,), clbit=4)],
        )


def test_nops_excludes_barriers():
    circuit = QuantumCircuit(
        num_qubits=2,
        ops=[
            Operation(GateKind.H, (0,)),
            Operation(GateKind.BARRIER, (0, 1)),
            Operation(GateKind.X, (1,)),
        ],
    )
    assert circuit.nops() == 2
    assert len(circuit.gates()) == 2


# ----------------------------------------------------------------------
# gate matrices


def test_hadamard_matrix():
    h = gate_base_matrix(GateKind.H)
    expect = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.max(np.abs(h - expect)) == 0


def test_phase_gate_matches_s_and_t():
    s = gate_base_matrix(GateKind.P, (math.pi / 2,))
    assert np.max(np.abs(s - np.diag([1, 1j]))) < 1e-15
    assert np.max(np.abs(s - gate_base_matrix(GateKind.S))) < 1e-15
    t = gate_base_matrix(GateKind.P, (math.pi / 4,))
    assert np.max(np.abs(t - gate_base_matrix(GateKind.T))) < 1e-15


def test_swap_matrix_is_the_exchange_permutation():
    m = gate_base_matrix(GateKind.SWAP)
    expect = np.zeros((4, 4))
    expect[0, 0] = expect[3, 3] = expect[1, 2] = expect[2, 1] = 1
    assert np.array_equal(m, expect)


def test_param_arity_enforced():
    with pytest.raises(CircuitError):
        gate_base_matrix(GateKind.P, ())
    with pytest.raises(CircuitError):
        gate_base_matrix(GateKind.H, (0.5,))


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from(sorted(PARAM_ARITY | {k: 0 for k in GateKind if k in
        (GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
         GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.SWAP)}, key=lambda k: k.value)),
    data=st.data(),
)
def test_every_gate_matrix_is_unitary(kind, data):
    params = tuple(
        data.draw(st.floats(-10, 10, allow_nan=False))
        for _ in range(PARAM_ARITY.get(kind, 0))
    )
    m = gate_base_matrix(kind, params)
    eye = np.eye(m.shape[0])
    assert np.max(np.abs(m.conj().T @ m - eye)) < 1e-14


# ----------------------------------------------------------------------
# inversion


def test_invert_reverses_and_adjoints():
    circuit = QuantumCircuit(
        num_qubits=2,
        ops=[
            Operation(GateKind.S, (0,)),
            Operation(GateKind.BARRIER, (0, 1)),
            Operation(GateKind.P, (1,), frozenset({0}), (0.3,)),
        ],
    )
    inv = invert(circuit)
    assert [op.kind for op in inv.ops] == [GateKind.P, GateKind.BARRIER, GateKind.SDG]
    assert inv.ops[0].params == (-0.3,)


def test_invert_is_an_involution():
    rng = random.Random(61)
    for _ in range(20):
        circuit = random_circuit(rng, rng.randint(1, 4), rng.randint(1, 12))
        assert invert(invert(circuit)).same_structure(circuit)


def test_invert_h_only_circuit_is_itself():
    circuit = QuantumCircuit(num_qubits=1, ops=[Operation(GateKind.H, (0,))])
    assert invert(circuit).same_structure(circuit)


def test_invert_rejects_measurement():
    circuit = QuantumCircuit(
        num_qubits=1, num_clbits=1,
        ops=[Operation(GateKind.MEASURE, (0,), clbit=0)],
    )
    with pytest.raises(NotInvertibleError):
        invert(circuit)


def test_invert_adjoint_is_dense_inverse():
    rng = random.Random(67)
    for _ in range(10):
        n = rng.randint(1, 4)
        circuit = random_circuit(rng, n, 8)
        U = dense_unitary(circuit)
        V = dense_unitary(invert(circuit))
        assert np.max(np.abs(U @ V - np.eye(1 << n))) < 1e-12


def test_qft_concatenated_with_inverse_restores_basis_states():
    eng = Engine()
    qft = build_qft(3)
    loop = concatenate(qft, invert(qft))
    for idx in range(8):
        bits = format(idx, "03b")
        state = eng.basis_state(3, bits)
        for op in loop.gates():
            state = eng.multiply_mv(operation_dd(eng, op, 3), state)
        assert abs(eng.get_amplitude(state, bits) - 1) < 1e-10


# ----------------------------------------------------------------------
# generators


def test_qft3_structure():
    qft = build_qft(3)
    assert len(qft.ops) == 7
    kinds = [op.kind for op in qft.ops]
    assert kinds.count(GateKind.H) == 3
    assert kinds.count(GateKind.P) == 3
    assert kinds.count(GateKind.SWAP) == 1
    assert all(len(op.controls) == 1 for op in qft.ops if op.kind == GateKind.P)


def test_qft1_is_a_single_hadamard():
    qft = build_qft(1)
    assert len(qft.ops) == 1 and qft.ops[0].kind == GateKind.H


def test_qft3_functionality_matrix():
    U = dense_unitary(build_qft(3))
    omega = np.exp(1j * np.pi / 4)
    expect = np.array(
        [[omega ** (j * k) / np.sqrt(8) for k in range(8)] for j in range(8)]
    )
    assert np.max(np.abs(U - expect)) < 1e-12


def test_qft_on_zero_state_is_uniform_positive():
    for n in (1, 2, 4):
        v = dense_run(build_qft(n))
        expect = np.full(1 << n, 1 / math.sqrt(1 << n), dtype=complex)
        assert np.max(np.abs(v - expect)) < 1e-12


def test_grover_structure_and_default_iterations():
    g = build_grover(2, "00")
    assert g.num_qubits == 3
    assert g.name == "grover_2"
    assert max(1, int(math.pi / 4 * math.sqrt(8))) == 2
    assert sum(1 for op in build_grover(3, "000").ops if op.kind == GateKind.X and op.controls) == 2


def test_grover_target_length_checked():
    with pytest.raises(CircuitError):
        build_grover(2, "0")


def test_grover_concentrates_on_target():
    for target in ("00", "11", "10"):
        v = dense_run(build_grover(2, target))
        probs = {format(i, "03b"): abs(a) ** 2 for i, a in enumerate(v)}
        hits = {b: p for b, p in probs.items() if p > 1e-9}
        assert set(hits) == {"0" + target, "1" + target}
        assert abs(hits["0" + target] - 0.5) < 1e-9
        assert abs(hits["1" + target] - 0.5) < 1e-9
