"""Engine-level tests: interning, normalization, construction, arithmetic,
queries, canonicity, and table hygiene."""

import math
import random

import numpy as np
import pytest

from qcdd.circuit import GateKind, gate_base_matrix, operation_dd
from qcdd.engine import Edge, Engine, EngineConfig, MatrixDD, VectorDD, ZERO, ONE

from dense_ref import (
    bitstring,
    dense_operator,
    dense_run,
    dense_unitary,
    random_circuit,
    random_operation,
)

SQ2 = 1 / math.sqrt(2)


@pytest.fixture
def eng() -> Engine:
    return Engine()


def bell_state(eng: Engine) -> VectorDD:
    state = eng.basis_state(2, "00")
    h = eng.gate_dd(gate_base_matrix(GateKind.H), 2, (), 0)
    cx = eng.gate_dd(gate_base_matrix(GateKind.X), 2, {0}, 1)
    return eng.multiply_mv(cx, eng.multiply_mv(h, state))


# ----------------------------------------------------------------------
# complex interning


def test_intern_zero_is_canonical(eng):
    assert eng.intern_complex(0.0, 0.0) == ZERO
    assert eng.intern_complex(1.0, 0.0) == ONE


def test_intern_merges_values_within_tolerance(eng):
    a = eng.intern_complex(SQ2, 0.0)
    b = eng.intern_complex(SQ2 + eng.tol / 10, 0.0)
    assert a == b


def test_intern_keeps_distinct_values_apart(eng):
    a = eng.intern_complex(0.5, 0.5)
    b = eng.intern_complex(0.5, -0.5)
    assert a != b


def test_intern_snaps_tiny_components_to_zero(eng):
    assert eng.intern_complex(eng.tol / 2, 0.0) == ZERO


def test_intern_rejects_non_finite(eng):
    with pytest.raises(ValueError):
        eng.intern_complex(float("inf"), 0.0)
    with pytest.raises(ValueError):
        eng.intern_complex(0.0, float("nan"))


# ----------------------------------------------------------------------
# node construction and normalization


def test_vector_node_of_two_zero_edges_is_zero(eng):
    assert eng.make_vector_node(0, eng.zero_edge, eng.zero_edge) == eng.zero_edge


def test_vector_node_l2_normalization(eng):
    e = eng.make_vector_node(0, eng.one_edge, eng.one_edge)
    assert abs(eng.value(e.w) - math.sqrt(2)) < 1e-14
    w0, w1 = (eng.value(c.w) for c in e.node.edges)
    assert abs(w0 - SQ2) < 1e-14 and abs(w1 - SQ2) < 1e-14


def test_vector_node_phase_canonicalization(eng):
    # a global phase on the successors moves entirely to the edge factor
    h = eng.intern_complex(0.0, SQ2)  # i/sqrt(2)
    e = eng.make_vector_node(0, Edge(eng.terminal, h), Edge(eng.terminal, h))
    w0 = eng.value(e.node.edges[0].w)
    assert abs(w0 - SQ2) < 1e-14 and abs(w0.imag) < 1e-14
    assert abs(eng.value(e.w) - 1j) < 1e-14


def test_bell_construction_by_hand_matches_example(eng):
    ket0 = eng.make_vector_node(0, eng.one_edge, eng.zero_edge)
    ket1 = eng.make_vector_node(0, eng.zero_edge, eng.one_edge)
    root = eng.make_vector_node(1, ket0, ket1)
    bell = VectorDD(root, 2)
    # root weight sqrt(2) over weights 1/sqrt(2): paths 00 and 11 at 1/sqrt(2) each
    dd = bell_state(eng)
    assert abs(eng.get_amplitude(bell, "00") / eng.value(root.w) * math.sqrt(2) - 1) < 1e-12
    assert root.node is dd.root.node


def test_matrix_node_hadamard_weights(eng):
    h = gate_base_matrix(GateKind.H)
    e = eng.gate_dd(h, 1, (), 0).root
    assert abs(eng.value(e.w) - SQ2) < 1e-14
    weights = [eng.value(c.w) for c in e.node.edges]
    assert weights == [1, 1, 1, -1]


def test_matrix_node_all_zero_edges(eng):
    z = eng.zero_edge
    assert eng.make_matrix_node(0, (z, z, z, z)) == z


def test_cnot_dd_shape(eng):
    cx = eng.gate_dd(gate_base_matrix(GateKind.X), 2, {1}, 0)
    root = cx.root.node
    assert root.edges[1].w == ZERO and root.edges[2].w == ZERO
    ident = root.edges[0].node
    flip = root.edges[3].node
    assert [c.w != ZERO for c in ident.edges] == [True, False, False, True]
    assert [c.w != ZERO for c in flip.edges] == [False, True, True, False]


def test_successor_level_is_checked(eng):
    deep = eng.basis_state(2, "00").root
    with pytest.raises(ValueError):
        eng.make_vector_node(4, deep, eng.zero_edge)


# ----------------------------------------------------------------------
# constructors


def test_basis_state_amplitudes_and_size(eng):
    dd = eng.basis_state(2, "00")
    assert eng.get_amplitude(dd, "00") == 1
    assert eng.node_count(dd) == 2
    dd = eng.basis_state(3, "101")
    assert eng.get_amplitude(dd, "101") == 1
    assert eng.get_amplitude(dd, "100") == 0
    dd = eng.basis_state(1, "1")
    assert dd.root.node.edges[0].w == ZERO


def test_basis_state_validates_length(eng):
    with pytest.raises(ValueError):
        eng.basis_state(2, "000")


def test_identity_dd_is_linear_in_size(eng):
    assert eng.node_count(eng.identity_dd(1)) == 1
    assert eng.node_count(eng.identity_dd(10)) == 10


def test_identity_absorbs_in_multiplication(eng):
    qft_ops = [random_operation(random.Random(7), 3) for _ in range(5)]
    U = eng.identity_dd(3)
    for op in qft_ops:
        U = eng.multiply_mm(operation_dd(eng, op, 3), U)
    again = eng.multiply_mm(eng.identity_dd(3), U)
    assert again.root == U.root


def test_sharing_bounds_up_to_128_qubits(eng):
    for n in (1, 2, 7, 32, 128):
        assert eng.node_count(eng.identity_dd(n)) == n
        bits = "".join("01"[(i * 7) % 2] for i in range(n))
        assert eng.node_count(eng.basis_state(n, bits)) == n


def test_gate_dd_identity_phase_gate(eng):
    p0 = eng.gate_dd(gate_base_matrix(GateKind.P, (0.0,)), 3, (), 1)
    assert p0.root == eng.identity_dd(3).root


def test_gate_dd_rejects_overlap(eng):
    with pytest.raises(ValueError):
        eng.gate_dd(gate_base_matrix(GateKind.X), 2, {0}, 0)


def test_gate_dd_matches_dense_operator(eng):
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(1, 4)
        op = random_operation(rng, n)
        dd = operation_dd(eng, op, n)
        expect = dense_operator(op, n)
        got = np.array(eng.matrix_to_dense(dd))
        assert np.max(np.abs(got - expect)) < 1e-12


def test_kron_hadamard_identity(eng):
    h1 = eng.gate_dd(gate_base_matrix(GateKind.H), 1, (), 0)
    i1 = eng.identity_dd(1)
    k = eng.kron(h1, i1)
    direct = eng.gate_dd(gate_base_matrix(GateKind.H), 2, (), 1)
    assert k.root == direct.root
    assert abs(eng.value(k.root.w) - SQ2) < 1e-14


def test_kron_identities_and_zero(eng):
    i2 = eng.identity_dd(2)
    i1 = eng.identity_dd(1)
    assert eng.kron(i1, i2).root == eng.identity_dd(3).root
    zero = MatrixDD(eng.zero_edge, 1)
    assert eng.kron(i1, zero).root.w == ZERO
    assert eng.kron(zero, i1).root.w == ZERO


def test_kron_matches_dense(eng):
    rng = random.Random(11)
    for _ in range(10):
        na, nb = rng.randint(1, 2), rng.randint(1, 2)
        A = random_circuit(rng, na, 3)
        B = random_circuit(rng, nb, 3)
        da, db = dense_unitary(A), dense_unitary(B)
        dd = eng.kron(
            eng.matrix_dd_from_dense(da.tolist(), na),
            eng.matrix_dd_from_dense(db.tolist(), nb),
        )
        got = np.array(eng.matrix_to_dense(dd))
        assert np.max(np.abs(got - np.kron(da, db))) < 1e-12


# ----------------------------------------------------------------------
# arithmetic


def test_add_zero_returns_identity_of_argument(eng):
    bell = bell_state(eng)
    zero = VectorDD(eng.zero_edge, 2)
    assert eng.add(bell, zero).root == bell.root
    assert eng.add(zero, bell).root == bell.root


def test_add_basis_states_gives_bell_shape(eng):
    v00 = eng.basis_state(2, "00")
    v11 = eng.basis_state(2, "11")
    total = eng.add(v00, v11)
    bell = bell_state(eng)
    assert total.root.node is bell.root.node
    assert abs(eng.value(total.root.w) - math.sqrt(2)) < 1e-12


def test_add_random_vectors_matches_dense(eng):
    rng = random.Random(5)
    for _ in range(10):
        n = 4
        a = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(1 << n)]
        b = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(1 << n)]
        da = eng.vector_dd_from_dense(a, n)
        db = eng.vector_dd_from_dense(b, n)
        total = eng.add(da, db)
        got = eng.vector_to_dense(total)
        expect = [x + y for x, y in zip(a, b)]
        assert max(abs(g - e) for g, e in zip(got, expect)) < 1e-10


def test_add_matrices_matches_dense(eng):
    rng = random.Random(13)
    A = dense_unitary(random_circuit(rng, 3, 5))
    B = dense_unitary(random_circuit(rng, 3, 5))
    total = eng.add(
        eng.matrix_dd_from_dense(A.tolist(), 3),
        eng.matrix_dd_from_dense(B.tolist(), 3),
    )
    got = np.array(eng.matrix_to_dense(total))
    assert np.max(np.abs(got - (A + B))) < 1e-10


def test_add_size_mismatch(eng):
    with pytest.raises(ValueError):
        eng.add(eng.basis_state(2, "00"), eng.basis_state(3, "000"))
    with pytest.raises(TypeError):
        eng.add(eng.basis_state(2, "00"), eng.identity_dd(2))


def test_multiply_mv_identity_returns_same_root(eng):
    bell = bell_state(eng)
    out = eng.multiply_mv(eng.identity_dd(2), bell)
    assert out.root == bell.root


def test_multiply_mv_bell_pipeline(eng):
    bell = bell_state(eng)
    expect = [SQ2, 0, 0, SQ2]
    got = eng.vector_to_dense(bell)
    assert max(abs(g - e) for g, e in zip(got, expect)) < 1e-12


def test_multiply_mv_random_circuit_matches_dense(eng):
    rng = random.Random(17)
    n = 6
    circuit = random_circuit(rng, n, 12)
    state = eng.basis_state(n, "0" * n)
    for op in circuit.gates():
        state = eng.multiply_mv(operation_dd(eng, op, n), state)
    got = eng.vector_to_dense(state)
    expect = dense_run(circuit)
    assert max(abs(g - e) for g, e in zip(got, expect)) < 1e-10


def test_multiply_mm_identity_and_involution(eng):
    h = eng.gate_dd(gate_base_matrix(GateKind.H), 2, (), 1)
    assert eng.multiply_mm(h, eng.identity_dd(2)).root == h.root
    assert eng.multiply_mm(eng.identity_dd(2), h).root == h.root
    hh = eng.multiply_mm(h, h)
    assert hh.root == eng.identity_dd(2).root


def test_multiply_mm_matches_dense(eng):
    rng = random.Random(23)
    for _ in range(8):
        n = rng.randint(2, 4)
        A = random_circuit(rng, n, 6)
        B = random_circuit(rng, n, 6)
        da, db = dense_unitary(A), dense_unitary(B)
        prod = eng.multiply_mm(
            eng.matrix_dd_from_dense(da.tolist(), n),
            eng.matrix_dd_from_dense(db.tolist(), n),
        )
        got = np.array(eng.matrix_to_dense(prod))
        assert np.max(np.abs(got - da @ db)) < 1e-10


def test_conjugate_transpose_identity_and_unitarity(eng):
    assert eng.conjugate_transpose(eng.identity_dd(3)).root == eng.identity_dd(3).root
    s = eng.gate_dd(gate_base_matrix(GateKind.S), 2, (), 0)
    prod = eng.multiply_mm(eng.conjugate_transpose(s), s)
    assert prod.root == eng.identity_dd(2).root


def test_conjugate_transpose_matches_dense_adjoint(eng):
    rng = random.Random(29)
    for _ in range(8):
        n = rng.randint(1, 4)
        U = dense_unitary(random_circuit(rng, n, 8))
        dd = eng.conjugate_transpose(eng.matrix_dd_from_dense(U.tolist(), n))
        got = np.array(eng.matrix_to_dense(dd))
        assert np.max(np.abs(got - U.conj().T)) < 1e-10


def test_unitarity_preserved_for_every_gate_kind(eng):
    rng = random.Random(31)
    for _ in range(30):
        n = rng.randint(1, 4)
        op = random_operation(rng, n)
        U = operation_dd(eng, op, n)
        prod = eng.multiply_mm(eng.conjugate_transpose(U), U)
        assert prod.root.node is eng.identity_dd(n).root.node
        assert abs(eng.value(prod.root.w) - 1) < 1e-10


# ----------------------------------------------------------------------
# queries


def test_get_amplitude_bell(eng):
    bell = bell_state(eng)
    assert abs(eng.get_amplitude(bell, "00") - SQ2) < 1e-12
    assert eng.get_amplitude(bell, "01") == 0


def test_get_amplitude_qft_column(eng):
    from qcdd.circuit import build_qft

    state = eng.basis_state(3, "001")
    for op in build_qft(3).gates():
        state = eng.multiply_mv(operation_dd(eng, op, 3), state)
    omega = np.exp(1j * np.pi / 4)
    assert abs(eng.get_amplitude(state, "011") - omega**3 / np.sqrt(8)) < 1e-12


def test_node_count_values(eng):
    bell = bell_state(eng)
    assert eng.node_count(bell) == 3
    assert eng.node_count(eng.basis_state(5, "10110")) == 5


def test_inner_product_cases(eng):
    bell = bell_state(eng)
    assert abs(eng.inner_product(bell, bell) - 1) < 1e-12
    v00 = eng.basis_state(2, "00")
    assert abs(eng.inner_product(v00, bell) - SQ2) < 1e-12


def test_inner_product_matches_dense(eng):
    rng = random.Random(37)
    n = 5
    for _ in range(5):
        c1 = random_circuit(rng, n, 8)
        c2 = random_circuit(rng, n, 8)
        s1 = eng.basis_state(n, "0" * n)
        s2 = eng.basis_state(n, "0" * n)
        for op in c1.gates():
            s1 = eng.multiply_mv(operation_dd(eng, op, n), s1)
        for op in c2.gates():
            s2 = eng.multiply_mv(operation_dd(eng, op, n), s2)
        expect = np.vdot(dense_run(c1), dense_run(c2))
        assert abs(eng.inner_product(s1, s2) - expect) < 1e-10


def test_normalization_invariant_over_random_states(eng):
    rng = random.Random(41)
    n = 5
    circuit = random_circuit(rng, n, 15)
    state = eng.basis_state(n, "0" * n)
    for op in circuit.gates():
        state = eng.multiply_mv(operation_dd(eng, op, n), state)
    seen = set()
    stack = [state.root.node]
    while stack:
        node = stack.pop()
        if node is eng.terminal or node.serial in seen:
            continue
        seen.add(node.serial)
        norm = sum(abs(eng.value(e.w)) ** 2 for e in node.edges)
        assert abs(norm - 1) < 1e-10
        stack.extend(e.node for e in node.edges if e.w != ZERO)


def test_matrix_normalization_invariant(eng):
    rng = random.Random(43)
    U = dense_unitary(random_circuit(rng, 3, 10))
    dd = eng.matrix_dd_from_dense(U.tolist(), 3)
    stack, seen = [dd.root.node], set()
    while stack:
        node = stack.pop()
        if node is eng.terminal or node.serial in seen:
            continue
        seen.add(node.serial)
        top = max(abs(eng.value(e.w)) for e in node.edges)
        assert abs(top - 1) < 1e-10
        stack.extend(e.node for e in node.edges if e.w != ZERO)


# ----------------------------------------------------------------------
# canonicity


def test_canonicity_vector_construction_orders(eng):
    rng = random.Random(47)
    n = 4
    for _ in range(20):
        amps = np.array(
            [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(1 << n)]
        )
        amps /= np.linalg.norm(amps)
        direct = eng.vector_dd_from_dense(amps.tolist(), n)
        order = list(range(1 << n))
        rng.shuffle(order)
        total = VectorDD(eng.zero_edge, n)
        for idx in order:
            if amps[idx] == 0:
                continue
            basis = eng.basis_state(n, bitstring(idx, n))
            scaled = VectorDD(
                Edge(basis.root.node, eng._intern(complex(amps[idx]))), n
            )
            total = eng.add(total, scaled)
        assert total.root.node is direct.root.node
        assert abs(eng.value(total.root.w) - eng.value(direct.root.w)) < 1e-9


def test_canonicity_matrix_construction_orders(eng):
    rng = random.Random(53)
    for _ in range(10):
        n = rng.randint(1, 4)
        circuit = random_circuit(rng, n, 8)
        dense = dense_unitary(circuit)
        a = eng.matrix_dd_from_dense(dense.tolist(), n)
        b = eng.matrix_dd_from_dense(dense.tolist(), n, reverse_order=True)
        chain = eng.identity_dd(n)
        for op in circuit.gates():
            chain = eng.multiply_mm(operation_dd(eng, op, n), chain)
        assert a.root.node is b.root.node
        assert abs(eng.value(a.root.w) - eng.value(b.root.w)) < 1e-9
        assert chain.root.node is a.root.node
        assert abs(eng.value(chain.root.w) - eng.value(a.root.w)) < 1e-9


# ----------------------------------------------------------------------
# configuration and reclamation


def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        EngineConfig(unique_table_buckets=1000)
    with pytest.raises(ValueError):
        EngineConfig(compute_table_entries=3)


def test_config_file_and_env(tmp_path, monkeypatch):
    path = tmp_path / "engine.conf"
    path.write_text(
        "# engine settings\ntolerance = 1e-10\nunique_table_buckets = 4096\nseed = 7\n"
    )
    config = EngineConfig.from_file(path)
    assert config.tolerance == 1e-10
    assert config.unique_table_buckets == 4096
    assert config.seed == 7
    monkeypatch.setenv("QCDD_SEED", "99")
    merged = EngineConfig.from_env(config)
    assert merged.seed == 99 and merged.tolerance == 1e-10
    with pytest.raises(FileNotFoundError):
        EngineConfig.from_file(tmp_path / "missing.conf")


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("knob = 12\n")
    with pytest.raises(ValueError):
        EngineConfig.from_file(path)


def test_reference_count_hygiene(eng):
    bell = bell_state(eng)
    eng.inc_ref(bell.root)
    eng.collect_garbage()
    baseline = eng.unique_table_size()
    assert baseline == 3
    rng = random.Random(59)
    for _ in range(5):
        circuit = random_circuit(rng, 4, 6)
        state = eng.basis_state(4, "0000")
        for op in circuit.gates():
            state = eng.multiply_mv(operation_dd(eng, op, 4), state)
    eng.collect_garbage()
    assert eng.unique_table_size() == baseline
    assert abs(eng.get_amplitude(bell, "00") - SQ2) < 1e-12
    eng.dec_ref(bell.root)
    eng.collect_garbage()
    assert eng.unique_table_size() == 0


def test_canonicity_survives_collection(eng):
    bell = bell_state(eng)
    eng.inc_ref(bell.root)
    eng.collect_garbage()
    rebuilt = bell_state(eng)
    assert rebuilt.root == bell.root
