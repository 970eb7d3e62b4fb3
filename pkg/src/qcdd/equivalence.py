"""Equivalence checking of two circuits on decision diagrams.

The Reference strategy builds both full functionality diagrams within
one engine and compares root nodes and weights, which canonicity makes
a complete check.  The alternating strategies instead keep a single
accumulator that starts at the identity: gates of the first circuit
multiply on the left, adjoints of the second circuit's gates on the
right, so the accumulator stays near the identity whenever the
interleaving keeps both sides in sync, and the final diagram is the
identity exactly when the circuits are equivalent.  RandomStimuli only
samples behaviour on random basis states, so it can refute equivalence
but never certify it.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

from .circuit import GateKind, Operation, QuantumCircuit, operation_dd
from .engine import Engine, EngineConfig, MatrixDD

__all__ = [
    "Strategy",
    "Verdict",
    "EquivalenceResult",
    "CostTable",
    "default_cost_table",
    "proportional_schedule",
    "compilation_flow_schedule",
    "is_identity",
    "random_basis_stimuli",
    "check",
]


class Strategy(Enum):
    REFERENCE = "reference"
    PROPORTIONAL = "proportional"
    COMPILATION_FLOW = "flow"
    RANDOM_STIMULI = "stimuli"


class Verdict(Enum):
    EQUIVALENT = "equivalent"
    EQUIVALENT_UP_TO_GLOBAL_PHASE = "equivalent-up-to-global-phase"
    NOT_EQUIVALENT = "not-equivalent"
    PROBABLY_EQUIVALENT = "probably-equivalent"
    NO_INFORMATION = "no-information"


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: Verdict
    peak_nodes: int
    gates_applied: tuple[int, int]
    elapsed: float
    strategy: Strategy


class MissingCostError(KeyError):
    """A compilation-flow cost lookup had no entry for a gate."""


@dataclass
class CostTable:
    """Expected compiled gate count per (gate kind, control count)."""

    costs: dict[tuple[GateKind, int], int]

    def __post_init__(self) -> None:
        for key, cost in self.costs.items():
            if cost < 1:
                raise ValueError(f"cost for {key} must be >= 1, got {cost}")

    def cost(self, op: Operation) -> int:
        key = (op.kind, len(op.controls))
        try:
            return self.costs[key]
        except KeyError:
            raise MissingCostError(
                f"no cost entry for {op.kind.value} with {len(op.controls)} control(s)"
            ) from None


def default_cost_table() -> CostTable:
    """Costs matching a typical compilation into one- and two-qubit
    native gates: plain gates and CX stay themselves, a singly-controlled
    phase expands to five gates, a swap to three CXes, a doubly-controlled
    X to fifteen gates; other controlled forms get the generic
    phase-style and Toffoli-style budgets."""
    costs: dict[tuple[GateKind, int], int] = {}
    single = (
        GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
        GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG,
        GateKind.P, GateKind.RX, GateKind.RY, GateKind.RZ,
        GateKind.U2, GateKind.U3,
    )
    for kind in single:
        costs[(kind, 0)] = 1
        costs[(kind, 1)] = 5
        costs[(kind, 2)] = 15
    costs[(GateKind.X, 1)] = 1
    costs[(GateKind.SWAP, 0)] = 3
    costs[(GateKind.SWAP, 1)] = 15
    costs[(GateKind.SWAP, 2)] = 31
    return CostTable(costs)


def proportional_schedule(n1: int, n2: int) -> tuple[int, int]:
    """Per-round application counts: floor ratios with a floor of one."""
    if n1 < 1 or n2 < 1:
        raise ValueError("gate counts must be >= 1")
    return max(1, n1 // n2), max(1, n2 // n1)


def compilation_flow_schedule(c1: QuantumCircuit, costs: CostTable) -> list[int]:
    """Right-side gate budget for each gate of the left circuit."""
    return [costs.cost(op) for op in c1.gates()]


def is_identity(engine: Engine, U: MatrixDD, up_to_global_phase: bool = False) -> bool:
    """Root-handle comparison against the identity diagram."""
    ident = engine.identity_dd(U.num_qubits)
    if U.root.node is not ident.root.node:
        return False
    w = engine.value(U.root.w)
    tol = engine.tol
    if up_to_global_phase:
        return abs(abs(w) - 1.0) < tol
    return abs(w.real - 1.0) < tol and abs(w.imag) < tol


def random_basis_stimuli(n: int, k: int, rng: random.Random) -> list[str]:
    """k uniformly drawn basis states, without repetition when possible."""
    if k < 1:
        raise ValueError("need at least one stimulus")
    if n <= 30 and k <= (1 << n):
        indices = rng.sample(range(1 << n), k)
    else:
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.add(rng.getrandbits(n))
        indices = sorted(chosen)
    return [format(i, f"0{n}b") for i in indices]


_FIDELITY_TOL = 1e-9


class _CheckFailure(ValueError):
    pass


def _require_unitary(circuit: QuantumCircuit, which: str) -> None:
    for op in circuit.ops:
        if op.kind == GateKind.BARRIER:
            continue
        if not op.is_gate or op.condition is not None:
            raise _CheckFailure(
                f"{which} contains non-unitary operation "
                f"{op.kind.value}; only unitary circuits can be checked"
            )


def check(
    c1: QuantumCircuit,
    c2: QuantumCircuit,
    strategy: Strategy = Strategy.PROPORTIONAL,
    config: EngineConfig | None = None,
    costs: CostTable | None = None,
    stimuli_count: int = 8,
    seed: int | None = None,
) -> EquivalenceResult:
    """Decide whether two unitary circuits implement the same operator."""
    _require_unitary(c1, "first circuit")
    _require_unitary(c2, "second circuit")
    if c1.num_qubits != c2.num_qubits:
        raise _CheckFailure(
            f"qubit count mismatch: {c1.num_qubits} vs {c2.num_qubits}"
        )
    start = time.perf_counter()
    if strategy == Strategy.RANDOM_STIMULI:
        result = _check_stimuli(c1, c2, config, stimuli_count, seed)
    elif strategy == Strategy.REFERENCE:
        result = _check_reference(c1, c2, config)
    else:
        result = _check_alternating(c1, c2, strategy, config, costs)
    verdict, peak, applied = result
    return EquivalenceResult(
        verdict=verdict,
        peak_nodes=peak,
        gates_applied=applied,
        elapsed=time.perf_counter() - start,
        strategy=strategy,
    )


def _verdict_from_roots(engine: Engine, a: MatrixDD, b: MatrixDD) -> Verdict:
    if a.root.node is not b.root.node:
        return Verdict.NOT_EQUIVALENT
    wa = engine.value(a.root.w)
    wb = engine.value(b.root.w)
    tol = engine.tol
    if abs(wa.real - wb.real) < tol and abs(wa.imag - wb.imag) < tol:
        return Verdict.EQUIVALENT
    if abs(abs(wa) - abs(wb)) < tol:
        return Verdict.EQUIVALENT_UP_TO_GLOBAL_PHASE
    return Verdict.NOT_EQUIVALENT


def _check_reference(
    c1: QuantumCircuit, c2: QuantumCircuit, config: EngineConfig | None
) -> tuple[Verdict, int, tuple[int, int]]:
    engine = Engine(config)
    n = c1.num_qubits
    peak = 0
    built = []
    counts = []
    for circuit in (c1, c2):
        U = engine.identity_dd(n)
        engine.inc_ref(U.root)
        peak = max(peak, engine.node_count(U))
        applied = 0
        for op in circuit.gates():
            nxt = engine.multiply_mm(operation_dd(engine, op, n), U)
            engine.inc_ref(nxt.root)
            engine.dec_ref(U.root)
            U = nxt
            applied += 1
            peak = max(peak, engine.node_count(U))
            engine.maybe_collect()
        built.append(U)
        counts.append(applied)
    verdict = _verdict_from_roots(engine, built[0], built[1])
    return verdict, peak, (counts[0], counts[1])


def _alternation_order(
    c1: QuantumCircuit,
    c2: QuantumCircuit,
    strategy: Strategy,
    costs: CostTable | None,
) -> Iterator[tuple[str, Operation]]:
    """Yield ('L', gate) / ('R', gate) in the strategy's interleaving."""
    g1 = c1.gates()
    g2 = c2.gates()
    i1 = i2 = 0
    if strategy == Strategy.PROPORTIONAL:
        if not g1 or not g2:
            ratio1 = ratio2 = 1
        else:
            ratio1, ratio2 = proportional_schedule(len(g1), len(g2))
        while i1 < len(g1) or i2 < len(g2):
            for _ in range(ratio1):
                if i1 < len(g1):
                    yield "L", g1[i1]
                    i1 += 1
            for _ in range(ratio2):
                if i2 < len(g2):
                    yield "R", g2[i2]
                    i2 += 1
    elif strategy == Strategy.COMPILATION_FLOW:
        table = costs or default_cost_table()
        budgets = compilation_flow_schedule(c1, table)
        for budget, gate in zip(budgets, g1):
            yield "L", gate
            for _ in range(budget):
                if i2 < len(g2):
                    yield "R", g2[i2]
                    i2 += 1
        while i2 < len(g2):
            yield "R", g2[i2]
            i2 += 1
    else:  # pragma: no cover - guarded by check()
        raise ValueError(f"not an alternating strategy: {strategy}")


def _check_alternating(
    c1: QuantumCircuit,
    c2: QuantumCircuit,
    strategy: Strategy,
    config: EngineConfig | None,
    costs: CostTable | None,
) -> tuple[Verdict, int, tuple[int, int]]:
    engine = Engine(config)
    n = c1.num_qubits
    A = engine.identity_dd(n)
    engine.inc_ref(A.root)
    peak = engine.node_count(A)
    left = right = 0
    for side, op in _alternation_order(c1, c2, strategy, costs):
        gate = operation_dd(engine, op, n)
        if side == "L":
            nxt = engine.multiply_mm(gate, A)
            left += 1
        else:
            nxt = engine.multiply_mm(A, engine.conjugate_transpose(gate))
            right += 1
        engine.inc_ref(nxt.root)
        engine.dec_ref(A.root)
        A = nxt
        peak = max(peak, engine.node_count(A))
        engine.maybe_collect()
    if is_identity(engine, A):
        verdict = Verdict.EQUIVALENT
    elif is_identity(engine, A, up_to_global_phase=True):
        verdict = Verdict.EQUIVALENT_UP_TO_GLOBAL_PHASE
    else:
        verdict = Verdict.NOT_EQUIVALENT
    return verdict, peak, (left, right)


def _check_stimuli(
    c1: QuantumCircuit,
    c2: QuantumCircuit,
    config: EngineConfig | None,
    stimuli_count: int,
    seed: int | None,
) -> tuple[Verdict, int, tuple[int, int]]:
    n = c1.num_qubits
    base = config or EngineConfig()
    rng = random.Random(base.seed if seed is None else seed)
    stimuli = random_basis_stimuli(n, stimuli_count, rng)
    peak = 0
    left = right = 0
    for bits in stimuli:
        # independent engine per stimulus: runs are isolated and could
        # execute in parallel without sharing handles
        engine = Engine(base)
        states = []
        for circuit in (c1, c2):
            v = engine.basis_state(n, bits)
            for op in circuit.gates():
                v = engine.multiply_mv(operation_dd(engine, op, n), v)
                peak = max(peak, engine.node_count(v))
                if circuit is c1:
                    left += 1
                else:
                    right += 1
            states.append(v)
        fidelity = abs(engine.inner_product(states[0], states[1]))
        if abs(1.0 - fidelity) > _FIDELITY_TOL:
            return Verdict.NOT_EQUIVALENT, peak, (left, right)
    return Verdict.PROBABLY_EQUIVALENT, peak, (left, right)
