"""Circuit execution on decision diagrams.

A run owns its engine and advances one operation at a time.  Unitary
gates multiply onto the state; barriers only mark breakpoints; measure
and reset on a superposed qubit suspend the run with the branch
probabilities until a decision (chosen or sampled) collapses the state.
Collapse is irreversible, so a snapshot checkpoint is taken before each
resolved decision and stepping backward across it restores the
checkpoint instead of applying an adjoint.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .circuit import (
    GateKind,
    Operation,
    QuantumCircuit,
    adjoint_operation,
    gate_base_matrix,
    operation_dd,
)
from .engine import Engine, EngineConfig, VectorDD


class StepStatus(Enum):
    ADVANCED = "advanced"
    NEEDS_DECISION = "needs-decision"
    FINISHED = "finished"


@dataclass(frozen=True)
class StepOutcome:
    status: StepStatus
    pending: Optional["PendingDecision"] = None
    crossed_barrier: bool = False


@dataclass(frozen=True)
class PendingDecision:
    """A suspended measure/reset with the qubit's branch probabilities."""

    kind: GateKind
    qubit: int
    p0: float
    p1: float
    clbit: Optional[int] = None


@dataclass
class Histogram:
    counts: dict[str, int]
    shots: int


@dataclass
class _Checkpoint:
    pc: int
    state: VectorDD
    classical: list[int]


@dataclass
class Telemetry:
    applied_gates: int = 0
    max_nodes: int = 0


class SimulationRun:
    """Stepping cursor over one circuit with its own engine instance."""

    def __init__(
        self,
        circuit: QuantumCircuit,
        config: EngineConfig | None = None,
        seed: int | None = None,
    ):
        self.circuit = circuit
        self.engine = Engine(config)
        self.pc = 0
        self.classical = [0] * circuit.num_clbits
        self.rng = random.Random(self.engine.config.seed if seed is None else seed)
        self.state = self.engine.basis_state(circuit.num_qubits, "0" * circuit.num_qubits)
        self.engine.inc_ref(self.state.root)
        self.telemetry = Telemetry(max_nodes=self.engine.node_count(self.state))
        self.pending: Optional[PendingDecision] = None
        self._checkpoints: dict[int, _Checkpoint] = {}

    # ------------------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.pc >= len(self.circuit.ops) and self.pending is None

    def _swap_state(self, new_state: VectorDD) -> None:
        self.engine.inc_ref(new_state.root)
        self.engine.dec_ref(self.state.root)
        self.state = new_state
        self.telemetry.max_nodes = max(
            self.telemetry.max_nodes, self.engine.node_count(new_state)
        )

    def _condition_holds(self, op: Operation) -> bool:
        if op.condition is None:
            return True
        offset, count, value = op.condition
        actual = 0
        for i in range(count):
            actual |= self.classical[offset + i] << i
        return actual == value

    def _apply_gate(self, op: Operation) -> None:
        gate = operation_dd(self.engine, op, self.circuit.num_qubits)
        self._swap_state(self.engine.multiply_mv(gate, self.state))
        self.telemetry.applied_gates += 1
        self.engine.maybe_collect()

    def step(self) -> StepOutcome:
        """Execute the next operation, or suspend on a superposed measure/reset."""
        if self.pending is not None:
            return StepOutcome(StepStatus.NEEDS_DECISION, self.pending)
        if self.pc >= len(self.circuit.ops):
            return StepOutcome(StepStatus.FINISHED)
        op = self.circuit.ops[self.pc]
        if op.kind == GateKind.BARRIER:
            self.pc += 1
            return StepOutcome(StepStatus.ADVANCED, crossed_barrier=True)
        if op.kind in (GateKind.MEASURE, GateKind.RESET):
            qubit = op.targets[0]
            p0, p1 = self.engine.measurement_probabilities(self.state, qubit)
            tol = self.engine.tol
            if p1 < tol or p0 < tol:
                # the qubit is not in superposition: no decision to make
                self._resolve(op, 0 if p1 < tol else 1)
                return StepOutcome(StepStatus.ADVANCED)
            self.pending = PendingDecision(op.kind, qubit, p0, p1, op.clbit)
            return StepOutcome(StepStatus.NEEDS_DECISION, self.pending)
        if self._condition_holds(op):
            self._apply_gate(op)
        self.pc += 1
        return StepOutcome(StepStatus.ADVANCED)

    def resolve_decision(self, outcome: Optional[int] = None) -> int:
        """Collapse the pending measure/reset; sample the outcome if None."""
        if self.pending is None:
            raise RuntimeError("no decision pending")
        pending = self.pending
        if outcome is None:
            outcome = 1 if self.rng.random() < pending.p1 else 0
        if outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        op = self.circuit.ops[self.pc]
        stale = self._checkpoints.pop(self.pc, None)
        if stale is not None:
            self.engine.dec_ref(stale.state.root)
        self._checkpoints[self.pc] = _Checkpoint(self.pc, self.state, list(self.classical))
        self.engine.inc_ref(self.state.root)  # pinned by the checkpoint
        self.pending = None
        self._resolve(op, outcome)
        return outcome

    def _resolve(self, op: Operation, outcome: int) -> None:
        qubit = op.targets[0]
        collapsed = self.engine.collapse(self.state, qubit, outcome)
        if op.kind == GateKind.RESET and outcome == 1:
            # relocate the surviving branch to the |0> successor
            x = self.engine.gate_dd(
                gate_base_matrix(GateKind.X), self.circuit.num_qubits, (), qubit
            )
            collapsed = self.engine.multiply_mv(x, collapsed)
        self._swap_state(collapsed)
        if op.kind == GateKind.MEASURE:
            self.classical[op.clbit] = outcome
        self.pc += 1

    def step_backward(self) -> None:
        """Undo one operation; restores a checkpoint across measure/reset."""
        if self.pending is not None:
            # abandoning the decision returns to the state before the op
            self.pending = None
            return
        if self.pc == 0:
            return
        op = self.circuit.ops[self.pc - 1]
        if op.kind == GateKind.BARRIER:
            self.pc -= 1
            return
        if op.kind in (GateKind.MEASURE, GateKind.RESET):
            cp = self._checkpoints.pop(self.pc - 1)
            self.engine.dec_ref(self.state.root)
            self.state = cp.state  # checkpoint pin transfers back to the run
            self.classical = list(cp.classical)
            self.pc = cp.pc
            return
        if self._condition_holds(op):
            gate = operation_dd(
                self.engine, adjoint_operation(op), self.circuit.num_qubits
            )
            self._swap_state(self.engine.multiply_mv(gate, self.state))
        self.pc -= 1

    def run_to(self, target: str = "end") -> StepOutcome:
        """Step repeatedly; stop on finish, pending decision, or (for
        target='next-breakpoint') right after crossing a barrier."""
        if target not in ("end", "next-breakpoint"):
            raise ValueError(f"unknown target {target!r}")
        while True:
            outcome = self.step()
            if outcome.status != StepStatus.ADVANCED:
                return outcome
            if target == "next-breakpoint" and outcome.crossed_barrier:
                return outcome
            if self.pc >= len(self.circuit.ops):
                return StepOutcome(StepStatus.FINISHED)

    def restart(self) -> None:
        """Back to |0...0> and program counter 0."""
        for cp in self._checkpoints.values():
            self.engine.dec_ref(cp.state.root)
        self._checkpoints.clear()
        self.pending = None
        self.pc = 0
        self.classical = [0] * self.circuit.num_clbits
        fresh = self.engine.basis_state(
            self.circuit.num_qubits, "0" * self.circuit.num_qubits
        )
        self._swap_state(fresh)


def sample(state: VectorDD, shots: int, rng: random.Random, engine: Engine) -> Histogram:
    """Draw full-state measurement samples by single-path traversal.

    Each shot walks root to terminal choosing the |0>/|1> successor with
    probability equal to the squared weight magnitude; the state is left
    untouched, so repeated sampling needs no re-simulation.
    """
    n = state.num_qubits
    counts: dict[str, int] = {}
    value = engine.value
    for _ in range(shots):
        bits = ["0"] * n
        node = state.root.node
        for level in range(n - 1, -1, -1):
            p1 = abs(value(node.edges[1].w)) ** 2
            bit = 1 if rng.random() < p1 else 0
            bits[n - 1 - level] = "01"[bit]
            node = node.edges[bit].node
        key = "".join(bits)
        counts[key] = counts.get(key, 0) + 1
    return Histogram(counts, shots)


def simulate_to_end(run: SimulationRun) -> None:
    """Drive a run to completion, sampling every decision from its RNG."""
    while not run.finished:
        outcome = run.run_to("end")
        if outcome.status == StepStatus.NEEDS_DECISION:
            run.resolve_decision()
        elif outcome.status == StepStatus.FINISHED:
            break
