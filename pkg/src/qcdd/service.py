"""HTTP/JSON session API for interactive simulation and verification.

Each session owns a private engine: node ids, handles, and RNG state
never leak across sessions, and a per-session lock serializes mutating
requests.  Sessions live in memory only and expire after a configurable
idle time; recreating one from source is cheap.

Simulation sessions wrap a stepping run over one circuit.  Verification
sessions hold an accumulator diagram that starts at the identity; left
steps multiply the first circuit's gates on the left, right steps
multiply adjoints of the second circuit's gates on the right, so the
accumulator returns to the identity exactly when the circuits agree.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .circuit import GateKind, QuantumCircuit, adjoint_operation, operation_dd
from .engine import Engine, EngineConfig, MatrixDD
from .equivalence import is_identity
from .export import to_snapshot
from .qasm import QasmError, parse_qasm
from .simulator import SimulationRun, StepStatus


@dataclass(frozen=True)
class ServiceSettings:
    dense_view_threshold: int = 6
    session_ttl: float = 1800.0
    engine_config: EngineConfig = field(default_factory=EngineConfig)
    cors_origins: tuple[str, ...] = ("*",)


class VerificationRun:
    """Two cursors over two circuits sharing one accumulator diagram."""

    def __init__(self, c1: QuantumCircuit, c2: QuantumCircuit, config: EngineConfig):
        self.circuits = (c1, c2)
        self.engine = Engine(config)
        n = c1.num_qubits
        self.accumulator: MatrixDD = self.engine.identity_dd(n)
        self.engine.inc_ref(self.accumulator.root)
        self.pcs = [0, 0]
        self.applied = [0, 0]
        self.max_nodes = self.engine.node_count(self.accumulator)

    def _swap(self, nxt: MatrixDD) -> None:
        self.engine.inc_ref(nxt.root)
        self.engine.dec_ref(self.accumulator.root)
        self.accumulator = nxt
        self.max_nodes = max(self.max_nodes, self.engine.node_count(nxt))
        self.engine.maybe_collect()

    def _apply(self, side: int, op, inverse: bool) -> None:
        n = self.circuits[0].num_qubits
        if inverse:
            op = adjoint_operation(op)
        gate = operation_dd(self.engine, op, n)
        if side == 0:
            nxt = self.engine.multiply_mm(gate, self.accumulator)
        else:
            nxt = self.engine.multiply_mm(
                self.accumulator, self.engine.conjugate_transpose(gate)
            )
        self._swap(nxt)

    def forward(self, side: int) -> bool:
        """Apply the side's next operation; True if a barrier was crossed."""
        circuit = self.circuits[side]
        if self.pcs[side] >= len(circuit.ops):
            return False
        op = circuit.ops[self.pcs[side]]
        self.pcs[side] += 1
        if op.kind == GateKind.BARRIER:
            return True
        self._apply(side, op, inverse=False)
        self.applied[side] += 1
        return False

    def backward(self, side: int) -> None:
        circuit = self.circuits[side]
        if self.pcs[side] == 0:
            return
        self.pcs[side] -= 1
        op = circuit.ops[self.pcs[side]]
        if op.kind == GateKind.BARRIER:
            return
        # undoing a left gate multiplies its adjoint on the left; undoing a
        # right gate multiplies the original back on the right
        self._apply(side, op, inverse=(side == 0))
        self.applied[side] -= 1

    def run_to(self, side: int, target: str) -> None:
        circuit = self.circuits[side]
        while self.pcs[side] < len(circuit.ops):
            crossed = self.forward(side)
            if crossed and target == "next-breakpoint":
                return

    def to_start(self, side: int) -> None:
        while self.pcs[side] > 0:
            self.backward(side)


@dataclass
class Session:
    id: str
    mode: str
    run: Union[SimulationRun, VerificationRun]
    lock: threading.Lock
    created_at: float
    last_touched: float


class _SessionStore:
    def __init__(self, ttl: float):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown session")
            if time.monotonic() - session.last_touched > self.ttl:
                del self._sessions[session_id]
                raise HTTPException(status_code=404, detail="session expired")
            session.last_touched = time.monotonic()
            return session

    def remove(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise HTTPException(status_code=404, detail="unknown session")
            del self._sessions[session_id]


class CreateSessionRequest(BaseModel):
    mode: Literal["simulate", "verify"]
    qasm: Optional[str] = None
    qasm1: Optional[str] = None
    qasm2: Optional[str] = None
    filename: Optional[str] = None
    filename1: Optional[str] = None
    filename2: Optional[str] = None
    seed: Optional[int] = None


class StepRequest(BaseModel):
    side: Literal["left", "right", "single"] = "single"
    action: Literal["forward", "backward", "to-breakpoint", "to-end", "start"]


class DecisionRequest(BaseModel):
    outcome: Union[int, Literal["random"]]


def _check_extension(filename: Optional[str]) -> None:
    if filename is None:
        return
    lowered = filename.lower()
    if lowered.endswith(".real"):
        raise HTTPException(
            status_code=415,
            detail="the .real format is not supported; provide OpenQASM 2.0",
        )
    if "." in lowered and not lowered.endswith(".qasm"):
        raise HTTPException(
            status_code=415,
            detail=f"unsupported file extension on {filename!r}; provide OpenQASM 2.0",
        )


def _parse_source(source: Optional[str], which: str) -> QuantumCircuit:
    if source is None:
        raise HTTPException(status_code=400, detail=f"missing circuit source {which}")
    try:
        return parse_qasm(source)
    except QasmError as exc:
        raise HTTPException(
            status_code=400,
            detail={"message": str(exc), "line": exc.line, "column": exc.col, "source": which},
        ) from None


def _require_unitary_http(circuit: QuantumCircuit, which: str) -> None:
    for op in circuit.ops:
        if op.kind == GateKind.BARRIER:
            continue
        if not op.is_gate or op.condition is not None:
            raise HTTPException(
                status_code=422,
                detail=(
                    f"{which} contains {op.kind.value}; measurement, reset, and "
                    "classically-controlled operations are not supported in verification"
                ),
            )


def create_app(
    settings: ServiceSettings | None = None, static_dir: str | None = None
) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="qcdd session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")
    store = _SessionStore(settings.session_ttl)

    def sim_view(run: SimulationRun) -> dict:
        snapshot = to_snapshot(run.engine, run.state).to_json_dict()
        pending = None
        if run.pending is not None:
            pending = {
                "qubit": run.pending.qubit,
                "p0": run.pending.p0,
                "p1": run.pending.p1,
                "kind": "measure" if run.pending.kind == GateKind.MEASURE else "reset",
            }
        view = {
            "snapshot": snapshot,
            "programCounters": {"single": run.pc},
            "pendingDecision": pending,
            "telemetry": {
                "nodes": run.engine.node_count(run.state),
                "maxNodes": run.telemetry.max_nodes,
                "appliedGates": run.telemetry.applied_gates,
            },
            "finished": run.finished,
        }
        if run.circuit.num_qubits <= settings.dense_view_threshold:
            dense = run.engine.vector_to_dense(run.state)
            view["denseVector"] = [[a.real, a.imag] for a in dense]
        return view

    def verify_view(run: VerificationRun) -> dict:
        snapshot = to_snapshot(run.engine, run.accumulator).to_json_dict()
        return {
            "snapshot": snapshot,
            "programCounters": {"left": run.pcs[0], "right": run.pcs[1]},
            "pendingDecision": None,
            "telemetry": {
                "nodes": run.engine.node_count(run.accumulator),
                "maxNodes": run.max_nodes,
                "appliedGates": run.applied[0] + run.applied[1],
            },
            "identity": is_identity(run.engine, run.accumulator, up_to_global_phase=True),
        }

    def view_of(session: Session) -> dict:
        if session.mode == "simulate":
            return sim_view(session.run)
        return verify_view(session.run)

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> dict:
        if request.mode == "simulate":
            _check_extension(request.filename)
            circuit = _parse_source(request.qasm, "qasm")
            run: Union[SimulationRun, VerificationRun] = SimulationRun(
                circuit, config=settings.engine_config, seed=request.seed
            )
        else:
            _check_extension(request.filename1)
            _check_extension(request.filename2)
            c1 = _parse_source(request.qasm1, "qasm1")
            c2 = _parse_source(request.qasm2, "qasm2")
            _require_unitary_http(c1, "first circuit")
            _require_unitary_http(c2, "second circuit")
            if c1.num_qubits != c2.num_qubits:
                raise HTTPException(
                    status_code=422,
                    detail=(
                        f"qubit count mismatch: {c1.num_qubits} vs {c2.num_qubits}"
                    ),
                )
            run = VerificationRun(c1, c2, settings.engine_config)
        now = time.monotonic()
        session = Session(
            id=uuid.uuid4().hex,
            mode=request.mode,
            run=run,
            lock=threading.Lock(),
            created_at=now,
            last_touched=now,
        )
        store.add(session)
        return {"sessionId": session.id, "state": view_of(session)}

    @app.post("/sessions/{session_id}/step")
    def step(session_id: str, request: StepRequest) -> dict:
        session = store.get(session_id)
        with session.lock:
            if session.mode == "simulate":
                run = session.run
                if run.pending is not None and request.action not in ("backward", "start"):
                    raise HTTPException(
                        status_code=409,
                        detail="a measurement decision is pending; resolve it first",
                    )
                if request.side != "single":
                    raise HTTPException(
                        status_code=422,
                        detail="simulation sessions take side 'single'",
                    )
                if request.action == "forward":
                    run.step()
                elif request.action == "backward":
                    run.step_backward()
                elif request.action == "to-breakpoint":
                    run.run_to("next-breakpoint")
                elif request.action == "to-end":
                    run.run_to("end")
                else:
                    run.restart()
            else:
                run = session.run
                if request.side not in ("left", "right"):
                    raise HTTPException(
                        status_code=422,
                        detail="verification sessions take side 'left' or 'right'",
                    )
                side = 0 if request.side == "left" else 1
                if request.action == "forward":
                    run.forward(side)
                elif request.action == "backward":
                    run.backward(side)
                elif request.action in ("to-breakpoint", "to-end"):
                    run.run_to(side, "next-breakpoint" if request.action == "to-breakpoint" else "end")
                else:
                    run.to_start(side)
            return view_of(session)

    @app.post("/sessions/{session_id}/decision")
    def decide(session_id: str, request: DecisionRequest) -> dict:
        session = store.get(session_id)
        with session.lock:
            if session.mode != "simulate":
                raise HTTPException(
                    status_code=409, detail="verification sessions have no decisions"
                )
            run = session.run
            if run.pending is None:
                raise HTTPException(status_code=409, detail="no decision pending")
            outcome = None if request.outcome == "random" else request.outcome
            if outcome is not None and outcome not in (0, 1):
                raise HTTPException(status_code=422, detail="outcome must be 0, 1, or 'random'")
            run.resolve_decision(outcome)
            return view_of(session)

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            return view_of(session)

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        store.remove(session_id)
        return Response(status_code=204)

    return app
