"""Command line interface: circuit simulation, equivalence checking, and
the interactive session service.

`simulate` prints a JSON document with the measurement histogram, the
count of structurally nonzero amplitudes, and (with --ps) run statistics.
`check` prints a JSON verdict for two circuit files.  `serve` starts the
HTTP session API used by the browser UI.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .circuit import build_grover, build_qft
from .engine import EngineConfig
from .equivalence import CostTable, Strategy, check
from .qasm import QasmError, load_circuit
from .simulator import SimulationRun, sample, simulate_to_end


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    config = EngineConfig.from_file(args.config) if args.config else EngineConfig()
    config = EngineConfig.from_env(config)
    if getattr(args, "seed", None) is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    return config


def _cmd_simulate(args: argparse.Namespace) -> int:
    sources = [
        args.simulate_file is not None,
        args.simulate_grover is not None,
        args.simulate_qft is not None,
    ]
    if sum(sources) != 1:
        print(
            "simulate needs exactly one of --simulate_file, --simulate_grover, --simulate_qft",
            file=sys.stderr,
        )
        return 2
    config = _engine_config(args)
    try:
        if args.simulate_file is not None:
            circuit = load_circuit(args.simulate_file)
        elif args.simulate_grover is not None:
            circuit = build_grover(args.simulate_grover, "0" * args.simulate_grover)
        else:
            circuit = build_qft(args.simulate_qft)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    seed = args.seed if args.seed is not None else config.seed
    run = SimulationRun(circuit, config=config, seed=seed)
    t0 = time.perf_counter()
    simulate_to_end(run)
    simulation_time = time.perf_counter() - t0

    t1 = time.perf_counter()
    measurements: dict[str, int] = {}
    if args.shots > 0:
        histogram = sample(run.state, args.shots, run.rng, run.engine)
        measurements = dict(sorted(histogram.counts.items()))
    measurement_time = time.perf_counter() - t1

    output: dict = {
        "measurements": measurements,
        "non_zero_entries": run.engine.count_nonzero_entries(run.state),
    }
    if args.ps:
        output["statistics"] = {
            "simulation_time": simulation_time,
            "measurement_time": measurement_time,
            "benchmark": circuit.name,
            "shots": args.shots,
            "n_qubits": circuit.num_qubits,
            "applied_gates": run.telemetry.applied_gates,
            "max_nodes": run.telemetry.max_nodes,
            "seed": seed,
        }
    print(json.dumps(output, indent=2))
    return 0


_STRATEGIES = {
    "reference": Strategy.REFERENCE,
    "proportional": Strategy.PROPORTIONAL,
    "flow": Strategy.COMPILATION_FLOW,
    "stimuli": Strategy.RANDOM_STIMULI,
}


def _cmd_check(args: argparse.Namespace) -> int:
    config = _engine_config(args)
    try:
        c1 = load_circuit(args.file1)
        c2 = load_circuit(args.file2)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    strategy = _STRATEGIES[args.strategy]
    try:
        result = check(
            c1,
            c2,
            strategy=strategy,
            config=config,
            stimuli_count=args.stimuli_count,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    verdict = result.verdict.value
    if args.global_phase and verdict == "equivalent-up-to-global-phase":
        verdict = "equivalent"
    print(
        json.dumps(
            {
                "verdict": verdict,
                "peakNodes": result.peak_nodes,
                "gatesApplied": list(result.gates_applied),
                "elapsed": result.elapsed,
                "strategy": args.strategy,
            },
            indent=2,
        )
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceSettings, create_app

    config = _engine_config(args)
    settings = ServiceSettings(
        dense_view_threshold=args.dense_threshold,
        session_ttl=args.ttl,
        engine_config=config,
    )
    app = create_app(settings, static_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcdd",
        description="Decision-diagram tools for quantum circuits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a circuit and sample measurements")
    sim.add_argument("--simulate_file", metavar="PATH", help="OpenQASM 2.0 circuit file")
    sim.add_argument("--simulate_grover", type=int, metavar="N", help="Grover search on N qubits")
    sim.add_argument("--simulate_qft", type=int, metavar="N", help="QFT on N qubits")
    sim.add_argument("--shots", type=int, default=0, help="number of measurement samples")
    sim.add_argument("--seed", type=int, default=None, help="random seed")
    sim.add_argument("--ps", action="store_true", help="print statistics")
    sim.add_argument("--config", metavar="PATH", help="engine configuration file")
    sim.set_defaults(func=_cmd_simulate)

    chk = sub.add_parser("check", help="check two circuits for equivalence")
    chk.add_argument("file1")
    chk.add_argument("file2")
    chk.add_argument(
        "--strategy", choices=sorted(_STRATEGIES), default="proportional"
    )
    chk.add_argument("--stimuli-count", type=int, default=8)
    chk.add_argument(
        "--global-phase",
        action="store_true",
        help="fold phase-only differences into 'equivalent'",
    )
    chk.add_argument("--seed", type=int, default=None)
    chk.add_argument("--config", metavar="PATH", help="engine configuration file")
    chk.set_defaults(func=_cmd_check)

    srv = sub.add_parser("serve", help="start the interactive session service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8077)
    srv.add_argument("--dense-threshold", type=int, default=6)
    srv.add_argument("--ttl", type=float, default=1800.0, help="session idle expiry (s)")
    srv.add_argument("--ui", metavar="DIR", help="serve a built frontend from /ui")
    srv.add_argument("--seed", type=int, default=None)
    srv.add_argument("--config", metavar="PATH", help="engine configuration file")
    srv.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
