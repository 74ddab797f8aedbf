"""Command-line entry point.

    resize --input F.qasm --flow {dependency|unitary|auto} --cost {max-reuse|min-depth}
           --coupling {all|linear|t|file:EDGES.json} --epsilon 1e-10 --synth-epsilon 1e-8
           --mmr-weight 4.0 --depth-slack 0.05 --resets 1 --seed S
           --out OUT.qasm --report R.json
    resize gen --family {bv|dj|qaoa-ring|ghz} --n 10 [--secret 1...1] [--seed S] --out F.qasm

Exit codes: 0 success, 2 not resizable, 1 any other error. Failures print
a machine-readable error JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .benchmarks import FAMILIES, generate_benchmark
from .circuit import Circuit, metrics
from .dependency import CostMode, CostSpec, _resize_pipeline_detailed, find_resizable_pairs
from .instantiate import InstantiationConfig
from .qasm import emit_qasm, parse_qasm, strip_terminal_measurements
from .report import RunReport, render_report, stats_dict, write_report
from .synthesis import CouplingGraph
from .unitary_resize import MAX_CHECK_WIDTH, NotResizableError, _resize_via_synthesis_detailed
from .validation import resolve_coupling

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_RESIZABLE = 2


def _run_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resize", description="Resize a quantum circuit.")
    p.add_argument("--input", required=True, help="input OpenQASM 2 file")
    p.add_argument("--flow", choices=("dependency", "unitary", "auto"), default="auto")
    p.add_argument("--cost", choices=("max-reuse", "min-depth"), default="max-reuse")
    p.add_argument("--coupling", default="all",
                   help="all | linear | t | file:EDGES.json")
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--synth-epsilon", type=float, default=1e-8)
    p.add_argument("--mmr-weight", type=float, default=4.0)
    p.add_argument("--depth-slack", type=float, default=0.05)
    p.add_argument("--resets", type=int, default=1, help="reset repetitions per MMR (1..3)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output OpenQASM 2 file")
    p.add_argument("--report", default=None, help="JSON report file")
    return p


def _gen_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resize gen", description="Generate a benchmark circuit.")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--secret", default=None, help="bit string for the bv family")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return p


def _coupling_spec(arg: str):
    """file:PATH becomes a concrete graph; named topologies stay symbolic
    until the relevant width is known."""
    if arg.startswith("file:"):
        with open(arg[5:], encoding="utf-8") as fh:
            data = json.load(fh)
        return CouplingGraph.from_edges(int(data["n"]), [tuple(e) for e in data["edges"]])
    return arg


def _fail(message: str, code: int, report_path: str | None) -> int:
    payload = json.dumps({"error": message, "exit_code": code}, sort_keys=True)
    print(payload)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    return code


def _run(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            # terminal readout is regenerated at emission, so drop it here
            circuit = strip_terminal_measurements(parse_qasm(fh.read()))
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_ERROR, args.report)
    if not 1 <= args.resets <= 3:
        return _fail("--resets must be in 1..3", EXIT_ERROR, args.report)

    spec = CostSpec(CostMode(args.cost), args.mmr_weight, args.depth_slack)
    cfg = InstantiationConfig(epsilon=args.epsilon, seed=args.seed)
    timings: dict[str, float] = {}
    distances: dict = {}
    applied: list = []
    flow_used = "none"
    output = circuit

    try:
        coupling_spec = _coupling_spec(args.coupling)
        pairs = find_resizable_pairs(circuit)
        use_dependency = args.flow == "dependency" or (args.flow == "auto" and bool(pairs))
        if use_dependency:
            t0 = time.perf_counter()
            output, plan, details = _resize_pipeline_detailed(circuit, spec, coupling_spec, cfg)
            timings["dependency"] = time.perf_counter() - t0
            applied = [[p.host, p.guest] for p in plan.original_pairs]
            distances["resynthesis"] = [d["distance"] for d in details]
            flow_used = "dependency" if plan.applied or details else "none"
        elif args.flow == "unitary" or (args.flow == "auto" and not pairs
                                        and 2 <= circuit.width <= MAX_CHECK_WIDTH):
            t0 = time.perf_counter()
            coupling = resolve_coupling(coupling_spec, circuit.width - 1)
            if coupling.n_wires != circuit.width - 1:
                return _fail(
                    f"target coupling has {coupling.n_wires} wires, expected "
                    f"{circuit.width - 1}", EXIT_ERROR, args.report)
            outcome = _resize_via_synthesis_detailed(
                circuit, coupling, cfg, synth_epsilon=args.synth_epsilon)
            timings["unitary"] = time.perf_counter() - t0
            output = outcome.circuit
            applied = [[outcome.pair.host, outcome.pair.guest]]
            distances["check"] = outcome.check_distance
            distances["synthesis"] = outcome.synthesis_distance
            flow_used = "unitary"
    except NotResizableError as exc:
        return _fail(str(exc), EXIT_NOT_RESIZABLE, args.report)
    except (ValueError, RuntimeError) as exc:
        return _fail(str(exc), EXIT_ERROR, args.report)

    qasm_text = emit_qasm(output, reset_repetitions=args.resets)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(qasm_text)

    report = RunReport(
        flow=flow_used,
        seed=args.seed,
        config={
            "flow": args.flow,
            "cost": args.cost,
            "coupling": args.coupling,
            "epsilon": args.epsilon,
            "synth_epsilon": args.synth_epsilon,
            "mmr_weight": args.mmr_weight,
            "depth_slack": args.depth_slack,
            "resets": args.resets,
        },
        input_stats=stats_dict(metrics(circuit, args.mmr_weight)),
        output_stats=stats_dict(metrics(output, args.mmr_weight)),
        applied_pairs=applied,
        distances=distances,
        timings=timings,
    )
    if args.report:
        write_report(report, args.report)
    else:
        print(render_report(report), end="")
    return EXIT_OK


def _gen(args) -> int:
    try:
        circuit = generate_benchmark(args.family, args.n, secret=args.secret, seed=args.seed)
    except ValueError as exc:
        return _fail(str(exc), EXIT_ERROR, None)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(emit_qasm(circuit))
    instance = {"family": args.family, "n": args.n, "seed": args.seed, "out": args.out}
    if args.family == "bv":
        instance["secret"] = args.secret if args.secret is not None else "1" * (args.n - 1)
    print(json.dumps(instance, sort_keys=True))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "gen":
        return _gen(_gen_parser().parse_args(argv[1:]))
    return _run(_run_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
