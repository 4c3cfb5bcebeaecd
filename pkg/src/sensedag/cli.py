"""Command-line front end: runs, sweeps, graph generation, oracle checks, validation.

Exit codes are part of the contract: 0 success, 1 malformed input,
2 infeasible scenario (sensing horizon exhausted), 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import graph as graphmod
from . import harness
from .checks import check_schedule
from .oracle import OracleLimit, OracleLimitError, optimal_makespan
from .policies import BandNeverCompletesError, PolicyConfig
from .radg import ReleaseVector, schedule
from .sensing import SensingExhaustedError

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_INVARIANT = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract reserves 2 for
    # infeasible scenarios, so remap usage errors to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="sensedag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write its bundle")
    p_run.add_argument("--config", required=True, help="scenario JSON file")
    p_run.add_argument("--policy", required=True, choices=["joint", "decoupled"])
    p_run.add_argument("--out", required=True, help="output bundle directory")
    p_run.add_argument("--gantt", action="store_true", help="also write gantt.svg")

    p_sweep = sub.add_parser("sweep", help="run a sweep and write result CSVs")
    p_sweep.add_argument("--spec", required=True, help="sweep spec JSON file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=None, help="parallel cells (default: all cores)")

    p_gen = sub.add_parser("gen-dag", help="generate and serialize a scenario's graph")
    p_gen.add_argument("--config", required=True, help="scenario JSON file")
    p_gen.add_argument("--out", required=True, help="output graph JSON file")

    p_oracle = sub.add_parser("oracle-check", help="compare the greedy scheduler against the exact oracle")
    p_oracle.add_argument("--config", required=True, help="tiny instance JSON file")

    p_val = sub.add_parser("validate", help="replay a bundle and re-check every invariant")
    p_val.add_argument("--bundle", required=True, help="bundle directory")

    return parser


def _cmd_run(args) -> int:
    cfg = harness.load_scenario(args.config)
    cfg = replace(cfg, policy=PolicyConfig(args.policy, cfg.policy.estimator))
    result = harness.run_scenario(cfg)
    harness.write_bundle(cfg, result, args.out, gantt=args.gantt)
    print(f"{cfg.policy.kind}: T_total={result.total_latency:g} ms -> {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = harness.load_sweep_spec(args.spec)
    res = harness.run_sweep(spec, jobs=args.jobs, out_dir=args.out)
    print(f"{len(res.cells)} cells, {len(res.missing)} missing -> {args.out}")
    return EXIT_OK


def _cmd_gen_dag(args) -> int:
    cfg = harness.load_scenario(args.config)
    g = harness.build_graph(cfg)
    graphmod.save(g, args.out)
    print(f"{g.num_nodes} nodes, {len(g.edges)} edges -> {args.out}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    try:
        rec = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise harness.ConfigError(f"{args.config}: not valid JSON: {exc}") from exc
    allowed = {"graph", "rho", "cores", "limits"}
    if not isinstance(rec, dict) or not set(rec) <= allowed or not {"graph", "rho", "cores"} <= set(rec):
        raise harness.ConfigError(f"oracle config needs graph/rho/cores (optional limits), got {sorted(rec)}")
    g = graphmod.from_record(rec["graph"])
    rho = ReleaseVector({int(k): float(v) for k, v in rec["rho"].items()})
    cores = int(rec["cores"])
    limit = OracleLimit(**rec["limits"]) if "limits" in rec else None

    greedy = schedule(g, rho, cores)
    opt_makespan, opt_sched = optimal_makespan(g, rho, cores, limit)
    print(f"RADG={greedy.makespan:g} OPT={opt_makespan:g}")
    problems = check_schedule(g, rho, cores, greedy) + check_schedule(g, rho, cores, opt_sched)
    if greedy.makespan < opt_makespan:
        problems.append(
            f"greedy makespan {greedy.makespan} beats the exact optimum {opt_makespan}"
        )
    if problems:
        for msg in problems:
            print(f"invariant violation: {msg}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_validate(args) -> int:
    problems = harness.validate_bundle(args.bundle)
    if problems:
        for msg in problems:
            print(f"invariant violation: {msg}", file=sys.stderr)
        return EXIT_INVARIANT
    print("bundle clean")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "gen-dag": _cmd_gen_dag,
        "oracle-check": _cmd_oracle_check,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (SensingExhaustedError, BandNeverCompletesError) as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OracleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (harness.ConfigError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
