"""Command-line front end.

Exit status: 0 success, 1 infeasible instance, 2 input error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config, load_sweep_spec
from .graph import ALL_MODES, CoordinationMode, build_graph
from .network import generate_instance, utility_tensor
from .oracle import DEFAULT_CAP, EnumerationCapExceeded, FeasibleSetSpec, check_equivalence, count_feasible
from .sim import emit_csv, emit_summary_csv, run_sweep, solve, summary_path

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _graph_for(args, mode):
    config = load_config(args.config, args.seed)
    tensor = utility_tensor(generate_instance(config))
    return config, build_graph(mode, tensor, config)


def _prepare(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return path


def cmd_solve(args, out):
    config, graph = _graph_for(args, CoordinationMode(args.mode))
    report = solve(graph, args.solver, args.passes)
    if not report.feasible:
        print("infeasible: U < C·B", file=out)
        return EXIT_INFEASIBLE
    for a in report.schedule.associations:
        print(f"{a.c} {a.u} {a.b} {a.z} {graph.weights[graph.vertex_index(a)]:.9g}", file=out)
    print(f"total_sum_rate {report.total_weight:.9g}", file=out)
    return EXIT_OK


def cmd_verify(args, out):
    config = load_config(args.config, args.seed)
    if config.z_tot > args.cap:
        raise EnumerationCapExceeded(f"{config.z_tot} slots exceed the enumeration cap of {args.cap}")
    tensor = utility_tensor(generate_instance(config))
    status = EXIT_OK
    for mode in ALL_MODES:
        eq = check_equivalence(build_graph(mode, tensor, config), args.cap)
        verdict = "PASS" if eq.passed else "FAIL"
        print(f"{mode.value} {verdict} feasible={eq.oracle_count} independent_sets={eq.graph_count}", file=out)
        if not eq.passed:
            status = EXIT_VERIFY
    return status


def cmd_count(args, out):
    config = load_config(args.config, args.seed)
    spec = FeasibleSetSpec.from_config(args.mode, config, args.cap)
    print(count_feasible(spec), file=out)
    return EXIT_OK


def cmd_sweep(args, out):
    spec = load_sweep_spec(args.spec, args.seed)
    results = run_sweep(spec, jobs=args.jobs)
    emit_csv(results, _prepare(args.out))
    emit_summary_csv(results, summary_path(args.out))
    print(f"wrote {len(results)} rows to {args.out}", file=out)
    return EXIT_OK


def cmd_export(args, out):
    _, graph = _graph_for(args, CoordinationMode(args.mode))
    with open(_prepare(args.out), "w") as fh:
        graph.export_edgelist(fh)
    print(f"wrote {graph.n} vertices and {graph.num_edges} edges to {args.out}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cransched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    modes = [m.value for m in CoordinationMode]

    def common(p, mode=True):
        p.add_argument("config", help="network config file")
        p.add_argument("--seed", type=int, help="override rng_seed from the file")
        if mode:
            p.add_argument("--mode", choices=modes, default="hybrid")

    p = sub.add_parser("solve", help="solve one instance and print the schedule")
    common(p)
    p.add_argument("--solver", choices=["exact", "greedy"], default="exact")
    p.add_argument("--passes", type=int, default=2, help="greedy local-search passes")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check oracle vs conflict graph for all modes")
    common(p, mode=False)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", aliases=["count-sets"], help="count feasible schedules")
    common(p)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep and write CSVs")
    p.add_argument("spec", help="sweep spec file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-graph", help="write the conflict graph as an edge list")
    common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ConfigError, EnumerationCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
