"""Seeded Monte Carlo sweeps comparing the coordination modes."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import groupby

import numpy as np

from .graph import ALL_MODES, CoordinationMode, build_graph
from .network import NetworkConfig, generate_instance, utility_tensor
from .solver import SolveReport, solve_exact, solve_greedy

CSV_COLUMNS = ("sweep_param", "point", "trial", "mode", "feasible",
               "sum_rate_bps_hz", "solver", "nodes", "seed")
SUMMARY_COLUMNS = ("sweep_param", "point", "mode", "mean_sum_rate_bps_hz",
                   "std_sum_rate_bps_hz", "n_feasible", "n_infeasible")
SOLVERS = ("exact", "greedy")
# beyond this many slots the exact search can take minutes when U is near C*B
EXACT_SLOT_LIMIT = 20

log = logging.getLogger(__name__)

_MODE_RANK = {m: i for i, m in enumerate(ALL_MODES)}


class SweptParameter(str, Enum):
    U = "U"
    Z = "Z"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class SweepSpec:
    base_config: NetworkConfig
    swept_parameter: SweptParameter
    sweep_values: tuple[int, ...]
    trials: int = 100
    modes: tuple[CoordinationMode, ...] = ALL_MODES
    solver: str | None = None  # None: exact up to EXACT_SLOT_LIMIT slots, else greedy
    users_per_cloud: bool = False
    local_search_passes: int = 2

    def __post_init__(self):
        object.__setattr__(self, "swept_parameter", SweptParameter(self.swept_parameter))
        object.__setattr__(self, "sweep_values", tuple(int(v) for v in self.sweep_values))
        object.__setattr__(self, "modes", tuple(CoordinationMode(m) for m in self.modes))
        vals = self.sweep_values
        if not vals or any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep_values must be nonempty, positive and strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.modes or len(set(self.modes)) != len(self.modes):
            raise ValueError("modes must be a nonempty list without repeats")
        if self.solver is None:
            slots = max(config_at(self, p).z_tot for p in vals)
            object.__setattr__(self, "solver", "exact" if slots <= EXACT_SLOT_LIMIT else "greedy")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        if self.local_search_passes < 0:
            raise ValueError("local_search_passes must be >= 0")


@dataclass(frozen=True)
class TrialResult:
    point: int
    trial: int
    mode: CoordinationMode
    sum_rate: float
    feasible: bool
    solver_nodes: int
    seed_used: int
    solver: str = "exact"
    sweep_param: str = ""


@dataclass(frozen=True)
class SummaryRow:
    sweep_param: str
    point: int
    mode: CoordinationMode
    mean: float
    std: float
    n_feasible: int
    n_infeasible: int


def derive_seed(base_seed: int, point: int, trial: int) -> int:
    """64-bit trial seed; independent of the mode so modes share instances."""
    ss = np.random.SeedSequence([int(base_seed), int(point), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def config_at(spec: SweepSpec, point: int) -> NetworkConfig:
    base = spec.base_config
    p = spec.swept_parameter
    if p is SweptParameter.U:
        return base.replace(num_users=point)
    if p is SweptParameter.Z:
        return base.replace(num_pz_per_bs=point)
    if p is SweptParameter.B:
        return base.replace(num_bs_per_cloud=point)
    users = point * base.num_users if spec.users_per_cloud else base.num_users
    return base.replace(num_clouds=point, num_users=users)


def solve(graph, solver: str = "exact", local_search_passes: int = 2) -> SolveReport:
    if solver == "exact":
        return solve_exact(graph)
    if solver == "greedy":
        return solve_greedy(graph, local_search_passes)
    raise ValueError(f"unknown solver {solver!r}")


def _trials_on_instance(config, modes, solver, passes, point, trial, sweep_param=""):
    tensor = utility_tensor(generate_instance(config))
    out = []
    for mode in modes:
        try:
            report = solve(build_graph(mode, tensor, config), solver, passes)
        except (ValueError, RuntimeError, MemoryError) as exc:
            log.warning("trial point=%s trial=%s mode=%s failed: %s", point, trial, mode.value, exc)
            report = SolveReport(None, False, 0, 0.0)
        out.append(TrialResult(
            point=point,
            trial=trial,
            mode=mode,
            sum_rate=report.total_weight if report.feasible else math.nan,
            feasible=report.feasible,
            solver_nodes=report.nodes_explored,
            seed_used=int(config.rng_seed),
            solver=solver,
            sweep_param=sweep_param,
        ))
    return out


def run_trial(config: NetworkConfig, mode, solver: str = "exact", seed: int | None = None,
              local_search_passes: int = 2, point: int = 0, trial: int = 0) -> TrialResult:
    """Generate, weight, build and solve one instance for one mode."""
    if seed is not None:
        config = config.replace(rng_seed=int(seed))
    return _trials_on_instance(config, (CoordinationMode(mode),), solver,
                               local_search_passes, point, trial)[0]


def _sort_key(r: TrialResult):
    return (r.point, r.trial, _MODE_RANK[r.mode])


def _task(args):
    spec, point, trial = args
    config = config_at(spec, point).replace(
        rng_seed=derive_seed(spec.base_config.rng_seed, point, trial))
    return _trials_on_instance(config, spec.modes, spec.solver, spec.local_search_passes,
                               point, trial, spec.swept_parameter.value)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[TrialResult]:
    """All (point, trial, mode) results in canonical order.

    Every mode at a given (point, trial) sees the same network instance.
    ``jobs > 1`` farms (point, trial) pairs out to worker processes; output
    is identical either way.
    """
    tasks = [(spec, p, t) for p in spec.sweep_values for t in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_task(t) for t in tasks]
    results = [r for chunk in chunks for r in chunk]
    results.sort(key=_sort_key)
    return results


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _write(rows, columns, target):
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", newline="") as fh:
            _write(rows, columns, fh)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def csv_rows(results):
    for r in sorted(results, key=_sort_key):
        yield (r.sweep_param, r.point, r.trial, r.mode.value,
               "true" if r.feasible else "false",
               _fmt(r.sum_rate) if r.feasible else "",
               r.solver, r.solver_nodes, r.seed_used)


def emit_csv(results, target=None) -> str | None:
    """Write results as CSV to ``target`` (path or text stream); with no
    target, return the CSV text."""
    if target is None:
        buf = io.StringIO()
        _write(csv_rows(results), CSV_COLUMNS, buf)
        return buf.getvalue()
    _write(csv_rows(results), CSV_COLUMNS, target)
    return None


def summarize(results) -> list[SummaryRow]:
    """Mean and sample standard deviation per (point, mode) over feasible
    trials; infeasible trials are only counted."""
    rows = []
    keyed = sorted(results, key=lambda r: (r.point, _MODE_RANK[r.mode], r.trial))
    for (point, _), group in groupby(keyed, key=lambda r: (r.point, _MODE_RANK[r.mode])):
        group = list(group)
        rates = np.array([r.sum_rate for r in group if r.feasible])
        mean = float(rates.mean()) if rates.size else math.nan
        std = float(rates.std(ddof=1)) if rates.size > 1 else math.nan
        rows.append(SummaryRow(group[0].sweep_param, point, group[0].mode, mean, std,
                               int(rates.size), len(group) - int(rates.size)))
    return rows


def emit_summary_csv(results, target=None) -> str | None:
    rows = ((s.sweep_param, s.point, s.mode.value, _fmt(s.mean), _fmt(s.std),
             s.n_feasible, s.n_infeasible) for s in summarize(results))
    if target is None:
        buf = io.StringIO()
        _write(rows, SUMMARY_COLUMNS, buf)
        return buf.getvalue()
    _write(rows, SUMMARY_COLUMNS, target)
    return None


def summary_path(out_path) -> str:
    """``results.csv`` -> ``results_summary.csv``."""
    s = str(out_path)
    stem, dot, ext = s.rpartition(".")
    if dot and "/" not in ext:
        return f"{stem}_summary.{ext}"
    return s + "_summary"
