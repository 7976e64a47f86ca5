"""Coordinated scheduling in multi-cloud radio access networks.

Builds conflict graphs for hybrid, signal-level and scheduling-level
coordination, solves the size-constrained maximum-weight independent set
problem exactly or heuristically, and checks the graph route against a
brute-force enumeration of feasible schedules.
"""

from ._backend import backend_name, use_backend
from .graph import (
    ALL_MODES,
    Association,
    ConflictGraph,
    CoordinationMode,
    are_conflicting,
    build_graph,
    enumerate_associations,
)
from .network import (
    Fading,
    NetworkConfig,
    NetworkInstance,
    UtilityTensor,
    generate_instance,
    sinr,
    utility_tensor,
)
from .oracle import FeasibleSetSpec, brute_force_opt, count_feasible, enumerate_feasible
from .sim import SweepSpec, TrialResult, emit_csv, run_sweep, run_trial, summarize
from .solver import Schedule, SolveReport, solve_exact, solve_greedy, validate_schedule

__all__ = [
    "ALL_MODES",
    "Association",
    "ConflictGraph",
    "CoordinationMode",
    "Fading",
    "FeasibleSetSpec",
    "NetworkConfig",
    "NetworkInstance",
    "Schedule",
    "SolveReport",
    "SweepSpec",
    "TrialResult",
    "UtilityTensor",
    "are_conflicting",
    "backend_name",
    "brute_force_opt",
    "build_graph",
    "count_feasible",
    "emit_csv",
    "enumerate_associations",
    "enumerate_feasible",
    "generate_instance",
    "run_sweep",
    "run_trial",
    "sinr",
    "solve_exact",
    "solve_greedy",
    "summarize",
    "use_backend",
    "utility_tensor",
    "validate_schedule",
]
