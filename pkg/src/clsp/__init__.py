"""Heuristics, improvement searches, and benchmarks for capacitated lot sizing."""

from .adaptive import DEFAULT_GRID, ArppResult, run_arpp
from .bench import (
    ConfigError,
    METHODS,
    RunReport,
    gap,
    run_bench,
    run_method,
    run_sweep,
)
from .elimination import LE_VARIANTS, LeConfig, LeResult, run_le
from .flow import (
    FixedSetupSolver,
    LpResult,
    exact_optimum,
    solve_fixed_setup,
)
from .generator import (
    CELLS,
    FactorCell,
    cell_for_letters,
    generate_instance,
    generate_suite,
    parse_size,
)
from .indices import PRESETS, RuleConfig
from .model import (
    CostBreakdown,
    InfeasibleInstanceError,
    Instance,
    Plan,
    PlanIssue,
    check_plan,
    cost_scaled,
    evaluate_cost,
    instance_feasible,
    inventory_scaled,
    is_feasible_plan,
    lot_for_lot,
)
from .pbp import (
    PERTURBATION_SCHEMES,
    PbpResult,
    RppResult,
    run_pbp,
    run_rpp,
)
from .tabu import TabuConfig, TabuResult, run_tabu, tabu_tenure

__all__ = [
    "ArppResult",
    "CELLS",
    "ConfigError",
    "CostBreakdown",
    "DEFAULT_GRID",
    "FactorCell",
    "FixedSetupSolver",
    "InfeasibleInstanceError",
    "Instance",
    "LE_VARIANTS",
    "LeConfig",
    "LeResult",
    "LpResult",
    "METHODS",
    "PERTURBATION_SCHEMES",
    "PRESETS",
    "Plan",
    "PlanIssue",
    "PbpResult",
    "RppResult",
    "RuleConfig",
    "RunReport",
    "TabuConfig",
    "TabuResult",
    "cell_for_letters",
    "check_plan",
    "cost_scaled",
    "evaluate_cost",
    "exact_optimum",
    "gap",
    "generate_instance",
    "generate_suite",
    "instance_feasible",
    "inventory_scaled",
    "is_feasible_plan",
    "lot_for_lot",
    "parse_size",
    "run_arpp",
    "run_bench",
    "run_le",
    "run_method",
    "run_pbp",
    "run_rpp",
    "run_sweep",
    "run_tabu",
    "solve_fixed_setup",
    "tabu_tenure",
]

__version__ = "0.1.0"
