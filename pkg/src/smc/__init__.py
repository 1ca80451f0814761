"""src/smc — 单调可满足性模凸优化（SAT + LP + IIS）"""
from src.smc.cache import fingerprint, load_cached_result, load_conflict_dir, load_conflicts, save_conflicts
from src.smc.encoding import MonotoneSmcProblem, encode_region, encode_transition
from src.smc.iis import deletion_filter, extract_iis
from src.smc.lp import LP_TOL, lp_feasible
from src.smc.solver import preprocess_problem, preprocess_region, smc_solve
from src.smc.types import (
    Conflict,
    Constraint,
    Feasible,
    Infeasible,
    LinearConstraintSystem,
    PreprocessResult,
    SmcOutcome,
    Witness,
)

__all__ = [
    "LP_TOL",
    "Conflict",
    "Constraint",
    "Feasible",
    "Infeasible",
    "LinearConstraintSystem",
    "MonotoneSmcProblem",
    "PreprocessResult",
    "SmcOutcome",
    "Witness",
    "deletion_filter",
    "encode_region",
    "encode_transition",
    "extract_iis",
    "fingerprint",
    "load_cached_result",
    "load_conflict_dir",
    "load_conflicts",
    "lp_feasible",
    "preprocess_problem",
    "preprocess_region",
    "save_conflicts",
    "smc_solve",
]
