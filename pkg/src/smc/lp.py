"""src/smc/lp.py — 线性可行性检查（scipy HiGHS）"""
from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import linprog

from src.errors import NumericalFailure
from src.smc.types import Feasible, Infeasible, LinearConstraintSystem, LpResult

logger = logging.getLogger(__name__)

LP_TOL = 1e-7


def _violation(point: np.ndarray, A_ub, b_ub, A_eq, b_eq) -> float:
    worst = 0.0
    if len(b_ub):
        worst = max(worst, float(np.max((A_ub @ point - b_ub) / (1.0 + np.abs(b_ub)))))
    if len(b_eq):
        worst = max(worst, float(np.max(np.abs(A_eq @ point - b_eq) / (1.0 + np.abs(b_eq)))))
    return worst


def _linprog(A_ub, b_ub, A_eq, b_eq, n: int, tol: float, presolve: bool):
    return linprog(
        np.zeros(n),
        A_ub=A_ub if len(b_ub) else None,
        b_ub=b_ub if len(b_ub) else None,
        A_eq=A_eq if len(b_eq) else None,
        b_eq=b_eq if len(b_eq) else None,
        bounds=[(None, None)] * n,
        method="highs",
        options={"primal_feasibility_tolerance": tol * 1e-2, "presolve": presolve},
    )


def solve_arrays(
    A_ub: np.ndarray,
    b_ub: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    n: int,
    tol: float = LP_TOL,
) -> LpResult:
    """
    {A_ub x ≤ b_ub, A_eq x = b_eq} 的可行性，变量无界

    Raises:
        NumericalFailure: 求解器既不能给出满足容差的点，也不能证明不可行
    """
    if n == 0:
        ok = np.all(b_ub >= -tol) and np.all(np.abs(b_eq) <= tol)
        return Feasible(point=np.zeros(0)) if ok else Infeasible(certificate="trivial")

    res = _linprog(A_ub, b_ub, A_eq, b_eq, n, tol, presolve=True)
    if res.status in (3, 4):
        # presolve 有时只能报告 "infeasible or unbounded"；零目标下不可能无界，关掉 presolve 重解
        res = _linprog(A_ub, b_ub, A_eq, b_eq, n, tol, presolve=False)
    if res.status == 0:
        point = np.asarray(res.x, dtype=float)
        worst = _violation(point, A_ub, b_ub, A_eq, b_eq)
        if worst > tol:
            raise NumericalFailure(f"LP point violates constraints by {worst:.3g} (> {tol:g})")
        return Feasible(point=point)
    if res.status == 2:
        return Infeasible(certificate=f"highs:{res.message}")
    raise NumericalFailure(f"LP solver status {res.status}: {res.message}")


def lp_feasible(sys: LinearConstraintSystem, tol: float = LP_TOL) -> LpResult:
    """线性约束系统的可行性；Feasible 的点通过逐约束代入检查（容差 tol）"""
    A_ub, b_ub, A_eq, b_eq = sys.compile()
    result = solve_arrays(A_ub, b_ub, A_eq, b_eq, len(sys.variables), tol)
    if isinstance(result, Feasible) and sys.violation(result.point) > tol:
        raise NumericalFailure("LP point failed the substitution check")
    return result
